#include "lspce/poly_basis.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "lspce/error.hpp"

namespace lspce {

InputModel::InputModel(std::vector<UniformVariable> variables) : variables_(std::move(variables)) {
  if (variables_.empty()) throw Error("invalid_argument", "input model needs at least one variable");
  for (std::size_t n = 0; n < variables_.size(); ++n) {
    const auto& v = variables_[n];
    if (!(std::isfinite(v.lower) && std::isfinite(v.upper) && v.lower < v.upper)) {
      std::ostringstream msg;
      msg << "variable " << n + 1 << " has invalid bounds [" << v.lower << ", " << v.upper << "]";
      throw Error("invalid_argument", msg.str());
    }
  }
}

InputModel InputModel::around_nominal(std::span<const double> nominal, double relative_spread) {
  std::vector<UniformVariable> vars;
  vars.reserve(nominal.size());
  for (double v : nominal) {
    const double delta = std::abs(v) * relative_spread;
    vars.push_back({v - delta, v + delta});
  }
  return InputModel(std::move(vars));
}

void to_reference(const InputModel& model, std::span<const double> y, std::span<double> out) {
  if (y.size() != model.dimension() || out.size() != model.dimension()) {
    throw Error("dimension_mismatch", "point has " + std::to_string(y.size()) +
                                          " coordinates, input model has " +
                                          std::to_string(model.dimension()));
  }
  for (std::size_t n = 0; n < y.size(); ++n) {
    const auto& v = model[n];
    const double slack = kBoundsTolerance * v.width();
    double yn = y[n];
    if (!(yn >= v.lower - slack && yn <= v.upper + slack)) {
      std::ostringstream msg;
      msg.precision(17);
      msg << "coordinate " << n + 1 << " = " << yn << " outside [" << v.lower << ", " << v.upper
          << "]";
      throw Error("out_of_bounds", msg.str());
    }
    double x = 2.0 * (yn - v.lower) / v.width() - 1.0;
    out[n] = std::clamp(x, -1.0, 1.0);
  }
}

std::vector<double> to_reference(const InputModel& model, std::span<const double> y) {
  std::vector<double> x(y.size());
  to_reference(model, y, x);
  return x;
}

std::vector<double> from_reference(const InputModel& model, std::span<const double> x) {
  if (x.size() != model.dimension()) {
    throw Error("dimension_mismatch", "point has " + std::to_string(x.size()) +
                                          " coordinates, input model has " +
                                          std::to_string(model.dimension()));
  }
  std::vector<double> y(x.size());
  for (std::size_t n = 0; n < x.size(); ++n) {
    y[n] = model[n].lower + 0.5 * (x[n] + 1.0) * model[n].width();
  }
  return y;
}

void legendre_all(double x, std::span<double> out) {
  if (out.empty()) return;
  // Standard Legendre recurrence (p+1) P_{p+1} = (2p+1) x P_p - p P_{p-1},
  // scaled afterwards by sqrt(2p+1).
  double prev = 1.0;
  double cur = x;
  out[0] = 1.0;
  if (out.size() > 1) out[1] = std::sqrt(3.0) * x;
  for (std::size_t p = 1; p + 1 < out.size(); ++p) {
    const double pd = static_cast<double>(p);
    const double next = ((2.0 * pd + 1.0) * x * cur - pd * prev) / (pd + 1.0);
    prev = cur;
    cur = next;
    out[p + 1] = std::sqrt(2.0 * pd + 3.0) * next;
  }
}

double legendre(unsigned degree, double x) {
  if (degree == 0) return 1.0;
  double prev = 1.0;
  double cur = x;
  for (unsigned p = 1; p < degree; ++p) {
    const double pd = p;
    const double next = ((2.0 * pd + 1.0) * x * cur - pd * prev) / (pd + 1.0);
    prev = cur;
    cur = next;
  }
  return std::sqrt(2.0 * degree + 1.0) * cur;
}

double eval_multivariate_reference(const MultiIndex& index, std::span<const double> x) {
  if (index.dimension() != x.size()) {
    throw Error("dimension_mismatch", "multi-index dimension " + std::to_string(index.dimension()) +
                                          " vs point dimension " + std::to_string(x.size()));
  }
  double v = 1.0;
  for (std::size_t n = 0; n < x.size(); ++n) {
    if (index[n] != 0) v *= legendre(index[n], x[n]);
  }
  return v;
}

double eval_multivariate(const MultiIndex& index, const InputModel& model,
                         std::span<const double> y) {
  return eval_multivariate_reference(index, to_reference(model, y));
}

std::vector<double> eval_basis_row_reference(const MultiIndexSet& set,
                                             std::span<const double> x) {
  if (set.dimension() != x.size()) {
    throw Error("dimension_mismatch", "index set dimension " + std::to_string(set.dimension()) +
                                          " vs point dimension " + std::to_string(x.size()));
  }
  UnivariateTable table(x, set.max_degree());
  std::vector<double> row;
  row.reserve(set.size());
  for (const auto& p : set) row.push_back(table.basis(p));
  return row;
}

std::vector<double> eval_basis_row(const MultiIndexSet& set, const InputModel& model,
                                   std::span<const double> y) {
  if (set.dimension() != model.dimension()) {
    throw Error("dimension_mismatch", "index set dimension " + std::to_string(set.dimension()) +
                                          " vs input model dimension " +
                                          std::to_string(model.dimension()));
  }
  return eval_basis_row_reference(set, to_reference(model, y));
}

UnivariateTable::UnivariateTable(std::span<const double> x, unsigned max_degree)
    : stride_(static_cast<std::size_t>(max_degree) + 1), values_(x.size() * stride_) {
  for (std::size_t n = 0; n < x.size(); ++n) {
    legendre_all(x[n], std::span<double>(values_).subspan(n * stride_, stride_));
  }
}

double UnivariateTable::basis(const MultiIndex& index) const {
  double v = 1.0;
  const auto& e = index.exponents();
  for (std::size_t n = 0; n < e.size(); ++n) {
    if (e[n] != 0) v *= values_[n * stride_ + e[n]];
  }
  return v;
}

}  // namespace lspce

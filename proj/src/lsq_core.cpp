#include "lspce/lsq_core.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <optional>

#include "lspce/error.hpp"

namespace lspce {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

StabilityReport degenerate_report(bool underdetermined, double lambda_min) {
  StabilityReport r;
  r.cond_design = kInf;
  r.lambda_min_G = lambda_min;
  r.lambda_max_Ginv = kInf;
  r.trace_Ginv = kInf;
  r.underdetermined = underdetermined;
  return r;
}

// Back-substitution on the leading M x M upper triangle, with the rank check
// shared by solve_ls and IncrementalQr.
template <typename Derived>
Vector triangular_solve(const Eigen::MatrixBase<Derived>& r, const Vector& rhs) {
  const Eigen::Index m = r.cols();
  double max_diag = 0.0;
  for (Eigen::Index i = 0; i < m; ++i) max_diag = std::max(max_diag, std::abs(r(i, i)));
  for (Eigen::Index i = 0; i < m; ++i) {
    if (!(std::abs(r(i, i)) > kRankTolerance * max_diag)) {
      throw Error("rank_deficient", "design matrix is rank-deficient (|R_" + std::to_string(i) +
                                        "," + std::to_string(i) + "| below " +
                                        "1e-12 of the largest diagonal entry)");
    }
  }
  return r.topLeftCorner(m, m).template triangularView<Eigen::Upper>().solve(rhs.head(m));
}

}  // namespace

DesignMatrix assemble_reference(const MultiIndexSet& set, std::span<const Point> design) {
  if (design.empty()) throw Error("invalid_argument", "experimental design is empty");
  DesignMatrix d(static_cast<Eigen::Index>(design.size()), static_cast<Eigen::Index>(set.size()));
  const unsigned max_degree = set.max_degree();
  for (std::size_t l = 0; l < design.size(); ++l) {
    if (design[l].size() != set.dimension()) {
      throw Error("dimension_mismatch", "design point " + std::to_string(l) + " has " +
                                            std::to_string(design[l].size()) +
                                            " coordinates, basis has " +
                                            std::to_string(set.dimension()));
    }
    UnivariateTable table(design[l], max_degree);
    for (std::size_t m = 0; m < set.size(); ++m) {
      d(static_cast<Eigen::Index>(l), static_cast<Eigen::Index>(m)) = table.basis(set[m]);
    }
  }
  return d;
}

DesignMatrix assemble(const MultiIndexSet& set, const InputModel& model,
                      std::span<const Point> design) {
  if (design.empty()) throw Error("invalid_argument", "experimental design is empty");
  if (set.dimension() != model.dimension()) {
    throw Error("dimension_mismatch", "basis dimension " + std::to_string(set.dimension()) +
                                          " vs input model dimension " +
                                          std::to_string(model.dimension()));
  }
  std::vector<Point> reference;
  reference.reserve(design.size());
  for (const auto& y : design) reference.push_back(to_reference(model, y));
  return assemble_reference(set, reference);
}

Vector solve_ls(const DesignMatrix& design, const Vector& observations) {
  const Eigen::Index l = design.rows();
  const Eigen::Index m = design.cols();
  if (observations.size() != l) {
    throw Error("dimension_mismatch", "observation vector has " +
                                          std::to_string(observations.size()) + " entries, design has " +
                                          std::to_string(l) + " rows");
  }
  if (l < m) {
    throw Error("underdetermined", "least-squares system has " + std::to_string(l) +
                                       " rows for " + std::to_string(m) + " unknowns");
  }
  Eigen::HouseholderQR<DesignMatrix> qr(design);
  Vector qtb = qr.householderQ().adjoint() * observations;
  return triangular_solve(qr.matrixQR().topRows(m), qtb);
}

StabilityReport stability(const DesignMatrix& design) {
  const auto l = static_cast<std::size_t>(design.rows());
  const auto m = static_cast<std::size_t>(design.cols());
  if (l < m || m == 0) return degenerate_report(true, 0.0);

  Eigen::BDCSVD<DesignMatrix> svd(design);
  const Vector& sigma = svd.singularValues();  // descending
  const double smax = sigma(0);
  const double smin = sigma(static_cast<Eigen::Index>(m) - 1);
  const double inv_l = 1.0 / static_cast<double>(l);
  if (!(smax > 0.0) || !(smin > kRankTolerance * smax)) {
    return degenerate_report(false, smin * smin * inv_l);
  }
  StabilityReport r;
  r.cond_design = smax / smin;
  r.lambda_min_G = smin * smin * inv_l;
  r.lambda_max_Ginv = 1.0 / r.lambda_min_G;
  double trace = 0.0;
  for (Eigen::Index i = 0; i < sigma.size(); ++i) trace += 1.0 / (sigma(i) * sigma(i) * inv_l);
  r.trace_Ginv = trace;
  return r;
}

StabilityReport stability_from_information(const Eigen::MatrixXd& information, std::size_t rows) {
  const auto m = static_cast<std::size_t>(information.rows());
  if (rows < m || m == 0) return degenerate_report(true, 0.0);

  const double inv_l = 1.0 / static_cast<double>(rows);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(information * inv_l, Eigen::EigenvaluesOnly);
  if (eig.info() != Eigen::Success) return degenerate_report(false, 0.0);
  const Vector& lambda = eig.eigenvalues();  // ascending
  const double lmin = lambda(0);
  const double lmax = lambda(static_cast<Eigen::Index>(m) - 1);
  // Eigenvalues of D^T D carry absolute error ~ eps * M * lambda_max.
  const double floor = 64.0 * std::numeric_limits<double>::epsilon() * static_cast<double>(m);
  if (!(lmax > 0.0) || !(lmin > floor * lmax)) return degenerate_report(false, lmin);

  StabilityReport r;
  r.cond_design = std::sqrt(lmax / lmin);
  r.lambda_min_G = lmin;
  r.lambda_max_Ginv = 1.0 / lmin;
  double trace = 0.0;
  for (Eigen::Index i = 0; i < lambda.size(); ++i) trace += 1.0 / lambda(i);
  r.trace_Ginv = trace;
  return r;
}

namespace {

constexpr Eigen::Index kDenseEigenLimit = 160;
constexpr double kLanczosTolerance = 1e-12;

// Largest eigenvalue of a symmetric operator by Lanczos with full
// reorthogonalization. Returns nullopt when the residual bound does not reach
// the tolerance within `max_steps`.
template <typename Apply>
std::optional<double> lanczos_largest(Apply apply, Eigen::Index n, Eigen::Index max_steps) {
  max_steps = std::min(max_steps, n);
  Eigen::MatrixXd v(n, max_steps + 1);
  for (Eigen::Index i = 0; i < n; ++i) v(i, 0) = 1.0 + 0.5 * std::sin(static_cast<double>(i + 1));
  v.col(0).normalize();
  Vector alpha(max_steps);
  Vector beta(max_steps);
  Vector w(n);
  for (Eigen::Index j = 0; j < max_steps; ++j) {
    apply(v.col(j), w);
    alpha(j) = v.col(j).dot(w);
    for (int pass = 0; pass < 2; ++pass) {
      const Vector h = v.leftCols(j + 1).transpose() * w;
      w.noalias() -= v.leftCols(j + 1) * h;
    }
    beta(j) = w.norm();
    const bool last = j + 1 == max_steps;
    if (j >= 4 && (j % 4 == 0 || last)) {
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> tri;
      tri.computeFromTridiagonal(alpha.head(j + 1), beta.head(j), Eigen::ComputeEigenvectors);
      const double theta = tri.eigenvalues()(j);
      const double residual = std::abs(beta(j) * tri.eigenvectors()(j, j));
      if (residual <= kLanczosTolerance * std::abs(theta)) return theta;
    }
    if (beta(j) <= std::numeric_limits<double>::min()) {
      // Invariant subspace found: the Ritz values are exact.
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> tri;
      tri.computeFromTridiagonal(alpha.head(j + 1), beta.head(j), Eigen::EigenvaluesOnly);
      return tri.eigenvalues()(j);
    }
    if (!last) v.col(j + 1) = w / beta(j);
  }
  return std::nullopt;
}

ExtremeEigenvalues dense_extremes(const Eigen::MatrixXd& a) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(a, Eigen::EigenvaluesOnly);
  ExtremeEigenvalues out;
  out.min = eig.eigenvalues()(0);
  out.max = eig.eigenvalues()(a.rows() - 1);
  return out;
}

}  // namespace

ExtremeEigenvalues extreme_eigenvalues(const Eigen::MatrixXd& a) {
  const Eigen::Index n = a.rows();
  if (n == 0) throw Error("invalid_argument", "empty matrix");
  if (n <= kDenseEigenLimit) return dense_extremes(a);

  Eigen::LLT<Eigen::MatrixXd> llt(a);
  if (llt.info() != Eigen::Success) {
    ExtremeEigenvalues out = dense_extremes(a);
    out.singular = true;
    return out;
  }
  const auto sym = a.selfadjointView<Eigen::Lower>();
  const Eigen::Index steps = 300;
  const auto top = lanczos_largest(
      [&](const auto& x, Vector& y) { y.noalias() = sym * x; }, n, steps);
  const auto inv_bottom = lanczos_largest(
      [&](const auto& x, Vector& y) { y = llt.solve(x); }, n, steps);
  if (!top || !inv_bottom) return dense_extremes(a);
  return {1.0 / *inv_bottom, *top, false};
}

StabilityReport gate_stability(const Eigen::MatrixXd& information, std::size_t rows,
                               Criterion criterion) {
  const auto m = static_cast<std::size_t>(information.rows());
  if (criterion == Criterion::A || m <= static_cast<std::size_t>(kDenseEigenLimit)) {
    return stability_from_information(information, rows);
  }
  if (rows < m) return degenerate_report(true, 0.0);
  const ExtremeEigenvalues e = extreme_eigenvalues(information);
  const double inv_l = 1.0 / static_cast<double>(rows);
  const double floor = 64.0 * std::numeric_limits<double>::epsilon() * static_cast<double>(m);
  if (e.singular || !(e.max > 0.0) || !(e.min > floor * e.max)) {
    return degenerate_report(false, e.singular ? 0.0 : e.min * inv_l);
  }
  StabilityReport r;
  r.cond_design = std::sqrt(e.max / e.min);
  r.lambda_min_G = e.min * inv_l;
  r.lambda_max_Ginv = 1.0 / r.lambda_min_G;
  r.trace_Ginv = std::numeric_limits<double>::quiet_NaN();
  return r;
}

Criterion parse_criterion(std::string_view name) {
  if (name == "K") return Criterion::K;
  if (name == "E") return Criterion::E;
  if (name == "A") return Criterion::A;
  throw Error("invalid_argument",
              "unknown criterion '" + std::string(name) + "' (expected K, E or A)");
}

std::string to_string(Criterion criterion) {
  switch (criterion) {
    case Criterion::K: return "K";
    case Criterion::E: return "E";
    case Criterion::A: return "A";
  }
  return "?";
}

double parse_limit(std::string_view text) {
  auto parse_number = [&](std::string_view s) {
    std::string str(s);
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(str, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used == 0 || used != str.size()) {
      throw Error("invalid_argument", "malformed limit '" + std::string(text) + "'");
    }
    return v;
  };
  double v = 0.0;
  if (text.starts_with("sqrt(") && text.ends_with(")")) {
    v = std::sqrt(parse_number(text.substr(5, text.size() - 6)));
  } else {
    v = parse_number(text);
  }
  if (!(v > 0.0) || !std::isfinite(v)) {
    throw Error("invalid_argument", "limit must be a positive finite number, got '" +
                                        std::string(text) + "'");
  }
  return v;
}

Gate parse_gate(std::string_view text) {
  const auto colon = text.find(':');
  if (colon == std::string_view::npos) {
    throw Error("invalid_argument",
                "malformed gate '" + std::string(text) + "' (expected e.g. K:10)");
  }
  return Gate{parse_criterion(text.substr(0, colon)), parse_limit(text.substr(colon + 1))};
}

std::string to_string(const Gate& gate) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", gate.limit);
  return to_string(gate.criterion) + ":" + buf;
}

double criterion_value(const StabilityReport& report, Criterion criterion) {
  switch (criterion) {
    case Criterion::K: return report.cond_design;
    case Criterion::E: return report.lambda_max_Ginv;
    case Criterion::A: return report.trace_Ginv;
  }
  throw Error("invalid_argument", "unknown criterion");
}

bool criterion_satisfied(const StabilityReport& report, Criterion criterion, double limit) {
  if (!(limit > 0.0)) throw Error("invalid_argument", "criterion limit must be positive");
  if (report.underdetermined) return false;
  return criterion_value(report, criterion) <= limit;
}

IncrementalQr::IncrementalQr(std::size_t columns)
    : r_(Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(columns),
                               static_cast<Eigen::Index>(columns))),
      qtb_(Vector::Zero(static_cast<Eigen::Index>(columns))) {}

void IncrementalQr::factor(const DesignMatrix& design, const Vector& observations) {
  const Eigen::Index m = design.cols();
  const Eigen::Index l = design.rows();
  r_.setZero(m, m);
  qtb_.setZero(m);
  rows_ = static_cast<std::size_t>(l);
  if (l == 0 || m == 0) return;
  Eigen::HouseholderQR<DesignMatrix> qr(design);
  const Eigen::Index k = std::min(l, m);
  r_.topRows(k) = qr.matrixQR().topRows(k).triangularView<Eigen::Upper>();
  Vector qtb = qr.householderQ().adjoint() * observations;
  qtb_.head(k) = qtb.head(k);
}

void IncrementalQr::add_row(std::span<const double> row, double observation) {
  const Eigen::Index m = r_.cols();
  if (static_cast<Eigen::Index>(row.size()) != m) {
    throw Error("dimension_mismatch", "row has " + std::to_string(row.size()) +
                                          " entries, factor has " + std::to_string(m) + " columns");
  }
  Vector w = Eigen::Map<const Vector>(row.data(), m);
  double beta = observation;
  for (Eigen::Index i = 0; i < m; ++i) {
    if (w(i) == 0.0) continue;
    const double rii = r_(i, i);
    const double rho = std::hypot(rii, w(i));
    const double c = rii / rho;
    const double s = w(i) / rho;
    r_(i, i) = rho;
    w(i) = 0.0;
    for (Eigen::Index j = i + 1; j < m; ++j) {
      const double a = r_(i, j);
      const double b = w(j);
      r_(i, j) = c * a + s * b;
      w(j) = c * b - s * a;
    }
    const double z = qtb_(i);
    qtb_(i) = c * z + s * beta;
    beta = c * beta - s * z;
  }
  ++rows_;
}

Vector IncrementalQr::solve() const {
  const auto m = static_cast<std::size_t>(r_.cols());
  if (rows_ < m) {
    throw Error("underdetermined", "least-squares system has " + std::to_string(rows_) +
                                       " rows for " + std::to_string(m) + " unknowns");
  }
  return triangular_solve(r_, qtb_);
}

}  // namespace lspce

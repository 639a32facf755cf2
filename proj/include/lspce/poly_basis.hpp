#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "lspce/multi_index.hpp"

namespace lspce {

/// Uniform random variable on [lower, upper], in the parameter's physical units.
struct UniformVariable {
  double lower;
  double upper;

  double width() const noexcept { return upper - lower; }
  double mean() const noexcept { return 0.5 * (lower + upper); }
};

/// Independent uniform inputs; the joint density is the product of marginals.
class InputModel {
 public:
  explicit InputModel(std::vector<UniformVariable> variables);

  /// Each variable uniform on nominal * (1 -/+ relative_spread).
  static InputModel around_nominal(std::span<const double> nominal, double relative_spread);

  std::size_t dimension() const noexcept { return variables_.size(); }
  const UniformVariable& operator[](std::size_t n) const { return variables_[n]; }
  const std::vector<UniformVariable>& variables() const noexcept { return variables_; }

  friend bool operator==(const InputModel& a, const InputModel& b) {
    if (a.variables_.size() != b.variables_.size()) return false;
    for (std::size_t n = 0; n < a.variables_.size(); ++n) {
      if (a.variables_[n].lower != b.variables_[n].lower ||
          a.variables_[n].upper != b.variables_[n].upper) {
        return false;
      }
    }
    return true;
  }

 private:
  std::vector<UniformVariable> variables_;
};

/// Relative overshoot (in units of a variable's width) tolerated and clamped
/// by to_reference.
inline constexpr double kBoundsTolerance = 1e-12;

/// Affine map of a physical point onto [-1, 1]^N (lower -> -1, upper -> +1).
/// Throws "dimension_mismatch" or "out_of_bounds".
std::vector<double> to_reference(const InputModel& model, std::span<const double> y);
void to_reference(const InputModel& model, std::span<const double> y, std::span<double> out);

/// Inverse of to_reference.
std::vector<double> from_reference(const InputModel& model, std::span<const double> x);

/// Orthonormal Legendre polynomial sqrt(2p+1) P_p(x), unit second moment under
/// the uniform density on [-1, 1]. Three-term recurrence.
double legendre(unsigned degree, double x);

/// psi_0(x), ..., psi_{out.size()-1}(x) in one recurrence sweep.
void legendre_all(double x, std::span<double> out);

/// Tensorized basis value at a point given in reference coordinates.
double eval_multivariate_reference(const MultiIndex& index, std::span<const double> x);

/// Tensorized basis value at a physical point.
double eval_multivariate(const MultiIndex& index, const InputModel& model,
                         std::span<const double> y);

/// Basis values for every member of `set`, in set order, at a physical point.
std::vector<double> eval_basis_row(const MultiIndexSet& set, const InputModel& model,
                                   std::span<const double> y);
std::vector<double> eval_basis_row_reference(const MultiIndexSet& set,
                                             std::span<const double> x);

/// Per-coordinate table of psi_0..psi_{max_degree} at one reference point,
/// used to evaluate many basis functions at the same point cheaply.
class UnivariateTable {
 public:
  UnivariateTable(std::span<const double> x, unsigned max_degree);

  double operator()(std::size_t coordinate, unsigned degree) const {
    return values_[coordinate * stride_ + degree];
  }
  unsigned max_degree() const noexcept { return static_cast<unsigned>(stride_ - 1); }

  /// Product over coordinates; index degrees must not exceed max_degree().
  double basis(const MultiIndex& index) const;

 private:
  std::size_t stride_;
  std::vector<double> values_;
};

}  // namespace lspce

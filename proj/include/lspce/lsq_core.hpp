#pragma once

#include <Eigen/Dense>
#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "lspce/multi_index.hpp"
#include "lspce/poly_basis.hpp"

namespace lspce {

/// L x M matrix with d_lm = Psi_m(y_l).
using DesignMatrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using Point = std::vector<double>;

/// Relative tolerance on |R_ii| / max_i |R_ii| below which a QR factor is
/// treated as rank-deficient.
inline constexpr double kRankTolerance = 1e-12;

/// Rows in design order, columns in set order. Throws "invalid_argument" for
/// an empty design and "out_of_bounds" for points outside the input model.
DesignMatrix assemble(const MultiIndexSet& set, const InputModel& model,
                      std::span<const Point> design);
DesignMatrix assemble_reference(const MultiIndexSet& set, std::span<const Point> design);

/// Least-squares solution of min ||D s - b||_2 through a Householder QR of D.
/// Throws "underdetermined" (L < M) or "rank_deficient".
Vector solve_ls(const DesignMatrix& design, const Vector& observations);

/// Stability measures of a design matrix. The three gate measures are +inf
/// when the system is underdetermined or numerically singular.
struct StabilityReport {
  double cond_design = 1.0;      ///< kappa(D)
  double lambda_min_G = 1.0;     ///< smallest eigenvalue of G = D^T D / L
  double lambda_max_Ginv = 1.0;  ///< 1 / lambda_min(G)
  double trace_Ginv = 1.0;       ///< sum of 1 / lambda_m(G)
  bool underdetermined = false;

  /// kappa(G) = kappa(D)^2
  double cond_information() const noexcept { return cond_design * cond_design; }
};

/// Measures from the singular values of D: lambda_m(G) = sigma_m^2 / L.
StabilityReport stability(const DesignMatrix& design);

/// Same measures from the information matrix A = D^T D of an L-row design
/// (only the lower triangle is read). Cheaper than an SVD of D when L >> M.
StabilityReport stability_from_information(const Eigen::MatrixXd& information, std::size_t rows);

enum class Criterion;

/// Smallest and largest eigenvalue of a symmetric positive semi-definite
/// matrix (lower triangle read).
struct ExtremeEigenvalues {
  double min = 0.0;
  double max = 0.0;
  bool singular = false;  ///< Cholesky breakdown; `min` is then meaningless
};

/// Dense solve for small matrices; above that, Lanczos on A for the top and
/// shift-invert Lanczos (through a Cholesky factor) for the bottom, each
/// stopped once the Ritz residual certifies 1e-12 relative accuracy, with a
/// dense fallback if that does not happen.
ExtremeEigenvalues extreme_eigenvalues(const Eigen::MatrixXd& symmetric);

/// Gate measures of A = D^T D for one criterion. K and E go through
/// extreme_eigenvalues and leave trace_Ginv as NaN; A uses the full spectrum.
StabilityReport gate_stability(const Eigen::MatrixXd& information, std::size_t rows,
                               Criterion criterion);

/// Optimality criteria gating the dataset expansion: K bounds kappa(D),
/// E bounds lambda_max(G^-1), A bounds tr(G^-1).
enum class Criterion { K, E, A };

Criterion parse_criterion(std::string_view name);
std::string to_string(Criterion criterion);

/// A criterion together with its limit.
struct Gate {
  Criterion criterion = Criterion::K;
  double limit = 10.0;

  friend bool operator==(const Gate&, const Gate&) = default;
};

/// "K:10" style text; limits accept the form "sqrt(3)" as well as decimals.
Gate parse_gate(std::string_view text);
double parse_limit(std::string_view text);
std::string to_string(const Gate& gate);

/// The report field the criterion bounds.
double criterion_value(const StabilityReport& report, Criterion criterion);

/// Underdetermined reports never pass. Throws "invalid_argument" for limit <= 0.
bool criterion_satisfied(const StabilityReport& report, Criterion criterion, double limit);
inline bool criterion_satisfied(const StabilityReport& report, const Gate& gate) {
  return criterion_satisfied(report, gate.criterion, gate.limit);
}

/// QR factor R and rotated right-hand side Q^T b of a growing least-squares
/// system. Rows are appended with Givens rotations, so refitting after each
/// new observation costs O(M^2) instead of a fresh factorization.
class IncrementalQr {
 public:
  explicit IncrementalQr(std::size_t columns = 0);

  /// Householder factorization of a complete system, replacing any state.
  void factor(const DesignMatrix& design, const Vector& observations);

  void add_row(std::span<const double> row, double observation);

  std::size_t rows() const noexcept { return rows_; }
  std::size_t columns() const noexcept { return static_cast<std::size_t>(r_.cols()); }

  /// Same contract and errors as solve_ls.
  Vector solve() const;

 private:
  Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> r_;
  Vector qtb_;
  std::size_t rows_ = 0;
};

}  // namespace lspce

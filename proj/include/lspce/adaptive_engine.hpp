#pragma once

#include <cstddef>
#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "lspce/lsq_core.hpp"
#include "lspce/multi_index.hpp"
#include "lspce/poly_basis.hpp"
#include "lspce/seq_design.hpp"

namespace lspce {

/// One row per dataset size L.
struct HistoryRow {
  std::size_t evaluations = 0;  ///< L
  std::size_t terms = 0;        ///< #Lambda
  std::size_t ls_terms = 0;     ///< #Lambda^LS
  double criterion_value = 0.0;
  double heldout_error = 0.0;
};

struct BuildInfo {
  Gate gate;
  std::uint64_t seed = 0;
  std::size_t evaluations = 0;  ///< final L
  std::string stop_reason;      ///< "max_evals", "max_terms" or "target_reached"
  std::string model_name;
  std::optional<double> time_unit;
  std::vector<HistoryRow> history;
};

/// g~(y) = sum_p s_p Psi_p(y) over a downward-closed set.
class PceModel {
 public:
  PceModel(MultiIndexSet set, Vector coefficients, InputModel input, BuildInfo info = {});

  const MultiIndexSet& index_set() const noexcept { return set_; }
  const Vector& coefficients() const noexcept { return coefficients_; }
  const InputModel& input_model() const noexcept { return input_; }
  const BuildInfo& build_info() const noexcept { return info_; }
  BuildInfo& build_info() noexcept { return info_; }

  /// Throws "out_of_bounds" / "dimension_mismatch" like to_reference.
  double evaluate(std::span<const double> y) const;
  double evaluate_reference(std::span<const double> x) const;
  std::vector<double> evaluate_many(std::span<const Point> points) const;

 private:
  MultiIndexSet set_;
  Vector coefficients_;
  InputModel input_;
  BuildInfo info_;
  unsigned max_degree_ = 0;
};

struct AdaptiveConfig {
  Gate gate;
  std::size_t max_terms = std::numeric_limits<std::size_t>::max();
  std::size_t max_evals = 1000;
  std::optional<double> target_error;
  std::size_t batch = 1;
  std::optional<std::size_t> initial_ed_size;  ///< default (N+1)+1, capped at max_evals
  std::optional<MultiIndexSet> initial_set;    ///< default the root {0}

  /// Throws "invalid_argument" on violated invariants.
  void validate(std::size_t dimension) const;
};

/// Picks p* = argmax s_p^2 over `admissible` given the coefficients of a
/// solve on `ls_set`. Indicators within a relative 1e-24 of the best count
/// as ties; the first in graded order wins.
MultiIndex select_index(const MultiIndexSet& ls_set, const Vector& ls_coefficients,
                        const MultiIndexSet& admissible);

struct GrowthStep {
  MultiIndexSet ls_set;    ///< Lambda u adm(Lambda), Lambda's order first
  Vector ls_coefficients;  ///< solve on ls_set
  MultiIndex selected;
  MultiIndexSet set;       ///< Lambda u {p*}
  Vector coefficients;     ///< refit on `set`
};

/// One step of greedy basis growth on a fixed dataset. The caller is
/// responsible for the gate. LS errors propagate.
GrowthStep grow_basis_once(const MultiIndexSet& set, const InputModel& model,
                           std::span<const Point> design, std::span<const double> observations);

/// Hooks into a running build. Defaults do nothing.
class BuildObserver {
 public:
  virtual ~BuildObserver() = default;

  /// Gate test on Lambda^LS at the current L.
  virtual void on_gate(std::size_t /*evaluations*/, std::size_t /*ls_terms*/, double /*value*/,
                       bool /*satisfied*/) {}
  /// Any least-squares solve, with its row and column counts.
  virtual void on_solve(std::size_t /*rows*/, std::size_t /*columns*/) {}
  /// Lambda after a growth step.
  virtual void on_growth(const MultiIndexSet& /*set*/) {}
  /// End of the work at one dataset size. `model` holds the full-data fit.
  virtual void on_checkpoint(const HistoryRow& /*row*/, const PceModel& /*model*/,
                             const Dataset& /*dataset*/) {}
};

struct BuildResult {
  PceModel model;
  Dataset dataset;
};

/// Sequential design with gated basis growth: grow while the gate holds on
/// Lambda^LS, otherwise expand the dataset by `batch` points. Throws
/// "budget_exhausted" when max_evals < #Lambda^LS of the initial set.
BuildResult build(const AdaptiveConfig& config, const Evaluator& g, const InputModel& model,
                  std::uint64_t seed, BuildObserver* observer = nullptr);

/// Same algorithm, consuming `records` in file order instead of sampling.
/// Throws "dataset_exhausted" when the records are fewer than max_evals.
BuildResult build_from_dataset(const AdaptiveConfig& config, const Dataset& records,
                               const InputModel& model, BuildObserver* observer = nullptr);

}  // namespace lspce

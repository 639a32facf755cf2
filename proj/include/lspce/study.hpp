#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "lspce/adaptive_engine.hpp"
#include "lspce/bench_models.hpp"
#include "lspce/postproc.hpp"

namespace lspce {

/// Repeated builds over paired ED seeds, scored against one shared CV sample.
struct StudyConfig {
  std::vector<Gate> gates;
  std::size_t replicates = 20;
  std::uint64_t seed_base = 0;   ///< replicate r uses ED seed seed_base + r
  std::size_t max_evals = 1000;
  std::size_t batch = 1;
  std::size_t cv_size = 100000;
  std::optional<std::uint64_t> cv_seed;  ///< default seed_base (CV stream)
  std::size_t threads = 0;               ///< 0 picks the hardware concurrency

  void validate() const;
};

struct ReplicateRun {
  Gate gate;
  std::uint64_t seed = 0;
  std::vector<HistoryRow> history;
  std::vector<double> rms_cv;  ///< aligned with history
  std::size_t final_terms = 0;
};

struct StudyResult {
  std::vector<ReplicateRun> runs;     ///< gate-major, then replicate
  std::vector<ErrorRecord> records;   ///< one per run and checkpoint, same order
};

/// Observer scoring every checkpoint model on a fixed CV sample. Basis
/// columns over the CV points are cached per index, so one checkpoint costs
/// O(Q #Lambda).
class CvTracker : public BuildObserver {
 public:
  CvTracker(const InputModel& model, const std::vector<Point>& cv_points,
            const std::vector<double>& cv_values);

  void on_checkpoint(const HistoryRow& row, const PceModel& model,
                     const Dataset& dataset) override;

  const std::vector<double>& errors() const noexcept { return errors_; }

  /// RMS CV error of `model` (which must share the input model).
  double score(const PceModel& model);

 private:
  Eigen::Index column(const MultiIndex& index);

  Eigen::MatrixXd x_;                 // Q x N reference coordinates
  std::vector<Eigen::MatrixXd> uni_;  // uni_[n](q, d) = psi_d(x_qn)
  Eigen::MatrixXd columns_;
  std::unordered_map<MultiIndex, Eigen::Index, MultiIndexHash> ids_;
  Vector values_;
  std::vector<double> errors_;
};

using StudyProgress = std::function<void(const ReplicateRun&)>;

StudyResult run_study(const StudyConfig& config, const BenchModel& bench,
                      const StudyProgress& progress = {});

/// "criterion,limit,seed,L,rms_cv"
std::string study_csv(const std::vector<ErrorRecord>& records);
/// "criterion,limit,L,mean_log10_err,std_log10_err"
std::string statistics_csv(const std::vector<StudyStatistic>& stats);

}  // namespace lspce

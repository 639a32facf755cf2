#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "lspce/adaptive_engine.hpp"
#include "lspce/lsq_core.hpp"
#include "lspce/seq_design.hpp"

namespace lspce {

/// sqrt(mean((g~ - g)^2)) over the CV points. Evaluator failures propagate
/// as "evaluation_failed".
double rms_cv_error(const PceModel& model, const Evaluator& g, std::span<const Point> cv_points);

/// Same with precomputed observations g(y_q).
double rms_cv_error(const PceModel& model, std::span<const Point> cv_points,
                    std::span<const double> cv_values);

/// RMS of residuals, summed in index order.
double rms(std::span<const double> predicted, std::span<const double> observed);

struct MomentReport {
  double mean = 0.0;
  double variance = 0.0;
  std::vector<double> first_order;
  std::vector<double> total;
  bool zero_variance = false;  ///< Sobol vectors are all zero when set
};

/// Mean, variance and Sobol indices read off the coefficients.
MomentReport moments(const PceModel& model);

struct ErrorRecord {
  Gate gate;
  std::uint64_t seed = 0;
  std::size_t evaluations = 0;  ///< L
  double rms_cv = 0.0;
};

struct StudyStatistic {
  Gate gate;
  std::size_t evaluations = 0;
  std::size_t replicates = 0;
  double mean_log10 = 0.0;
  double std_log10 = 0.0;  ///< sample standard deviation
};

/// Mean and standard deviation of log10(rms_cv) per (gate, L). Gates keep
/// their order of first appearance; rows within a gate are sorted by L.
/// Throws "insufficient_replicates" for a group with fewer than 2 records.
std::vector<StudyStatistic> study_statistics(std::span<const ErrorRecord> records);

}  // namespace lspce

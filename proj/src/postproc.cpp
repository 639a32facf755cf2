#include "lspce/postproc.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "lspce/error.hpp"

namespace lspce {

double rms(std::span<const double> predicted, std::span<const double> observed) {
  if (predicted.size() != observed.size()) {
    throw Error("dimension_mismatch", "prediction and observation counts differ");
  }
  if (predicted.empty()) throw Error("invalid_argument", "cross-validation sample is empty");
  double sum = 0.0;
  for (std::size_t q = 0; q < predicted.size(); ++q) {
    const double r = predicted[q] - observed[q];
    sum += r * r;
  }
  return std::sqrt(sum / static_cast<double>(predicted.size()));
}

double rms_cv_error(const PceModel& model, std::span<const Point> cv_points,
                    std::span<const double> cv_values) {
  return rms(model.evaluate_many(cv_points), cv_values);
}

double rms_cv_error(const PceModel& model, const Evaluator& g, std::span<const Point> cv_points) {
  std::vector<double> values;
  values.reserve(cv_points.size());
  for (const auto& y : cv_points) values.push_back(evaluate_checked(g, y));
  return rms_cv_error(model, cv_points, values);
}

MomentReport moments(const PceModel& model) {
  const auto& set = model.index_set();
  const auto& s = model.coefficients();
  const std::size_t n = set.dimension();
  MomentReport report;
  report.first_order.assign(n, 0.0);
  report.total.assign(n, 0.0);

  for (std::size_t m = 0; m < set.size(); ++m) {
    const MultiIndex& p = set[m];
    const double c = s(static_cast<Eigen::Index>(m));
    if (p.is_zero()) {
      report.mean = c;
      continue;
    }
    const double partial = c * c;
    report.variance += partial;
    std::size_t active = 0;
    std::size_t last = 0;
    for (std::size_t k = 0; k < n; ++k) {
      if (p[k] > 0) {
        report.total[k] += partial;
        ++active;
        last = k;
      }
    }
    if (active == 1) report.first_order[last] += partial;
  }

  if (!(report.variance > 0.0)) {
    report.zero_variance = true;
    std::fill(report.first_order.begin(), report.first_order.end(), 0.0);
    std::fill(report.total.begin(), report.total.end(), 0.0);
    return report;
  }
  for (std::size_t k = 0; k < n; ++k) {
    report.first_order[k] /= report.variance;
    report.total[k] /= report.variance;
  }
  return report;
}

std::vector<StudyStatistic> study_statistics(std::span<const ErrorRecord> records) {
  if (records.empty()) throw Error("insufficient_replicates", "no error records to aggregate");
  std::vector<Gate> gates;
  for (const auto& r : records) {
    if (std::find(gates.begin(), gates.end(), r.gate) == gates.end()) gates.push_back(r.gate);
  }

  std::vector<StudyStatistic> out;
  for (const auto& gate : gates) {
    std::map<std::size_t, std::vector<double>> groups;
    for (const auto& r : records) {
      if (!(r.gate == gate)) continue;
      if (!(r.rms_cv >= 0.0) || !std::isfinite(r.rms_cv)) {
        throw Error("invalid_argument", "error record with non-finite or negative rms_cv");
      }
      groups[r.evaluations].push_back(std::log10(std::max(r.rms_cv, 1e-300)));
    }
    for (const auto& [evaluations, logs] : groups) {
      if (logs.size() < 2) {
        throw Error("insufficient_replicates",
                    "group " + to_string(gate) + " at L=" + std::to_string(evaluations) +
                        " has " + std::to_string(logs.size()) + " replicate(s), need >= 2");
      }
      double mean = 0.0;
      for (double v : logs) mean += v;
      mean /= static_cast<double>(logs.size());
      double ss = 0.0;
      for (double v : logs) ss += (v - mean) * (v - mean);
      out.push_back({gate, evaluations, logs.size(), mean,
                     std::sqrt(ss / static_cast<double>(logs.size() - 1))});
    }
  }
  return out;
}

}  // namespace lspce

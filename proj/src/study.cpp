#include "lspce/study.hpp"

#include <atomic>
#include <cmath>
#include <exception>
#include <mutex>
#include <thread>

#include "lspce/error.hpp"
#include "lspce/persistence.hpp"

namespace lspce {

void StudyConfig::validate() const {
  if (gates.empty()) throw Error("invalid_argument", "study needs at least one criterion");
  if (replicates == 0) throw Error("invalid_argument", "replicate count must be >= 1");
  if (cv_size == 0) throw Error("invalid_argument", "CV sample size must be >= 1");
  if (max_evals == 0) throw Error("invalid_argument", "budget must be >= 1");
  if (batch == 0) throw Error("invalid_argument", "batch size must be >= 1");
  for (const auto& g : gates) {
    if (!(g.limit > 0.0)) throw Error("invalid_argument", "criterion limit must be positive");
  }
}

CvTracker::CvTracker(const InputModel& model, const std::vector<Point>& cv_points,
                     const std::vector<double>& cv_values)
    : x_(static_cast<Eigen::Index>(cv_points.size()), static_cast<Eigen::Index>(model.dimension())),
      uni_(model.dimension()),
      values_(Eigen::Map<const Vector>(cv_values.data(), static_cast<Eigen::Index>(cv_values.size()))) {
  if (cv_points.size() != cv_values.size() || cv_points.empty()) {
    throw Error("invalid_argument", "CV points and values must be non-empty and aligned");
  }
  for (std::size_t q = 0; q < cv_points.size(); ++q) {
    const auto x = to_reference(model, cv_points[q]);
    for (std::size_t n = 0; n < x.size(); ++n) {
      x_(static_cast<Eigen::Index>(q), static_cast<Eigen::Index>(n)) = x[n];
    }
  }
}

Eigen::Index CvTracker::column(const MultiIndex& index) {
  if (auto it = ids_.find(index); it != ids_.end()) return it->second;
  const Eigen::Index q_count = x_.rows();
  std::vector<double> values;
  for (std::size_t n = 0; n < uni_.size(); ++n) {
    const auto need = static_cast<Eigen::Index>(index[n]) + 1;
    if (need <= uni_[n].cols()) continue;
    uni_[n].resize(q_count, need);
    values.resize(static_cast<std::size_t>(need));
    for (Eigen::Index q = 0; q < q_count; ++q) {
      legendre_all(x_(q, static_cast<Eigen::Index>(n)), values);
      for (Eigen::Index d = 0; d < need; ++d) uni_[n](q, d) = values[static_cast<std::size_t>(d)];
    }
  }
  const auto j = static_cast<Eigen::Index>(ids_.size());
  if (j == columns_.cols()) columns_.conservativeResize(q_count, std::max<Eigen::Index>(8, 2 * j));
  auto col = columns_.col(j);
  col.setOnes();
  for (std::size_t n = 0; n < uni_.size(); ++n) {
    if (index[n] != 0) col.array() *= uni_[n].col(index[n]).array();
  }
  ids_.emplace(index, j);
  return j;
}

double CvTracker::score(const PceModel& model) {
  Vector pred = Vector::Zero(x_.rows());
  const auto& set = model.index_set();
  for (std::size_t m = 0; m < set.size(); ++m) {
    pred.noalias() += model.coefficients()(static_cast<Eigen::Index>(m)) * columns_.col(column(set[m]));
  }
  return std::sqrt((pred - values_).squaredNorm() / static_cast<double>(x_.rows()));
}

void CvTracker::on_checkpoint(const HistoryRow&, const PceModel& model, const Dataset&) {
  errors_.push_back(score(model));
}

StudyResult run_study(const StudyConfig& config, const BenchModel& bench,
                      const StudyProgress& progress) {
  config.validate();
  const InputModel& input = bench.input;
  const auto cv_points = cv_sample(input, config.cv_size, config.cv_seed.value_or(config.seed_base));
  std::vector<double> cv_values;
  cv_values.reserve(cv_points.size());
  for (const auto& y : cv_points) cv_values.push_back(evaluate_checked(bench.evaluator, y));

  const std::size_t jobs = config.gates.size() * config.replicates;
  std::vector<ReplicateRun> runs(jobs);
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex mutex;

  auto worker = [&] {
    while (true) {
      const std::size_t j = next.fetch_add(1);
      if (j >= jobs) return;
      {
        std::lock_guard lock(mutex);
        if (failure) return;
      }
      try {
        ReplicateRun& run = runs[j];
        run.gate = config.gates[j / config.replicates];
        run.seed = config.seed_base + j % config.replicates;
        AdaptiveConfig ac;
        ac.gate = run.gate;
        ac.max_evals = config.max_evals;
        ac.batch = config.batch;
        CvTracker tracker(input, cv_points, cv_values);
        BuildResult result = build(ac, bench.evaluator, input, run.seed, &tracker);
        run.history = result.model.build_info().history;
        run.rms_cv = tracker.errors();
        run.final_terms = result.model.index_set().size();
        if (progress) {
          std::lock_guard lock(mutex);
          progress(run);
        }
      } catch (...) {
        std::lock_guard lock(mutex);
        if (!failure) failure = std::current_exception();
      }
    }
  };

  std::size_t threads = config.threads ? config.threads : std::thread::hardware_concurrency();
  threads = std::max<std::size_t>(1, std::min(threads, jobs));
  if (threads == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (std::size_t t = 0; t < threads; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  if (failure) std::rethrow_exception(failure);

  StudyResult result;
  for (const auto& run : runs) {
    for (std::size_t i = 0; i < run.history.size(); ++i) {
      result.records.push_back({run.gate, run.seed, run.history[i].evaluations, run.rms_cv[i]});
    }
  }
  result.runs = std::move(runs);
  return result;
}

std::string study_csv(const std::vector<ErrorRecord>& records) {
  std::string out = "criterion,limit,seed,L,rms_cv\n";
  for (const auto& r : records) {
    out += to_string(r.gate.criterion) + "," + format_double(r.gate.limit) + "," +
           std::to_string(r.seed) + "," + std::to_string(r.evaluations) + "," +
           format_double(r.rms_cv) + "\n";
  }
  return out;
}

std::string statistics_csv(const std::vector<StudyStatistic>& stats) {
  std::string out = "criterion,limit,L,mean_log10_err,std_log10_err\n";
  for (const auto& s : stats) {
    out += to_string(s.gate.criterion) + "," + format_double(s.gate.limit) + "," +
           std::to_string(s.evaluations) + "," + format_double(s.mean_log10) + "," +
           format_double(s.std_log10) + "\n";
  }
  return out;
}

}  // namespace lspce

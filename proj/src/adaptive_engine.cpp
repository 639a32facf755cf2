#include "lspce/adaptive_engine.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <unordered_map>

#include "lspce/error.hpp"

namespace lspce {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kTieTolerance = 1e-24;

bool is_training_row(std::size_t l) { return l % 5 != 0; }

// Basis columns over the dataset rows for every index of Lambda^LS, and the
// lower triangle of their Gram matrix A = D^T D. Lambda^LS only ever gains
// members, so columns are never dropped.
class BasisCache {
 public:
  BasisCache(std::size_t dimension, std::size_t row_capacity)
      : dim_(dimension),
        capacity_(row_capacity),
        uni_(dimension),
        data_(static_cast<Eigen::Index>(row_capacity), 16),
        gram_(Eigen::MatrixXd::Zero(16, 16)) {
    for (auto& u : uni_) u.resize(static_cast<Eigen::Index>(row_capacity), 1);
  }

  std::size_t rows() const noexcept { return rows_; }
  std::size_t columns() const noexcept { return indices_.size(); }

  void add_row(std::vector<double> x) {
    if (rows_ == capacity_) throw Error("internal", "basis cache row capacity exceeded");
    const auto l = static_cast<Eigen::Index>(rows_);
    std::vector<double> values;
    for (std::size_t n = 0; n < dim_; ++n) {
      values.resize(static_cast<std::size_t>(uni_[n].cols()));
      legendre_all(x[n], values);
      for (std::size_t d = 0; d < values.size(); ++d) uni_[n](l, static_cast<Eigen::Index>(d)) = values[d];
    }
    for (std::size_t j = 0; j < indices_.size(); ++j) {
      data_(l, static_cast<Eigen::Index>(j)) = product(indices_[j], rows_);
    }
    const auto p = static_cast<Eigen::Index>(indices_.size());
    if (p > 0) {
      Vector row = data_.row(l).head(p).transpose();
      gram_.topLeftCorner(p, p).selfadjointView<Eigen::Lower>().rankUpdate(row);
    }
    x_.push_back(std::move(x));
    ++rows_;
  }

  std::size_t id(const MultiIndex& index) {
    if (auto it = ids_.find(index); it != ids_.end()) return it->second;
    ensure_degrees(index);
    const auto j = static_cast<Eigen::Index>(indices_.size());
    if (j == data_.cols()) {
      data_.conservativeResize(Eigen::NoChange, 2 * j);
      Eigen::MatrixXd grown = Eigen::MatrixXd::Zero(2 * j, 2 * j);
      grown.topLeftCorner(j, j) = gram_.topLeftCorner(j, j);
      gram_.swap(grown);
    }
    indices_.push_back(index);
    ids_.emplace(index, static_cast<std::size_t>(j));
    for (std::size_t l = 0; l < rows_; ++l) {
      data_(static_cast<Eigen::Index>(l), j) = product(index, l);
    }
    const auto l = static_cast<Eigen::Index>(rows_);
    if (l > 0) {
      gram_.row(j).head(j + 1) =
          (data_.topLeftCorner(l, j + 1).transpose() * data_.col(j).head(l)).transpose();
    }
    return static_cast<std::size_t>(j);
  }

  /// Stability of the columns of `set` (all must be cached).
  StabilityReport stability_of(const MultiIndexSet& set, Criterion criterion) const {
    const auto m = static_cast<Eigen::Index>(set.size());
    Eigen::MatrixXd a(m, m);
    std::vector<Eigen::Index> ids(set.size());
    for (std::size_t i = 0; i < set.size(); ++i) ids[i] = static_cast<Eigen::Index>(ids_.at(set[i]));
    for (Eigen::Index c = 0; c < m; ++c) {
      for (Eigen::Index r = c; r < m; ++r) {
        const auto i = ids[static_cast<std::size_t>(r)];
        const auto j = ids[static_cast<std::size_t>(c)];
        a(r, c) = i >= j ? gram_(i, j) : gram_(j, i);
      }
    }
    return gate_stability(a, rows_, criterion);
  }

  DesignMatrix gather(const MultiIndexSet& set, bool training_only = false) const {
    std::size_t count = rows_;
    if (training_only) {
      count = 0;
      for (std::size_t l = 0; l < rows_; ++l) count += is_training_row(l);
    }
    DesignMatrix d(static_cast<Eigen::Index>(count), static_cast<Eigen::Index>(set.size()));
    for (std::size_t m = 0; m < set.size(); ++m) {
      const auto j = static_cast<Eigen::Index>(ids_.at(set[m]));
      Eigen::Index out = 0;
      for (std::size_t l = 0; l < rows_; ++l) {
        if (training_only && !is_training_row(l)) continue;
        d(out++, static_cast<Eigen::Index>(m)) = data_(static_cast<Eigen::Index>(l), j);
      }
    }
    return d;
  }

  std::vector<Eigen::Index> ids(const MultiIndexSet& set) const {
    std::vector<Eigen::Index> out(set.size());
    for (std::size_t m = 0; m < set.size(); ++m) out[m] = static_cast<Eigen::Index>(ids_.at(set[m]));
    return out;
  }

  std::vector<double> row(std::size_t l, const std::vector<Eigen::Index>& ids) const {
    std::vector<double> out(ids.size());
    for (std::size_t m = 0; m < ids.size(); ++m) out[m] = data_(static_cast<Eigen::Index>(l), ids[m]);
    return out;
  }

 private:
  double product(const MultiIndex& index, std::size_t l) const {
    double v = 1.0;
    const auto& e = index.exponents();
    for (std::size_t n = 0; n < e.size(); ++n) {
      if (e[n] != 0) v *= uni_[n](static_cast<Eigen::Index>(l), e[n]);
    }
    return v;
  }

  void ensure_degrees(const MultiIndex& index) {
    std::vector<double> values;
    for (std::size_t n = 0; n < dim_; ++n) {
      const auto need = static_cast<Eigen::Index>(index[n]) + 1;
      if (need <= uni_[n].cols()) continue;
      uni_[n].conservativeResize(Eigen::NoChange, need);
      values.resize(static_cast<std::size_t>(need));
      for (std::size_t l = 0; l < rows_; ++l) {
        legendre_all(x_[l][n], values);
        for (Eigen::Index d = 0; d < need; ++d) {
          uni_[n](static_cast<Eigen::Index>(l), d) = values[static_cast<std::size_t>(d)];
        }
      }
    }
  }

  std::size_t dim_;
  std::size_t capacity_;
  std::size_t rows_ = 0;
  std::vector<Eigen::MatrixXd> uni_;  // uni_[n](l, d) = psi_d(x_ln)
  Eigen::MatrixXd data_;
  Eigen::MatrixXd gram_;
  std::vector<std::vector<double>> x_;
  std::vector<MultiIndex> indices_;
  std::unordered_map<MultiIndex, std::size_t, MultiIndexHash> ids_;
};

class Engine {
 public:
  using Source = std::function<void(Dataset&, std::size_t)>;

  Engine(const AdaptiveConfig& config, const InputModel& model, Dataset dataset, Source source,
         BuildObserver* observer)
      : config_(config),
        model_(model),
        data_(std::move(dataset)),
        source_(std::move(source)),
        observer_(observer),
        set_(config.initial_set.value_or(MultiIndexSet::root(model.dimension()))),
        admissible_(admissible_neighbors(set_)),
        cache_(model.dimension(), config.max_evals),
        observations_(static_cast<Eigen::Index>(config.max_evals)) {}

  BuildResult run() {
    const std::size_t n = model_.dimension();
    const MultiIndexSet ls = union_with(set_, admissible_);
    if (config_.max_evals < ls.size()) {
      throw Error("budget_exhausted", "budget of " + std::to_string(config_.max_evals) +
                                          " evaluations is below the " +
                                          std::to_string(ls.size()) +
                                          " terms of the initial least-squares basis");
    }
    for (const auto& p : ls) cache_.id(p);
    set_ids_ = cache_.ids(set_);
    extend(config_.initial_ed_size.value_or(std::min(n + 2, config_.max_evals)));

    BuildInfo info;
    info.gate = config_.gate;
    info.seed = data_.seed();
    Vector coefficients = Vector::Zero(static_cast<Eigen::Index>(set_.size()));

    while (true) {
      const std::size_t evaluations = data_.size();
      if (config_.target_error && heldout_error() <= *config_.target_error) {
        info.stop_reason = "target_reached";
      }

      double value = kInf;
      if (info.stop_reason.empty()) {
        while (true) {
          MultiIndexSet ls_set = union_with(set_, admissible_);
          const StabilityReport report = cache_.stability_of(ls_set, config_.gate.criterion);
          value = criterion_value(report, config_.gate.criterion);
          const bool ok = criterion_satisfied(report, config_.gate);
          if (observer_) observer_->on_gate(evaluations, ls_set.size(), value, ok);
          if (!ok || set_.size() >= config_.max_terms) break;
          grow(ls_set);
        }
      }

      coefficients = fit_full(coefficients);
      HistoryRow row;
      row.evaluations = evaluations;
      row.terms = set_.size();
      row.ls_terms = set_.size() + admissible_.size();
      row.criterion_value = value;
      row.heldout_error = heldout_error();
      info.history.push_back(row);
      if (observer_) {
        observer_->on_checkpoint(row, PceModel(set_, coefficients, model_), data_);
      }

      if (info.stop_reason.empty()) {
        if (evaluations >= config_.max_evals) {
          info.stop_reason = "max_evals";
        } else if (set_.size() >= config_.max_terms) {
          info.stop_reason = "max_terms";
        }
      }
      if (!info.stop_reason.empty()) break;
      extend(std::min(config_.batch, config_.max_evals - evaluations));
    }

    info.evaluations = data_.size();
    return BuildResult{PceModel(set_, coefficients, model_, std::move(info)), std::move(data_)};
  }

 private:
  void extend(std::size_t k) {
    const std::size_t before = data_.size();
    source_(data_, k);
    for (std::size_t l = before; l < data_.size(); ++l) {
      std::vector<double> x;
      try {
        x = to_reference(model_, data_.design()[l]);
      } catch (const Error& e) {
        throw Error(e.code(), "design row " + std::to_string(l + 1) + ": " + e.what());
      }
      const double g = data_.observations()[l];
      observations_(static_cast<Eigen::Index>(l)) = g;
      cache_.add_row(std::move(x));
      if (!stale_) {
        const auto row = cache_.row(l, set_ids_);
        full_.add_row(row, g);
        if (is_training_row(l)) train_.add_row(row, g);
      }
    }
    heldout_.reset();
  }

  void grow(const MultiIndexSet& ls_set) {
    const auto rows = static_cast<Eigen::Index>(cache_.rows());
    if (observer_) observer_->on_solve(cache_.rows(), ls_set.size());
    const Vector s = solve_ls(cache_.gather(ls_set), observations_.head(rows));
    const MultiIndex selected = select_index(ls_set, s, admissible_);
    set_ = set_.with(selected);
    admissible_ = admissible_neighbors(set_);
    for (const auto& p : admissible_) cache_.id(p);
    set_ids_ = cache_.ids(set_);
    stale_ = true;
    heldout_.reset();
    if (observer_) observer_->on_growth(set_);
  }

  // The Lambda factors are rebuilt lazily, so several growth steps at one
  // dataset size cost a single refactorization.
  void refactor() {
    stale_ = false;
    const auto rows = static_cast<Eigen::Index>(cache_.rows());
    full_.factor(cache_.gather(set_), observations_.head(rows));
    Vector train_obs(rows);
    Eigen::Index t = 0;
    for (Eigen::Index l = 0; l < rows; ++l) {
      if (is_training_row(static_cast<std::size_t>(l))) train_obs(t++) = observations_(l);
    }
    train_.factor(cache_.gather(set_, true), train_obs.head(t));
  }

  Vector fit_full(const Vector& previous) {
    if (stale_) refactor();
    if (observer_) observer_->on_solve(full_.rows(), full_.columns());
    try {
      return full_.solve();
    } catch (const Error&) {
      if (previous.size() == static_cast<Eigen::Index>(set_.size())) return previous;
      return Vector::Zero(static_cast<Eigen::Index>(set_.size()));
    }
  }

  double heldout_error() {
    if (!heldout_) heldout_ = compute_heldout_error();
    return *heldout_;
  }

  double compute_heldout_error() {
    if (stale_) refactor();
    Vector s;
    try {
      s = train_.solve();
    } catch (const Error&) {
      return kInf;
    }
    double sum = 0.0;
    std::size_t count = 0;
    for (std::size_t l = 0; l < cache_.rows(); l += 5) {
      const auto row = cache_.row(l, set_ids_);
      double pred = 0.0;
      for (std::size_t m = 0; m < row.size(); ++m) pred += s(static_cast<Eigen::Index>(m)) * row[m];
      const double r = pred - observations_(static_cast<Eigen::Index>(l));
      sum += r * r;
      ++count;
    }
    return count ? std::sqrt(sum / static_cast<double>(count)) : kInf;
  }

  const AdaptiveConfig& config_;
  const InputModel& model_;
  Dataset data_;
  Source source_;
  BuildObserver* observer_;
  MultiIndexSet set_;
  MultiIndexSet admissible_;
  BasisCache cache_;
  Vector observations_;
  std::vector<Eigen::Index> set_ids_;
  bool stale_ = true;
  std::optional<double> heldout_;
  IncrementalQr full_;
  IncrementalQr train_;
};

}  // namespace

PceModel::PceModel(MultiIndexSet set, Vector coefficients, InputModel input, BuildInfo info)
    : set_(std::move(set)),
      coefficients_(std::move(coefficients)),
      input_(std::move(input)),
      info_(std::move(info)),
      max_degree_(set_.max_degree()) {
  if (static_cast<std::size_t>(coefficients_.size()) != set_.size()) {
    throw Error("dimension_mismatch", std::to_string(coefficients_.size()) +
                                          " coefficients for " + std::to_string(set_.size()) +
                                          " basis terms");
  }
  if (set_.dimension() != input_.dimension()) {
    throw Error("dimension_mismatch", "basis dimension " + std::to_string(set_.dimension()) +
                                          " vs input model dimension " +
                                          std::to_string(input_.dimension()));
  }
  if (!is_downward_closed(set_)) {
    throw Error("not_downward_closed", "model index set is not downward-closed");
  }
}

double PceModel::evaluate_reference(std::span<const double> x) const {
  if (x.size() != set_.dimension()) {
    throw Error("dimension_mismatch", "point has " + std::to_string(x.size()) +
                                          " coordinates, model has " +
                                          std::to_string(set_.dimension()));
  }
  UnivariateTable table(x, max_degree_);
  double v = 0.0;
  for (std::size_t m = 0; m < set_.size(); ++m) {
    v += coefficients_(static_cast<Eigen::Index>(m)) * table.basis(set_[m]);
  }
  return v;
}

double PceModel::evaluate(std::span<const double> y) const {
  return evaluate_reference(to_reference(input_, y));
}

std::vector<double> PceModel::evaluate_many(std::span<const Point> points) const {
  std::vector<double> out;
  out.reserve(points.size());
  for (const auto& y : points) out.push_back(evaluate(y));
  return out;
}

void AdaptiveConfig::validate(std::size_t dimension) const {
  if (!(gate.limit > 0.0)) throw Error("invalid_argument", "criterion limit must be positive");
  if (max_terms == 0) throw Error("invalid_argument", "max_terms must be >= 1");
  if (max_evals == 0) throw Error("invalid_argument", "max_evals must be >= 1");
  if (batch == 0) throw Error("invalid_argument", "batch size must be >= 1");
  if (target_error && !(*target_error >= 0.0)) {
    throw Error("invalid_argument", "target error must be non-negative");
  }
  if (initial_ed_size) {
    if (*initial_ed_size == 0) throw Error("invalid_argument", "initial ED size must be >= 1");
    if (*initial_ed_size > max_evals) {
      throw Error("invalid_argument", "initial ED size " + std::to_string(*initial_ed_size) +
                                          " exceeds max_evals " + std::to_string(max_evals));
    }
  }
  if (initial_set) {
    if (initial_set->dimension() != dimension) {
      throw Error("dimension_mismatch", "initial set dimension " +
                                            std::to_string(initial_set->dimension()) +
                                            " vs input model dimension " +
                                            std::to_string(dimension));
    }
    if (initial_set->empty() || !is_downward_closed(*initial_set)) {
      throw Error("not_downward_closed", "initial set must be non-empty and downward-closed");
    }
  }
}

MultiIndex select_index(const MultiIndexSet& ls_set, const Vector& ls_coefficients,
                        const MultiIndexSet& admissible) {
  if (admissible.empty()) throw Error("internal", "admissible set is empty");
  if (static_cast<std::size_t>(ls_coefficients.size()) != ls_set.size()) {
    throw Error("dimension_mismatch", "coefficient vector does not match the least-squares set");
  }
  std::vector<MultiIndex> candidates = admissible.indices();
  std::stable_sort(candidates.begin(), candidates.end(), graded_less);
  const double tol = kTieTolerance * ls_coefficients.squaredNorm();
  const MultiIndex* best = nullptr;
  double best_value = 0.0;
  for (const auto& p : candidates) {
    const auto pos = ls_set.position(p);
    if (!pos) throw Error("internal", "admissible index " + p.to_string() + " missing from solve");
    const double s = ls_coefficients(static_cast<Eigen::Index>(*pos));
    const double v = s * s;
    if (!best || v > best_value + tol) {
      best = &p;
      best_value = v;
    }
  }
  return *best;
}

GrowthStep grow_basis_once(const MultiIndexSet& set, const InputModel& model,
                           std::span<const Point> design, std::span<const double> observations) {
  if (design.size() != observations.size()) {
    throw Error("dimension_mismatch", "design and observations differ in length");
  }
  const Vector b = Eigen::Map<const Vector>(observations.data(),
                                            static_cast<Eigen::Index>(observations.size()));
  const MultiIndexSet admissible = admissible_neighbors(set);
  GrowthStep step{union_with(set, admissible), Vector(), MultiIndex(), set, Vector()};
  step.ls_coefficients = solve_ls(assemble(step.ls_set, model, design), b);
  step.selected = select_index(step.ls_set, step.ls_coefficients, admissible);
  step.set = set.with(step.selected);
  step.coefficients = solve_ls(assemble(step.set, model, design), b);
  return step;
}

BuildResult build(const AdaptiveConfig& config, const Evaluator& g, const InputModel& model,
                  std::uint64_t seed, BuildObserver* observer) {
  config.validate(model.dimension());
  auto source = [&model, &g](Dataset& data, std::size_t k) { data.extend(model, g, k); };
  return Engine(config, model, Dataset(model.dimension(), seed), source, observer).run();
}

BuildResult build_from_dataset(const AdaptiveConfig& config, const Dataset& records,
                               const InputModel& model, BuildObserver* observer) {
  config.validate(model.dimension());
  if (records.dimension() != model.dimension()) {
    throw Error("dimension_mismatch", "dataset dimension " + std::to_string(records.dimension()) +
                                          " vs input model dimension " +
                                          std::to_string(model.dimension()));
  }
  if (records.size() < config.max_evals) {
    throw Error("dataset_exhausted",
                "dataset has " + std::to_string(records.size()) + " rows but the budget needs " +
                    std::to_string(config.max_evals) + " (short by " +
                    std::to_string(config.max_evals - records.size()) + ")");
  }
  auto source = [&records](Dataset& data, std::size_t k) {
    for (std::size_t i = 0; i < k; ++i) {
      const std::size_t l = data.size();
      data.append(records.design()[l], records.observations()[l]);
    }
  };
  return Engine(config, model, Dataset::unseeded(model.dimension()), source, observer).run();
}

}  // namespace lspce

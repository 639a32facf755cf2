#include <gtest/gtest.h>

#include <cmath>

#include "lspce/adaptive_engine.hpp"
#include "lspce/bench_models.hpp"
#include "lspce/error.hpp"
#include "lspce/postproc.hpp"
#include "oracles/projection.hpp"

using namespace lspce;

namespace {

const InputModel kRef2({{-1.0, 1.0}, {-1.0, 1.0}});

double poly(std::span<const double> y) { return y[0] * y[0] + y[1]; }

std::string code_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  return "";
}

// Records every hook call for invariant checks.
struct Recorder : BuildObserver {
  struct Gate {
    std::size_t evaluations, ls_terms;
    bool ok;
  };
  std::vector<Gate> gates;
  std::vector<std::pair<std::size_t, std::size_t>> solves;
  std::vector<MultiIndexSet> growth;
  std::vector<HistoryRow> checkpoints;
  std::vector<std::vector<Point>> designs;

  void on_gate(std::size_t l, std::size_t m, double, bool ok) override { gates.push_back({l, m, ok}); }
  void on_solve(std::size_t rows, std::size_t cols) override { solves.emplace_back(rows, cols); }
  void on_growth(const MultiIndexSet& s) override { growth.push_back(s); }
  void on_checkpoint(const HistoryRow& row, const PceModel&, const Dataset& d) override {
    checkpoints.push_back(row);
    designs.push_back(d.design());
  }
};

}  // namespace

TEST(SelectIndex, ArgmaxAndTieBreak) {
  const MultiIndexSet ls(2, {MultiIndex{0, 0}, MultiIndex{1, 0}, MultiIndex{0, 1}});
  const MultiIndexSet adm(2, {MultiIndex{1, 0}, MultiIndex{0, 1}});
  EXPECT_EQ(select_index(ls, Vector{{1.0, 0.1, -0.5}}, adm), (MultiIndex{0, 1}));
  EXPECT_EQ(select_index(ls, Vector{{1.0, 0.3, -0.3}}, adm), (MultiIndex{1, 0}));
  EXPECT_EQ(select_index(ls, Vector{{1.0, 0.0, 0.0}}, adm), (MultiIndex{1, 0}));
}

TEST(GrowBasisOnce, PicksTheActiveDirection) {
  const auto design = sample_ed(kRef2, 20, 1);
  std::vector<double> obs;
  for (const auto& y : design) obs.push_back(y[1]);
  const auto step = grow_basis_once(MultiIndexSet::root(2), kRef2, design, obs);
  EXPECT_EQ(step.selected, (MultiIndex{0, 1}));
  EXPECT_EQ(step.set, MultiIndexSet(2, {MultiIndex{0, 0}, MultiIndex{0, 1}}));
  EXPECT_NEAR(step.coefficients(1), 1.0 / std::sqrt(3.0), 1e-12);
  EXPECT_EQ(step.ls_set.size(), 3u);
}

TEST(GrowBasisOnce, ConstantFunctionTieBreak) {
  const auto design = sample_ed(kRef2, 10, 2);
  const std::vector<double> obs(design.size(), 4.5);
  const auto step = grow_basis_once(MultiIndexSet::root(2), kRef2, design, obs);
  EXPECT_EQ(step.selected, (MultiIndex{1, 0}));
  EXPECT_NEAR(step.coefficients(0), 4.5, 1e-12);
}

TEST(GrowBasisOnce, GreedyFollowsLargestIndicator) {
  const auto design = sample_ed(kRef2, 30, 3);
  std::vector<double> obs;
  for (const auto& y : design) obs.push_back(0.01 * y[0] + 10.0 * y[1]);
  EXPECT_EQ(grow_basis_once(MultiIndexSet::root(2), kRef2, design, obs).selected, (MultiIndex{0, 1}));
  obs.clear();
  for (const auto& y : design) obs.push_back(10.0 * y[0] + 0.01 * y[1]);
  EXPECT_EQ(grow_basis_once(MultiIndexSet::root(2), kRef2, design, obs).selected, (MultiIndex{1, 0}));
}

TEST(Build, ExactRecoveryOfQuadraticModel) {
  AdaptiveConfig cfg;
  cfg.gate = {Criterion::K, 10.0};
  cfg.max_evals = 60;
  const auto result = build(cfg, poly, kRef2, 0);
  const auto cv = cv_sample(kRef2, 10000, 0);
  EXPECT_LT(rms_cv_error(result.model, poly, cv), 1e-10);

  auto f = [](double a, double b) { return a * a + b; };
  const auto& set = result.model.index_set();
  const auto& s = result.model.coefficients();
  for (int p1 = 0; p1 <= 3; ++p1) {
    for (int p2 = 0; p2 <= 3; ++p2) {
      const MultiIndex p{static_cast<unsigned>(p1), static_cast<unsigned>(p2)};
      const double expected = oracle::project_2d(f, p1, p2);
      const auto pos = set.position(p);
      const double got = pos ? s(static_cast<Eigen::Index>(*pos)) : 0.0;
      EXPECT_NEAR(got, expected, 1e-10) << p.to_string();
    }
  }
  EXPECT_NEAR(oracle::project_2d(f, 2, 0), 2.0 / (3.0 * std::sqrt(5.0)), 1e-14);
  EXPECT_NEAR(oracle::project_2d(f, 0, 1), 1.0 / std::sqrt(3.0), 1e-14);
  EXPECT_NEAR(oracle::project_2d(f, 0, 0), 1.0 / 3.0, 1e-14);
}

TEST(Build, ConstantFunctionStopsAtRoot) {
  AdaptiveConfig cfg;
  cfg.max_evals = 50;
  cfg.target_error = 1e-12;
  const auto result = build(cfg, [](auto) { return 5.0; }, kRef2, 3);
  EXPECT_EQ(result.model.index_set(), MultiIndexSet::root(2));
  EXPECT_NEAR(result.model.coefficients()(0), 5.0, 1e-12);
  EXPECT_EQ(result.model.build_info().stop_reason, "target_reached");
  EXPECT_EQ(result.model.build_info().evaluations, 4u);
  const std::vector<double> y{0.3, -0.8};
  EXPECT_NEAR(result.model.evaluate(y), 5.0, 1e-12);
}

TEST(Build, DeterministicBitForBit) {
  AdaptiveConfig cfg;
  cfg.gate = {Criterion::E, 10.0};
  cfg.max_evals = 80;
  auto g = [](std::span<const double> y) { return std::exp(0.7 * y[0]) * std::cos(2.0 * y[1]); };
  const auto a = build(cfg, g, kRef2, 12);
  const auto b = build(cfg, g, kRef2, 12);
  EXPECT_EQ(a.model.index_set(), b.model.index_set());
  ASSERT_EQ(a.model.coefficients().size(), b.model.coefficients().size());
  for (Eigen::Index i = 0; i < a.model.coefficients().size(); ++i) {
    EXPECT_EQ(a.model.coefficients()(i), b.model.coefficients()(i));
  }
  const auto c = build(cfg, g, kRef2, 13);
  EXPECT_NE(a.dataset.design(), c.dataset.design());
}

TEST(Build, StructuralInvariants) {
  for (auto gate : {Gate{Criterion::K, 10.0}, Gate{Criterion::E, 2.0}, Gate{Criterion::A, 40.0}}) {
    AdaptiveConfig cfg;
    cfg.gate = gate;
    cfg.max_evals = 120;
    cfg.batch = 3;
    std::size_t calls = 0;
    auto g = [&calls](std::span<const double> y) {
      ++calls;
      return 1.0 / (1.3 + y[0] + 0.5 * y[1] * y[1]);
    };
    Recorder rec;
    const auto result = build(cfg, g, kRef2, 5, &rec);
    EXPECT_EQ(calls, result.model.build_info().evaluations);
    EXPECT_EQ(calls, result.dataset.size());
    EXPECT_EQ(result.model.build_info().stop_reason, "max_evals");
    for (const auto& s : rec.growth) EXPECT_TRUE(is_downward_closed(s));
    for (const auto& [rows, cols] : rec.solves) EXPECT_GE(rows, cols);
    std::size_t satisfied = 0;
    for (const auto& e : rec.gates) satisfied += e.ok;
    EXPECT_EQ(satisfied, rec.growth.size());
    for (std::size_t i = 1; i < rec.designs.size(); ++i) {
      EXPECT_GT(rec.checkpoints[i].evaluations, rec.checkpoints[i - 1].evaluations);
      EXPECT_LE(rec.checkpoints[i].evaluations - rec.checkpoints[i - 1].evaluations, 3u);
      EXPECT_GE(rec.checkpoints[i].terms, rec.checkpoints[i - 1].terms);
      for (std::size_t l = 0; l < rec.designs[i - 1].size(); ++l) {
        EXPECT_EQ(rec.designs[i][l], rec.designs[i - 1][l]);
      }
    }
    EXPECT_EQ(result.model.build_info().history.size(), rec.checkpoints.size());
  }
}

TEST(Build, BudgetBelowInitialBasis) {
  AdaptiveConfig cfg;
  cfg.max_evals = 2;
  EXPECT_EQ(code_of([&] { build(cfg, poly, kRef2, 0); }), "budget_exhausted");
}

TEST(Build, MaxTermsStops) {
  AdaptiveConfig cfg;
  cfg.max_terms = 3;
  cfg.max_evals = 200;
  const auto result = build(cfg, poly, kRef2, 0);
  EXPECT_EQ(result.model.index_set().size(), 3u);
  EXPECT_EQ(result.model.build_info().stop_reason, "max_terms");
  EXPECT_LT(result.model.build_info().evaluations, 200u);
}

TEST(BuildFromDataset, ConsumesRowsInOrder) {
  const Dataset records = make_dataset(kRef2, poly, 60, 0);
  AdaptiveConfig cfg;
  cfg.max_evals = 60;
  const auto from_file = build_from_dataset(cfg, records, kRef2);
  const auto sampled = build(cfg, poly, kRef2, 0);
  EXPECT_EQ(from_file.dataset.design(), records.design());
  EXPECT_EQ(from_file.model.index_set(), sampled.model.index_set());
  EXPECT_TRUE(from_file.model.coefficients() == sampled.model.coefficients());
}

TEST(BuildFromDataset, ShortfallIsReported) {
  const Dataset records = make_dataset(kRef2, poly, 20, 0);
  AdaptiveConfig cfg;
  cfg.max_evals = 50;
  try {
    build_from_dataset(cfg, records, kRef2);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), "dataset_exhausted");
    EXPECT_NE(std::string(e.what()).find("30"), std::string::npos);
  }
}

TEST(Config, Validation) {
  AdaptiveConfig cfg;
  cfg.batch = 0;
  EXPECT_EQ(code_of([&] { cfg.validate(2); }), "invalid_argument");
  cfg = {};
  cfg.gate.limit = -1.0;
  EXPECT_EQ(code_of([&] { cfg.validate(2); }), "invalid_argument");
  cfg = {};
  cfg.initial_set = MultiIndexSet(2, {MultiIndex{1, 0}});
  EXPECT_EQ(code_of([&] { cfg.validate(2); }), "not_downward_closed");
}

TEST(PceModel, EvaluateAndValidate) {
  const MultiIndexSet s(2, {MultiIndex{0, 0}, MultiIndex{1, 0}});
  const PceModel m(s, Vector{{2.0, 3.0}}, InputModel({{0.0, 2.0}, {0.0, 1.0}}));
  const std::vector<double> y{2.0, 0.5};
  EXPECT_NEAR(m.evaluate(y), 2.0 + 3.0 * std::sqrt(3.0), 1e-14);
  EXPECT_EQ(code_of([&] { m.evaluate(std::vector<double>{3.0, 0.5}); }), "out_of_bounds");
  EXPECT_EQ(code_of([&] { PceModel(s, Vector{{1.0}}, kRef2); }), "dimension_mismatch");
  EXPECT_EQ(code_of([&] { PceModel(MultiIndexSet(2, {MultiIndex{0, 1}}), Vector{{1.0}}, kRef2); }),
            "not_downward_closed");
  const PceModel c(MultiIndexSet::root(2), Vector{{-1.5}}, kRef2);
  EXPECT_EQ(c.evaluate(std::vector<double>{0.9, -0.1}), -1.5);
}

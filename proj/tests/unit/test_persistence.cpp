#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>

#include "lspce/adaptive_engine.hpp"
#include "lspce/error.hpp"
#include "lspce/persistence.hpp"

using namespace lspce;
namespace fs = std::filesystem;

namespace {

const InputModel kBox({{-0.3, 1.7}, {10.0, 12.5}, {1e-3, 2e-3}});

PceModel sample_model() {
  AdaptiveConfig cfg;
  cfg.gate = {Criterion::K, 10.0};
  cfg.max_evals = 90;
  auto g = [](std::span<const double> y) { return std::exp(y[0]) * std::sin(y[1]) + 1e3 * y[2]; };
  return build(cfg, g, kBox, 8).model;
}

fs::path temp_dir(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("lspce_persistence_" + name);
  fs::remove_all(p);
  return p;
}

}  // namespace

TEST(ModelFile, RoundTripIsBitExact) {
  const PceModel m = sample_model();
  const PceModel back = deserialize_model(serialize_model(m));
  EXPECT_EQ(back.index_set(), m.index_set());
  EXPECT_EQ(back.input_model(), m.input_model());
  for (const auto& y : cv_sample(kBox, 1000, 3)) EXPECT_EQ(back.evaluate(y), m.evaluate(y));
  EXPECT_EQ(serialize_model(back), serialize_model(m));
  const auto& hi = back.build_info();
  EXPECT_EQ(hi.gate, m.build_info().gate);
  EXPECT_EQ(hi.history.size(), m.build_info().history.size());
  EXPECT_EQ(hi.stop_reason, "max_evals");
}

TEST(ModelFile, SaveLoadThroughDisk) {
  const fs::path dir = temp_dir("disk");
  const PceModel m = sample_model();
  save_model(dir / "nested" / "model.json", m);
  const PceModel back = load_model(dir / "nested" / "model.json");
  EXPECT_EQ(serialize_model(back), serialize_model(m));
  fs::remove_all(dir);
}

TEST(ModelFile, SchemaFields) {
  const auto doc = model_to_json(sample_model());
  EXPECT_EQ(doc["schema_version"], 1);
  EXPECT_EQ(doc["input_model"].size(), 3u);
  EXPECT_TRUE(doc["basis"][0].is_string());
  EXPECT_EQ(doc["basis"][0], "0,0,0");
  EXPECT_EQ(doc["build_info"]["criterion"], "K");
  EXPECT_TRUE(doc["build_info"]["history"][0].contains("heldout_error"));
}

TEST(ModelFile, NonFiniteHistoryValuesBecomeNull) {
  PceModel m(MultiIndexSet::root(1), Vector{{1.0}}, InputModel({{0, 1}}));
  m.build_info().history.push_back({3, 1, 2, std::numeric_limits<double>::infinity(), 0.5});
  const auto doc = model_to_json(m);
  EXPECT_TRUE(doc["build_info"]["history"][0]["criterion_value"].is_null());
  const PceModel back = model_from_json(doc);
  EXPECT_TRUE(std::isinf(back.build_info().history[0].criterion_value) ||
              std::isnan(back.build_info().history[0].criterion_value));
}

TEST(ModelFile, Errors) {
  auto code = [](const std::function<void()>& f) -> std::string {
    try {
      f();
    } catch (const Error& e) {
      return e.code();
    }
    return "";
  };
  EXPECT_EQ(code([] { deserialize_model("{not json"); }), "parse");
  EXPECT_EQ(code([] { deserialize_model(R"({"schema_version": 99})"); }), "parse");
  EXPECT_EQ(code([] { load_model("/nonexistent/dir/model.json"); }), "io");
  auto doc = model_to_json(sample_model());
  doc["coefficients"].erase(0);
  EXPECT_NE(code([&] { model_from_json(doc); }), "");
}

TEST(Datasets, SaveAndLoad) {
  const fs::path dir = temp_dir("dataset");
  const Dataset d = make_dataset(kBox, [](auto y) { return y[0] + y[1]; }, 12, 4);
  save_dataset(dir / "d.csv", d);
  const Dataset back = load_dataset(dir / "d.csv", 3);
  EXPECT_EQ(back.design(), d.design());
  EXPECT_EQ(back.observations(), d.observations());
  EXPECT_THROW(load_dataset(dir / "d.csv", 2), Error);
  fs::remove_all(dir);
}

TEST(FormatDouble, FullPrecision) {
  for (double v : {0.1, 1.0 / 3.0, -2.5e-300, 6.02214076e23}) {
    EXPECT_EQ(std::stod(format_double(v)), v);
  }
}

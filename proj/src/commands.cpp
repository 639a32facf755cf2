#include "lspce/commands.hpp"

#include <filesystem>
#include <ostream>
#include <sstream>

#include "lspce/adaptive_engine.hpp"
#include "lspce/bench_models.hpp"
#include "lspce/error.hpp"
#include "lspce/persistence.hpp"
#include "lspce/postproc.hpp"
#include "lspce/study.hpp"

namespace lspce {

namespace fs = std::filesystem;

namespace {

template <typename T>
void take(std::optional<T>& slot, const nlohmann::json& value, const std::string& key) {
  if (slot) return;
  try {
    slot = value.get<T>();
  } catch (const nlohmann::json::exception&) {
    throw Error("parse", "config key '" + key + "' has the wrong type");
  }
}

void take_list(std::vector<std::string>& slot, const nlohmann::json& value, const std::string& key) {
  if (!slot.empty()) return;
  if (value.is_string()) {
    slot.push_back(value.get<std::string>());
    return;
  }
  if (value.is_number()) {
    slot.push_back(format_double(value.get<double>()));
    return;
  }
  if (!value.is_array()) throw Error("parse", "config key '" + key + "' must be a list");
  for (const auto& v : value) {
    if (v.is_string()) {
      slot.push_back(v.get<std::string>());
    } else if (v.is_number()) {
      slot.push_back(format_double(v.get<double>()));
    } else {
      throw Error("parse", "config key '" + key + "' holds a non-string entry");
    }
  }
}

fs::path out_dir(const CommandOptions& o) { return fs::path(o.out.value_or(".")); }

std::string history_csv(const std::vector<HistoryRow>& history) {
  std::string out = "L,terms,ls_terms,criterion_value,heldout_error\n";
  for (const auto& r : history) {
    out += std::to_string(r.evaluations) + "," + std::to_string(r.terms) + "," +
           std::to_string(r.ls_terms) + "," + format_double(r.criterion_value) + "," +
           format_double(r.heldout_error) + "\n";
  }
  return out;
}

}  // namespace

void merge_config(CommandOptions& o, const nlohmann::json& config) {
  if (!config.is_object()) throw Error("parse", "config must be a JSON object");
  for (const auto& [raw_key, value] : config.items()) {
    std::string key = raw_key;
    for (auto& c : key) {
      if (c == '-') c = '_';
    }
    if (key == "model") take(o.model, value, key);
    else if (key == "dataset") take(o.dataset, value, key);
    else if (key == "bounds") take(o.bounds, value, key);
    else if (key == "criterion") take_list(o.criteria, value, key);
    else if (key == "limit") take_list(o.limits, value, key);
    else if (key == "gate" || key == "gates") take_list(o.gates, value, key);
    else if (key == "replicates") take(o.replicates, value, key);
    else if (key == "seed") take(o.seed, value, key);
    else if (key == "cv_seed") take(o.cv_seed, value, key);
    else if (key == "budget") take(o.budget, value, key);
    else if (key == "batch") take(o.batch, value, key);
    else if (key == "cv_size") take(o.cv_size, value, key);
    else if (key == "max_terms") take(o.max_terms, value, key);
    else if (key == "threads") take(o.threads, value, key);
    else if (key == "target_error") take(o.target_error, value, key);
    else if (key == "out") take(o.out, value, key);
    else throw Error("parse", "unknown config key '" + raw_key + "'");
  }
}

std::vector<Gate> collect_gates(const CommandOptions& o) {
  if (o.criteria.size() != o.limits.size()) {
    throw Error("invalid_argument", std::to_string(o.criteria.size()) + " --criterion values but " +
                                        std::to_string(o.limits.size()) + " --limit values");
  }
  std::vector<Gate> gates;
  for (std::size_t i = 0; i < o.criteria.size(); ++i) {
    gates.push_back({parse_criterion(o.criteria[i]), parse_limit(o.limits[i])});
  }
  for (const auto& g : o.gates) gates.push_back(parse_gate(g));
  return gates;
}

InputModel parse_bounds(const std::string& text) {
  if (text.find(':') == std::string::npos) return make_bench_model(text).input;
  std::vector<UniformVariable> vars;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    const auto colon = item.find(':');
    if (colon == std::string::npos) {
      throw Error("invalid_argument", "malformed bounds entry '" + item + "' (expected lo:hi)");
    }
    try {
      std::size_t used_lo = 0;
      std::size_t used_hi = 0;
      const std::string lo = item.substr(0, colon);
      const std::string hi = item.substr(colon + 1);
      const double a = std::stod(lo, &used_lo);
      const double b = std::stod(hi, &used_hi);
      if (used_lo != lo.size() || used_hi != hi.size()) throw std::invalid_argument(item);
      vars.push_back({a, b});
    } catch (const std::logic_error&) {
      throw Error("invalid_argument", "malformed bounds entry '" + item + "' (expected lo:hi)");
    }
  }
  return InputModel(std::move(vars));
}

void cmd_build(const CommandOptions& o, std::ostream& log) {
  const auto gates = collect_gates(o);
  if (gates.size() > 1) throw Error("invalid_argument", "build takes a single criterion");
  AdaptiveConfig config;
  if (!gates.empty()) config.gate = gates.front();
  if (o.batch) config.batch = *o.batch;
  if (o.max_terms) config.max_terms = *o.max_terms;
  config.target_error = o.target_error;

  std::optional<BuildResult> result;
  std::string model_name;
  std::optional<double> time_unit;
  if (o.dataset) {
    std::optional<InputModel> input;
    if (o.bounds) {
      input = parse_bounds(*o.bounds);
    } else if (o.model) {
      input = make_bench_model(*o.model).input;
    } else {
      throw Error("invalid_argument", "dataset builds need --bounds or --model for the input model");
    }
    const Dataset records = load_dataset(*o.dataset, input->dimension());
    config.max_evals = o.budget.value_or(records.size());
    result.emplace(build_from_dataset(config, records, *input));
    model_name = "dataset:" + fs::path(*o.dataset).filename().string();
  } else {
    if (!o.model) throw Error("invalid_argument", "build needs --model or --dataset");
    BenchModel bench = make_bench_model(*o.model);
    InputModel input = o.bounds ? parse_bounds(*o.bounds) : bench.input;
    config.max_evals = o.budget.value_or(1000);
    result.emplace(build(config, bench.evaluator, input, o.seed.value_or(0)));
    model_name = bench.name;
    time_unit = bench.time_unit;
  }

  PceModel& model = result->model;
  model.build_info().model_name = model_name;
  model.build_info().time_unit = time_unit;

  const fs::path dir = out_dir(o);
  save_model(dir / "model.json", model);
  write_text_file(dir / "history.csv", history_csv(model.build_info().history));
  if (!o.dataset) save_dataset(dir / "dataset.csv", result->dataset);

  const auto& info = model.build_info();
  log << "built " << model_name << " with " << to_string(info.gate) << ": L=" << info.evaluations
      << ", terms=" << model.index_set().size() << ", stop=" << info.stop_reason
      << ", heldout_error=" << format_double(info.history.back().heldout_error) << "\n";
}

void cmd_study(const CommandOptions& o, std::ostream& log) {
  if (o.dataset) throw Error("invalid_argument", "studies need a registered model, not a dataset");
  if (!o.model) throw Error("invalid_argument", "study needs --model");
  BenchModel bench = make_bench_model(*o.model);
  if (o.bounds) bench.input = parse_bounds(*o.bounds);

  StudyConfig config;
  config.gates = collect_gates(o);
  if (o.replicates) config.replicates = *o.replicates;
  if (o.seed) config.seed_base = *o.seed;
  if (o.budget) config.max_evals = *o.budget;
  if (o.batch) config.batch = *o.batch;
  if (o.cv_size) config.cv_size = *o.cv_size;
  if (o.threads) config.threads = *o.threads;
  config.cv_seed = o.cv_seed;

  const StudyResult result = run_study(config, bench, [&log](const ReplicateRun& run) {
    log << "done " << to_string(run.gate) << " seed " << run.seed << ": terms=" << run.final_terms
        << ", final rms_cv=" << format_double(run.rms_cv.back()) << "\n";
  });

  const fs::path dir = out_dir(o);
  write_text_file(dir / "study.csv", study_csv(result.records));

  nlohmann::ordered_json meta;
  meta["model"] = bench.name;
  nlohmann::ordered_json gates = nlohmann::ordered_json::array();
  for (const auto& g : config.gates) gates.push_back(to_string(g));
  meta["criteria"] = gates;
  meta["replicates"] = config.replicates;
  meta["seed_base"] = config.seed_base;
  meta["budget"] = config.max_evals;
  meta["batch"] = config.batch;
  meta["cv_size"] = config.cv_size;
  meta["cv_seed"] = config.cv_seed.value_or(config.seed_base);
  meta["time_unit"] = bench.time_unit ? nlohmann::ordered_json(*bench.time_unit) : nullptr;
  meta["aggregation"] = "geometric mean: mean and sample standard deviation of log10(rms_cv)";
  write_text_file(dir / "study_meta.json", meta.dump(2) + "\n");

  const auto stats = study_statistics(result.records);
  write_text_file(dir / "stats.csv", statistics_csv(stats));
  log << "wrote " << result.records.size() << " records and " << stats.size()
      << " statistics rows to " << dir.string() << "\n";
}

void cmd_eval(const std::string& model_path, const std::string& points_path,
              const std::optional<std::string>& out_path, std::ostream& out) {
  const PceModel model = load_model(model_path);
  const auto points = load_points(points_path, model.input_model().dimension());
  std::string text = "prediction\n";
  for (std::size_t i = 0; i < points.size(); ++i) {
    double v = 0.0;
    try {
      v = model.evaluate(points[i]);
    } catch (const Error& e) {
      throw Error(e.code(), "row " + std::to_string(i + 1) + ": " + e.what());
    }
    text += format_double(v) + "\n";
  }
  if (out_path) {
    write_text_file(*out_path, text);
  } else {
    out << text;
  }
}

void cmd_postproc(const std::string& model_path, const std::optional<std::string>& out_path,
                  std::ostream& out) {
  const PceModel model = load_model(model_path);
  const MomentReport report = moments(model);
  out << "mean " << format_double(report.mean) << "\n";
  out << "variance " << format_double(report.variance) << "\n";
  if (report.zero_variance) out << "sobol zero-variance model, indices set to 0\n";
  std::string csv = "variable,first_order,total\n";
  for (std::size_t n = 0; n < report.first_order.size(); ++n) {
    const std::string name = "y" + std::to_string(n + 1);
    out << name << " first_order " << format_double(report.first_order[n]) << " total "
        << format_double(report.total[n]) << "\n";
    csv += name + "," + format_double(report.first_order[n]) + "," +
           format_double(report.total[n]) + "\n";
  }
  if (out_path) write_text_file(*out_path, csv);
}

}  // namespace lspce

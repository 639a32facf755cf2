#include "lspce/persistence.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "lspce/error.hpp"

namespace lspce {

namespace {

using ordered_json = nlohmann::ordered_json;
using json = nlohmann::json;

ordered_json number(double v) { return std::isfinite(v) ? ordered_json(v) : ordered_json(nullptr); }

double read_number(const json& v, const char* what) {
  if (v.is_null()) return std::numeric_limits<double>::infinity();
  if (!v.is_number()) throw Error("parse", std::string("model file: '") + what + "' is not a number");
  return v.get<double>();
}

const json& field(const json& obj, const char* key) {
  if (!obj.is_object() || !obj.contains(key)) {
    throw Error("parse", std::string("model file: missing field '") + key + "'");
  }
  return obj.at(key);
}

}  // namespace

std::string format_double(double value) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", value);
  return buf;
}

ordered_json model_to_json(const PceModel& model) {
  ordered_json doc;
  doc["schema_version"] = kModelSchemaVersion;

  ordered_json input = ordered_json::array();
  for (const auto& v : model.input_model().variables()) {
    input.push_back({{"lower", v.lower}, {"upper", v.upper}});
  }
  doc["input_model"] = input;

  ordered_json basis = ordered_json::array();
  for (const auto& p : model.index_set()) basis.push_back(p.to_string());
  doc["basis"] = basis;

  ordered_json coefficients = ordered_json::array();
  for (Eigen::Index m = 0; m < model.coefficients().size(); ++m) {
    coefficients.push_back(number(model.coefficients()(m)));
  }
  doc["coefficients"] = coefficients;

  const BuildInfo& info = model.build_info();
  ordered_json b;
  b["criterion"] = to_string(info.gate.criterion);
  b["limit"] = number(info.gate.limit);
  b["seed"] = info.seed;
  b["evaluations"] = info.evaluations;
  b["stop_reason"] = info.stop_reason;
  b["model_name"] = info.model_name;
  b["time_unit"] = info.time_unit ? number(*info.time_unit) : ordered_json(nullptr);
  ordered_json history = ordered_json::array();
  for (const auto& row : info.history) {
    history.push_back({{"L", row.evaluations},
                       {"terms", row.terms},
                       {"ls_terms", row.ls_terms},
                       {"criterion_value", number(row.criterion_value)},
                       {"heldout_error", number(row.heldout_error)}});
  }
  b["history"] = history;
  doc["build_info"] = b;
  return doc;
}

PceModel model_from_json(const json& doc) {
  try {
    const auto version = field(doc, "schema_version").get<int>();
    if (version != kModelSchemaVersion) {
      throw Error("parse", "model file: unsupported schema_version " + std::to_string(version));
    }
    std::vector<UniformVariable> vars;
    for (const auto& v : field(doc, "input_model")) {
      vars.push_back({field(v, "lower").get<double>(), field(v, "upper").get<double>()});
    }
    InputModel input(std::move(vars));

    std::vector<MultiIndex> indices;
    for (const auto& p : field(doc, "basis")) indices.push_back(MultiIndex::parse(p.get<std::string>()));
    MultiIndexSet set(input.dimension(), std::move(indices));

    const auto& coeffs = field(doc, "coefficients");
    Vector s(static_cast<Eigen::Index>(coeffs.size()));
    for (std::size_t m = 0; m < coeffs.size(); ++m) {
      s(static_cast<Eigen::Index>(m)) = read_number(coeffs[m], "coefficients");
    }

    BuildInfo info;
    if (doc.contains("build_info")) {
      const auto& b = doc.at("build_info");
      info.gate.criterion = parse_criterion(field(b, "criterion").get<std::string>());
      info.gate.limit = read_number(field(b, "limit"), "limit");
      info.seed = field(b, "seed").get<std::uint64_t>();
      info.evaluations = field(b, "evaluations").get<std::size_t>();
      info.stop_reason = b.value("stop_reason", "");
      info.model_name = b.value("model_name", "");
      if (b.contains("time_unit") && !b.at("time_unit").is_null()) {
        info.time_unit = b.at("time_unit").get<double>();
      }
      if (b.contains("history")) {
        for (const auto& r : b.at("history")) {
          HistoryRow row;
          row.evaluations = field(r, "L").get<std::size_t>();
          row.terms = field(r, "terms").get<std::size_t>();
          row.ls_terms = field(r, "ls_terms").get<std::size_t>();
          row.criterion_value = read_number(field(r, "criterion_value"), "criterion_value");
          row.heldout_error = read_number(field(r, "heldout_error"), "heldout_error");
          info.history.push_back(row);
        }
      }
    }
    return PceModel(std::move(set), std::move(s), std::move(input), std::move(info));
  } catch (const json::exception& e) {
    throw Error("parse", std::string("model file: ") + e.what());
  }
}

std::string serialize_model(const PceModel& model) { return model_to_json(model).dump(2) + "\n"; }

PceModel deserialize_model(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::exception& e) {
    throw Error("parse", std::string("model file is not valid JSON: ") + e.what());
  }
  return model_from_json(doc);
}

std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("io", "cannot read '" + path.string() + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void write_text_file(const std::filesystem::path& path, const std::string& text) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("io", "cannot write '" + path.string() + "'");
  out << text;
  if (!out) throw Error("io", "failed writing '" + path.string() + "'");
}

void save_model(const std::filesystem::path& path, const PceModel& model) {
  write_text_file(path, serialize_model(model));
}

PceModel load_model(const std::filesystem::path& path) {
  return deserialize_model(read_text_file(path));
}

Dataset load_dataset(const std::filesystem::path& path, std::optional<std::size_t> dimension) {
  std::ifstream in(path);
  if (!in) throw Error("io", "cannot read dataset '" + path.string() + "'");
  CsvTable table = read_csv_table(in, true, dimension);
  if (table.points.empty()) throw Error("parse", "dataset '" + path.string() + "' has no rows");
  return Dataset::from_records(std::move(table.points), std::move(table.observations));
}

void save_dataset(const std::filesystem::path& path, const Dataset& dataset) {
  std::ostringstream out;
  write_dataset_csv(out, dataset.design(), dataset.observations());
  write_text_file(path, out.str());
}

std::vector<Point> load_points(const std::filesystem::path& path, std::size_t dimension) {
  std::ifstream in(path);
  if (!in) throw Error("io", "cannot read points '" + path.string() + "'");
  return read_csv_table(in, false, dimension).points;
}

}  // namespace lspce

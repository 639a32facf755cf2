#pragma once

#include <filesystem>
#include <optional>
#include <string>

#include <json.hpp>

#include "lspce/adaptive_engine.hpp"
#include "lspce/seq_design.hpp"

namespace lspce {

inline constexpr int kModelSchemaVersion = 1;

/// Model file document. Non-finite numbers are written as null.
nlohmann::ordered_json model_to_json(const PceModel& model);
/// Throws "parse" on schema violations.
PceModel model_from_json(const nlohmann::json& doc);

std::string serialize_model(const PceModel& model);
PceModel deserialize_model(const std::string& text);

void save_model(const std::filesystem::path& path, const PceModel& model);
/// Throws "io" when the file cannot be read.
PceModel load_model(const std::filesystem::path& path);

std::string read_text_file(const std::filesystem::path& path);
void write_text_file(const std::filesystem::path& path, const std::string& text);

/// Dataset CSV with header "y1,...,yN,g".
Dataset load_dataset(const std::filesystem::path& path,
                     std::optional<std::size_t> dimension = std::nullopt);
void save_dataset(const std::filesystem::path& path, const Dataset& dataset);

/// Points CSV with header "y1,...,yN".
std::vector<Point> load_points(const std::filesystem::path& path, std::size_t dimension);

/// Text form of a double with 17 significant digits.
std::string format_double(double value);

}  // namespace lspce

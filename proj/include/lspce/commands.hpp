#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "lspce/lsq_core.hpp"
#include "lspce/poly_basis.hpp"

namespace lspce {

/// Options shared by the CLI subcommands. Unset fields take defaults.
struct CommandOptions {
  std::optional<std::string> model;
  std::optional<std::string> dataset;
  std::optional<std::string> bounds;
  std::vector<std::string> criteria;  ///< paired with `limits` by position
  std::vector<std::string> limits;
  std::vector<std::string> gates;     ///< "K:10" form, appended after the pairs
  std::optional<std::size_t> replicates;
  std::optional<std::uint64_t> seed;
  std::optional<std::uint64_t> cv_seed;
  std::optional<std::size_t> budget;
  std::optional<std::size_t> batch;
  std::optional<std::size_t> cv_size;
  std::optional<std::size_t> max_terms;
  std::optional<std::size_t> threads;
  std::optional<double> target_error;
  std::optional<std::string> out;
};

/// Fills fields not already set from a config document using the same names
/// as the long flags (dashes become underscores). Throws "parse" on
/// unknown keys or wrong types.
void merge_config(CommandOptions& options, const nlohmann::json& config);

/// Gates from criteria/limits pairs and "K:10" strings.
std::vector<Gate> collect_gates(const CommandOptions& options);

/// "lo:hi,lo:hi,..." or a registered model name (its default bounds).
InputModel parse_bounds(const std::string& text);

/// Writes model.json, history.csv and, for sampled builds, dataset.csv.
void cmd_build(const CommandOptions& options, std::ostream& log);

/// Writes study.csv, study_meta.json and stats.csv. Throws
/// "insufficient_replicates" after writing the raw CSV when R < 2.
void cmd_study(const CommandOptions& options, std::ostream& log);

/// One prediction per points row, in order, to `out_path` or `out`.
void cmd_eval(const std::string& model_path, const std::string& points_path,
              const std::optional<std::string>& out_path, std::ostream& out);

/// Prints the moment report and writes "variable,first_order,total".
void cmd_postproc(const std::string& model_path, const std::optional<std::string>& out_path,
                  std::ostream& out);

}  // namespace lspce

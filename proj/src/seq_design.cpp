#include "lspce/seq_design.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>

#include "lspce/error.hpp"

namespace lspce {

namespace {

std::string format_point(std::span<const double> y) {
  std::ostringstream out;
  out.precision(17);
  out << '(';
  for (std::size_t n = 0; n < y.size(); ++n) out << (n ? ", " : "") << y[n];
  out << ')';
  return out.str();
}

std::string expected_header(std::size_t dimension, bool with_observations) {
  std::string h;
  for (std::size_t n = 1; n <= dimension; ++n) h += (n > 1 ? ",y" : "y") + std::to_string(n);
  if (with_observations) h += ",g";
  return h;
}

std::vector<std::string_view> split(std::string_view line) {
  std::vector<std::string_view> fields;
  std::size_t start = 0;
  while (true) {
    auto comma = line.find(',', start);
    fields.push_back(line.substr(start, comma == std::string_view::npos ? std::string_view::npos
                                                                           : comma - start));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return fields;
}

}  // namespace

double evaluate_checked(const Evaluator& g, std::span<const double> y) {
  double value = 0.0;
  try {
    value = g(y);
  } catch (const std::exception& e) {
    throw Error("evaluation_failed", "evaluator failed at y = " + format_point(y) + ": " + e.what());
  }
  if (!std::isfinite(value)) {
    throw Error("evaluation_failed", "evaluator returned a non-finite value at y = " +
                                         format_point(y));
  }
  return value;
}

std::uint64_t splitmix64(std::uint64_t x) noexcept {
  x += 0x9E3779B97F4A7C15ull;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

std::uint64_t stream_seed(std::uint64_t seed, StreamKind kind) noexcept {
  return splitmix64(seed + static_cast<std::uint64_t>(kind) * 0x9E3779B97F4A7C15ull);
}

SampleStream::SampleStream(std::uint64_t seed, StreamKind kind)
    : engine_(stream_seed(seed, kind)) {}

double SampleStream::uniform() noexcept {
  return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
}

Point SampleStream::draw(const InputModel& model) {
  Point y(model.dimension());
  for (std::size_t n = 0; n < y.size(); ++n) {
    const auto& v = model[n];
    y[n] = v.lower + uniform() * v.width();
  }
  return y;
}

std::vector<Point> sample_ed(const InputModel& model, std::size_t count, std::uint64_t seed) {
  if (count == 0) throw Error("invalid_argument", "experimental design size must be >= 1");
  SampleStream stream(seed, StreamKind::ExperimentalDesign);
  std::vector<Point> out;
  out.reserve(count);
  for (std::size_t l = 0; l < count; ++l) out.push_back(stream.draw(model));
  return out;
}

std::vector<Point> cv_sample(const InputModel& model, std::size_t count, std::uint64_t seed) {
  if (count == 0) throw Error("invalid_argument", "cross-validation sample size must be >= 1");
  SampleStream stream(seed, StreamKind::CrossValidation);
  std::vector<Point> out;
  out.reserve(count);
  for (std::size_t q = 0; q < count; ++q) out.push_back(stream.draw(model));
  return out;
}

Dataset::Dataset(std::size_t dimension, std::uint64_t seed)
    : dimension_(dimension), seed_(seed), stream_(SampleStream(seed, StreamKind::ExperimentalDesign)) {
  if (dimension == 0) throw Error("invalid_argument", "dataset dimension must be >= 1");
}

Dataset Dataset::unseeded(std::size_t dimension) {
  Dataset d(dimension, 0);
  d.stream_.reset();
  return d;
}

Dataset Dataset::from_records(std::vector<Point> design, std::vector<double> observations) {
  if (design.size() != observations.size()) {
    throw Error("dimension_mismatch", std::to_string(design.size()) + " design points but " +
                                          std::to_string(observations.size()) + " observations");
  }
  if (design.empty()) throw Error("invalid_argument", "dataset has no records");
  Dataset d = unseeded(design.front().size());
  for (std::size_t l = 0; l < design.size(); ++l) d.append(std::move(design[l]), observations[l]);
  return d;
}

void Dataset::extend(const InputModel& model, const Evaluator& g, std::size_t k) {
  if (!stream_) throw Error("invalid_argument", "dataset has no sampling stream to extend from");
  if (k == 0) throw Error("invalid_argument", "expansion batch must be >= 1");
  if (model.dimension() != dimension_) {
    throw Error("dimension_mismatch", "input model dimension " + std::to_string(model.dimension()) +
                                          " vs dataset dimension " + std::to_string(dimension_));
  }
  // Points are drawn and evaluated first, then committed, so a failing
  // evaluator leaves the dataset untouched.
  std::vector<Point> points;
  std::vector<double> values;
  SampleStream stream = *stream_;
  for (std::size_t i = 0; i < k; ++i) {
    points.push_back(stream.draw(model));
    values.push_back(evaluate_checked(g, points.back()));
  }
  stream_ = stream;
  for (std::size_t i = 0; i < k; ++i) {
    design_.push_back(std::move(points[i]));
    observations_.push_back(values[i]);
  }
}

void Dataset::append(Point y, double observation) {
  if (y.size() != dimension_) {
    throw Error("dimension_mismatch", "point has " + std::to_string(y.size()) +
                                          " coordinates, dataset has " +
                                          std::to_string(dimension_));
  }
  design_.push_back(std::move(y));
  observations_.push_back(observation);
}

Dataset make_dataset(const InputModel& model, const Evaluator& g, std::size_t count,
                     std::uint64_t seed) {
  if (count == 0) throw Error("invalid_argument", "experimental design size must be >= 1");
  Dataset d(model.dimension(), seed);
  d.extend(model, g, count);
  return d;
}

Dataset expand(Dataset dataset, const InputModel& model, const Evaluator& g, std::size_t k) {
  dataset.extend(model, g, k);
  return dataset;
}

void write_dataset_csv(std::ostream& out, std::span<const Point> design,
                       std::span<const double> observations) {
  if (design.size() != observations.size()) {
    throw Error("dimension_mismatch", "design and observations differ in length");
  }
  const std::size_t dim = design.empty() ? 0 : design.front().size();
  out << expected_header(dim, true) << '\n';
  char buf[32];
  for (std::size_t l = 0; l < design.size(); ++l) {
    for (double v : design[l]) {
      std::snprintf(buf, sizeof buf, "%.17g", v);
      out << buf << ',';
    }
    std::snprintf(buf, sizeof buf, "%.17g", observations[l]);
    out << buf << '\n';
  }
}

CsvTable read_csv_table(std::istream& in, bool with_observations,
                        std::optional<std::size_t> dimension) {
  std::string line;
  if (!std::getline(in, line)) throw Error("parse", "empty CSV input (expected a header line)");
  if (!line.empty() && line.back() == '\r') line.pop_back();

  const auto header = split(line);
  std::size_t dim = dimension.value_or(with_observations ? header.size() - 1 : header.size());
  const std::string want = expected_header(dim, with_observations);
  if (line != want || dim == 0) {
    throw Error("parse", "malformed CSV header '" + line + "' (expected '" + want + "')");
  }

  CsvTable table;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto fields = split(line);
    if (fields.size() != header.size()) {
      throw Error("parse", "line " + std::to_string(line_no) + " has " +
                               std::to_string(fields.size()) + " fields, expected " +
                               std::to_string(header.size()));
    }
    std::vector<double> values(fields.size());
    for (std::size_t i = 0; i < fields.size(); ++i) {
      const char* begin = fields[i].data();
      const char* end = begin + fields[i].size();
      auto [ptr, ec] = std::from_chars(begin, end, values[i]);
      if (ec != std::errc() || ptr != end) {
        throw Error("parse", "line " + std::to_string(line_no) + ": malformed number '" +
                                 std::string(fields[i]) + "'");
      }
    }
    if (with_observations) {
      table.observations.push_back(values.back());
      values.pop_back();
    }
    table.points.push_back(std::move(values));
  }
  return table;
}

}  // namespace lspce

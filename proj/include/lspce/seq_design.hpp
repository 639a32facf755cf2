#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <optional>
#include <random>
#include <span>
#include <vector>

#include "lspce/lsq_core.hpp"
#include "lspce/poly_basis.hpp"

namespace lspce {

/// Black-box model g, called with a point in physical coordinates.
using Evaluator = std::function<double(std::span<const double>)>;

/// Calls `g(y)`, rethrowing any failure (or a non-finite result) as
/// Error("evaluation_failed") naming the offending point.
double evaluate_checked(const Evaluator& g, std::span<const double> y);

/// Independent random streams derived from one user seed.
enum class StreamKind : std::uint64_t { ExperimentalDesign = 1, CrossValidation = 2 };

std::uint64_t splitmix64(std::uint64_t x) noexcept;

/// Engine seed of a stream: splitmix64(seed + kind * 0x9E3779B97F4A7C15).
std::uint64_t stream_seed(std::uint64_t seed, StreamKind kind) noexcept;

/// Portable uniform sampler: std::mt19937_64 (bit-exact by the standard)
/// with doubles formed as (x >> 11) * 2^-53, so draws are identical on every
/// platform. Points are drawn coordinate by coordinate.
class SampleStream {
 public:
  SampleStream(std::uint64_t seed, StreamKind kind);

  /// Uniform on [0, 1).
  double uniform() noexcept;
  Point draw(const InputModel& model);

 private:
  std::mt19937_64 engine_;
};

/// `count` i.i.d. points from the joint input density on the design stream.
std::vector<Point> sample_ed(const InputModel& model, std::size_t count, std::uint64_t seed);

/// Cross-validation points on the CV stream of `seed`, which never shares
/// state with the design stream of the same seed.
std::vector<Point> cv_sample(const InputModel& model, std::size_t count, std::uint64_t seed);

/// Paired design points and observations. Append-only: extending never
/// touches existing rows. Seeded datasets own the continuation of their
/// design stream, so extending by k1 then k2 equals extending by k1 + k2.
class Dataset {
 public:
  /// Empty dataset whose new points come from the design stream of `seed`.
  Dataset(std::size_t dimension, std::uint64_t seed);

  /// Empty dataset filled through append() only.
  static Dataset unseeded(std::size_t dimension);

  /// Externally supplied records (no random continuation).
  static Dataset from_records(std::vector<Point> design, std::vector<double> observations);

  std::size_t size() const noexcept { return observations_.size(); }
  std::size_t dimension() const noexcept { return dimension_; }
  std::uint64_t seed() const noexcept { return seed_; }
  bool seeded() const noexcept { return stream_.has_value(); }

  const std::vector<Point>& design() const noexcept { return design_; }
  const std::vector<double>& observations() const noexcept { return observations_; }

  /// Draws k new points from the stream and evaluates them in draw order.
  void extend(const InputModel& model, const Evaluator& g, std::size_t k);

  /// Appends one externally obtained record.
  void append(Point y, double observation);

 private:
  std::size_t dimension_;
  std::uint64_t seed_ = 0;
  std::vector<Point> design_;
  std::vector<double> observations_;
  std::optional<SampleStream> stream_;
};

/// Initial dataset of `count` points drawn from the design stream of `seed`.
Dataset make_dataset(const InputModel& model, const Evaluator& g, std::size_t count,
                     std::uint64_t seed);

/// Copy of `dataset` with k more points appended.
Dataset expand(Dataset dataset, const InputModel& model, const Evaluator& g, std::size_t k);

/// Point/observation table read from CSV.
struct CsvTable {
  std::vector<Point> points;
  std::vector<double> observations;  ///< empty unless the file had a g column
};

/// Dataset CSV: header "y1,...,yN,g", one row per point, 17 significant digits.
void write_dataset_csv(std::ostream& out, std::span<const Point> design,
                       std::span<const double> observations);

/// Reads "y1,...,yN,g" (with_observations) or "y1,...,yN". When `dimension`
/// is given the header must match it exactly. Errors name the expected
/// header or the offending line.
CsvTable read_csv_table(std::istream& in, bool with_observations,
                        std::optional<std::size_t> dimension = std::nullopt);

}  // namespace lspce

#pragma once

#include <cstddef>
#include <functional>
#include <initializer_list>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace lspce {

/// Exponent vector p = (p_1, ..., p_N) selecting one tensorized basis
/// polynomial. Entries are unsigned, so non-negativity holds by construction.
class MultiIndex {
 public:
  MultiIndex() = default;
  explicit MultiIndex(std::vector<unsigned> exponents) : exponents_(std::move(exponents)) {}
  MultiIndex(std::initializer_list<unsigned> exponents) : exponents_(exponents) {}

  static MultiIndex zero(std::size_t dimension) {
    return MultiIndex(std::vector<unsigned>(dimension, 0u));
  }

  std::size_t dimension() const noexcept { return exponents_.size(); }
  unsigned operator[](std::size_t n) const { return exponents_[n]; }
  const std::vector<unsigned>& exponents() const noexcept { return exponents_; }

  unsigned total_degree() const noexcept;
  unsigned max_degree() const noexcept;
  bool is_zero() const noexcept { return total_degree() == 0; }

  /// p + e_n
  MultiIndex incremented(std::size_t n) const;
  /// p - e_n, or nullopt when p_n == 0.
  std::optional<MultiIndex> decremented(std::size_t n) const;

  /// Whitespace-free text form "p1,p2,...,pN".
  std::string to_string() const;
  static MultiIndex parse(std::string_view text);

  friend bool operator==(const MultiIndex&, const MultiIndex&) = default;

 private:
  std::vector<unsigned> exponents_;
};

struct MultiIndexHash {
  std::size_t operator()(const MultiIndex& index) const noexcept;
};

/// Strict weak order used everywhere an index order is needed: total degree
/// ascending, then exponents compared lexicographically descending, so that
/// (1,0) precedes (0,1).
bool graded_less(const MultiIndex& a, const MultiIndex& b) noexcept;

/// Ordered collection of distinct multi-indices sharing one dimension.
/// Insertion order is significant: coefficient vectors are aligned with it.
class MultiIndexSet {
 public:
  using const_iterator = std::vector<MultiIndex>::const_iterator;

  explicit MultiIndexSet(std::size_t dimension);
  MultiIndexSet(std::size_t dimension, std::vector<MultiIndex> indices);

  /// {(0,...,0)}
  static MultiIndexSet root(std::size_t dimension);

  std::size_t dimension() const noexcept { return dimension_; }
  std::size_t size() const noexcept { return indices_.size(); }
  bool empty() const noexcept { return indices_.empty(); }

  const MultiIndex& operator[](std::size_t i) const { return indices_[i]; }
  const std::vector<MultiIndex>& indices() const noexcept { return indices_; }
  const_iterator begin() const noexcept { return indices_.begin(); }
  const_iterator end() const noexcept { return indices_.end(); }

  bool contains(const MultiIndex& index) const;
  std::optional<std::size_t> position(const MultiIndex& index) const;

  /// Copy with `index` appended. Throws if it is already a member.
  MultiIndexSet with(const MultiIndex& index) const;

  /// Largest single exponent over all members and coordinates.
  unsigned max_degree() const noexcept;

  friend bool operator==(const MultiIndexSet& a, const MultiIndexSet& b) {
    return a.dimension_ == b.dimension_ && a.indices_ == b.indices_;
  }

 private:
  void insert(MultiIndex index);

  std::size_t dimension_;
  std::vector<MultiIndex> indices_;
  std::unordered_map<MultiIndex, std::size_t, MultiIndexHash> lookup_;
};

enum class SetKind { TensorProduct, TotalDegree, HyperbolicCross };

/// "TP", "TD" or "HC".
SetKind parse_set_kind(std::string_view name);
std::string to_string(SetKind kind);

/// Standard index sets:
///   TP: max_n p_n <= p_max
///   TD: sum_n p_n <= p_max
///   HC: prod_n (p_n + 1) <= p_max + 1
/// Returned in graded order.
MultiIndexSet generate_set(SetKind kind, std::size_t dimension, unsigned max_degree);

/// True iff p - e_n is a member for every member p and every n with p_n > 0.
bool is_downward_closed(const MultiIndexSet& set);

/// Indices outside `set` whose addition keeps it downward-closed, in graded
/// order. Throws "not_downward_closed" for an invalid input.
MultiIndexSet admissible_neighbors(const MultiIndexSet& set);

/// Members of `set` in their order, followed by new members of `extra` in
/// theirs.
MultiIndexSet union_with(const MultiIndexSet& set, const MultiIndexSet& extra);

}  // namespace lspce

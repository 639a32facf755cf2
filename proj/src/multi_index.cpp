#include "lspce/multi_index.hpp"

#include <algorithm>
#include <charconv>
#include <numeric>

#include "lspce/error.hpp"

namespace lspce {

unsigned MultiIndex::total_degree() const noexcept {
  return std::accumulate(exponents_.begin(), exponents_.end(), 0u);
}

unsigned MultiIndex::max_degree() const noexcept {
  return exponents_.empty() ? 0u : *std::max_element(exponents_.begin(), exponents_.end());
}

MultiIndex MultiIndex::incremented(std::size_t n) const {
  auto e = exponents_;
  ++e.at(n);
  return MultiIndex(std::move(e));
}

std::optional<MultiIndex> MultiIndex::decremented(std::size_t n) const {
  if (exponents_.at(n) == 0) return std::nullopt;
  auto e = exponents_;
  --e[n];
  return MultiIndex(std::move(e));
}

std::string MultiIndex::to_string() const {
  std::string out;
  for (std::size_t n = 0; n < exponents_.size(); ++n) {
    if (n) out += ',';
    out += std::to_string(exponents_[n]);
  }
  return out;
}

MultiIndex MultiIndex::parse(std::string_view text) {
  std::vector<unsigned> e;
  const char* p = text.data();
  const char* end = p + text.size();
  if (p == end) throw Error("parse", "empty multi-index");
  while (true) {
    unsigned v = 0;
    auto [next, ec] = std::from_chars(p, end, v);
    if (ec != std::errc() || next == p) {
      throw Error("parse", "malformed multi-index '" + std::string(text) + "'");
    }
    e.push_back(v);
    p = next;
    if (p == end) break;
    if (*p != ',') throw Error("parse", "malformed multi-index '" + std::string(text) + "'");
    ++p;
  }
  return MultiIndex(std::move(e));
}

std::size_t MultiIndexHash::operator()(const MultiIndex& index) const noexcept {
  std::size_t h = 0xcbf29ce484222325ull;
  for (unsigned v : index.exponents()) {
    h ^= v + 0x9e3779b97f4a7c15ull + (h << 6) + (h >> 2);
  }
  return h;
}

bool graded_less(const MultiIndex& a, const MultiIndex& b) noexcept {
  const unsigned da = a.total_degree();
  const unsigned db = b.total_degree();
  if (da != db) return da < db;
  return std::lexicographical_compare(b.exponents().begin(), b.exponents().end(),
                                      a.exponents().begin(), a.exponents().end());
}

MultiIndexSet::MultiIndexSet(std::size_t dimension) : dimension_(dimension) {
  if (dimension == 0) throw Error("invalid_argument", "multi-index set dimension must be >= 1");
}

MultiIndexSet::MultiIndexSet(std::size_t dimension, std::vector<MultiIndex> indices)
    : MultiIndexSet(dimension) {
  indices_.reserve(indices.size());
  for (auto& p : indices) insert(std::move(p));
}

MultiIndexSet MultiIndexSet::root(std::size_t dimension) {
  return MultiIndexSet(dimension, {MultiIndex::zero(dimension)});
}

void MultiIndexSet::insert(MultiIndex index) {
  if (index.dimension() != dimension_) {
    throw Error("dimension_mismatch", "multi-index (" + index.to_string() + ") has dimension " +
                                          std::to_string(index.dimension()) + ", set has " +
                                          std::to_string(dimension_));
  }
  auto [it, inserted] = lookup_.emplace(index, indices_.size());
  if (!inserted) {
    throw Error("invalid_argument", "duplicate multi-index (" + index.to_string() + ")");
  }
  indices_.push_back(std::move(index));
}

bool MultiIndexSet::contains(const MultiIndex& index) const { return lookup_.count(index) != 0; }

std::optional<std::size_t> MultiIndexSet::position(const MultiIndex& index) const {
  auto it = lookup_.find(index);
  if (it == lookup_.end()) return std::nullopt;
  return it->second;
}

MultiIndexSet MultiIndexSet::with(const MultiIndex& index) const {
  MultiIndexSet out = *this;
  out.insert(index);
  return out;
}

unsigned MultiIndexSet::max_degree() const noexcept {
  unsigned m = 0;
  for (const auto& p : indices_) m = std::max(m, p.max_degree());
  return m;
}

SetKind parse_set_kind(std::string_view name) {
  if (name == "TP") return SetKind::TensorProduct;
  if (name == "TD") return SetKind::TotalDegree;
  if (name == "HC") return SetKind::HyperbolicCross;
  throw Error("invalid_argument", "unknown index set kind '" + std::string(name) +
                                      "' (expected TP, TD or HC)");
}

std::string to_string(SetKind kind) {
  switch (kind) {
    case SetKind::TensorProduct: return "TP";
    case SetKind::TotalDegree: return "TD";
    case SetKind::HyperbolicCross: return "HC";
  }
  return "?";
}

namespace {

// Depth-first enumeration with the kind's bound pruned per coordinate.
// `budget` is the remaining sum (TD), the remaining product bound (HC) or
// unused (TP).
void enumerate(SetKind kind, unsigned max_degree, std::size_t n, unsigned budget,
               std::vector<unsigned>& current, std::vector<MultiIndex>& out) {
  if (n == current.size()) {
    out.emplace_back(current);
    return;
  }
  for (unsigned v = 0;; ++v) {
    unsigned next_budget = budget;
    bool ok = false;
    switch (kind) {
      case SetKind::TensorProduct:
        ok = v <= max_degree;
        break;
      case SetKind::TotalDegree:
        ok = v <= budget;
        next_budget = budget - (ok ? v : 0);
        break;
      case SetKind::HyperbolicCross:
        ok = v + 1 <= budget;
        next_budget = ok ? budget / (v + 1) : 0;
        break;
    }
    if (!ok) break;
    current[n] = v;
    enumerate(kind, max_degree, n + 1, next_budget, current, out);
  }
  current[n] = 0;
}

}  // namespace

MultiIndexSet generate_set(SetKind kind, std::size_t dimension, unsigned max_degree) {
  if (dimension == 0) throw Error("invalid_argument", "dimension must be >= 1");
  std::vector<unsigned> current(dimension, 0u);
  std::vector<MultiIndex> out;
  const unsigned budget = kind == SetKind::HyperbolicCross ? max_degree + 1 : max_degree;
  enumerate(kind, max_degree, 0, budget, current, out);
  std::sort(out.begin(), out.end(), graded_less);
  return MultiIndexSet(dimension, std::move(out));
}

bool is_downward_closed(const MultiIndexSet& set) {
  for (const auto& p : set) {
    for (std::size_t n = 0; n < p.dimension(); ++n) {
      if (auto q = p.decremented(n); q && !set.contains(*q)) return false;
    }
  }
  return true;
}

MultiIndexSet admissible_neighbors(const MultiIndexSet& set) {
  if (!is_downward_closed(set)) {
    throw Error("not_downward_closed", "admissible neighbors require a downward-closed set");
  }
  const std::size_t dim = set.dimension();
  std::vector<MultiIndex> candidates;
  std::unordered_map<MultiIndex, bool, MultiIndexHash> seen;
  for (const auto& q : set) {
    for (std::size_t n = 0; n < dim; ++n) {
      MultiIndex p = q.incremented(n);
      if (set.contains(p) || seen.count(p)) continue;
      bool admissible = true;
      for (std::size_t m = 0; m < dim && admissible; ++m) {
        if (auto back = p.decremented(m); back && !set.contains(*back)) admissible = false;
      }
      seen.emplace(p, admissible);
      if (admissible) candidates.push_back(std::move(p));
    }
  }
  std::sort(candidates.begin(), candidates.end(), graded_less);
  return MultiIndexSet(dim, std::move(candidates));
}

MultiIndexSet union_with(const MultiIndexSet& set, const MultiIndexSet& extra) {
  if (set.dimension() != extra.dimension()) {
    throw Error("dimension_mismatch", "cannot unite sets of dimension " +
                                          std::to_string(set.dimension()) + " and " +
                                          std::to_string(extra.dimension()));
  }
  std::vector<MultiIndex> merged = set.indices();
  for (const auto& p : extra) {
    if (!set.contains(p)) merged.push_back(p);
  }
  // `extra` itself may not repeat members, so only `set` needs checking.
  return MultiIndexSet(set.dimension(), std::move(merged));
}

}  // namespace lspce

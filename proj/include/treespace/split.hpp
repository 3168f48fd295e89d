#pragma once

#include <algorithm>
#include <bit>
#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "treespace/errors.hpp"

namespace treespace {

// Leaf alphabet of a tree space T_{m+2}. Labels are kept sorted, so leaf
// index order is label order and bitmask comparisons follow the canonical
// order directly.
class LeafSet {
 public:
  static constexpr std::size_t max_leaves = 64;

  LeafSet(std::vector<std::string> labels, std::string root_label)
      : labels_(std::move(labels)), root_(std::move(root_label)) {
    std::sort(labels_.begin(), labels_.end());
    if (labels_.size() < 3) {
      throw InvalidArgument("a leaf set needs at least 3 leaves");
    }
    if (labels_.size() > max_leaves) {
      throw InvalidArgument("at most 64 leaves are supported");
    }
    if (std::adjacent_find(labels_.begin(), labels_.end()) != labels_.end()) {
      throw InvalidArgument("duplicate leaf label");
    }
    if (std::binary_search(labels_.begin(), labels_.end(), root_)) {
      throw InvalidArgument("root label '" + root_ + "' is also a leaf label");
    }
  }

  std::size_t size() const noexcept { return labels_.size(); }
  int dim() const noexcept { return static_cast<int>(labels_.size()) - 2; }
  const std::vector<std::string>& labels() const noexcept { return labels_; }
  const std::string& label(std::size_t i) const { return labels_.at(i); }
  const std::string& root_label() const noexcept { return root_; }

  std::optional<std::size_t> index_of(const std::string& label) const {
    auto it = std::lower_bound(labels_.begin(), labels_.end(), label);
    if (it == labels_.end() || *it != label) return std::nullopt;
    return static_cast<std::size_t>(it - labels_.begin());
  }

  std::uint64_t full_mask() const noexcept {
    return labels_.size() == 64 ? ~std::uint64_t{0} : (std::uint64_t{1} << labels_.size()) - 1;
  }

  friend bool operator==(const LeafSet& a, const LeafSet& b) {
    return a.labels_ == b.labels_ && a.root_ == b.root_;
  }

 private:
  std::vector<std::string> labels_;
  std::string root_;
};

using LeafSetPtr = std::shared_ptr<const LeafSet>;

inline LeafSetPtr make_leafset(std::vector<std::string> labels, std::string root_label = "r") {
  return std::make_shared<const LeafSet>(std::move(labels), std::move(root_label));
}

inline bool same_leafset(const LeafSetPtr& a, const LeafSetPtr& b) {
  return a == b || (a && b && *a == *b);
}

// A clade as a bitmask over leaf indices. Operator< is the bitmask order; use
// canonical_less for the canonical split order.
struct Split {
  std::uint64_t bits = 0;

  constexpr Split() = default;
  constexpr explicit Split(std::uint64_t b) : bits(b) {}

  int size() const noexcept { return std::popcount(bits); }
  bool contains(std::size_t leaf) const noexcept { return (bits >> leaf) & 1U; }

  friend constexpr bool operator==(Split a, Split b) { return a.bits == b.bits; }
  friend constexpr auto operator<=>(Split a, Split b) { return a.bits <=> b.bits; }
};

// Lexicographic order of the sorted leaf-index lists: a proper prefix comes
// first, so {a,b} < {a,b,c} < {a,c}.
inline bool canonical_less(Split a, Split b) noexcept {
  std::uint64_t x = a.bits;
  std::uint64_t y = b.bits;
  while (x != 0 && y != 0) {
    int i = std::countr_zero(x);
    int j = std::countr_zero(y);
    if (i != j) return i < j;
    x &= x - 1;
    y &= y - 1;
  }
  return x == 0 && y != 0;
}

struct CanonicalLess {
  bool operator()(Split a, Split b) const noexcept { return canonical_less(a, b); }
};

// Rooted clade compatibility: nested or disjoint.
inline bool compatible(Split a, Split b) noexcept {
  std::uint64_t c = a.bits & b.bits;
  return c == 0 || c == a.bits || c == b.bits;
}

inline bool is_valid_split(const LeafSet& leaves, Split s) noexcept {
  int k = s.size();
  return (s.bits & ~leaves.full_mask()) == 0 && k >= 2 && k <= static_cast<int>(leaves.size()) - 1;
}

inline void require_valid_split(const LeafSet& leaves, Split s) {
  if (!is_valid_split(leaves, s)) {
    throw InvalidArgument("split is not a valid clade for this leaf set");
  }
}

// Checked compatibility for two splits of the given leaf set.
inline bool are_compatible(const LeafSet& leaves, Split a, Split b) {
  require_valid_split(leaves, a);
  require_valid_split(leaves, b);
  return compatible(a, b);
}

inline Split split_from_labels(const LeafSet& leaves, const std::vector<std::string>& clade) {
  Split s;
  for (const auto& l : clade) {
    auto i = leaves.index_of(l);
    if (!i) throw InvalidArgument("unknown leaf label '" + l + "'");
    s.bits |= std::uint64_t{1} << *i;
  }
  require_valid_split(leaves, s);
  return s;
}

inline std::vector<std::string> split_labels(const LeafSet& leaves, Split s) {
  std::vector<std::string> out;
  for (std::uint64_t x = s.bits; x != 0; x &= x - 1) {
    out.push_back(leaves.label(static_cast<std::size_t>(std::countr_zero(x))));
  }
  return out;
}

// "a|b|c" form used by the CSV sidecar and reports.
inline std::string split_name(const LeafSet& leaves, Split s) {
  std::string out;
  for (const auto& l : split_labels(leaves, s)) {
    if (!out.empty()) out += '|';
    out += l;
  }
  return out;
}

inline Split split_from_name(const LeafSet& leaves, const std::string& name) {
  std::vector<std::string> parts;
  std::size_t start = 0;
  while (true) {
    auto bar = name.find('|', start);
    parts.push_back(name.substr(start, bar == std::string::npos ? std::string::npos : bar - start));
    if (bar == std::string::npos) break;
    start = bar + 1;
  }
  return split_from_labels(leaves, parts);
}

}  // namespace treespace

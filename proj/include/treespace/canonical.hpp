#pragma once

#include <cstdint>
#include <unordered_map>
#include <vector>

#include "treespace/split.hpp"

namespace treespace {

// 2^{m+2} - m - 4: clades of m+2 leaves with at least two members and at
// least one leaf outside.
inline std::uint64_t count_edge_types(int m) {
  if (m < 1 || m > 61) throw InvalidArgument("count_edge_types needs 1 <= m <= 61");
  return (std::uint64_t{1} << (m + 2)) - static_cast<std::uint64_t>(m) - 4;
}

// All valid splits of a leaf set in canonical order.
class CanonicalOrder {
 public:
  static constexpr std::size_t max_leaves = 22;

  explicit CanonicalOrder(const LeafSet& leaves) {
    if (leaves.size() > max_leaves) throw InvalidArgument("canonical order is limited to 22 leaves");
    const std::uint64_t full = leaves.full_mask();
    for (std::uint64_t b = 1; b < full; ++b) {
      Split s(b);
      if (is_valid_split(leaves, s)) splits_.push_back(s);
    }
    std::sort(splits_.begin(), splits_.end(), CanonicalLess{});
    index_.reserve(splits_.size());
    for (std::size_t i = 0; i < splits_.size(); ++i) index_.emplace(splits_[i].bits, i);
  }

  const std::vector<Split>& splits() const noexcept { return splits_; }
  std::size_t size() const noexcept { return splits_.size(); }

  std::size_t index_of(Split s) const {
    auto it = index_.find(s.bits);
    if (it == index_.end()) throw InvalidArgument("split not in canonical order");
    return it->second;
  }

 private:
  std::vector<Split> splits_;
  std::unordered_map<std::uint64_t, std::size_t> index_;
};

// Every binary topology as its canonically sorted split list, built by
// inserting leaves one at a time on every edge of the rooted tree.
inline std::vector<std::vector<Split>> enumerate_binary_topologies(const LeafSet& leaves) {
  if (leaves.dim() > 5) throw InvalidArgument("enumerate_binary_topologies is limited to m <= 5");
  const std::size_t n = leaves.size();
  // A rooted tree is its clade list: singletons, internal clades, full set.
  std::vector<std::vector<std::uint64_t>> trees{{1, 2, 3}};
  for (std::size_t k = 2; k < n; ++k) {
    const std::uint64_t leaf = std::uint64_t{1} << k;
    std::vector<std::vector<std::uint64_t>> next;
    next.reserve(trees.size() * (2 * k - 1));
    for (const auto& clades : trees) {
      for (std::uint64_t c : clades) {
        std::vector<std::uint64_t> grown;
        grown.reserve(clades.size() + 2);
        for (std::uint64_t d : clades) grown.push_back((d & c) == c ? d | leaf : d);
        grown.push_back(c);
        grown.push_back(leaf);
        next.push_back(std::move(grown));
      }
    }
    trees = std::move(next);
  }
  std::vector<std::vector<Split>> out;
  out.reserve(trees.size());
  for (const auto& clades : trees) {
    std::vector<Split> splits;
    for (std::uint64_t c : clades) {
      Split s(c);
      if (is_valid_split(leaves, s)) splits.push_back(s);
    }
    std::sort(splits.begin(), splits.end(), CanonicalLess{});
    out.push_back(std::move(splits));
  }
  return out;
}

}  // namespace treespace

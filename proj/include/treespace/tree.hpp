#pragma once

#include <cmath>
#include <optional>
#include <vector>

#include <Eigen/Dense>

#include "treespace/split.hpp"

namespace treespace {

struct Edge {
  Split split;
  double length = 0.0;
};

// A point of tree space: pairwise-compatible splits with positive lengths,
// stored in canonical order.
class Tree {
 public:
  struct Trusted {};

  explicit Tree(LeafSetPtr leaves) : leaves_(std::move(leaves)) {
    if (!leaves_) throw InvalidArgument("null leaf set");
  }

  Tree(LeafSetPtr leaves, std::vector<Edge> edges) : Tree(std::move(leaves), std::move(edges), Trusted{}) {
    validate();
  }

  // Skips validation. Callers guarantee sorted, compatible, positive edges.
  Tree(LeafSetPtr leaves, std::vector<Edge> edges, Trusted) : leaves_(std::move(leaves)), edges_(std::move(edges)) {
    std::sort(edges_.begin(), edges_.end(),
              [](const Edge& a, const Edge& b) { return canonical_less(a.split, b.split); });
  }

  static Tree star(LeafSetPtr leaves) { return Tree(std::move(leaves)); }

  const LeafSetPtr& leafset_ptr() const noexcept { return leaves_; }
  const LeafSet& leafset() const noexcept { return *leaves_; }
  const std::vector<Edge>& edges() const noexcept { return edges_; }
  std::size_t num_edges() const noexcept { return edges_.size(); }
  int dim() const noexcept { return leaves_->dim(); }
  int codim() const noexcept { return dim() - static_cast<int>(edges_.size()); }
  bool is_binary() const noexcept { return codim() == 0; }

  std::optional<double> length_of(Split s) const {
    auto it = find(s);
    if (it == edges_.end()) return std::nullopt;
    return it->length;
  }
  bool has(Split s) const { return find(s) != edges_.end(); }

  std::vector<Split> splits() const {
    std::vector<Split> out;
    out.reserve(edges_.size());
    for (const auto& e : edges_) out.push_back(e.split);
    return out;
  }

  Eigen::VectorXd lengths() const {
    Eigen::VectorXd v(static_cast<Eigen::Index>(edges_.size()));
    for (std::size_t i = 0; i < edges_.size(); ++i) v[static_cast<Eigen::Index>(i)] = edges_[i].length;
    return v;
  }

  double norm() const {
    double s = 0.0;
    for (const auto& e : edges_) s += e.length * e.length;
    return std::sqrt(s);
  }

  friend bool operator==(const Tree& a, const Tree& b) {
    if (!same_leafset(a.leaves_, b.leaves_) || a.edges_.size() != b.edges_.size()) return false;
    for (std::size_t i = 0; i < a.edges_.size(); ++i) {
      if (a.edges_[i].split != b.edges_[i].split || a.edges_[i].length != b.edges_[i].length) return false;
    }
    return true;
  }

 private:
  std::vector<Edge>::const_iterator find(Split s) const {
    auto it = std::lower_bound(edges_.begin(), edges_.end(), s,
                               [](const Edge& e, Split x) { return canonical_less(e.split, x); });
    if (it != edges_.end() && it->split == s) return it;
    return edges_.end();
  }

  void validate() const {
    for (std::size_t i = 0; i < edges_.size(); ++i) {
      require_valid_split(*leaves_, edges_[i].split);
      if (!(edges_[i].length > 0.0) || !std::isfinite(edges_[i].length)) {
        throw InvalidArgument("edge lengths must be positive and finite");
      }
      if (i > 0 && edges_[i].split == edges_[i - 1].split) throw InvalidArgument("duplicate split");
      for (std::size_t j = 0; j < i; ++j) {
        if (!compatible(edges_[i].split, edges_[j].split)) throw InvalidArgument("incompatible splits in tree");
      }
    }
    if (static_cast<int>(edges_.size()) > leaves_->dim()) throw InvalidArgument("too many edges");
  }

  LeafSetPtr leaves_;
  std::vector<Edge> edges_;
};

inline void require_same_leafset(const Tree& a, const Tree& b) {
  if (!same_leafset(a.leafset_ptr(), b.leafset_ptr())) throw LeafSetMismatch();
}

// Builds a tree from lengths over a fixed split list, dropping entries <= 0.
inline Tree tree_from_coordinates(const LeafSetPtr& leaves, const std::vector<Split>& splits,
                                  const Eigen::VectorXd& x) {
  std::vector<Edge> edges;
  for (std::size_t i = 0; i < splits.size(); ++i) {
    double v = x[static_cast<Eigen::Index>(i)];
    if (v > 0.0) edges.push_back({splits[i], v});
  }
  return Tree(leaves, std::move(edges), Tree::Trusted{});
}

inline Eigen::VectorXd coordinates_on(const Tree& t, const std::vector<Split>& splits) {
  Eigen::VectorXd x(static_cast<Eigen::Index>(splits.size()));
  for (std::size_t i = 0; i < splits.size(); ++i) x[static_cast<Eigen::Index>(i)] = t.length_of(splits[i]).value_or(0.0);
  return x;
}

}  // namespace treespace

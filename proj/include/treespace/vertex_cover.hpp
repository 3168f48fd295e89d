#pragma once

#include <algorithm>
#include <limits>
#include <queue>
#include <vector>

namespace treespace {

// Max flow on a small dense network with floating capacities. Residual
// capacities below eps count as saturated.
class MaxFlow {
 public:
  explicit MaxFlow(int n, double eps = 1e-12) : n_(n), eps_(eps), cap_(static_cast<std::size_t>(n * n), 0.0) {}

  void add_arc(int u, int v, double c) { cap_[idx(u, v)] += c; }

  double run(int s, int t) {
    double total = 0.0;
    std::vector<int> parent(static_cast<std::size_t>(n_));
    while (true) {
      std::fill(parent.begin(), parent.end(), -1);
      parent[static_cast<std::size_t>(s)] = s;
      std::queue<int> q;
      q.push(s);
      while (!q.empty() && parent[static_cast<std::size_t>(t)] < 0) {
        int u = q.front();
        q.pop();
        for (int v = 0; v < n_; ++v) {
          if (parent[static_cast<std::size_t>(v)] < 0 && cap_[idx(u, v)] > eps_) {
            parent[static_cast<std::size_t>(v)] = u;
            q.push(v);
          }
        }
      }
      if (parent[static_cast<std::size_t>(t)] < 0) break;
      double push = std::numeric_limits<double>::infinity();
      for (int v = t; v != s; v = parent[static_cast<std::size_t>(v)]) {
        push = std::min(push, cap_[idx(parent[static_cast<std::size_t>(v)], v)]);
      }
      for (int v = t; v != s; v = parent[static_cast<std::size_t>(v)]) {
        int u = parent[static_cast<std::size_t>(v)];
        cap_[idx(u, v)] -= push;
        cap_[idx(v, u)] += push;
      }
      total += push;
    }
    return total;
  }

  // Vertices reachable from s in the residual network after run().
  std::vector<bool> source_side(int s) const {
    std::vector<bool> seen(static_cast<std::size_t>(n_), false);
    std::vector<int> stack{s};
    seen[static_cast<std::size_t>(s)] = true;
    while (!stack.empty()) {
      int u = stack.back();
      stack.pop_back();
      for (int v = 0; v < n_; ++v) {
        if (!seen[static_cast<std::size_t>(v)] && cap_[idx(u, v)] > eps_) {
          seen[static_cast<std::size_t>(v)] = true;
          stack.push_back(v);
        }
      }
    }
    return seen;
  }

 private:
  std::size_t idx(int u, int v) const { return static_cast<std::size_t>(u * n_ + v); }

  int n_;
  double eps_;
  std::vector<double> cap_;
};

struct VertexCover {
  std::vector<bool> left;
  std::vector<bool> right;
  double weight = 0.0;
};

// Minimum-weight vertex cover of a bipartite graph (edge (i,j) iff
// adjacent[i][j]). force_left / force_right pin vertices into the cover,
// keep_left / keep_right pin them out of it.
inline VertexCover min_weight_vertex_cover(const std::vector<double>& wl, const std::vector<double>& wr,
                                           const std::vector<std::vector<char>>& adjacent, int force_left = -1,
                                           int force_right = -1, int keep_left = -1, int keep_right = -1) {
  const int p = static_cast<int>(wl.size());
  const int q = static_cast<int>(wr.size());
  const int s = p + q;
  const int t = s + 1;
  double big = 1.0;
  for (double w : wl) big += w;
  for (double w : wr) big += w;
  MaxFlow flow(p + q + 2);
  for (int i = 0; i < p; ++i) {
    flow.add_arc(s, i, wl[static_cast<std::size_t>(i)]);
    for (int j = 0; j < q; ++j) {
      if (adjacent[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)]) flow.add_arc(i, p + j, big);
    }
  }
  for (int j = 0; j < q; ++j) flow.add_arc(p + j, t, wr[static_cast<std::size_t>(j)]);
  // Left vertex in cover <=> on the sink side; right vertex in cover <=> on
  // the source side.
  if (force_left >= 0) flow.add_arc(force_left, t, big);
  if (keep_left >= 0) flow.add_arc(s, keep_left, big);
  if (force_right >= 0) flow.add_arc(s, p + force_right, big);
  if (keep_right >= 0) flow.add_arc(p + keep_right, t, big);
  flow.run(s, t);
  auto reach = flow.source_side(s);
  VertexCover cover;
  cover.left.resize(static_cast<std::size_t>(p));
  cover.right.resize(static_cast<std::size_t>(q));
  for (int i = 0; i < p; ++i) {
    cover.left[static_cast<std::size_t>(i)] = !reach[static_cast<std::size_t>(i)];
    if (cover.left[static_cast<std::size_t>(i)]) cover.weight += wl[static_cast<std::size_t>(i)];
  }
  for (int j = 0; j < q; ++j) {
    cover.right[static_cast<std::size_t>(j)] = reach[static_cast<std::size_t>(p + j)];
    if (cover.right[static_cast<std::size_t>(j)]) cover.weight += wr[static_cast<std::size_t>(j)];
  }
  return cover;
}

}  // namespace treespace

#pragma once

#include <cmath>
#include <vector>

#include "treespace/tree.hpp"
#include "treespace/vertex_cover.hpp"

namespace treespace {

// A split carried straight from source to target. Either length may be zero:
// an edge of one tree that is compatible with every edge of the other tree
// grows or shrinks linearly and is kept here rather than in a pair.
struct CommonEdge {
  Split split;
  double source = 0.0;
  double target = 0.0;
};

struct SupportPart {
  std::vector<Edge> a;
  std::vector<Edge> b;
  double a_norm = 0.0;
  double b_norm = 0.0;

  double ratio() const { return a_norm / b_norm; }
  double boundary_time() const { return a_norm / (a_norm + b_norm); }
};

struct Support {
  std::vector<CommonEdge> common;
  std::vector<SupportPart> pairs;

  std::vector<double> ratios() const {
    std::vector<double> r;
    for (const auto& p : pairs) r.push_back(p.ratio());
    return r;
  }
};

namespace geodesic_detail {

inline constexpr double split_threshold = 1.0 - 1e-11;
inline constexpr double tie_tolerance = 1e-9;

inline double norm(const std::vector<Edge>& es) {
  double s = 0.0;
  for (const auto& e : es) s += e.length * e.length;
  return std::sqrt(s);
}

inline SupportPart make_part(std::vector<Edge> a, std::vector<Edge> b) {
  SupportPart p;
  p.a = std::move(a);
  p.b = std::move(b);
  p.a_norm = norm(p.a);
  p.b_norm = norm(p.b);
  return p;
}

inline bool nondegenerate(const VertexCover& c) {
  bool c1 = false, c2 = false, d1 = false, d2 = false;
  for (bool x : c.left) (x ? c1 : c2) = true;
  for (bool x : c.right) (x ? d2 : d1) = true;
  return c1 && c2 && d1 && d2;
}

inline bool is_cover(const VertexCover& c, const std::vector<std::vector<char>>& adj) {
  for (std::size_t i = 0; i < c.left.size(); ++i) {
    for (std::size_t j = 0; j < c.right.size(); ++j) {
      if (adj[i][j] && !c.left[i] && !c.right[j]) return false;
    }
  }
  return true;
}

struct CoverProblem {
  std::vector<double> wa, wb;
  std::vector<std::vector<char>> adj;

  explicit CoverProblem(const SupportPart& part) : wa(part.a.size()), wb(part.b.size()) {
    const double na2 = part.a_norm * part.a_norm;
    const double nb2 = part.b_norm * part.b_norm;
    for (std::size_t i = 0; i < wa.size(); ++i) wa[i] = part.a[i].length * part.a[i].length / na2;
    for (std::size_t j = 0; j < wb.size(); ++j) wb[j] = part.b[j].length * part.b[j].length / nb2;
    adj.assign(wa.size(), std::vector<char>(wb.size(), 0));
    for (std::size_t i = 0; i < wa.size(); ++i) {
      for (std::size_t j = 0; j < wb.size(); ++j) adj[i][j] = compatible(part.a[i].split, part.b[j].split) ? 0 : 1;
    }
  }
};

// Looks for C1 u C2 = A, D1 u D2 = B with C2 u D1 compatible and
// ||C1||/||D1|| < ||C2||/||D2||, i.e. a non-trivial vertex cover C1 u D2 of
// the incompatibility graph with normalized weight below one.
inline std::optional<std::pair<SupportPart, SupportPart>> extension(const SupportPart& part) {
  const std::size_t p = part.a.size();
  const std::size_t q = part.b.size();
  if (p < 2 || q < 2) return std::nullopt;
  CoverProblem cp(part);
  const auto& wa = cp.wa;
  const auto& wb = cp.wb;
  const auto& adj = cp.adj;
  VertexCover best = min_weight_vertex_cover(wa, wb, adj);
  if (best.weight < split_threshold && !nondegenerate(best)) {
    // The cheapest cover is one-sided; pin one vertex from each side.
    VertexCover found;
    found.weight = 2.0;
    for (std::size_t i = 0; i < p; ++i) {
      for (std::size_t j = 0; j < q; ++j) {
        VertexCover c = min_weight_vertex_cover(wa, wb, adj, static_cast<int>(i), static_cast<int>(j));
        if (c.weight < found.weight && nondegenerate(c) && is_cover(c, adj)) found = std::move(c);
      }
    }
    best = std::move(found);
  }
  if (!nondegenerate(best) || best.weight >= split_threshold) return std::nullopt;
  std::vector<Edge> c1, c2, d1, d2;
  for (std::size_t i = 0; i < p; ++i) (best.left[i] ? c1 : c2).push_back(part.a[i]);
  for (std::size_t j = 0; j < q; ++j) (best.right[j] ? d2 : d1).push_back(part.b[j]);
  return std::make_pair(make_part(std::move(c1), std::move(d1)), make_part(std::move(c2), std::move(d2)));
}

// Smallest weight of a cover with C1, C2, D1, D2 all non-empty (2 when none
// exists). A value of one means a tie between this part and a split of it.
inline double min_nontrivial_cover(const SupportPart& part) {
  const int p = static_cast<int>(part.a.size());
  const int q = static_cast<int>(part.b.size());
  double best = 2.0;
  if (p < 2 || q < 2) return best;
  CoverProblem cp(part);
  for (int i0 = 0; i0 < p; ++i0) {
    for (int i1 = 0; i1 < p; ++i1) {
      if (i1 == i0) continue;
      for (int j0 = 0; j0 < q; ++j0) {
        for (int j1 = 0; j1 < q; ++j1) {
          if (j1 == j0) continue;
          VertexCover c = min_weight_vertex_cover(cp.wa, cp.wb, cp.adj, i0, j0, i1, j1);
          if (c.weight < best && nondegenerate(c) && is_cover(c, cp.adj)) best = c.weight;
        }
      }
    }
  }
  return best;
}

inline SupportPart merge(const SupportPart& x, const SupportPart& y) {
  std::vector<Edge> a = x.a, b = x.b;
  a.insert(a.end(), y.a.begin(), y.a.end());
  b.insert(b.end(), y.b.begin(), y.b.end());
  return make_part(std::move(a), std::move(b));
}

inline bool ratio_less(double x, double y) { return x < y && (y - x) > tie_tolerance * std::max(x, y); }

}  // namespace geodesic_detail

inline Support compute_support(const Tree& source, const Tree& target) {
  using namespace geodesic_detail;
  require_same_leafset(source, target);
  Support sup;
  const auto& ea = source.edges();
  const auto& eb = target.edges();
  std::vector<Edge> only_a, only_b;
  std::size_t i = 0, j = 0;
  while (i < ea.size() || j < eb.size()) {
    if (j == eb.size() || (i < ea.size() && canonical_less(ea[i].split, eb[j].split))) {
      only_a.push_back(ea[i++]);
    } else if (i == ea.size() || canonical_less(eb[j].split, ea[i].split)) {
      only_b.push_back(eb[j++]);
    } else {
      sup.common.push_back({ea[i].split, ea[i].length, eb[j].length});
      ++i;
      ++j;
    }
  }
  auto compatible_with_all = [](Split s, const std::vector<Edge>& es) {
    for (const auto& e : es) {
      if (!compatible(s, e.split)) return false;
    }
    return true;
  };
  std::vector<Edge> a, b;
  for (const auto& e : only_a) {
    if (compatible_with_all(e.split, eb)) {
      sup.common.push_back({e.split, e.length, 0.0});
    } else {
      a.push_back(e);
    }
  }
  for (const auto& e : only_b) {
    if (compatible_with_all(e.split, ea)) {
      sup.common.push_back({e.split, 0.0, e.length});
    } else {
      b.push_back(e);
    }
  }
  std::sort(sup.common.begin(), sup.common.end(),
            [](const CommonEdge& x, const CommonEdge& y) { return canonical_less(x.split, y.split); });
  if (a.empty()) return sup;

  std::vector<SupportPart> parts{make_part(std::move(a), std::move(b))};
  const std::size_t guard = 64 * (source.num_edges() + target.num_edges() + 1);
  for (std::size_t round = 0;; ++round) {
    if (round > guard) throw Error("geodesic support refinement did not terminate");
    bool changed = false;
    for (std::size_t k = 0; k < parts.size();) {
      auto ext = extension(parts[k]);
      if (!ext) {
        ++k;
        continue;
      }
      parts[k] = std::move(ext->first);
      parts.insert(parts.begin() + static_cast<std::ptrdiff_t>(k) + 1, std::move(ext->second));
      changed = true;
    }
    // Restore non-decreasing ratios by merging any out-of-order neighbours.
    for (std::size_t k = 0; k + 1 < parts.size();) {
      if (ratio_less(parts[k + 1].ratio(), parts[k].ratio())) {
        parts[k] = merge(parts[k], parts[k + 1]);
        parts.erase(parts.begin() + static_cast<std::ptrdiff_t>(k) + 1);
        changed = true;
        if (k > 0) --k;
      } else {
        ++k;
      }
    }
    if (!changed) break;
  }
  sup.pairs = std::move(parts);
  return sup;
}

inline std::vector<CommonEdge> common_splits(const Tree& a, const Tree& b) {
  require_same_leafset(a, b);
  std::vector<CommonEdge> out;
  for (const auto& e : a.edges()) {
    if (auto l = b.length_of(e.split)) out.push_back({e.split, e.length, *l});
  }
  return out;
}

inline double support_length(const Support& s) {
  double d2 = 0.0;
  for (const auto& c : s.common) d2 += (c.source - c.target) * (c.source - c.target);
  for (const auto& p : s.pairs) d2 += (p.a_norm + p.b_norm) * (p.a_norm + p.b_norm);
  return std::sqrt(d2);
}

inline double distance(const Tree& a, const Tree& b) { return support_length(compute_support(a, b)); }

// Number of legs with strictly increasing ratios; tied neighbours count once.
inline int carrier_number(const Support& s) {
  int k = 0;
  for (std::size_t i = 0; i < s.pairs.size(); ++i) {
    if (i == 0 || geodesic_detail::ratio_less(s.pairs[i - 1].ratio(), s.pairs[i].ratio())) ++k;
  }
  return k;
}

inline int carrier_number(const Tree& a, const Tree& b) { return carrier_number(compute_support(a, b)); }

// Source edges carried straight to the target (shared splits, and splits
// compatible with the whole target).
inline int straight_source_edges(const Support& s) {
  int n = 0;
  for (const auto& c : s.common) n += c.source > 0.0 ? 1 : 0;
  return n;
}

inline bool is_singular(const Support& s, int m) { return carrier_number(s) < m - straight_source_edges(s); }

inline bool is_singular(const Tree& a, const Tree& b) {
  if (!a.is_binary()) throw UnsupportedStratum("is_singular needs a binary source tree");
  return is_singular(compute_support(a, b), a.dim());
}

inline bool ratios_tie(const std::vector<double>& ratios, double tol) {
  for (std::size_t i = 0; i + 1 < ratios.size(); ++i) {
    double x = ratios[i], y = ratios[i + 1];
    if (std::abs(y - x) <= tol * std::max(std::abs(x), std::abs(y))) return true;
  }
  return false;
}

// Tied neighbouring ratios, or a part that could be split at no cost: either
// way the support changes under arbitrarily small perturbations.
inline bool on_cell_boundary(const Support& s, double tol) {
  if (ratios_tie(s.ratios(), tol)) return true;
  for (const auto& p : s.pairs) {
    if (p.a.size() * p.b.size() > 64) continue;
    if (geodesic_detail::min_nontrivial_cover(p) <= 1.0 + tol) return true;
  }
  return false;
}

inline bool on_cell_boundary(const Tree& a, const Tree& b, double tol = 1e-9) {
  return on_cell_boundary(compute_support(a, b), tol);
}

struct Geodesic {
  Tree source;
  Tree target;
  Support support;
  double length = 0.0;
  std::vector<double> boundary_times;
};

inline Geodesic make_geodesic(const Tree& source, const Tree& target) {
  Geodesic g{source, target, compute_support(source, target), 0.0, {}};
  g.length = support_length(g.support);
  for (const auto& p : g.support.pairs) g.boundary_times.push_back(p.boundary_time());
  return g;
}

inline Tree geodesic_point(const Tree& source, const Tree& target, const Support& sup, double t) {
  if (!(t >= 0.0 && t <= 1.0)) throw InvalidArgument("geodesic parameter must lie in [0,1]");
  if (t == 0.0) return source;
  if (t == 1.0) return target;
  std::vector<Edge> edges;
  for (const auto& c : sup.common) {
    double l = (1.0 - t) * c.source + t * c.target;
    if (l > 0.0) edges.push_back({c.split, l});
  }
  for (const auto& p : sup.pairs) {
    double s = (1.0 - t) * p.a_norm - t * p.b_norm;
    if (s > 0.0) {
      for (const auto& e : p.a) edges.push_back({e.split, e.length * s / p.a_norm});
    } else if (s < 0.0) {
      for (const auto& e : p.b) edges.push_back({e.split, e.length * -s / p.b_norm});
    }
  }
  return Tree(source.leafset_ptr(), std::move(edges), Tree::Trusted{});
}

inline Tree geodesic_point(const Geodesic& g, double t) { return geodesic_point(g.source, g.target, g.support, t); }

}  // namespace treespace

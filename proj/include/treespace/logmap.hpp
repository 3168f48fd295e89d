#pragma once

#include <optional>
#include <string>

#include <Eigen/Dense>

#include "treespace/geodesic.hpp"

namespace treespace {

enum class Page { spine, alpha, beta, gamma };

inline const char* page_name(Page p) {
  switch (p) {
    case Page::alpha: return "alpha";
    case Page::beta: return "beta";
    case Page::gamma: return "gamma";
    default: return "spine";
  }
}

// Coordinates follow the base's canonical edge order. For a book chart the
// first coordinate is the off-spine one and page says where it lives.
struct TangentVector {
  Tree base;
  Eigen::VectorXd coords;
  std::optional<Page> page;
};

namespace logmap_detail {

inline Eigen::Index base_index(const Tree& base, Split s) {
  const auto& es = base.edges();
  auto it = std::lower_bound(es.begin(), es.end(), s, [](const Edge& e, Split x) { return canonical_less(e.split, x); });
  if (it == es.end() || it->split != s) return -1;
  return static_cast<Eigen::Index>(it - es.begin());
}

}  // namespace logmap_detail

// Log image over the edges of any base tree, given the support base -> t.
// Edges of t that the base lacks do not appear.
inline Eigen::VectorXd log_coordinates(const Tree& base, const Support& sup) {
  Eigen::VectorXd v = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(base.num_edges()));
  for (const auto& c : sup.common) {
    if (c.source > 0.0) v[logmap_detail::base_index(base, c.split)] = c.target - c.source;
  }
  for (const auto& p : sup.pairs) {
    const double scale = -(p.a_norm + p.b_norm) / p.a_norm;
    for (const auto& e : p.a) v[logmap_detail::base_index(base, e.split)] = scale * e.length;
  }
  return v;
}

// Phi = log + t*, over the base edges.
inline Eigen::VectorXd phi_coordinates(const Tree& base, const Support& sup) {
  return log_coordinates(base, sup) + base.lengths();
}

// Derivative of Phi with respect to the base lengths: blocks
// -||B_i|| (I/||x|| - x x^T/||x||^3) on parts with two or more source edges.
inline Eigen::MatrixXd phi_jacobian(const Tree& base, const Support& sup) {
  const auto m = static_cast<Eigen::Index>(base.num_edges());
  Eigen::MatrixXd M = Eigen::MatrixXd::Zero(m, m);
  for (const auto& p : sup.pairs) {
    if (p.a.size() < 2) continue;
    const double nx = p.a_norm;
    const double nx3 = nx * nx * nx;
    const double v = -p.b_norm;
    for (std::size_t i = 0; i < p.a.size(); ++i) {
      auto ii = logmap_detail::base_index(base, p.a[i].split);
      for (std::size_t j = 0; j < p.a.size(); ++j) {
        auto jj = logmap_detail::base_index(base, p.a[j].split);
        double entry = -p.a[i].length * p.a[j].length / nx3;
        if (i == j) entry += 1.0 / nx;
        M(ii, jj) = v * entry;
      }
    }
  }
  return M;
}

inline void require_binary_base(const Tree& base) {
  if (!base.is_binary()) {
    throw UnsupportedStratum("log map needs a binary base tree (codimension " + std::to_string(base.codim()) + ")");
  }
}

inline TangentVector log_map(const Tree& base, const Tree& t) {
  require_binary_base(base);
  return {base, log_coordinates(base, compute_support(base, t)), std::nullopt};
}

inline Eigen::VectorXd phi(const Tree& base, const Tree& t) {
  require_binary_base(base);
  return phi_coordinates(base, compute_support(base, t));
}

inline Eigen::MatrixXd derivative_matrix(const Tree& base, const Tree& t) {
  require_binary_base(base);
  Support sup = compute_support(base, t);
  if (on_cell_boundary(sup, geodesic_detail::tie_tolerance)) {
    throw CellBoundary("target lies on a cell boundary; Phi is only directionally differentiable there");
  }
  return phi_jacobian(base, sup);
}

// Is v on one of the hyperplanes x_i t*_j = x_j t*_i?
inline bool singular_hyperplane_check(const Tree& base, const Eigen::VectorXd& v, double tol) {
  require_binary_base(base);
  Eigen::VectorXd ts = base.lengths();
  if (v.size() != ts.size()) throw InvalidArgument("vector dimension does not match the base");
  const double scale = tol * (1.0 + v.norm() * ts.norm());
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    for (Eigen::Index j = i + 1; j < v.size(); ++j) {
      if (std::abs(v[i] * ts[j] - v[j] * ts[i]) <= scale) return true;
    }
  }
  return false;
}

}  // namespace treespace

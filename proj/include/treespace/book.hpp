#pragma once

#include <array>

#include "treespace/logmap.hpp"

namespace treespace {

// Children of clade `mask` in the tree with the given splits: maximal splits
// strictly inside it, then uncovered single leaves.
inline std::vector<std::uint64_t> clade_children(const std::vector<Split>& splits, std::uint64_t mask) {
  std::vector<std::uint64_t> out;
  std::uint64_t covered = 0;
  for (Split s : splits) {
    if (s.bits == mask || (s.bits & mask) != s.bits) continue;
    bool maximal = true;
    for (Split t : splits) {
      if (t.bits != s.bits && t.bits != mask && (t.bits & mask) == t.bits && (s.bits & t.bits) == s.bits) {
        maximal = false;
        break;
      }
    }
    if (maximal) {
      out.push_back(s.bits);
      covered |= s.bits;
    }
  }
  for (std::uint64_t x = mask & ~covered; x != 0; x &= x - 1) out.push_back(x & (~x + 1));
  return out;
}

// Splits compatible with every split of the tree but not in it: the new
// edges of all resolutions of its high-degree vertices.
inline std::vector<Split> refinement_splits(const Tree& tree) {
  std::vector<Split> splits = tree.splits();
  std::vector<std::uint64_t> clades;
  for (Split s : splits) clades.push_back(s.bits);
  clades.push_back(tree.leafset().full_mask());
  std::vector<Split> out;
  for (std::uint64_t c : clades) {
    auto kids = clade_children(splits, c);
    const std::size_t d = kids.size();
    if (d < 3) continue;
    if (d > 20) throw InvalidArgument("vertex degree too large to enumerate refinements");
    for (std::uint64_t sub = 1; sub + 1 < (std::uint64_t{1} << d); ++sub) {
      if (std::popcount(sub) < 2) continue;
      std::uint64_t bits = 0;
      for (std::size_t k = 0; k < d; ++k) {
        if ((sub >> k) & 1U) bits |= kids[k];
      }
      out.push_back(Split(bits));
    }
  }
  std::sort(out.begin(), out.end(), CanonicalLess{});
  return out;
}

// Chart of the open book at a codimension-one tree: the spine is the base
// stratum, the pages are its three resolutions alpha < beta < gamma.
class BookChart {
 public:
  explicit BookChart(Tree base) : base_(std::move(base)) {
    if (base_.codim() != 1) {
      throw UnsupportedStratum("book chart needs a codimension-one base (codimension " + std::to_string(base_.codim()) + ")");
    }
    spine_ = base_.splits();
    auto pages = refinement_splits(base_);
    if (pages.size() != 3) throw Error("codimension-one tree without exactly three resolutions");
    for (std::size_t i = 0; i < 3; ++i) pages_[i] = pages[i];
  }

  const Tree& base() const noexcept { return base_; }
  const std::vector<Split>& spine_splits() const noexcept { return spine_; }
  const std::array<Split, 3>& page_splits() const noexcept { return pages_; }
  int dim() const noexcept { return base_.dim(); }

  Split page_split(Page p) const {
    if (p == Page::spine) throw InvalidArgument("the spine has no page split");
    return pages_[static_cast<std::size_t>(p) - 1];
  }

  std::optional<Page> page_of(Split s) const {
    for (std::size_t i = 0; i < 3; ++i) {
      if (pages_[i] == s) return static_cast<Page>(i + 1);
    }
    return std::nullopt;
  }

  // Base tree with the page edge added at the given height.
  Tree page_tree(Page p, double height) const {
    std::vector<Edge> es = base_.edges();
    if (height > 0.0) es.push_back({page_split(p), height});
    return Tree(base_.leafset_ptr(), std::move(es), Tree::Trusted{});
  }

 private:
  Tree base_;
  std::vector<Split> spine_;
  std::array<Split, 3> pages_;
};

inline TangentVector book_log(const BookChart& chart, const Support& sup) {
  const Tree& base = chart.base();
  const auto m = static_cast<Eigen::Index>(chart.dim());
  TangentVector v{base, Eigen::VectorXd::Zero(m), Page::spine};
  for (const auto& c : sup.common) {
    if (c.source == 0.0) {
      if (auto p = chart.page_of(c.split)) {
        v.coords[0] = c.target;
        v.page = *p;
      }
    }
  }
  v.coords.tail(m - 1) = log_coordinates(base, sup);
  return v;
}

inline TangentVector book_log(const BookChart& chart, const Tree& t) {
  return book_log(chart, compute_support(chart.base(), t));
}

inline Eigen::VectorXd fold(const BookChart& chart, const TangentVector& v, Page page) {
  if (page == Page::spine) throw InvalidArgument("fold needs one of the pages alpha, beta, gamma");
  if (v.coords.size() != chart.dim()) throw InvalidArgument("tangent vector dimension does not match the chart");
  Eigen::VectorXd out = v.coords;
  const Page tag = v.page.value_or(Page::spine);
  if (tag == Page::spine) {
    out[0] = 0.0;
  } else if (tag != page) {
    out[0] = -v.coords[0];
  }
  return out;
}

inline Eigen::VectorXd spine_projection(const BookChart& chart, const Tree& t) {
  TangentVector v = book_log(chart, t);
  return v.coords.tail(v.coords.size() - 1);
}

// Derivative of the folded Phi map at a codimension-one base, taken as the
// limit from inside the chosen page. Rows/columns: off-spine, then spine.
inline Eigen::MatrixXd folded_phi_jacobian(const BookChart& chart, Page page, const Tree& t) {
  const Tree& base = chart.base();
  const double delta = 1e-7 * std::max(base.norm(), 1e-300);
  Tree lifted = chart.page_tree(page, delta);
  Support sup = compute_support(lifted, t);
  // Evaluate the blocks at page height zero.
  for (auto& p : sup.pairs) {
    for (auto& e : p.a) {
      if (e.split == chart.page_split(page)) e.length = 0.0;
    }
    p.a_norm = geodesic_detail::norm(p.a);
  }
  const auto m = static_cast<Eigen::Index>(chart.dim());
  Eigen::MatrixXd J = Eigen::MatrixXd::Zero(m, m);
  std::vector<Eigen::Index> order(lifted.num_edges());
  const Split ps = chart.page_split(page);
  Eigen::Index next = 1;
  for (std::size_t i = 0; i < lifted.num_edges(); ++i) {
    order[i] = lifted.edges()[i].split == ps ? 0 : next++;
  }
  for (const auto& p : sup.pairs) {
    if (p.a.size() < 2 || p.a_norm == 0.0) continue;
    const double nx = p.a_norm;
    const double nx3 = nx * nx * nx;
    for (const auto& ei : p.a) {
      for (const auto& ej : p.a) {
        double entry = -ei.length * ej.length / nx3;
        if (ei.split == ej.split) entry += 1.0 / nx;
        J(order[static_cast<std::size_t>(logmap_detail::base_index(lifted, ei.split))],
          order[static_cast<std::size_t>(logmap_detail::base_index(lifted, ej.split))]) = -p.b_norm * entry;
      }
    }
  }
  return J;
}

}  // namespace treespace

#pragma once

#include <array>
#include <numeric>
#include <random>

#include "treespace/book.hpp"
#include "treespace/format.hpp"

namespace treespace {

struct WeightedSample {
  std::vector<Tree> trees;
  std::vector<double> weights;

  WeightedSample() = default;
  explicit WeightedSample(std::vector<Tree> ts) : trees(std::move(ts)) {
    weights.assign(trees.size(), trees.empty() ? 0.0 : 1.0 / static_cast<double>(trees.size()));
    validate();
  }
  WeightedSample(std::vector<Tree> ts, std::vector<double> ws) : trees(std::move(ts)), weights(std::move(ws)) {
    validate();
  }

  std::size_t size() const noexcept { return trees.size(); }
  const Tree& front() const { return trees.front(); }

  void validate() const {
    if (trees.empty()) throw InvalidArgument("sample must contain at least one tree");
    if (weights.size() != trees.size()) throw InvalidArgument("one weight per tree is required");
    // Compensated sum, so large samples with equal weights pass the check.
    double total = 0.0, carry = 0.0;
    for (double w : weights) {
      if (!(w >= 0.0) || !std::isfinite(w)) throw InvalidArgument("weights must be non-negative");
      double t = total + w;
      carry += std::abs(total) >= std::abs(w) ? (total - t) + w : (w - t) + total;
      total = t;
    }
    if (std::abs(total + carry - 1.0) > 1e-12) throw InvalidArgument("weights must sum to one");
    for (const auto& t : trees) require_same_leafset(trees.front(), t);
  }
};

inline double frechet_value(const WeightedSample& sample, const Tree& x) {
  double f = 0.0;
  for (std::size_t i = 0; i < sample.size(); ++i) {
    double d = distance(x, sample.trees[i]);
    f += sample.weights[i] * d * d;
  }
  return 0.5 * f;
}

class NonConvergence : public Error {
 public:
  NonConvergence(const std::string& what, Tree last, double residual)
      : Error(what), last_(std::move(last)), residual_(residual) {}
  const Tree& last_iterate() const noexcept { return last_; }
  double residual() const noexcept { return residual_; }

 private:
  Tree last_;
  double residual_;
};

struct MeanCertificate {
  Tree mean;
  int stratum_codim = 0;
  double residual = 0.0;
  std::optional<std::array<double, 3>> book_integrals;
  std::optional<char> case_label;
  // Which of I_a <= I_b + I_c, I_b <= I_c + I_a, I_c <= I_a + I_b hold with
  // equality, and whether all three hold at all.
  std::array<bool, 3> equalities{false, false, false};
  bool inequalities_hold = true;
};

// One-sided derivative of <log_y T, e_j> for a split j refining y: the length
// of j in T when T carries j straight, else minus the norm of the straight
// edges of T that conflict with j.
inline double refinement_component(const Support& sup, Split j) {
  double conflict = 0.0;
  for (const auto& c : sup.common) {
    if (c.source != 0.0) continue;
    if (c.split == j) return c.target;
    if (!compatible(c.split, j)) conflict += c.target * c.target;
  }
  return -std::sqrt(conflict);
}

inline MeanCertificate check_mean_top(const Tree& candidate, const WeightedSample& sample) {
  if (!candidate.is_binary()) throw UnsupportedStratum("check_mean_top needs a binary candidate");
  Eigen::VectorXd sum = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(candidate.num_edges()));
  for (std::size_t i = 0; i < sample.size(); ++i) {
    require_same_leafset(candidate, sample.trees[i]);
    sum += sample.weights[i] * phi_coordinates(candidate, compute_support(candidate, sample.trees[i]));
  }
  MeanCertificate c{candidate, 0, 0.0, std::nullopt, std::nullopt, {false, false, false}, true};
  c.residual = (sum - candidate.lengths()).norm();
  return c;
}

inline char case_from_equalities(const std::array<bool, 3>& eq) {
  int n = static_cast<int>(eq[0]) + static_cast<int>(eq[1]) + static_cast<int>(eq[2]);
  return static_cast<char>('a' + n);
}

inline MeanCertificate check_mean_codim1(const Tree& candidate, const WeightedSample& sample) {
  BookChart chart(candidate);
  std::array<double, 3> I{0.0, 0.0, 0.0};
  Eigen::VectorXd spine = Eigen::VectorXd::Zero(chart.dim() - 1);
  for (std::size_t i = 0; i < sample.size(); ++i) {
    require_same_leafset(candidate, sample.trees[i]);
    TangentVector v = book_log(chart, sample.trees[i]);
    if (*v.page != Page::spine) I[static_cast<std::size_t>(*v.page) - 1] += sample.weights[i] * v.coords[0];
    spine += sample.weights[i] * v.coords.tail(chart.dim() - 1);
  }
  MeanCertificate c{candidate, 1, 0.0, std::nullopt, std::nullopt, {false, false, false}, true};
  c.residual = spine.norm();
  c.book_integrals = I;
  const double scale = I[0] + I[1] + I[2];
  for (std::size_t p = 0; p < 3; ++p) {
    double gap = I[(p + 1) % 3] + I[(p + 2) % 3] - I[p];
    c.equalities[p] = std::abs(gap) <= 1e-9 * scale;
    if (!c.equalities[p] && gap < 0.0) c.inequalities_hold = false;
  }
  c.case_label = case_from_equalities(c.equalities);
  return c;
}

struct MeanOptions {
  double tol = 1e-8;
  long max_iter = 100000;
  std::uint64_t seed = 0;
  int warm_sweeps = 2;
  bool record_trace = false;
};

struct MeanResult {
  Tree mean;
  int codim = 0;
  double residual = 0.0;
  long iterations = 0;
  std::vector<double> trace;
};

namespace frechet_detail {

// Fréchet value, gradient and Hessian of the function restricted to the
// closed orthant of a binary split list, at the point z >= 0.
struct Local {
  double f = 0.0;
  Eigen::VectorXd grad;
  Eigen::MatrixXd hess;
};

inline Local evaluate(const WeightedSample& sample, const LeafSetPtr& leaves, const std::vector<Split>& R,
                      const Eigen::VectorXd& z) {
  const auto m = static_cast<Eigen::Index>(R.size());
  Tree y = tree_from_coordinates(leaves, R, z);
  std::vector<Eigen::Index> pos;  // position in R of each edge of y
  std::vector<Eigen::Index> zero;
  for (Eigen::Index j = 0; j < m; ++j) (z[j] > 0.0 ? pos : zero).push_back(j);
  const auto k = static_cast<Eigen::Index>(pos.size());
  Eigen::VectorXd phi = Eigen::VectorXd::Zero(k);
  Eigen::MatrixXd jac = Eigen::MatrixXd::Zero(k, k);
  Eigen::VectorXd comp = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(zero.size()));
  Local out;
  for (std::size_t i = 0; i < sample.size(); ++i) {
    const double w = sample.weights[i];
    if (w == 0.0) continue;
    Support sup = compute_support(y, sample.trees[i]);
    double d = support_length(sup);
    out.f += 0.5 * w * d * d;
    phi += w * phi_coordinates(y, sup);
    jac += w * phi_jacobian(y, sup);
    for (std::size_t q = 0; q < zero.size(); ++q) {
      comp[static_cast<Eigen::Index>(q)] += w * refinement_component(sup, R[static_cast<std::size_t>(zero[q])]);
    }
  }
  out.grad = Eigen::VectorXd::Zero(m);
  out.hess = Eigen::MatrixXd::Identity(m, m);
  for (Eigen::Index a = 0; a < k; ++a) {
    out.grad[pos[static_cast<std::size_t>(a)]] = z[pos[static_cast<std::size_t>(a)]] - phi[a];
    for (Eigen::Index b = 0; b < k; ++b) {
      out.hess(pos[static_cast<std::size_t>(a)], pos[static_cast<std::size_t>(b)]) -= jac(a, b);
    }
  }
  for (std::size_t q = 0; q < zero.size(); ++q) out.grad[zero[q]] = -comp[static_cast<Eigen::Index>(q)];
  return out;
}

inline double value(const WeightedSample& sample, const LeafSetPtr& leaves, const std::vector<Split>& R,
                    const Eigen::VectorXd& z) {
  return frechet_value(sample, tree_from_coordinates(leaves, R, z));
}

// Free coordinates: positive ones, and zero ones whose one-sided derivative
// points inward.
inline std::vector<Eigen::Index> free_set(const Eigen::VectorXd& z, const Eigen::VectorXd& g) {
  std::vector<Eigen::Index> out;
  for (Eigen::Index j = 0; j < z.size(); ++j) {
    if (z[j] > 0.0 || g[j] < 0.0) out.push_back(j);
  }
  return out;
}

inline double free_norm(const Eigen::VectorXd& g, const std::vector<Eigen::Index>& F) {
  double s = 0.0;
  for (auto j : F) s += g[j] * g[j];
  return std::sqrt(s);
}

// Extends a compatible split set to a binary one, taking refinements in the
// given preference order.
inline std::vector<Split> complete(const Tree& y, const std::vector<Split>& preferred) {
  std::vector<Split> S = y.splits();
  auto fits = [&](Split s) {
    for (Split t : S) {
      if (t == s || !compatible(s, t)) return false;
    }
    return true;
  };
  for (Split s : preferred) {
    if (static_cast<int>(S.size()) == y.dim()) break;
    if (fits(s)) S.push_back(s);
  }
  if (static_cast<int>(S.size()) != y.dim()) throw Error("failed to complete a split set to a binary tree");
  std::sort(S.begin(), S.end(), CanonicalLess{});
  return S;
}

inline Tree warm_start(const WeightedSample& sample, const MeanOptions& opt) {
  std::vector<std::size_t> order(sample.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::mt19937_64 rng(opt.seed);
  std::shuffle(order.begin(), order.end(), rng);
  Tree x = sample.trees[order.front()];
  double seen = sample.weights[order.front()];
  for (int sweep = 0; sweep < opt.warm_sweeps; ++sweep) {
    for (std::size_t k = (sweep == 0 ? 1 : 0); k < order.size(); ++k) {
      const std::size_t i = order[k];
      const double w = sample.weights[i];
      if (w == 0.0) continue;
      seen += w;
      x = geodesic_point(x, sample.trees[i], compute_support(x, sample.trees[i]), w / seen);
    }
    std::shuffle(order.begin(), order.end(), rng);
  }
  return x;
}

}  // namespace frechet_detail

// Sample Fréchet mean: geodesic averaging for a start, then projected Newton
// on the closed orthant of a binary resolution, then local moves to a
// neighbouring orthant while some refinement direction still descends.
inline MeanResult solve_frechet_mean(const WeightedSample& sample, const MeanOptions& opt = {}) {
  using namespace frechet_detail;
  sample.validate();
  const LeafSetPtr& leaves = sample.front().leafset_ptr();
  MeanResult res{sample.front(), 0, 0.0, 0, {}};
  {
    bool all_same = true;
    for (std::size_t i = 0; i < sample.size() && all_same; ++i) {
      all_same = sample.weights[i] == 0.0 || sample.trees[i] == sample.front();
    }
    if (all_same) {
      for (std::size_t i = 0; i < sample.size(); ++i) {
        if (sample.weights[i] > 0.0) res.mean = sample.trees[i];
      }
      res.codim = res.mean.codim();
      return res;
    }
  }

  Tree y = warm_start(sample, opt);
  res.iterations = opt.warm_sweeps;
  double scale = 0.0;
  for (std::size_t i = 0; i < sample.size(); ++i) scale += sample.weights[i] * sample.trees[i].norm();
  const double gtol = 1e-3 * opt.tol * (1.0 + scale);

  auto ranked_refinements = [&](const Tree& at) {
    std::vector<Split> cand = refinement_splits(at);
    std::vector<double> D(cand.size(), 0.0);
    for (std::size_t i = 0; i < sample.size(); ++i) {
      if (sample.weights[i] == 0.0) continue;
      Support sup = compute_support(at, sample.trees[i]);
      for (std::size_t c = 0; c < cand.size(); ++c) D[c] -= sample.weights[i] * refinement_component(sup, cand[c]);
    }
    std::vector<std::size_t> idx(cand.size());
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return D[a] < D[b]; });
    std::vector<std::pair<Split, double>> out;
    for (auto i : idx) out.emplace_back(cand[i], D[i]);
    return out;
  };
  auto splits_of = [](const std::vector<std::pair<Split, double>>& r) {
    std::vector<Split> s;
    for (const auto& p : r) s.push_back(p.first);
    return s;
  };

  std::vector<Split> R = y.is_binary() ? y.splits() : complete(y, splits_of(ranked_refinements(y)));
  Eigen::VectorXd z = coordinates_on(y, R);
  double residual = 0.0;

  for (int outer = 0;; ++outer) {
    if (outer > 1000) throw NonConvergence("orthant search did not settle", y, residual);
    // Projected Newton in the closed orthant of R.
    Local L = evaluate(sample, leaves, R, z);
    if (opt.record_trace) res.trace.push_back(L.f);
    while (true) {
      if (++res.iterations > opt.max_iter) {
        throw NonConvergence("mean iteration budget exhausted", tree_from_coordinates(leaves, R, z), residual);
      }
      auto F = free_set(z, L.grad);
      residual = free_norm(L.grad, F);
      if (residual <= gtol || F.empty()) break;
      // The function is not smooth where coordinates vanish, so small
      // coordinates that want to shrink are first tried at zero outright.
      {
        double eps = 0.0;
        for (Eigen::Index j = 0; j < z.size(); ++j) {
          double r = z[j] - std::max(0.0, z[j] - L.grad[j]);
          eps += r * r;
        }
        eps = std::sqrt(eps);
        Eigen::VectorXd zs = z;
        bool any = false;
        for (Eigen::Index j = 0; j < z.size(); ++j) {
          if (z[j] > 0.0 && z[j] <= eps && L.grad[j] > 0.0) {
            zs[j] = 0.0;
            any = true;
          }
        }
        if (any && value(sample, leaves, R, zs) <= L.f) {
          z = zs;
          L = evaluate(sample, leaves, R, z);
          if (opt.record_trace) res.trace.push_back(L.f);
          continue;
        }
      }
      const auto nf = static_cast<Eigen::Index>(F.size());
      Eigen::MatrixXd H(nf, nf);
      Eigen::VectorXd g(nf);
      for (Eigen::Index a = 0; a < nf; ++a) {
        g[a] = L.grad[F[static_cast<std::size_t>(a)]];
        for (Eigen::Index b = 0; b < nf; ++b) H(a, b) = L.hess(F[static_cast<std::size_t>(a)], F[static_cast<std::size_t>(b)]);
      }
      Eigen::VectorXd newton = H.llt().solve(-g);
      bool moved = false;
      // Once the predicted decrease is at rounding level of f, comparing
      // function values says nothing; skip to the gradient test below.
      const double noise = 1e-13 * (1.0 + std::abs(L.f));
      for (int attempt = 0; attempt < 2 && !moved && std::abs(g.dot(newton)) > noise; ++attempt) {
        Eigen::VectorXd d = attempt == 0 ? newton : Eigen::VectorXd(-g);
        double step = 1.0;
        for (int half = 0; half < 60; ++half, step *= 0.5) {
          Eigen::VectorXd zn = z;
          for (Eigen::Index a = 0; a < nf; ++a) {
            auto j = F[static_cast<std::size_t>(a)];
            zn[j] = std::max(0.0, z[j] + step * d[a]);
          }
          double decrease = 0.0;
          for (Eigen::Index j = 0; j < z.size(); ++j) decrease += L.grad[j] * (zn[j] - z[j]);
          if (std::abs(decrease) < 1e-3 * noise) break;
          double fn = value(sample, leaves, R, zn);
          if (fn <= L.f + 1e-4 * decrease && (zn - z).norm() > 0.0) {
            z = zn;
            moved = true;
            break;
          }
        }
      }
      if (!moved) {
        // Near the optimum the decrease in f drowns in rounding; accept the
        // full projected Newton step if it shrinks the free gradient.
        Eigen::VectorXd zn = z;
        for (Eigen::Index a = 0; a < nf; ++a) {
          auto j = F[static_cast<std::size_t>(a)];
          zn[j] = std::max(0.0, z[j] + newton[a]);
        }
        Local Ln = evaluate(sample, leaves, R, zn);
        if (!newton.allFinite() || free_norm(Ln.grad, free_set(zn, Ln.grad)) > 0.5 * residual) break;
        z = zn;
        L = std::move(Ln);
        if (opt.record_trace) res.trace.push_back(L.f);
        continue;
      }
      L = evaluate(sample, leaves, R, z);
      if (opt.record_trace) res.trace.push_back(L.f);
    }
    y = tree_from_coordinates(leaves, R, z);
    if (y.is_binary()) break;
    auto ranked = ranked_refinements(y);
    if (ranked.empty() || ranked.front().second >= -gtol) break;
    // Some refinement still descends: move to a resolution containing it.
    std::vector<Split> pref = splits_of(ranked);
    R = complete(y, pref);
    z = coordinates_on(y, R);
  }

  res.mean = y;
  res.codim = y.codim();
  if (res.codim == 0) {
    res.residual = check_mean_top(y, sample).residual;
  } else if (res.codim == 1) {
    res.residual = check_mean_codim1(y, sample).residual;
  } else {
    res.residual = residual;
  }
  if (res.residual > opt.tol * (1.0 + scale)) {
    throw NonConvergence("mean residual " + format_double(res.residual) + " above tolerance", y, res.residual);
  }
  return res;
}

inline Tree frechet_mean(const WeightedSample& sample, double tol = 1e-8, long max_iter = 100000,
                         std::uint64_t seed = 0) {
  MeanOptions opt;
  opt.tol = tol;
  opt.max_iter = max_iter;
  opt.seed = seed;
  return solve_frechet_mean(sample, opt).mean;
}

}  // namespace treespace

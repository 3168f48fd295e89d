#include <gtest/gtest.h>

#include "support/random_trees.hpp"
#include "treespace/frechet.hpp"

using namespace treespace;
using treespace::testkit::leaves_for;
using treespace::testkit::make_tree;
using treespace::testkit::random_tree;

namespace {

LeafSetPtr L3 = leaves_for(1);

Tree leg(const char* a, const char* b, double x) { return make_tree(L3, {{{a, b}, x}}); }

WeightedSample spider_5_1_1() {
  return WeightedSample({leg("a", "b", 5.0), leg("a", "c", 1.0), leg("b", "c", 1.0)});
}

// Minimizes the spider's Fréchet function by grid refinement over the three
// legs, independent of the geodesic code.
double spider_oracle(double& best_leg_index) {
  const double h[3] = {5.0, 1.0, 1.0};
  auto f = [&](int l, double x) {
    double s = 0.0;
    for (int j = 0; j < 3; ++j) s += (j == l) ? (h[j] - x) * (h[j] - x) : (h[j] + x) * (h[j] + x);
    return s / 6.0;
  };
  double best_f = 1e300, best_x = 0.0;
  int best_l = 0;
  for (int l = 0; l < 3; ++l) {
    double lo = 0.0, hi = 10.0;
    for (int round = 0; round < 60; ++round) {
      double step = (hi - lo) / 100.0, arg = lo, val = 1e300;
      for (int i = 0; i <= 100; ++i) {
        double x = lo + i * step;
        if (f(l, x) < val) {
          val = f(l, x);
          arg = x;
        }
      }
      lo = std::max(0.0, arg - step);
      hi = arg + step;
      if (val < best_f) {
        best_f = val;
        best_x = arg;
        best_l = l;
      }
    }
  }
  best_leg_index = best_l;
  return best_x;
}

}  // namespace

TEST(FrechetValue, Examples) {
  Tree t = leg("a", "b", 2.0);
  EXPECT_EQ(frechet_value(WeightedSample({t}), t), 0.0);
  auto L4 = leaves_for(2);
  Tree p = make_tree(L4, {{{"a", "b"}, 1.0}, {{"a", "b", "c"}, 1.0}});
  Tree q = make_tree(L4, {{{"a", "b"}, 3.0}, {{"a", "b", "c"}, 5.0}});
  Tree mid = make_tree(L4, {{{"a", "b"}, 2.0}, {{"a", "b", "c"}, 3.0}});
  double d = distance(p, q);
  EXPECT_NEAR(frechet_value(WeightedSample({p, q}), mid), d * d / 8.0, 1e-12);
  EXPECT_NEAR(frechet_value(spider_5_1_1(), Tree::star(L3)), 27.0 / 6.0, 1e-12);
}

TEST(WeightedSample, Validation) {
  Tree t = leg("a", "b", 2.0);
  EXPECT_THROW(WeightedSample(std::vector<Tree>{}), InvalidArgument);
  EXPECT_THROW(WeightedSample({t, t}, {0.5, 0.6}), InvalidArgument);
  EXPECT_THROW(WeightedSample({t, t}, {1.5, -0.5}), InvalidArgument);
  EXPECT_THROW(WeightedSample({t, Tree::star(leaves_for(2))}), LeafSetMismatch);
}

TEST(FrechetMean, SingleAndIdentical) {
  Tree t = leg("a", "b", 2.0);
  EXPECT_EQ(frechet_mean(WeightedSample({t})), t);
  EXPECT_EQ(frechet_mean(WeightedSample({t, t, t})), t);
  MeanCertificate c = check_mean_top(t, WeightedSample({t}));
  EXPECT_EQ(c.residual, 0.0);
}

TEST(FrechetMean, TwoTreesWeightedMidpoint) {
  auto L4 = leaves_for(2);
  Tree a = make_tree(L4, {{{"a", "b"}, 3.0}, {{"a", "b", "c"}, 4.0}});
  Tree b = make_tree(L4, {{{"a", "d"}, 5.0}, {{"a", "c", "d"}, 12.0}});
  for (double w2 : {0.1, 0.25, 0.5, 0.8}) {
    Tree m = frechet_mean(WeightedSample({a, b}, {1.0 - w2, w2}));
    Tree expect = geodesic_point(make_geodesic(a, b), w2);
    EXPECT_LE(distance(m, expect), 1e-8) << w2;
  }
}

TEST(FrechetMean, SpiderFiveOneOne) {
  double leg_index = -1;
  double x = spider_oracle(leg_index);
  EXPECT_EQ(leg_index, 0);
  EXPECT_NEAR(x, 1.0, 1e-10);
  WeightedSample s = spider_5_1_1();
  Tree m = frechet_mean(s);
  ASSERT_EQ(m.num_edges(), 1u);
  EXPECT_EQ(split_name(*L3, m.edges()[0].split), "a|b");
  EXPECT_NEAR(m.edges()[0].length, x, 1e-8);
  EXPECT_LE(check_mean_top(leg("a", "b", 1.0), s).residual, 1e-12);
}

TEST(FrechetMean, SpiderSymmetricIsOrigin) {
  WeightedSample s({leg("a", "b", 1.0), leg("a", "c", 1.0), leg("b", "c", 1.0)});
  MeanResult r = solve_frechet_mean(s);
  EXPECT_EQ(r.mean.num_edges(), 0u);
  MeanCertificate c = check_mean_codim1(r.mean, s);
  ASSERT_TRUE(c.book_integrals.has_value());
  EXPECT_NEAR((*c.book_integrals)[0], 1.0 / 3.0, 1e-15);
  EXPECT_TRUE(c.inequalities_hold);
  // Equal page masses make every inequality strict.
  EXPECT_EQ(*c.case_label, 'a');
}

TEST(Certificates, Codim1Examples) {
  auto L5 = leaves_for(3);
  Tree base = make_tree(L5, {{{"a", "b"}, 1.0}, {{"a", "b", "c", "d"}, 1.5}});
  BookChart chart(base);
  // All mass on the spine stratum.
  Tree s1 = make_tree(L5, {{{"a", "b"}, 0.5}, {{"a", "b", "c", "d"}, 2.0}});
  Tree s2 = make_tree(L5, {{{"a", "b"}, 1.5}, {{"a", "b", "c", "d"}, 1.0}});
  MeanCertificate c = check_mean_codim1(base, WeightedSample({s1, s2}));
  EXPECT_EQ(*c.case_label, 'd');
  EXPECT_LE(c.residual, 1e-15);
  // Two on alpha, one on beta.
  WeightedSample ab({chart.page_tree(Page::alpha, 1.0), chart.page_tree(Page::alpha, 1.0),
                     chart.page_tree(Page::beta, 1.0)});
  c = check_mean_codim1(base, ab);
  EXPECT_NEAR((*c.book_integrals)[0], 2.0 / 3.0, 1e-15);
  EXPECT_NEAR((*c.book_integrals)[1], 1.0 / 3.0, 1e-15);
  EXPECT_EQ((*c.book_integrals)[2], 0.0);
  EXPECT_FALSE(c.inequalities_hold);
  Tree m = frechet_mean(ab);
  EXPECT_TRUE(m.has(chart.page_split(Page::alpha)));
  EXPECT_NEAR(*m.length_of(chart.page_split(Page::alpha)), 1.0 / 3.0, 1e-8);
  EXPECT_THROW(check_mean_codim1(chart.page_tree(Page::alpha, 1.0), ab), UnsupportedStratum);
  EXPECT_THROW(check_mean_top(base, ab), UnsupportedStratum);
}

TEST(FrechetMean, SingleOrthantIsEuclideanAverage) {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(0.2, 3.0);
  for (int m = 1; m <= 5; ++m) {
    auto L = leaves_for(m);
    Tree shape = random_tree(L, rng);
    std::vector<Tree> ts;
    std::vector<double> w;
    Eigen::VectorXd avg = Eigen::VectorXd::Zero(m);
    for (int i = 0; i < 7; ++i) {
      std::vector<Edge> es = shape.edges();
      for (auto& e : es) e.length = u(rng);
      ts.emplace_back(L, es);
      w.push_back(i + 1.0);
    }
    double tot = 28.0;
    for (int i = 0; i < 7; ++i) {
      w[static_cast<std::size_t>(i)] /= tot;
      avg += w[static_cast<std::size_t>(i)] * ts[static_cast<std::size_t>(i)].lengths();
    }
    Tree mean = frechet_mean(WeightedSample(ts, w));
    ASSERT_EQ(mean.splits(), shape.splits());
    EXPECT_LE((mean.lengths() - avg).norm(), 1e-8);
  }
}

TEST(FrechetMean, RandomSamplesCertifyAndAgreeAcrossOrders) {
  std::mt19937_64 rng(17);
  int top = 0, codim1 = 0;
  for (int rep = 0; rep < 60; ++rep) {
    auto L = leaves_for(1 + rep % 4);
    std::vector<Tree> ts;
    for (int i = 0; i < 5 + rep % 20; ++i) ts.push_back(random_tree(L, rng, rep % 2 ? 0.2 : 0.0));
    WeightedSample s(ts);
    MeanOptions o1, o2;
    o1.record_trace = true;
    o2.seed = 12345;
    MeanResult r1 = solve_frechet_mean(s, o1);
    MeanResult r2 = solve_frechet_mean(s, o2);
    EXPECT_LE(distance(r1.mean, r2.mean), 1e-7) << rep;
    for (std::size_t i = 1; i < r1.trace.size(); ++i) EXPECT_LE(r1.trace[i], r1.trace[i - 1] + 1e-12);
    double scale = 1.0 + r1.mean.norm();
    if (r1.codim == 0) {
      ++top;
      EXPECT_LE(check_mean_top(r1.mean, s).residual, 1e-8 * scale);
    } else if (r1.codim == 1) {
      ++codim1;
      MeanCertificate c = check_mean_codim1(r1.mean, s);
      EXPECT_TRUE(c.inequalities_hold);
      EXPECT_LE(c.residual, 1e-8 * scale);
    }
    // No tree nearby does better.
    double f = frechet_value(s, r1.mean);
    for (const auto& t : ts) {
      EXPECT_GE(frechet_value(s, geodesic_point(make_geodesic(r1.mean, t), 1e-3)), f - 1e-12);
    }
  }
  EXPECT_GT(top, 0);
}

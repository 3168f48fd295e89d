#include <gtest/gtest.h>

#include <set>
#include <sstream>

#include "support/random_trees.hpp"
#include "treespace/canonical.hpp"
#include "treespace/newick.hpp"
#include "treespace/tree_csv.hpp"

using namespace treespace;
using treespace::testkit::leaves_for;
using treespace::testkit::make_tree;

namespace {

// All maximal compatible split sets, by brute force over subsets.
std::set<std::vector<std::uint64_t>> topologies_by_subsets(const LeafSet& leaves) {
  CanonicalOrder order(leaves);
  const auto& s = order.splits();
  const int m = leaves.dim();
  std::set<std::vector<std::uint64_t>> out;
  std::vector<std::size_t> pick;
  std::function<void(std::size_t)> rec = [&](std::size_t from) {
    if (static_cast<int>(pick.size()) == m) {
      std::vector<std::uint64_t> t;
      for (auto i : pick) t.push_back(s[i].bits);
      std::sort(t.begin(), t.end());
      out.insert(t);
      return;
    }
    for (std::size_t i = from; i < s.size(); ++i) {
      bool ok = true;
      for (auto j : pick) ok = ok && compatible(s[i], s[j]);
      if (!ok) continue;
      pick.push_back(i);
      rec(i + 1);
      pick.pop_back();
    }
  };
  rec(0);
  return out;
}

}  // namespace

TEST(Combinatorics, EdgeTypeCount) {
  EXPECT_EQ(count_edge_types(1), 3u);
  EXPECT_EQ(count_edge_types(2), 10u);
  EXPECT_EQ(count_edge_types(3), 25u);
  for (int m = 1; m <= 8; ++m) {
    EXPECT_EQ(CanonicalOrder(*leaves_for(m)).size(), count_edge_types(m)) << m;
  }
  EXPECT_THROW(count_edge_types(0), InvalidArgument);
}

TEST(Combinatorics, CanonicalOrderIsLexicographic) {
  auto L = leaves_for(2);
  CanonicalOrder order(*L);
  std::vector<std::string> names;
  for (Split s : order.splits()) names.push_back(split_name(*L, s));
  std::vector<std::string> expect{"a|b", "a|b|c", "a|b|d", "a|c", "a|c|d", "a|d", "b|c", "b|c|d", "b|d", "c|d"};
  EXPECT_EQ(names, expect);
}

TEST(Combinatorics, TopologyCounts) {
  const std::size_t df[] = {0, 3, 15, 105, 945};
  for (int m = 1; m <= 4; ++m) EXPECT_EQ(enumerate_binary_topologies(*leaves_for(m)).size(), df[m]);
  EXPECT_THROW(enumerate_binary_topologies(*leaves_for(6)), InvalidArgument);
}

TEST(Combinatorics, TopologiesMatchSubsetOracle) {
  for (int m = 1; m <= 3; ++m) {
    auto L = leaves_for(m);
    std::set<std::vector<std::uint64_t>> got;
    for (const auto& t : enumerate_binary_topologies(*L)) {
      std::vector<std::uint64_t> v;
      for (Split s : t) v.push_back(s.bits);
      std::sort(v.begin(), v.end());
      got.insert(v);
    }
    EXPECT_EQ(got, topologies_by_subsets(*L)) << m;
  }
}

TEST(Compatibility, Examples) {
  auto L = leaves_for(2);
  Split ab = split_from_labels(*L, {"a", "b"});
  Split cd = split_from_labels(*L, {"c", "d"});
  Split abc = split_from_labels(*L, {"a", "b", "c"});
  EXPECT_TRUE(are_compatible(*L, ab, cd));
  EXPECT_FALSE(are_compatible(*L, abc, cd));
  EXPECT_TRUE(are_compatible(*L, ab, ab));
  EXPECT_TRUE(are_compatible(*L, ab, abc));
  EXPECT_THROW(are_compatible(*L, ab, Split(0b100000)), InvalidArgument);
}

TEST(Tree, ValidationRejectsBadEdges) {
  auto L = leaves_for(2);
  EXPECT_THROW(make_tree(L, {{{"a", "b", "c"}, 1.0}, {{"c", "d"}, 1.0}}), InvalidArgument);
  EXPECT_THROW(make_tree(L, {{{"a", "b"}, 0.0}}), InvalidArgument);
  EXPECT_THROW(make_tree(L, {{{"a", "b"}, -1.0}}), InvalidArgument);
  EXPECT_THROW(make_tree(L, {{{"a"}, 1.0}}), InvalidArgument);
  EXPECT_NO_THROW(make_tree(L, {{{"a", "b"}, 1.0}, {{"c", "d"}, 2.0}}));
}

TEST(Tree, RandomTreesArePairwiseCompatible) {
  std::mt19937_64 rng(11);
  for (int m = 1; m <= 6; ++m) {
    auto L = leaves_for(m);
    for (int rep = 0; rep < 50; ++rep) {
      Tree t = treespace::testkit::random_tree(L, rng, 0.2);
      for (const auto& x : t.edges()) {
        for (const auto& y : t.edges()) EXPECT_TRUE(compatible(x.split, y.split));
      }
    }
  }
}

TEST(Newick, Examples) {
  Tree t1 = parse_newick("((a:1,b:1):2.0,c:1,d:1)r;");
  ASSERT_EQ(t1.num_edges(), 1u);
  EXPECT_EQ(split_name(t1.leafset(), t1.edges()[0].split), "a|b");
  EXPECT_EQ(t1.edges()[0].length, 2.0);

  Tree t2 = parse_newick("(((a:1,b:1):2,c:1):3,d:1)r;");
  ASSERT_EQ(t2.num_edges(), 2u);
  EXPECT_EQ(split_name(t2.leafset(), t2.edges()[0].split), "a|b");
  EXPECT_EQ(t2.edges()[0].length, 2.0);
  EXPECT_EQ(split_name(t2.leafset(), t2.edges()[1].split), "a|b|c");
  EXPECT_EQ(t2.edges()[1].length, 3.0);
  EXPECT_TRUE(t2.is_binary());

  Tree t3 = parse_newick("((a:1,b:1):0,c:1,d:1)r;");
  EXPECT_EQ(t3.num_edges(), 0u);
}

TEST(Newick, RootAsLeafIsRerooted) {
  Tree a = parse_newick("(((a,b):2,c):3,d,r);", "r");
  Tree b = parse_newick("(((a,b):2,c):3,d)r;", "r");
  EXPECT_EQ(a, b);
  Tree c = parse_newick("((r,d):3,c,(a,b):2);", "r");
  EXPECT_EQ(c, b);
}

TEST(Newick, PendantLengthsOptionalAndDiscarded) {
  Tree a = parse_newick("((a:0.5,b:7):2,c,d:1)r;");
  Tree b = parse_newick("((a,b):2,c,d)r;");
  EXPECT_EQ(a, b);
}

TEST(Newick, CommentsWhitespaceQuotes) {
  Tree t = parse_newick("[tree]\n(('a x':1, b):2 , c, d) r ;");
  EXPECT_EQ(t.leafset().labels().front(), "a x");
  EXPECT_EQ(t.num_edges(), 1u);
  Tree back = parse_newick(to_newick(t));
  EXPECT_EQ(t, back);
}

TEST(Newick, Errors) {
  try {
    parse_newick("((a:1,b:1):2.0,c:1\n,d:1;");
    FAIL();
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 2u);
    EXPECT_GT(e.column(), 0u);
  }
  EXPECT_THROW(parse_newick("((a,a):1,c,d)r;"), ParseError);
  EXPECT_THROW(parse_newick("(a,b)r;"), ParseError);
  EXPECT_THROW(parse_newick("((a,b):-1,c,d)r;"), ParseError);
  EXPECT_THROW(parse_newick("((a,b),c,d)r;"), ParseError);
  EXPECT_THROW(parse_newick("((a,b):x,c,d)r;"), ParseError);
  EXPECT_THROW(parse_newick("((a,b):1,c,d)r"), ParseError);
  EXPECT_THROW(parse_newick("((a,b):1,c,)r;"), ParseError);
  EXPECT_THROW(parse_newick(""), ParseError);
}

TEST(Newick, MultipleTreesShareLeafSet) {
  auto ts = parse_newick_trees("((a,b):1,c,d)r;\n((c,d):2,a,b)r;");
  ASSERT_EQ(ts.size(), 2u);
  EXPECT_EQ(ts[0].leafset_ptr(), ts[1].leafset_ptr());
  EXPECT_THROW(parse_newick_trees("((a,b):1,c,d)r;((a,b):1,c,e)r;"), LeafSetMismatch);
}

TEST(Newick, RoundTripRandomTrees) {
  std::mt19937_64 rng(3);
  for (int m = 1; m <= 7; ++m) {
    auto L = leaves_for(m);
    for (int rep = 0; rep < 40; ++rep) {
      Tree t = treespace::testkit::random_tree(L, rng, 0.25, 1e-3, 50.0);
      Tree back = parse_newick(to_newick(t), "r", L);
      ASSERT_EQ(back.num_edges(), t.num_edges());
      for (std::size_t i = 0; i < t.num_edges(); ++i) {
        EXPECT_EQ(back.edges()[i].split, t.edges()[i].split);
        EXPECT_NEAR(back.edges()[i].length, t.edges()[i].length, 1e-12 * t.edges()[i].length);
      }
    }
  }
}

TEST(Csv, RoundTrip) {
  std::mt19937_64 rng(5);
  auto L = leaves_for(3);
  std::vector<Tree> ts;
  for (int i = 0; i < 10; ++i) ts.push_back(treespace::testkit::random_tree(L, rng, 0.3));
  std::vector<double> w(10, 0.1);
  std::stringstream ss;
  write_tree_csv(ss, ts, &w);
  auto table = read_tree_csv(ss);
  ASSERT_EQ(table.trees.size(), ts.size());
  ASSERT_TRUE(table.weights.has_value());
  for (std::size_t i = 0; i < ts.size(); ++i) {
    EXPECT_EQ(table.trees[i].splits(), ts[i].splits());
    EXPECT_EQ(table.trees[i].lengths(), ts[i].lengths());
  }
}

TEST(Csv, Errors) {
  std::stringstream bad("a|b,a|b|c\n1,x\n");
  EXPECT_THROW(read_tree_csv(bad), ParseError);
  std::stringstream incompatible("a|b,b|c\n1,1\n");
  EXPECT_THROW(read_tree_csv(incompatible), ParseError);
}

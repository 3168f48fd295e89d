#pragma once

#include <json.hpp>
#include <random>
#include <variant>

#include "treespace/frechet.hpp"
#include "treespace/newick.hpp"
#include "treespace/random.hpp"

namespace treespace {

// One orthant with independent log-normal edge lengths around the given
// medians.
struct LognormalComponent {
  std::vector<Split> splits;
  std::vector<double> medians;
  double sdlog = 0.0;
  double weight = 0.0;
};

// G1: finitely many trees with weights.
struct PointMixture {
  std::vector<Tree> trees;
  std::vector<double> weights;
};

// G2: a mixture of log-normal orthants.
struct OrthantLognormal {
  LeafSetPtr leaves;
  std::vector<LognormalComponent> components;
  std::size_t pilot = 1000000;
};

// G3: mass on the spine and the three pages around a codimension-one base.
// Spine lengths are log-normal around the base lengths, page heights
// log-normal around page_median. Extra components add mass elsewhere.
struct BookGenerator {
  Tree base;
  double spine_sdlog = 0.0;
  double page_median = 1.0;
  double page_sdlog = 0.0;
  double spine_weight = 0.0;
  std::array<double, 3> page_weights{0.0, 0.0, 0.0};
  std::vector<LognormalComponent> extra;
  std::size_t pilot = 200000;
};

using Generator = std::variant<PointMixture, OrthantLognormal, BookGenerator>;

namespace generator_detail {

template <class Rng>
std::size_t pick(const std::vector<double>& weights, Rng& rng) {
  std::uniform_real_distribution<double> U(0.0, 1.0);
  double u = U(rng);
  double acc = 0.0;
  for (std::size_t i = 0; i < weights.size(); ++i) {
    acc += weights[i];
    if (u < acc) return i;
  }
  for (std::size_t i = weights.size(); i-- > 0;) {
    if (weights[i] > 0.0) return i;
  }
  return 0;
}

template <class Rng>
double lognormal(double median, double sdlog, Rng& rng) {
  if (sdlog == 0.0) return median;
  std::normal_distribution<double> N(0.0, 1.0);
  return median * std::exp(sdlog * N(rng));
}

template <class Rng>
Tree draw_component(const LeafSetPtr& leaves, const LognormalComponent& c, Rng& rng) {
  std::vector<Edge> es;
  for (std::size_t j = 0; j < c.splits.size(); ++j) es.push_back({c.splits[j], lognormal(c.medians[j], c.sdlog, rng)});
  return Tree(leaves, std::move(es), Tree::Trusted{});
}

template <class Rng>
std::vector<Edge> draw_spine(const BookGenerator& g, Rng& rng) {
  std::vector<Edge> es = g.base.edges();
  for (auto& e : es) e.length = lognormal(e.length, g.spine_sdlog, rng);
  return es;
}

inline Split book_page(const BookGenerator& g, std::size_t p) { return refinement_splits(g.base).at(p); }

inline std::vector<double> book_weights(const BookGenerator& g) {
  std::vector<double> w{g.spine_weight, g.page_weights[0], g.page_weights[1], g.page_weights[2]};
  for (const auto& c : g.extra) w.push_back(c.weight);
  return w;
}

inline void check_weights(const std::vector<double>& w, const char* what) {
  double total = 0.0;
  for (double x : w) {
    if (!(x >= 0.0)) throw ConfigError(std::string(what) + ": weights must be non-negative");
    total += x;
  }
  if (std::abs(total - 1.0) > 1e-9) throw ConfigError(std::string(what) + ": weights must sum to one");
}

}  // namespace generator_detail

inline LeafSetPtr generator_leaves(const Generator& g) {
  return std::visit(
      [](const auto& x) -> LeafSetPtr {
        using T = std::decay_t<decltype(x)>;
        if constexpr (std::is_same_v<T, PointMixture>) return x.trees.front().leafset_ptr();
        if constexpr (std::is_same_v<T, OrthantLognormal>) return x.leaves;
        if constexpr (std::is_same_v<T, BookGenerator>) return x.base.leafset_ptr();
      },
      g);
}

template <class Rng>
Tree draw_tree(const Generator& g, Rng& rng) {
  using namespace generator_detail;
  if (const auto* x = std::get_if<PointMixture>(&g)) return x->trees[pick(x->weights, rng)];
  if (const auto* x = std::get_if<OrthantLognormal>(&g)) {
    std::vector<double> w;
    for (const auto& c : x->components) w.push_back(c.weight);
    return draw_component(x->leaves, x->components[pick(w, rng)], rng);
  }
  const auto& b = std::get<BookGenerator>(g);
  const std::size_t c = pick(book_weights(b), rng);
  if (c >= 4) return draw_component(b.base.leafset_ptr(), b.extra[c - 4], rng);
  std::vector<Edge> es = draw_spine(b, rng);
  if (c >= 1) es.push_back({book_page(b, c - 1), lognormal(b.page_median, b.page_sdlog, rng)});
  return Tree(b.base.leafset_ptr(), std::move(es), Tree::Trusted{});
}

// Finite stand-in for the population. Point mixtures are used as they are.
// Log-normal mixtures use a pilot sample. Book generators use a pilot in
// which every spine draw and page height is shared by the spine and all
// three pages, so relations between the page weights carry over to the
// page integrals exactly.
inline WeightedSample population_proxy(const Generator& g, std::uint64_t seed) {
  using namespace generator_detail;
  std::mt19937_64 rng = make_stream(seed, pilot_stream);
  if (const auto* x = std::get_if<PointMixture>(&g)) return WeightedSample(x->trees, x->weights);
  if (const auto* x = std::get_if<OrthantLognormal>(&g)) {
    bool fixed = true;
    for (const auto& c : x->components) fixed = fixed && c.sdlog == 0.0;
    std::vector<Tree> ts;
    std::vector<double> ws;
    if (fixed) {
      for (const auto& c : x->components) {
        ts.push_back(draw_component(x->leaves, c, rng));
        ws.push_back(c.weight);
      }
    } else {
      ts.reserve(x->pilot);
      for (std::size_t i = 0; i < x->pilot; ++i) ts.push_back(draw_tree(g, rng));
      ws.assign(ts.size(), 1.0 / static_cast<double>(ts.size()));
    }
    return WeightedSample(std::move(ts), std::move(ws));
  }
  const auto& b = std::get<BookGenerator>(g);
  bool fixed = b.spine_sdlog == 0.0 && b.page_sdlog == 0.0;
  for (const auto& c : b.extra) fixed = fixed && c.sdlog == 0.0;
  const std::size_t N = fixed ? 1 : b.pilot;
  const double inv = 1.0 / static_cast<double>(N);
  std::vector<Tree> ts;
  std::vector<double> ws;
  const LeafSetPtr& leaves = b.base.leafset_ptr();
  for (std::size_t i = 0; i < N; ++i) {
    std::vector<Edge> spine = draw_spine(b, rng);
    const double h = lognormal(b.page_median, b.page_sdlog, rng);
    if (b.spine_weight > 0.0) {
      ts.emplace_back(leaves, spine, Tree::Trusted{});
      ws.push_back(b.spine_weight * inv);
    }
    for (std::size_t p = 0; p < 3; ++p) {
      if (b.page_weights[p] == 0.0) continue;
      std::vector<Edge> es = spine;
      es.push_back({book_page(b, p), h});
      ts.emplace_back(leaves, std::move(es), Tree::Trusted{});
      ws.push_back(b.page_weights[p] * inv);
    }
    for (const auto& c : b.extra) {
      if (c.weight == 0.0) continue;
      ts.push_back(draw_component(leaves, c, rng));
      ws.push_back(c.weight * inv);
    }
  }
  return WeightedSample(std::move(ts), std::move(ws));
}

namespace generator_detail {

using nlohmann::json;

template <class T>
T get(const json& j, const char* key, const char* where) {
  if (!j.contains(key)) throw ConfigError(std::string(where) + ": missing key '" + key + "'");
  try {
    return j.at(key).get<T>();
  } catch (const json::exception& e) {
    throw ConfigError(std::string(where) + ": bad value for '" + key + "'");
  }
}

template <class T>
T get_or(const json& j, const char* key, T fallback, const char* where) {
  return j.contains(key) ? get<T>(j, key, where) : fallback;
}

inline LeafSetPtr leaves_from(const json& j, const char* where) {
  try {
    return make_leafset(get<std::vector<std::string>>(j, "leaves", where), get_or<std::string>(j, "root", "r", where));
  } catch (const InvalidArgument& e) {
    throw ConfigError(std::string(where) + ": " + e.what());
  }
}

inline LognormalComponent component_from(const json& j, const LeafSet& leaves) {
  const char* where = "component";
  LognormalComponent c;
  try {
    for (const auto& name : get<std::vector<std::string>>(j, "splits", where)) c.splits.push_back(split_from_name(leaves, name));
  } catch (const InvalidArgument& e) {
    throw ConfigError(std::string(where) + ": " + e.what());
  }
  c.medians = get<std::vector<double>>(j, "lengths", where);
  c.sdlog = get_or<double>(j, "sdlog", 0.0, where);
  c.weight = get<double>(j, "weight", where);
  if (c.medians.size() != c.splits.size()) throw ConfigError("component: one length per split is required");
  for (double x : c.medians) {
    if (!(x > 0.0)) throw ConfigError("component: lengths must be positive");
  }
  if (!(c.sdlog >= 0.0)) throw ConfigError("component: sdlog must be non-negative");
  for (std::size_t a = 0; a < c.splits.size(); ++a) {
    for (std::size_t b = a + 1; b < c.splits.size(); ++b) {
      if (!compatible(c.splits[a], c.splits[b]) || c.splits[a] == c.splits[b]) {
        throw ConfigError("component: splits must be distinct and compatible");
      }
    }
  }
  return c;
}

inline Tree tree_from(const std::string& newick, const LeafSetPtr& leaves, const std::string& root) {
  try {
    return parse_newick(newick, root, leaves);
  } catch (const Error& e) {
    throw ConfigError(std::string("generator tree: ") + e.what());
  }
}

}  // namespace generator_detail

// Reads a generator from its JSON description; see README for the schema.
inline Generator generator_from_json(const nlohmann::json& j) {
  using namespace generator_detail;
  if (!j.is_object()) throw ConfigError("generator must be an object");
  const auto type = get<std::string>(j, "type", "generator");
  if (type == "point_mixture") {
    const auto root = get_or<std::string>(j, "root", "r", "point_mixture");
    const auto texts = get<std::vector<std::string>>(j, "trees", "point_mixture");
    if (texts.empty()) throw ConfigError("point_mixture: at least one tree is required");
    PointMixture g;
    LeafSetPtr leaves = j.contains("leaves") ? leaves_from(j, "point_mixture") : nullptr;
    for (const auto& t : texts) {
      g.trees.push_back(tree_from(t, leaves, root));
      leaves = g.trees.back().leafset_ptr();
    }
    g.weights = get_or<std::vector<double>>(
        j, "weights", std::vector<double>(texts.size(), 1.0 / static_cast<double>(texts.size())), "point_mixture");
    if (g.weights.size() != g.trees.size()) throw ConfigError("point_mixture: one weight per tree is required");
    check_weights(g.weights, "point_mixture");
    return g;
  }
  if (type == "orthant_lognormal") {
    OrthantLognormal g;
    g.leaves = leaves_from(j, "orthant_lognormal");
    for (const auto& c : get<json>(j, "components", "orthant_lognormal")) g.components.push_back(component_from(c, *g.leaves));
    if (g.components.empty()) throw ConfigError("orthant_lognormal: at least one component is required");
    std::vector<double> w;
    for (const auto& c : g.components) w.push_back(c.weight);
    check_weights(w, "orthant_lognormal");
    g.pilot = get_or<std::size_t>(j, "pilot", g.pilot, "orthant_lognormal");
    if (g.pilot == 0) throw ConfigError("orthant_lognormal: pilot must be positive");
    return g;
  }
  if (type == "book") {
    LeafSetPtr leaves = leaves_from(j, "book");
    BookGenerator g{tree_from(get<std::string>(j, "base", "book"), leaves, leaves->root_label())};
    if (g.base.codim() != 1) throw ConfigError("book: base tree must have codimension one");
    g.spine_sdlog = get_or<double>(j, "spine_sdlog", 0.0, "book");
    g.page_median = get_or<double>(j, "page_median", 1.0, "book");
    g.page_sdlog = get_or<double>(j, "page_sdlog", 0.0, "book");
    if (!(g.spine_sdlog >= 0.0) || !(g.page_sdlog >= 0.0) || !(g.page_median > 0.0)) {
      throw ConfigError("book: spreads must be non-negative and page_median positive");
    }
    const json w = get<json>(j, "weights", "book");
    g.spine_weight = get_or<double>(w, "spine", 0.0, "book weights");
    g.page_weights = {get_or<double>(w, "alpha", 0.0, "book weights"), get_or<double>(w, "beta", 0.0, "book weights"),
                      get_or<double>(w, "gamma", 0.0, "book weights")};
    if (j.contains("extra")) {
      for (const auto& c : j.at("extra")) g.extra.push_back(component_from(c, *leaves));
    }
    check_weights(book_weights(g), "book");
    g.pilot = get_or<std::size_t>(j, "pilot", g.pilot, "book");
    if (g.pilot == 0) throw ConfigError("book: pilot must be positive");
    return g;
  }
  throw ConfigError("unknown generator type '" + type + "'");
}

}  // namespace treespace

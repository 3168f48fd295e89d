#pragma once

#include <chrono>
#include <fstream>
#include <json.hpp>
#include <ostream>

#include "treespace/generators.hpp"
#include "treespace/json_out.hpp"
#include "treespace/parallel.hpp"
#include "treespace/stats.hpp"

namespace treespace {

enum class LimitKind { gaussian, half_line_gaussian, folded_pair, spine_gaussian };

inline const char* limit_kind_name(LimitKind k) {
  switch (k) {
    case LimitKind::gaussian: return "gaussian";
    case LimitKind::half_line_gaussian: return "half_line_gaussian";
    case LimitKind::folded_pair: return "folded_pair";
    case LimitKind::spine_gaussian: return "spine_gaussian";
  }
  return "?";
}

struct AEstimate {
  Eigen::MatrixXd A;
  Eigen::MatrixXd mean_M;
  double condition = 1.0;
  // Weight of the sample trees skipped because they sit on a cell boundary.
  double excluded_weight = 0.0;
};

struct LimitLaw {
  LimitKind kind = LimitKind::gaussian;
  Eigen::MatrixXd covariance;
  Eigen::MatrixXd A;
  Eigen::MatrixXd V;
  std::optional<char> case_label;
  Eigen::MatrixXd mean_M;
  double condition = 1.0;
  double excluded_weight = 0.0;
  // Page whose fold is used (cases b and c), and the page counted negative
  // in case c.
  std::optional<Page> page;
  std::optional<Page> negative_page;
  std::vector<std::string> coordinates;
};

inline constexpr double max_condition_number = 1e12;

namespace clt_detail {

inline void require_chart(const Tree& base, const std::optional<Page>& fold) {
  if (base.codim() >= 2) {
    throw UnsupportedStratum("limit laws need a binary or codimension-one base (codimension " + std::to_string(base.codim()) + ")");
  }
  if (base.codim() == 0 && fold) throw InvalidArgument("a fold page needs a codimension-one base");
  if (fold && *fold == Page::spine) throw InvalidArgument("fold page must be alpha, beta or gamma");
}

// Chart coordinates of the log image: binary base -> log map; codimension
// one -> spine projection, or the folded book log when a page is given.
inline Eigen::VectorXd chart_log(const Tree& base, const std::optional<Page>& fold, const Tree& t) {
  if (base.codim() == 0) return log_map(base, t).coords;
  BookChart chart(base);
  TangentVector v = book_log(chart, t);
  if (fold) return treespace::fold(chart, v, *fold);
  return v.coords.tail(v.coords.size() - 1);
}

inline Eigen::MatrixXd chart_jacobian(const Tree& base, const std::optional<Page>& fold, const Tree& t,
                                      const Support& sup) {
  if (base.codim() == 0) return phi_jacobian(base, sup);
  if (fold) return folded_phi_jacobian(BookChart(base), *fold, t);
  return phi_jacobian(base, sup);
}

}  // namespace clt_detail

// Weighted covariance of the chart log images of the sample at base.
inline Eigen::MatrixXd estimate_V(const Tree& base, const WeightedSample& sample, std::optional<Page> fold = std::nullopt) {
  clt_detail::require_chart(base, fold);
  sample.validate();
  const Eigen::Index d = clt_detail::chart_log(base, fold, base).size();
  Eigen::MatrixXd X(static_cast<Eigen::Index>(sample.size()), d);
  for (std::size_t i = 0; i < sample.size(); ++i) {
    require_same_leafset(base, sample.trees[i]);
    X.row(static_cast<Eigen::Index>(i)) = clt_detail::chart_log(base, fold, sample.trees[i]).transpose();
  }
  return weighted_covariance(X, sample.weights);
}

inline AEstimate estimate_A(const Tree& base, const WeightedSample& sample, std::optional<Page> fold = std::nullopt) {
  clt_detail::require_chart(base, fold);
  sample.validate();
  const Eigen::Index d = clt_detail::chart_log(base, fold, base).size();
  AEstimate out;
  out.mean_M = Eigen::MatrixXd::Zero(d, d);
  for (std::size_t i = 0; i < sample.size(); ++i) {
    const double w = sample.weights[i];
    if (w == 0.0) continue;
    require_same_leafset(base, sample.trees[i]);
    Support sup = compute_support(base, sample.trees[i]);
    if (on_cell_boundary(sup, geodesic_detail::tie_tolerance)) {
      out.excluded_weight += w;
      continue;
    }
    out.mean_M += w * clt_detail::chart_jacobian(base, fold, sample.trees[i], sup);
  }
  Eigen::MatrixXd B = Eigen::MatrixXd::Identity(d, d) - out.mean_M;
  if (d == 0) {
    out.A = B;
    return out;
  }
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(B);
  const auto& s = svd.singularValues();
  out.condition = s[s.size() - 1] > 0.0 ? s[0] / s[s.size() - 1] : std::numeric_limits<double>::infinity();
  if (!(out.condition <= max_condition_number)) {
    std::ostringstream msg;
    msg << "I - E[M] is singular or ill-conditioned (condition " << format_double(out.condition) << "); E[M] =\n"
        << out.mean_M;
    throw SingularMatrix(msg.str());
  }
  out.A = B.inverse();
  return out;
}

// Limit law of sqrt(n)(mean_n - base), where base must be the Fréchet mean
// of the sample (certificate residual at most 1e-6).
inline LimitLaw predict_limit(const Tree& base, const WeightedSample& sample) {
  clt_detail::require_chart(base, std::nullopt);
  const LeafSet& leaves = base.leafset();
  LimitLaw law;
  if (base.codim() == 0) {
    MeanCertificate c = check_mean_top(base, sample);
    if (c.residual > 1e-6) throw InvalidArgument("base is not the Fréchet mean (residual " + format_double(c.residual) + ")");
    law.kind = LimitKind::gaussian;
    for (Split s : base.splits()) law.coordinates.push_back(split_name(leaves, s));
    law.V = estimate_V(base, sample);
    AEstimate a = estimate_A(base, sample);
    law.A = a.A;
    law.mean_M = a.mean_M;
    law.condition = a.condition;
    law.excluded_weight = a.excluded_weight;
    law.covariance = law.A.transpose() * law.V * law.A;
    return law;
  }
  MeanCertificate c = check_mean_codim1(base, sample);
  if (c.residual > 1e-6 || !c.inequalities_hold) {
    throw InvalidArgument("base is not the Fréchet mean (spine residual " + format_double(c.residual) + ")");
  }
  law.case_label = c.case_label;
  BookChart chart(base);
  std::vector<Page> equal;
  for (std::size_t p = 0; p < 3; ++p) {
    if (c.equalities[p]) equal.push_back(static_cast<Page>(p + 1));
  }
  std::optional<Page> fold;
  if (equal.size() == 1) {
    law.kind = LimitKind::half_line_gaussian;
    fold = equal[0];
    law.coordinates.push_back(std::string("page_") + page_name(*fold));
  } else if (equal.size() == 2) {
    law.kind = LimitKind::folded_pair;
    fold = equal[0];
    law.negative_page = equal[1];
    law.coordinates.push_back(std::string(page_name(equal[0])) + "_minus_" + page_name(equal[1]));
  } else {
    law.kind = LimitKind::spine_gaussian;
  }
  law.page = fold;
  for (Split s : chart.spine_splits()) law.coordinates.push_back(split_name(leaves, s));
  law.V = estimate_V(base, sample, fold);
  AEstimate a = estimate_A(base, sample, fold);
  law.A = a.A;
  law.mean_M = a.mean_M;
  law.condition = a.condition;
  law.excluded_weight = a.excluded_weight;
  law.covariance = law.A.transpose() * law.V * law.A;
  return law;
}

// Draws from the limit law, as rows.
inline Eigen::MatrixXd sample_limit(const LimitLaw& law, const Eigen::MatrixXd& covariance, std::size_t count,
                                    std::mt19937_64& rng) {
  Eigen::MatrixXd X = gaussian_draws(covariance, count, rng);
  if (law.kind == LimitKind::half_line_gaussian) X.col(0) = X.col(0).cwiseMax(0.0);
  return X;
}

// Coordinates of a sample mean in the chart of the law, relative to base.
// Splits missing from the tree count as zero. In the book charts the first
// coordinate is the page length, negative on pages other than law.page.
inline Eigen::VectorXd residual_coordinates(const LimitLaw& law, const Tree& base, const Tree& mean) {
  require_same_leafset(base, mean);
  if (law.kind == LimitKind::gaussian) return coordinates_on(mean, base.splits()) - base.lengths();
  BookChart chart(base);
  Eigen::VectorXd spine = coordinates_on(mean, chart.spine_splits()) - base.lengths();
  if (law.kind == LimitKind::spine_gaussian) return spine;
  Eigen::VectorXd out(spine.size() + 1);
  out.tail(spine.size()) = spine;
  double page = 0.0;
  for (std::size_t p = 0; p < 3; ++p) {
    const Page tag = static_cast<Page>(p + 1);
    if (auto len = mean.length_of(chart.page_split(tag))) page += tag == *law.page ? *len : -*len;
  }
  out[0] = page;
  return out;
}

// Whether a sample mean lies in the stratum the limit theorem places it in
// for large n.
inline bool in_expected_stratum(const LimitLaw& law, const Tree& base, const Tree& mean) {
  if (law.kind == LimitKind::gaussian) return mean.splits() == base.splits();
  BookChart chart(base);
  std::vector<Split> spine = chart.spine_splits();
  std::vector<Split> ms = mean.splits();
  auto with = [&](Page p) {
    std::vector<Split> s = spine;
    s.push_back(chart.page_split(p));
    std::sort(s.begin(), s.end(), CanonicalLess{});
    return s;
  };
  switch (law.kind) {
    case LimitKind::spine_gaussian: return ms == spine;
    case LimitKind::half_line_gaussian: return ms == spine || ms == with(*law.page);
    case LimitKind::folded_pair: return ms == spine || ms == with(*law.page) || ms == with(*law.negative_page);
    default: return false;
  }
}

struct CltConfig {
  nlohmann::json echo;
  Generator generator;
  std::size_t n = 0;
  std::size_t replicates = 0;
  std::uint64_t seed = 0;
  double tol = 1e-10;
  long max_iter = 100000;
  std::size_t predicted_draws = 100000;
  // Upper bound on n * replicates plus the pilot size.
  double max_trees = 1e8;
  int bins = 40;
  bool record_timing = false;
  std::optional<std::string> report_path;
  std::optional<std::string> residuals_path;
  std::optional<std::string> histogram_path;
};

inline CltConfig clt_config_from_json(const nlohmann::json& j) {
  using generator_detail::get;
  using generator_detail::get_or;
  if (!j.is_object()) throw ConfigError("config must be a JSON object");
  CltConfig c{j, generator_from_json(get<nlohmann::json>(j, "generator", "config"))};
  const auto n = get<long long>(j, "n", "config");
  const auto reps = get<long long>(j, "replicates", "config");
  if (n < 1 || reps < 2) throw ConfigError("config: n must be positive and replicates at least 2");
  c.n = static_cast<std::size_t>(n);
  c.replicates = static_cast<std::size_t>(reps);
  c.seed = get_or<std::uint64_t>(j, "seed", 0, "config");
  c.tol = get_or<double>(j, "tol", c.tol, "config");
  c.max_iter = get_or<long>(j, "max_iter", c.max_iter, "config");
  c.predicted_draws = get_or<std::size_t>(j, "predicted_draws", c.predicted_draws, "config");
  c.max_trees = get_or<double>(j, "max_trees", c.max_trees, "config");
  c.bins = get_or<int>(j, "bins", c.bins, "config");
  c.record_timing = get_or<bool>(j, "record_timing", false, "config");
  if (!(c.tol > 0.0) || c.max_iter < 1 || c.predicted_draws < 2 || c.bins < 1) {
    throw ConfigError("config: tol, max_iter, predicted_draws and bins must be positive");
  }
  if (j.contains("outputs")) {
    const auto& o = j.at("outputs");
    if (o.contains("report")) c.report_path = get<std::string>(o, "report", "outputs");
    if (o.contains("residuals")) c.residuals_path = get<std::string>(o, "residuals", "outputs");
    if (o.contains("histogram")) c.histogram_path = get<std::string>(o, "histogram", "outputs");
  }
  return c;
}

struct Discrepancy {
  // Against the predicted covariance; for the half-line law, against the
  // covariance of the predicted draws.
  double frobenius_relative = 0.0;
  // Against V (or V_s), i.e. without the A correction.
  double frobenius_relative_vs_V = 0.0;
  std::vector<KsResult> ks;
  double zero_fraction = 0.0;
  double predicted_zero_mass = 0.0;
  // Fraction of replicate means outside the stratum predicted for large n.
  double outside_fraction = 0.0;
};

struct CltReport {
  nlohmann::json config;
  std::size_t n = 0;
  std::size_t replicates = 0;
  std::uint64_t seed = 0;
  std::size_t pilot_size = 0;
  Tree population_mean;
  MeanCertificate certificate;
  LimitLaw law;
  Eigen::MatrixXd residuals;
  std::vector<int> replicate_codims;
  std::vector<long> replicate_iterations;
  Eigen::MatrixXd empirical_covariance;
  Eigen::MatrixXd predicted_draw_covariance;
  Eigen::MatrixXd predicted_draws;
  Discrepancy discrepancy;
  std::optional<double> runtime_seconds;
};

// Mean of the population stand-in. Edges shorter than 1e-9 of the tree
// norm are contracted; they are solver noise around a lower stratum.
inline Tree population_mean(const WeightedSample& proxy, double tol, long max_iter, std::uint64_t seed) {
  MeanOptions opt;
  opt.tol = tol;
  opt.max_iter = max_iter;
  opt.seed = seed;
  Tree t = solve_frechet_mean(proxy, opt).mean;
  const double floor = 1e-9 * (1.0 + t.norm());
  std::vector<Edge> keep;
  for (const auto& e : t.edges()) {
    if (e.length > floor) keep.push_back(e);
  }
  return Tree(t.leafset_ptr(), std::move(keep), Tree::Trusted{});
}

inline CltReport run_clt_experiment(const CltConfig& cfg) {
  const auto start = std::chrono::steady_clock::now();
  std::size_t pilot = 0;
  if (const auto* g = std::get_if<OrthantLognormal>(&cfg.generator)) pilot = g->pilot;
  if (const auto* g = std::get_if<BookGenerator>(&cfg.generator)) pilot = g->pilot * (4 + g->extra.size());
  const double total = static_cast<double>(cfg.n) * static_cast<double>(cfg.replicates) + static_cast<double>(pilot);
  if (total > cfg.max_trees) {
    throw BudgetExceeded("experiment needs " + format_double(total) + " tree draws, budget is " + format_double(cfg.max_trees));
  }

  const WeightedSample proxy = population_proxy(cfg.generator, cfg.seed);
  const Tree tstar = population_mean(proxy, cfg.tol, cfg.max_iter, cfg.seed);
  CltReport rep{cfg.echo, cfg.n, cfg.replicates, cfg.seed, proxy.size(), tstar,
                tstar.codim() == 1 ? check_mean_codim1(tstar, proxy) : check_mean_top(tstar, proxy)};
  if (tstar.codim() >= 2) throw UnsupportedStratum("population mean has codimension " + std::to_string(tstar.codim()));
  rep.law = predict_limit(tstar, proxy);
  const auto d = static_cast<Eigen::Index>(rep.law.coordinates.size());

  rep.residuals = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(cfg.replicates), d);
  rep.replicate_codims.assign(cfg.replicates, 0);
  rep.replicate_iterations.assign(cfg.replicates, 0);
  std::vector<char> inside(cfg.replicates, 0);
  const double root_n = std::sqrt(static_cast<double>(cfg.n));
  parallel_for(cfg.replicates, [&](std::size_t r) {
    std::mt19937_64 rng = make_stream(cfg.seed, r);
    std::vector<Tree> ts;
    ts.reserve(cfg.n);
    for (std::size_t i = 0; i < cfg.n; ++i) ts.push_back(draw_tree(cfg.generator, rng));
    MeanOptions opt;
    opt.tol = cfg.tol;
    opt.max_iter = cfg.max_iter;
    opt.seed = stream_seed(cfg.seed, r);
    MeanResult m = solve_frechet_mean(WeightedSample(std::move(ts)), opt);
    rep.residuals.row(static_cast<Eigen::Index>(r)) = root_n * residual_coordinates(rep.law, tstar, m.mean).transpose();
    rep.replicate_codims[r] = m.codim;
    rep.replicate_iterations[r] = m.iterations;
    inside[r] = in_expected_stratum(rep.law, tstar, m.mean) ? 1 : 0;
  });

  rep.empirical_covariance = sample_covariance(rep.residuals);
  std::mt19937_64 prng = make_stream(cfg.seed, prediction_stream);
  rep.predicted_draws = sample_limit(rep.law, rep.law.covariance, cfg.predicted_draws, prng);
  rep.predicted_draw_covariance = sample_covariance(rep.predicted_draws);
  Discrepancy& dis = rep.discrepancy;
  const bool half = rep.law.kind == LimitKind::half_line_gaussian;
  dis.frobenius_relative =
      frobenius_relative_error(rep.empirical_covariance, half ? rep.predicted_draw_covariance : rep.law.covariance);
  if (half) {
    Eigen::MatrixXd vd = sample_limit(rep.law, rep.law.V, cfg.predicted_draws, prng);
    dis.frobenius_relative_vs_V = frobenius_relative_error(rep.empirical_covariance, sample_covariance(vd));
  } else {
    dis.frobenius_relative_vs_V = frobenius_relative_error(rep.empirical_covariance, rep.law.V);
  }
  for (Eigen::Index k = 0; k < d; ++k) {
    std::vector<double> x(rep.residuals.col(k).data(), rep.residuals.col(k).data() + rep.residuals.rows());
    std::vector<double> y(rep.predicted_draws.col(k).data(), rep.predicted_draws.col(k).data() + rep.predicted_draws.rows());
    dis.ks.push_back(ks_two_sample(std::move(x), std::move(y)));
  }
  if (d > 0) {
    dis.zero_fraction = static_cast<double>((rep.residuals.col(0).array() == 0.0).count()) / static_cast<double>(cfg.replicates);
    dis.predicted_zero_mass =
        static_cast<double>((rep.predicted_draws.col(0).array() == 0.0).count()) / static_cast<double>(cfg.predicted_draws);
  }
  std::size_t out = 0;
  for (char c : inside) out += c ? 0 : 1;
  dis.outside_fraction = static_cast<double>(out) / static_cast<double>(cfg.replicates);
  if (cfg.record_timing) {
    rep.runtime_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  }
  return rep;
}

namespace clt_detail {

inline nlohmann::json matrix_json(const Eigen::MatrixXd& M) {
  nlohmann::json rows = nlohmann::json::array();
  for (Eigen::Index i = 0; i < M.rows(); ++i) {
    nlohmann::json row = nlohmann::json::array();
    for (Eigen::Index j = 0; j < M.cols(); ++j) row.push_back(M(i, j));
    rows.push_back(row);
  }
  return rows;
}

}  // namespace clt_detail

inline nlohmann::json certificate_json(const MeanCertificate& c) {
  nlohmann::json j;
  j["newick"] = to_newick(c.mean);
  j["codim"] = c.stratum_codim;
  j["residual"] = c.residual;
  if (c.book_integrals) j["book_integrals"] = *c.book_integrals;
  if (c.case_label) j["case"] = std::string(1, *c.case_label);
  if (c.book_integrals) {
    j["equalities"] = c.equalities;
    j["inequalities_hold"] = c.inequalities_hold;
  }
  return j;
}

inline nlohmann::json law_json(const LimitLaw& law) {
  using clt_detail::matrix_json;
  nlohmann::json j;
  j["kind"] = limit_kind_name(law.kind);
  j["case"] = law.case_label ? nlohmann::json(std::string(1, *law.case_label)) : nlohmann::json(nullptr);
  j["page"] = law.page ? nlohmann::json(page_name(*law.page)) : nlohmann::json(nullptr);
  j["negative_page"] = law.negative_page ? nlohmann::json(page_name(*law.negative_page)) : nlohmann::json(nullptr);
  j["coordinates"] = law.coordinates;
  j["covariance"] = matrix_json(law.covariance);
  j["A"] = matrix_json(law.A);
  j["V"] = matrix_json(law.V);
  j["mean_M"] = matrix_json(law.mean_M);
  j["condition_number"] = law.condition;
  j["excluded_boundary_weight"] = law.excluded_weight;
  return j;
}

// Full report. Keys are fixed; runtime appears only when timing was asked
// for, so reports of equal seeds compare equal byte for byte.
inline nlohmann::json report_json(const CltReport& r) {
  using clt_detail::matrix_json;
  nlohmann::json j;
  j["config"] = r.config;
  j["n"] = r.n;
  j["replicates"] = r.replicates;
  j["seed"] = r.seed;
  j["pilot_size"] = r.pilot_size;
  j["population_mean"] = certificate_json(r.certificate);
  j["limit"] = law_json(r.law);
  j["empirical_covariance"] = matrix_json(r.empirical_covariance);
  j["predicted_draw_covariance"] = matrix_json(r.predicted_draw_covariance);
  nlohmann::json dis;
  dis["frobenius_relative"] = r.discrepancy.frobenius_relative;
  dis["frobenius_relative_vs_V"] = r.discrepancy.frobenius_relative_vs_V;
  nlohmann::json ks = nlohmann::json::array();
  for (std::size_t k = 0; k < r.discrepancy.ks.size(); ++k) {
    ks.push_back({{"coordinate", r.law.coordinates[k]},
                  {"statistic", r.discrepancy.ks[k].statistic},
                  {"p_value", r.discrepancy.ks[k].p_value}});
  }
  dis["ks"] = ks;
  dis["zero_fraction"] = r.discrepancy.zero_fraction;
  dis["predicted_zero_mass"] = r.discrepancy.predicted_zero_mass;
  dis["outside_fraction"] = r.discrepancy.outside_fraction;
  j["discrepancy"] = dis;
  j["residuals"] = matrix_json(r.residuals);
  j["replicate_codims"] = r.replicate_codims;
  j["replicate_iterations"] = r.replicate_iterations;
  if (r.runtime_seconds) j["runtime_seconds"] = *r.runtime_seconds;
  return j;
}

inline void write_residuals_csv(std::ostream& out, const CltReport& r) {
  out << "replicate";
  for (const auto& c : r.law.coordinates) out << ',' << c;
  out << ",codim\n";
  for (Eigen::Index i = 0; i < r.residuals.rows(); ++i) {
    out << i;
    for (Eigen::Index k = 0; k < r.residuals.cols(); ++k) out << ',' << format_double(r.residuals(i, k));
    out << ',' << r.replicate_codims[static_cast<std::size_t>(i)] << '\n';
  }
}

// Histogram of each coordinate over the empirical range, empirical and
// predicted densities side by side.
inline void write_histogram_csv(std::ostream& out, const CltReport& r, int bins) {
  out << "coordinate,bin,lower,upper,empirical_density,predicted_density\n";
  for (Eigen::Index k = 0; k < r.residuals.cols(); ++k) {
    double lo = std::min(r.residuals.col(k).minCoeff(), 0.0);
    double hi = std::max(r.residuals.col(k).maxCoeff(), 0.0);
    if (hi == lo) hi = lo + 1.0;
    const double width = (hi - lo) / bins;
    auto density = [&](const Eigen::MatrixXd& X) {
      std::vector<double> h(static_cast<std::size_t>(bins), 0.0);
      for (Eigen::Index i = 0; i < X.rows(); ++i) {
        double x = X(i, k);
        if (x < lo || x > hi) continue;
        auto b = std::min(bins - 1, static_cast<int>((x - lo) / width));
        h[static_cast<std::size_t>(b)] += 1.0;
      }
      for (auto& v : h) v /= static_cast<double>(X.rows()) * width;
      return h;
    };
    auto he = density(r.residuals);
    auto hp = density(r.predicted_draws);
    for (int b = 0; b < bins; ++b) {
      out << r.law.coordinates[static_cast<std::size_t>(k)] << ',' << b << ',' << format_double(lo + b * width) << ','
          << format_double(lo + (b + 1) * width) << ',' << format_double(he[static_cast<std::size_t>(b)]) << ','
          << format_double(hp[static_cast<std::size_t>(b)]) << '\n';
    }
  }
}

// Writes whichever outputs the config names.
inline void write_clt_outputs(const CltConfig& cfg, const CltReport& r) {
  auto open = [](const std::string& path) {
    std::ofstream f(path);
    if (!f) throw Error("cannot open '" + path + "' for writing");
    return f;
  };
  if (cfg.report_path) {
    auto f = open(*cfg.report_path);
    f << json_text(report_json(r));
  }
  if (cfg.residuals_path) {
    auto f = open(*cfg.residuals_path);
    write_residuals_csv(f, r);
  }
  if (cfg.histogram_path) {
    auto f = open(*cfg.histogram_path);
    write_histogram_csv(f, r, cfg.bins);
  }
}

}  // namespace treespace

#pragma once

#include <CLI11.hpp>
#include <fstream>
#include <iostream>
#include <sstream>

#include "treespace/clt.hpp"
#include "treespace/json_out.hpp"
#include "treespace/tree_csv.hpp"

namespace treespace {

namespace exit_code {
inline constexpr int ok = 0;
inline constexpr int failure = 1;
inline constexpr int parse = 2;
inline constexpr int leafset_mismatch = 3;
inline constexpr int unsupported_stratum = 4;
inline constexpr int non_convergence = 5;
inline constexpr int budget = 6;
}  // namespace exit_code

struct CliConfig {
  std::string subcommand;
  std::vector<std::string> inputs;
  std::string output;
  std::string format;
  std::string root = "r";
  double tol = 1e-10;
  long max_iter = 100000;
  std::optional<std::uint64_t> seed;
  std::string config;
  std::string csv_output;
};

namespace cli_detail {

inline std::string read_file(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw ParseError("cannot read '" + path + "'");
  std::ostringstream s;
  s << f.rdbuf();
  return s.str();
}

inline bool is_csv(const CliConfig& c, const std::string& path) {
  if (!c.format.empty()) return c.format == "csv";
  return path.size() >= 4 && path.compare(path.size() - 4, 4, ".csv") == 0;
}

// Trees from all inputs, in order, on one shared leaf set. Weights come
// from a CSV weight column when every input has one.
inline TreeTable load_trees(const CliConfig& c) {
  TreeTable all;
  LeafSetPtr leaves;
  bool weighted = true;
  std::vector<double> weights;
  for (const auto& path : c.inputs) {
    const std::string text = read_file(path);
    try {
      if (is_csv(c, path)) {
        std::istringstream in(text);
        TreeTable t = read_tree_csv(in, c.root, leaves);
        if (t.weights) {
          weights.insert(weights.end(), t.weights->begin(), t.weights->end());
        } else {
          weighted = false;
        }
        for (auto& tr : t.trees) all.trees.push_back(std::move(tr));
      } else {
        weighted = false;
        for (auto& tr : parse_newick_trees(text, c.root, leaves)) all.trees.push_back(std::move(tr));
      }
    } catch (const ParseError& e) {
      throw ParseError(path + ": " + e.what());
    }
    if (!all.trees.empty()) leaves = all.trees.front().leafset_ptr();
  }
  if (weighted && !all.trees.empty()) all.weights = weights;
  return all;
}

class Output {
 public:
  Output(const std::string& path, std::ostream& fallback) {
    if (!path.empty()) {
      file_.open(path);
      if (!file_) throw Error("cannot open '" + path + "' for writing");
    }
    out_ = path.empty() ? &fallback : &file_;
  }
  std::ostream& stream() { return *out_; }

 private:
  std::ofstream file_;
  std::ostream* out_;
};

inline nlohmann::json edges_json(const LeafSet& leaves, const std::vector<Edge>& es) {
  nlohmann::json out = nlohmann::json::array();
  for (const auto& e : es) out.push_back({{"split", split_name(leaves, e.split)}, {"length", e.length}});
  return out;
}

inline int cmd_distance(const CliConfig& c, std::ostream& out) {
  TreeTable t = load_trees(c);
  if (t.trees.size() != 2) throw InvalidArgument("distance needs exactly two trees, got " + std::to_string(t.trees.size()));
  const Tree& a = t.trees[0];
  const Tree& b = t.trees[1];
  const LeafSet& leaves = a.leafset();
  Support s = compute_support(a, b);
  nlohmann::json j;
  j["distance"] = support_length(s);
  j["carrier_number"] = carrier_number(s);
  nlohmann::json common = nlohmann::json::array();
  for (const auto& e : s.common) {
    common.push_back({{"split", split_name(leaves, e.split)}, {"source", e.source}, {"target", e.target}});
  }
  j["common"] = common;
  nlohmann::json parts = nlohmann::json::array();
  for (const auto& p : s.pairs) {
    parts.push_back({{"a", edges_json(leaves, p.a)},
                     {"b", edges_json(leaves, p.b)},
                     {"a_norm", p.a_norm},
                     {"b_norm", p.b_norm},
                     {"ratio", p.ratio()}});
  }
  j["parts"] = parts;
  j["cell_boundary"] = on_cell_boundary(s, geodesic_detail::tie_tolerance);
  Output o(c.output, out);
  write_json(o.stream(), j);
  o.stream() << '\n';
  return exit_code::ok;
}

inline int cmd_logmap(const CliConfig& c, std::ostream& out) {
  TreeTable t = load_trees(c);
  if (t.trees.size() < 2) throw InvalidArgument("logmap needs a base tree and at least one target");
  const Tree& base = t.trees.front();
  const LeafSet& leaves = base.leafset();
  const int m = base.dim();
  if (base.codim() >= 2) {
    throw UnsupportedStratum("log map base has codimension " + std::to_string(base.codim()) + "; only 0 and 1 are supported");
  }
  Output o(c.output, out);
  std::ostream& f = o.stream();
  std::optional<BookChart> chart;
  if (base.codim() == 1) chart.emplace(base);
  f << "index";
  if (chart) f << ",page,off_spine";
  for (Split s : base.splits()) f << ',' << split_name(leaves, s);
  f << ",singular,cell_boundary\n";
  for (std::size_t i = 1; i < t.trees.size(); ++i) {
    Support sup = compute_support(base, t.trees[i]);
    f << i;
    Eigen::VectorXd v;
    if (chart) {
      TangentVector tv = book_log(*chart, sup);
      f << ',' << page_name(*tv.page);
      v = tv.coords;
    } else {
      v = log_coordinates(base, sup);
    }
    for (Eigen::Index k = 0; k < v.size(); ++k) f << ',' << format_double(v[k]);
    f << ',' << (is_singular(sup, m) ? "true" : "false") << ','
      << (on_cell_boundary(sup, geodesic_detail::tie_tolerance) ? "true" : "false") << '\n';
  }
  return exit_code::ok;
}

inline int cmd_mean(const CliConfig& c, std::ostream& out) {
  TreeTable t = load_trees(c);
  if (t.trees.empty()) throw InvalidArgument("mean needs at least one tree");
  WeightedSample sample = t.weights ? WeightedSample(t.trees, *t.weights) : WeightedSample(t.trees);
  MeanOptions opt;
  opt.tol = c.tol;
  opt.max_iter = c.max_iter;
  opt.seed = c.seed.value_or(0);
  MeanResult r = solve_frechet_mean(sample, opt);
  const LeafSet& leaves = r.mean.leafset();
  nlohmann::json j;
  j["newick"] = to_newick(r.mean);
  nlohmann::json coords = nlohmann::json::object();
  for (const auto& e : r.mean.edges()) coords[split_name(leaves, e.split)] = e.length;
  j["coordinates"] = coords;
  j["codim"] = r.codim;
  j["iterations"] = r.iterations;
  if (r.codim == 0) {
    j["certificate"] = certificate_json(check_mean_top(r.mean, sample));
  } else if (r.codim == 1) {
    j["certificate"] = certificate_json(check_mean_codim1(r.mean, sample));
  } else {
    j["certificate"] = {{"codim", r.codim}, {"residual", r.residual}, {"note", "codim >= 2, unsupported certificate"}};
  }
  Output o(c.output, out);
  write_json(o.stream(), j);
  o.stream() << '\n';
  if (!c.csv_output.empty()) {
    Output csv(c.csv_output, out);
    write_tree_csv(csv.stream(), {r.mean});
  }
  return exit_code::ok;
}

inline void print_matrix(std::ostream& out, const char* title, const Eigen::MatrixXd& M) {
  out << title << '\n';
  for (Eigen::Index i = 0; i < M.rows(); ++i) {
    out << ' ';
    for (Eigen::Index k = 0; k < M.cols(); ++k) out << ' ' << format_double(M(i, k));
    out << '\n';
  }
}

inline int cmd_clt(const CliConfig& c, std::ostream& out) {
  if (c.config.empty()) throw ConfigError("clt needs --config");
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(read_file(c.config));
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError(c.config + ": " + e.what());
  }
  if (c.seed && j.is_object()) j["seed"] = *c.seed;
  CltConfig cfg = clt_config_from_json(j);
  if (!c.output.empty()) cfg.report_path = c.output;
  CltReport r = run_clt_experiment(cfg);
  write_clt_outputs(cfg, r);
  out << "limit: " << limit_kind_name(r.law.kind);
  if (r.law.case_label) out << " (case " << *r.law.case_label << ')';
  out << "\npopulation mean: " << to_newick(r.population_mean) << "\ncoordinates:";
  for (const auto& name : r.law.coordinates) out << ' ' << name;
  out << '\n';
  print_matrix(out, "predicted covariance:", r.law.covariance);
  print_matrix(out, "empirical covariance:", r.empirical_covariance);
  out << "frobenius relative error: " << format_double(r.discrepancy.frobenius_relative) << '\n'
      << "frobenius relative error against V: " << format_double(r.discrepancy.frobenius_relative_vs_V) << '\n';
  for (std::size_t k = 0; k < r.discrepancy.ks.size(); ++k) {
    out << "ks " << r.law.coordinates[k] << ": " << format_double(r.discrepancy.ks[k].statistic) << " (p "
        << format_double(r.discrepancy.ks[k].p_value) << ")\n";
  }
  if (r.law.kind == LimitKind::half_line_gaussian) {
    out << "zero fraction of first coordinate: " << format_double(r.discrepancy.zero_fraction) << " (predicted "
        << format_double(r.discrepancy.predicted_zero_mass) << ")\n";
  }
  out << "outside expected stratum: " << format_double(r.discrepancy.outside_fraction) << '\n';
  return exit_code::ok;
}

}  // namespace cli_detail

// Runs one command line (args excludes the program name) and returns the
// exit code. Errors go to err with a one-line diagnostic.
inline int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CliConfig c;
  CLI::App app{"Geodesics, log maps, Fréchet means and limit-law experiments in tree space", "treespace"};
  app.require_subcommand(1);
  auto add_common = [&](CLI::App* sub, bool inputs) {
    if (inputs) sub->add_option("-i,--input", c.inputs, "tree file (Newick or CSV); repeatable")->required();
    sub->add_option("-o,--output", c.output, "output file (default: standard output)");
    sub->add_option("--format", c.format, "input format")->check(CLI::IsMember({"newick", "csv"}));
    sub->add_option("--root", c.root, "root label");
    sub->add_option("--tol", c.tol, "tolerance")->check(CLI::PositiveNumber);
    sub->add_option("--seed", c.seed, "random seed");
  };
  auto* distance = app.add_subcommand("distance", "geodesic distance and support between two trees");
  add_common(distance, true);
  auto* logmap = app.add_subcommand("logmap", "log map of targets at a base tree (first input tree)");
  add_common(logmap, true);
  auto* mean = app.add_subcommand("mean", "Fréchet mean of a sample with its certificate");
  add_common(mean, true);
  mean->add_option("--max-iter", c.max_iter, "iteration budget")->check(CLI::PositiveNumber);
  mean->add_option("--csv-output", c.csv_output, "also write the mean as a CSV row");
  auto* clt = app.add_subcommand("clt", "Monte Carlo limit-law experiment");
  add_common(clt, false);
  clt->add_option("--config", c.config, "experiment config (JSON)")->required();

  std::vector<std::string> argv_store{"treespace"};
  argv_store.insert(argv_store.end(), args.begin(), args.end());
  std::vector<char*> argv;
  for (auto& s : argv_store) argv.push_back(s.data());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return exit_code::ok;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    return exit_code::parse;
  }
  c.subcommand = app.get_subcommands().front()->get_name();

  try {
    if (c.subcommand == "distance") return cli_detail::cmd_distance(c, out);
    if (c.subcommand == "logmap") return cli_detail::cmd_logmap(c, out);
    if (c.subcommand == "mean") return cli_detail::cmd_mean(c, out);
    return cli_detail::cmd_clt(c, out);
  } catch (const ParseError& e) {
    err << "parse error: " << e.what() << '\n';
    return exit_code::parse;
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << '\n';
    return exit_code::parse;
  } catch (const LeafSetMismatch& e) {
    err << "leaf set mismatch: " << e.what() << '\n';
    return exit_code::leafset_mismatch;
  } catch (const UnsupportedStratum& e) {
    err << "unsupported stratum: " << e.what() << '\n';
    return exit_code::unsupported_stratum;
  } catch (const NonConvergence& e) {
    err << "no convergence: " << e.what() << "\nlast iterate: " << to_newick(e.last_iterate())
        << "\nresidual: " << format_double(e.residual()) << '\n';
    return exit_code::non_convergence;
  } catch (const BudgetExceeded& e) {
    err << "budget exceeded: " << e.what() << '\n';
    return exit_code::budget;
  } catch (const InvalidArgument& e) {
    err << "invalid input: " << e.what() << '\n';
    return exit_code::parse;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return exit_code::failure;
  }
}

}  // namespace treespace

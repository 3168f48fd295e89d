#pragma once

#include <istream>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "treespace/canonical.hpp"
#include "treespace/format.hpp"
#include "treespace/tree.hpp"

namespace treespace {

// Sidecar CSV: one row per tree, one column per canonical split ("a|b|c"),
// optional trailing "weight" column.
struct TreeTable {
  std::vector<Tree> trees;
  std::optional<std::vector<double>> weights;
};

inline void write_tree_csv(std::ostream& out, const std::vector<Tree>& trees,
                           const std::vector<double>* weights = nullptr) {
  if (trees.empty()) throw InvalidArgument("no trees to write");
  const LeafSet& leaves = trees.front().leafset();
  CanonicalOrder order(leaves);
  for (std::size_t i = 0; i < order.size(); ++i) {
    if (i) out << ',';
    out << split_name(leaves, order.splits()[i]);
  }
  if (weights) out << ",weight";
  out << '\n';
  for (std::size_t r = 0; r < trees.size(); ++r) {
    require_same_leafset(trees.front(), trees[r]);
    std::vector<double> row(order.size(), 0.0);
    for (const auto& e : trees[r].edges()) row[order.index_of(e.split)] = e.length;
    for (std::size_t i = 0; i < row.size(); ++i) {
      if (i) out << ',';
      out << format_double(row[i]);
    }
    if (weights) out << ',' << format_double(weights->at(r));
    out << '\n';
  }
}

namespace csv_detail {

inline std::vector<std::string> fields(const std::string& line) {
  std::vector<std::string> out;
  std::stringstream ss(line);
  std::string f;
  while (std::getline(ss, f, ',')) {
    auto b = f.find_first_not_of(" \t\r");
    auto e = f.find_last_not_of(" \t\r");
    out.push_back(b == std::string::npos ? std::string() : f.substr(b, e - b + 1));
  }
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

inline double number(const std::string& f, std::size_t line, std::size_t col) {
  char* end = nullptr;
  double v = std::strtod(f.c_str(), &end);
  if (f.empty() || end != f.c_str() + f.size() || !std::isfinite(v)) {
    throw ParseError("malformed number '" + f + "'", line, col);
  }
  return v;
}

}  // namespace csv_detail

// Reads the sidecar format. The leaf set is inferred from the header unless
// one is supplied.
inline TreeTable read_tree_csv(std::istream& in, const std::string& root_label = "r", LeafSetPtr leaves = nullptr) {
  std::string line;
  if (!std::getline(in, line)) throw ParseError("empty CSV input", 1, 1);
  auto header = csv_detail::fields(line);
  bool has_weight = !header.empty() && header.back() == "weight";
  if (has_weight) header.pop_back();
  if (!leaves) {
    std::vector<std::string> labels;
    for (const auto& h : header) {
      std::stringstream ss(h);
      std::string l;
      while (std::getline(ss, l, '|')) {
        if (std::find(labels.begin(), labels.end(), l) == labels.end()) labels.push_back(l);
      }
    }
    try {
      leaves = std::make_shared<const LeafSet>(labels, root_label);
    } catch (const InvalidArgument& e) {
      throw ParseError(std::string("bad CSV header: ") + e.what(), 1, 1);
    }
  }
  std::vector<Split> columns;
  for (std::size_t i = 0; i < header.size(); ++i) {
    try {
      columns.push_back(split_from_name(*leaves, header[i]));
    } catch (const InvalidArgument& e) {
      throw ParseError(std::string("bad CSV column: ") + e.what(), 1, i + 1);
    }
  }
  TreeTable table;
  if (has_weight) table.weights.emplace();
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    auto f = csv_detail::fields(line);
    if (f.size() != header.size() + (has_weight ? 1 : 0)) {
      throw ParseError("expected " + std::to_string(header.size() + (has_weight ? 1 : 0)) + " fields, found " +
                           std::to_string(f.size()),
                       lineno, 1);
    }
    std::vector<Edge> edges;
    for (std::size_t i = 0; i < columns.size(); ++i) {
      double v = csv_detail::number(f[i], lineno, i + 1);
      if (v < 0.0) throw ParseError("negative branch length", lineno, i + 1);
      if (v > 0.0) edges.push_back({columns[i], v});
    }
    try {
      table.trees.emplace_back(leaves, std::move(edges));
    } catch (const InvalidArgument& e) {
      throw ParseError(std::string("invalid tree: ") + e.what(), lineno, 1);
    }
    if (has_weight) table.weights->push_back(csv_detail::number(f.back(), lineno, f.size()));
  }
  if (table.trees.empty()) throw ParseError("CSV has no data rows", lineno, 1);
  return table;
}

}  // namespace treespace

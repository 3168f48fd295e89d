#pragma once

#include <cctype>
#include <cstdlib>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "treespace/format.hpp"
#include "treespace/tree.hpp"

namespace treespace {

namespace newick_detail {

struct Node {
  std::vector<int> children;
  std::string label;
  std::optional<double> length;
  std::size_t line = 1;
  std::size_t column = 1;
};

class Reader {
 public:
  explicit Reader(std::string_view text) : text_(text) {}

  bool at_end() {
    skip();
    return pos_ >= text_.size();
  }

  // Parses one tree terminated by ';' and returns its node table, root first.
  std::vector<Node> tree() {
    nodes_.clear();
    skip();
    subtree();
    skip();
    expect(';');
    return std::move(nodes_);
  }

  std::size_t line() const { return line_; }
  std::size_t column() const { return col_; }

 private:
  [[noreturn]] void fail(const std::string& what) const { throw ParseError(what, line_, col_); }

  void advance() {
    if (text_[pos_] == '\n') {
      ++line_;
      col_ = 1;
    } else {
      ++col_;
    }
    ++pos_;
  }

  void skip() {
    while (pos_ < text_.size()) {
      char c = text_[pos_];
      if (std::isspace(static_cast<unsigned char>(c))) {
        advance();
      } else if (c == '[') {
        while (pos_ < text_.size() && text_[pos_] != ']') advance();
        if (pos_ >= text_.size()) fail("unterminated comment");
        advance();
      } else {
        break;
      }
    }
  }

  char peek() {
    skip();
    return pos_ < text_.size() ? text_[pos_] : '\0';
  }

  void expect(char c) {
    if (peek() != c) {
      if (pos_ >= text_.size()) fail(std::string("unexpected end of input, expected '") + c + "'");
      fail(std::string("expected '") + c + "' but found '" + text_[pos_] + "'");
    }
    advance();
  }

  static bool label_char(char c) {
    return !std::isspace(static_cast<unsigned char>(c)) && c != '(' && c != ')' && c != ',' && c != ':' &&
           c != ';' && c != '[' && c != ']' && c != '\'';
  }

  std::string label() {
    skip();
    std::string out;
    if (pos_ < text_.size() && text_[pos_] == '\'') {
      advance();
      while (true) {
        if (pos_ >= text_.size()) fail("unterminated quoted label");
        if (text_[pos_] == '\'') {
          if (pos_ + 1 < text_.size() && text_[pos_ + 1] == '\'') {
            out += '\'';
            advance();
            advance();
            continue;
          }
          advance();
          break;
        }
        out += text_[pos_];
        advance();
      }
      return out;
    }
    while (pos_ < text_.size() && label_char(text_[pos_])) {
      out += text_[pos_];
      advance();
    }
    return out;
  }

  std::optional<double> length() {
    if (peek() != ':') return std::nullopt;
    advance();
    skip();
    std::size_t start = pos_;
    std::size_t l = line_, c = col_;
    while (pos_ < text_.size() &&
           (std::isdigit(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '.' || text_[pos_] == '-' ||
            text_[pos_] == '+' || text_[pos_] == 'e' || text_[pos_] == 'E')) {
      advance();
    }
    std::string tok(text_.substr(start, pos_ - start));
    char* end = nullptr;
    double v = tok.empty() ? 0.0 : std::strtod(tok.c_str(), &end);
    if (tok.empty() || end != tok.c_str() + tok.size() || !std::isfinite(v)) {
      throw ParseError("malformed branch length '" + tok + "'", l, c);
    }
    if (v < 0.0) throw ParseError("negative branch length " + tok, l, c);
    return v;
  }

  int subtree() {
    int id = static_cast<int>(nodes_.size());
    nodes_.emplace_back();
    nodes_[id].line = line_;
    nodes_[id].column = col_;
    if (peek() == '(') {
      advance();
      while (true) {
        int child = subtree();
        nodes_[id].children.push_back(child);
        char c = peek();
        if (c == ',') {
          advance();
          continue;
        }
        if (c == ')') {
          advance();
          break;
        }
        if (c == '\0') fail("unexpected end of input inside '('");
        fail(std::string("expected ',' or ')' but found '") + c + "'");
      }
    }
    nodes_[id].label = label();
    nodes_[id].length = length();
    if (nodes_[id].children.empty() && nodes_[id].label.empty()) {
      throw ParseError("unlabeled leaf", nodes_[id].line, nodes_[id].column);
    }
    return id;
  }

  std::string_view text_;
  std::size_t pos_ = 0;
  std::size_t line_ = 1;
  std::size_t col_ = 1;
  std::vector<Node> nodes_;
};

inline std::vector<std::string> leaf_labels(const std::vector<Node>& nodes, const std::string& root_label) {
  std::vector<std::string> labels;
  std::map<std::string, std::size_t> seen;
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    const Node& n = nodes[i];
    if (!n.children.empty()) continue;
    if (!seen.emplace(n.label, i).second) {
      throw ParseError("duplicate leaf name '" + n.label + "'", n.line, n.column);
    }
    if (n.label != root_label) labels.push_back(n.label);
  }
  if (labels.size() < 3) throw ParseError("a tree needs at least 3 leaves besides the root");
  if (labels.size() > LeafSet::max_leaves) throw ParseError("at most 64 leaves are supported");
  return labels;
}

struct Below {
  std::uint64_t mask = 0;
  bool has_root = false;
};

inline Tree build(const std::vector<Node>& nodes, const LeafSetPtr& leaves) {
  const std::string& root_label = leaves->root_label();
  std::vector<Below> below(nodes.size());
  // Children always have larger ids than their parent.
  for (std::size_t i = nodes.size(); i-- > 0;) {
    const Node& n = nodes[i];
    if (n.children.empty()) {
      if (n.label == root_label) {
        below[i].has_root = true;
      } else {
        auto idx = leaves->index_of(n.label);
        if (!idx) throw LeafSetMismatch("leaf '" + n.label + "' is not in the leaf set");
        below[i].mask = std::uint64_t{1} << *idx;
      }
    } else {
      for (int c : n.children) {
        below[i].mask |= below[static_cast<std::size_t>(c)].mask;
        below[i].has_root = below[i].has_root || below[static_cast<std::size_t>(c)].has_root;
      }
    }
  }
  if (below[0].mask != leaves->full_mask()) throw LeafSetMismatch("tree does not contain every leaf of the leaf set");
  std::map<std::uint64_t, double> lengths;
  for (std::size_t i = 1; i < nodes.size(); ++i) {
    const Node& n = nodes[i];
    if (n.children.empty()) continue;
    Split s(below[i].has_root ? leaves->full_mask() & ~below[i].mask : below[i].mask);
    if (!is_valid_split(*leaves, s)) continue;
    if (!n.length) throw ParseError("missing branch length on internal edge", n.line, n.column);
    lengths[s.bits] += *n.length;
  }
  std::vector<Edge> edges;
  for (auto [bits, len] : lengths) {
    if (len > 0.0) edges.push_back({Split(bits), len});
  }
  return Tree(leaves, std::move(edges));
}

inline bool needs_quotes(const std::string& s) {
  if (s.empty()) return true;
  for (char c : s) {
    if (std::isspace(static_cast<unsigned char>(c)) || std::string_view("(),:;[]'").find(c) != std::string_view::npos) {
      return true;
    }
  }
  return false;
}

inline std::string quote(const std::string& s) {
  if (!needs_quotes(s)) return s;
  std::string out = "'";
  for (char c : s) {
    if (c == '\'') out += '\'';
    out += c;
  }
  return out + "'";
}

}  // namespace newick_detail

// Parses every ';'-terminated tree in the text. All trees share one LeafSet;
// differing leaf labels raise LeafSetMismatch.
inline std::vector<Tree> parse_newick_trees(std::string_view text, const std::string& root_label = "r",
                                            LeafSetPtr leaves = nullptr) {
  newick_detail::Reader reader(text);
  std::vector<Tree> out;
  while (!reader.at_end()) {
    auto nodes = reader.tree();
    auto labels = newick_detail::leaf_labels(nodes, leaves ? leaves->root_label() : root_label);
    if (!leaves) {
      leaves = std::make_shared<const LeafSet>(labels, root_label);
    } else {
      std::sort(labels.begin(), labels.end());
      if (labels != leaves->labels()) throw LeafSetMismatch("tree " + std::to_string(out.size() + 1) + " has a different leaf set");
    }
    out.push_back(newick_detail::build(nodes, leaves));
  }
  if (out.empty()) throw ParseError("no tree found", reader.line(), reader.column());
  return out;
}

inline Tree parse_newick(std::string_view text, const std::string& root_label = "r", LeafSetPtr leaves = nullptr) {
  auto trees = parse_newick_trees(text, root_label, std::move(leaves));
  if (trees.size() != 1) throw ParseError("expected exactly one tree, found " + std::to_string(trees.size()));
  return std::move(trees.front());
}

// Rooted Newick with the root label on the outermost node. Pendant edges
// carry no length.
inline std::string to_newick(const Tree& tree) {
  const LeafSet& leaves = tree.leafset();
  struct Clade {
    std::uint64_t mask;
    double length;
  };
  std::vector<Clade> clades;
  for (const auto& e : tree.edges()) clades.push_back({e.split.bits, e.length});
  auto write = [&](auto&& self, std::uint64_t mask) -> std::string {
    // Children: maximal internal clades strictly inside mask, then leaves not covered.
    std::vector<std::pair<std::uint64_t, std::string>> parts;
    std::uint64_t covered = 0;
    for (const auto& c : clades) {
      if (c.mask == mask || (c.mask & mask) != c.mask) continue;
      bool maximal = true;
      for (const auto& d : clades) {
        if (d.mask != c.mask && d.mask != mask && (d.mask & mask) == d.mask && (c.mask & d.mask) == c.mask) {
          maximal = false;
          break;
        }
      }
      if (!maximal) continue;
      covered |= c.mask;
      parts.emplace_back(c.mask, self(self, c.mask) + ":" + format_double(c.length));
    }
    for (std::uint64_t x = mask & ~covered; x != 0; x &= x - 1) {
      std::uint64_t bit = x & (~x + 1);
      parts.emplace_back(bit, newick_detail::quote(leaves.label(static_cast<std::size_t>(std::countr_zero(bit)))));
    }
    std::sort(parts.begin(), parts.end(),
              [](const auto& a, const auto& b) { return std::countr_zero(a.first) < std::countr_zero(b.first); });
    std::string out = "(";
    for (std::size_t i = 0; i < parts.size(); ++i) {
      if (i) out += ',';
      out += parts[i].second;
    }
    return out + ")";
  };
  return write(write, leaves.full_mask()) + newick_detail::quote(leaves.root_label()) + ";";
}

}  // namespace treespace

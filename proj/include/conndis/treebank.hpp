// Bracketed constituency trees and the syntactic neighborhood of a token span.
#pragma once

#include <cstddef>
#include <istream>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "conndis/errors.hpp"

namespace conndis {

// One constituent or leaf. Leaves carry the surface token as their label and
// have no children. Spans are token ranges [start, end).
struct Node {
  std::string label;
  int parent = -1;
  int start = 0;
  int end = 0;
  std::vector<int> children;

  bool is_leaf() const { return children.empty(); }
};

// Category tags of the node covering a span, read off its tree position.
// Tags are nullopt when the covering node is the root / an edge child.
struct SyntacticContext {
  std::string self_cat;
  std::optional<std::string> parent;
  std::optional<std::string> left_sibling;
  std::optional<std::string> right_sibling;
  bool exact_cover = true;
};

namespace detail {

// Function decorations ("NP-SBJ", "NP=2") are cut at the first '-' or '=';
// labels that start with '-' ("-NONE-", "-LRB-") are kept whole.
inline std::string strip_label(std::string_view raw) {
  if (raw.empty() || raw.front() == '-') return std::string(raw);
  const std::size_t cut = raw.find_first_of("-=");
  return std::string(raw.substr(0, cut == std::string_view::npos ? raw.size() : cut));
}

}  // namespace detail

// Immutable rooted ordered tree over a token sequence. Nodes live in a flat
// arena; index 0 is the root and children precede siblings (preorder).
class ParseTree {
 public:
  static ParseTree parse(std::string_view text);

  const std::vector<std::string>& tokens() const { return tokens_; }
  const std::vector<Node>& nodes() const { return nodes_; }
  const Node& node(int i) const { return nodes_[static_cast<std::size_t>(i)]; }
  const Node& root() const { return nodes_[0]; }
  int size() const { return static_cast<int>(nodes_.size()); }

  // Canonical single-space bracketed form; parse(to_bracketed()) is identity.
  std::string to_bracketed() const {
    std::string out;
    append_bracketed(0, out);
    return out;
  }

  // The highest node covering exactly [start, end) (topmost of a unary
  // chain), or the lowest common ancestor of the span's leaves when no node
  // covers it exactly.
  SyntacticContext context(int start, int end) const;

  bool structurally_equal(const ParseTree& other) const {
    if (tokens_ != other.tokens_ || nodes_.size() != other.nodes_.size()) return false;
    for (std::size_t i = 0; i < nodes_.size(); ++i) {
      const Node& a = nodes_[i];
      const Node& b = other.nodes_[i];
      if (a.label != b.label || a.parent != b.parent || a.start != b.start || a.end != b.end ||
          a.children != b.children)
        return false;
    }
    return true;
  }

 private:
  void append_bracketed(int idx, std::string& out) const {
    const Node& n = nodes_[static_cast<std::size_t>(idx)];
    if (n.is_leaf()) {
      out += n.label;
      return;
    }
    out += '(';
    out += n.label;
    for (int c : n.children) {
      out += ' ';
      append_bracketed(c, out);
    }
    out += ')';
  }

  std::vector<Node> nodes_;
  std::vector<std::string> tokens_;
};

inline ParseTree ParseTree::parse(std::string_view text) {
  struct Raw {
    std::string label;
    std::vector<int> children;
    bool leaf = false;
    std::size_t offset = 0;
  };
  std::vector<Raw> raw;
  std::vector<int> stack;
  int top_level = -1;

  std::size_t i = 0;
  const std::size_t n = text.size();
  auto skip_ws = [&] {
    while (i < n && (text[i] == ' ' || text[i] == '\t' || text[i] == '\r' || text[i] == '\n')) ++i;
  };
  auto read_atom = [&] {
    const std::size_t b = i;
    while (i < n && text[i] != '(' && text[i] != ')' && text[i] != ' ' && text[i] != '\t' &&
           text[i] != '\r' && text[i] != '\n')
      ++i;
    return std::string(text.substr(b, i - b));
  };

  skip_ws();
  if (i >= n) throw ParseError("empty tree", i);

  while (i < n) {
    skip_ws();
    if (i >= n) break;
    const char c = text[i];
    if (c == '(') {
      if (top_level >= 0 && stack.empty()) throw ParseError("trailing input after tree", i);
      const std::size_t open = i;
      ++i;
      skip_ws();
      std::string label = read_atom();
      if (label.empty()) throw ParseError("empty constituent label", i);
      raw.push_back(Raw{std::move(label), {}, false, open});
      const int idx = static_cast<int>(raw.size()) - 1;
      if (!stack.empty()) raw[static_cast<std::size_t>(stack.back())].children.push_back(idx);
      stack.push_back(idx);
    } else if (c == ')') {
      if (stack.empty()) throw ParseError("unbalanced ')'", i);
      Raw& node = raw[static_cast<std::size_t>(stack.back())];
      if (node.children.empty()) throw ParseError("constituent '" + node.label + "' has no children", i);
      const int closed = stack.back();
      stack.pop_back();
      if (stack.empty()) top_level = closed;
      ++i;
    } else {
      if (stack.empty()) throw ParseError("token outside any constituent", i);
      const std::size_t at = i;
      std::string token = read_atom();
      raw.push_back(Raw{std::move(token), {}, true, at});
      raw[static_cast<std::size_t>(stack.back())].children.push_back(static_cast<int>(raw.size()) - 1);
    }
  }
  if (!stack.empty()) throw ParseError("unbalanced '(': expected ')'", n);
  if (top_level < 0) throw ParseError("empty tree", n);

  // Internal labels lose their functional decorations; leaves are surface
  // tokens and stay verbatim.
  for (Raw& r : raw) {
    if (!r.leaf) r.label = detail::strip_label(r.label);
  }

  // Drop trace subtrees (internal label "-NONE-") and any constituent left
  // without surface leaves.
  std::vector<char> keep(raw.size(), 0);
  auto mark = [&](auto&& self, int idx) -> bool {
    Raw& r = raw[static_cast<std::size_t>(idx)];
    if (r.leaf) {
      keep[static_cast<std::size_t>(idx)] = 1;
      return true;
    }
    if (r.label == "-NONE-") return false;
    bool any = false;
    for (int c : r.children) {
      if (self(self, c)) any = true;
    }
    keep[static_cast<std::size_t>(idx)] = any ? 1 : 0;
    return any;
  };
  if (!mark(mark, top_level)) throw ParseError("tree has no surface tokens", raw[static_cast<std::size_t>(top_level)].offset);

  ParseTree tree;
  auto build = [&](auto&& self, int src, int parent) -> int {
    const Raw& r = raw[static_cast<std::size_t>(src)];
    const int idx = static_cast<int>(tree.nodes_.size());
    tree.nodes_.push_back(Node{r.label, parent, 0, 0, {}});
    if (r.leaf) {
      tree.nodes_[static_cast<std::size_t>(idx)].start = static_cast<int>(tree.tokens_.size());
      tree.nodes_[static_cast<std::size_t>(idx)].end = static_cast<int>(tree.tokens_.size()) + 1;
      tree.tokens_.push_back(r.label);
      return idx;
    }
    for (int c : r.children) {
      if (!keep[static_cast<std::size_t>(c)]) continue;
      const int child_idx = self(self, c, idx);
      tree.nodes_[static_cast<std::size_t>(idx)].children.push_back(child_idx);
    }
    const Node& me = tree.nodes_[static_cast<std::size_t>(idx)];
    tree.nodes_[static_cast<std::size_t>(idx)].start =
        tree.nodes_[static_cast<std::size_t>(me.children.front())].start;
    tree.nodes_[static_cast<std::size_t>(idx)].end =
        tree.nodes_[static_cast<std::size_t>(me.children.back())].end;
    return idx;
  };
  build(build, top_level, -1);
  return tree;
}

inline SyntacticContext ParseTree::context(int start, int end) const {
  if (start < 0 || end <= start || end > static_cast<int>(tokens_.size()))
    throw ArgumentError("span [" + std::to_string(start) + ", " + std::to_string(end) +
                        ") out of bounds for " + std::to_string(tokens_.size()) + " tokens");

  int found = -1;
  for (int i = 0; i < size(); ++i) {
    if (nodes_[static_cast<std::size_t>(i)].start == start && nodes_[static_cast<std::size_t>(i)].end == end) {
      found = i;
      break;  // preorder: the first exact cover is the topmost of its chain
    }
  }

  SyntacticContext ctx;
  if (found < 0) {
    // No exact cover: descend to the lowest node still containing the span.
    int cur = 0;
    for (;;) {
      int next = -1;
      for (int c : nodes_[static_cast<std::size_t>(cur)].children) {
        const Node& cn = nodes_[static_cast<std::size_t>(c)];
        if (cn.start <= start && end <= cn.end) {
          next = c;
          break;
        }
      }
      if (next < 0) break;
      cur = next;
    }
    found = cur;
    ctx.exact_cover = false;
  }

  const Node& self = nodes_[static_cast<std::size_t>(found)];
  ctx.self_cat = self.label;
  if (self.parent >= 0) {
    const Node& par = nodes_[static_cast<std::size_t>(self.parent)];
    ctx.parent = par.label;
    int pos = 0;
    while (par.children[static_cast<std::size_t>(pos)] != found) ++pos;
    if (pos > 0) ctx.left_sibling = nodes_[static_cast<std::size_t>(par.children[static_cast<std::size_t>(pos - 1)])].label;
    if (pos + 1 < static_cast<int>(par.children.size()))
      ctx.right_sibling = nodes_[static_cast<std::size_t>(par.children[static_cast<std::size_t>(pos + 1)])].label;
  }
  return ctx;
}

inline ParseTree parse_bracketed_tree(std::string_view text) { return ParseTree::parse(text); }

// Reads every balanced bracketed expression from a stream: one tree per line
// or pretty-printed across lines, separated by arbitrary whitespace.
inline std::vector<ParseTree> read_trees(std::istream& in) {
  std::vector<ParseTree> trees;
  std::string buf;
  int depth = 0;
  char c;
  while (in.get(c)) {
    if (depth == 0 && (c == ' ' || c == '\t' || c == '\r' || c == '\n')) continue;
    buf.push_back(c);
    if (c == '(') {
      ++depth;
    } else if (c == ')') {
      --depth;
      if (depth < 0) throw ParseError("unbalanced ')'", buf.size() - 1);
      if (depth == 0) {
        trees.push_back(ParseTree::parse(buf));
        buf.clear();
      }
    }
  }
  if (!buf.empty()) trees.push_back(ParseTree::parse(buf));  // reports the defect offset
  return trees;
}

}  // namespace conndis

#include <catch2/catch_amalgamated.hpp>

#include <set>
#include <sstream>

#include "conndis/treebank.hpp"
#include "support/oracles.hpp"
#include "support/random_trees.hpp"

using namespace conndis;
using conndis_test::context_equal;
using conndis_test::oracle_context;
using conndis_test::RandomTreeGen;

namespace {

// Fig-1-shaped French sentence used across the suite.
const char* kFrenchTree =
    "(S (NP La Lituanie , la Lettonie et l' Estonie) (VN (CL s') (V ouvrent)) (ADV ainsi) "
    "(PP (P au) (NP (N multipartisme) (PONCT .))))";

}  // namespace

TEST_CASE("single-leaf tree") {
  const ParseTree t = parse_bracketed_tree("(S (ADV ainsi))");
  REQUIRE(t.tokens() == std::vector<std::string>{"ainsi"});
  const Node& root = t.root();
  CHECK(root.label == "S");
  REQUIRE(root.children.size() == 1);
  const Node& adv = t.node(root.children[0]);
  CHECK(adv.label == "ADV");
  REQUIRE(adv.children.size() == 1);
  const Node& leaf = t.node(adv.children[0]);
  CHECK(leaf.label == "ainsi");
  CHECK(leaf.is_leaf());
  CHECK(leaf.start == 0);
  CHECK(leaf.end == 1);
}

TEST_CASE("French example tree parses with the right shape") {
  const ParseTree t = parse_bracketed_tree(kFrenchTree);
  REQUIRE(t.tokens().size() == 14);
  CHECK(t.tokens()[10] == "ainsi");
  const Node& root = t.root();
  CHECK(root.label == "S");
  REQUIRE(root.children.size() == 4);
  CHECK(t.node(root.children[0]).label == "NP");
  CHECK(t.node(root.children[1]).label == "VN");
  CHECK(t.node(root.children[2]).label == "ADV");
  CHECK(t.node(root.children[3]).label == "PP");
}

TEST_CASE("parse errors carry offsets") {
  CHECK_THROWS_AS(parse_bracketed_tree("(S (NP"), ParseError);
  try {
    parse_bracketed_tree("(S (NP");
  } catch (const ParseError& e) {
    CHECK(e.offset() == 6);  // end of input
  }
  CHECK_THROWS_AS(parse_bracketed_tree(""), ParseError);
  CHECK_THROWS_AS(parse_bracketed_tree("   "), ParseError);
  CHECK_THROWS_AS(parse_bracketed_tree("(S x) y"), ParseError);
  CHECK_THROWS_AS(parse_bracketed_tree("(S x))"), ParseError);
  CHECK_THROWS_AS(parse_bracketed_tree("(( x))"), ParseError);   // empty label
  CHECK_THROWS_AS(parse_bracketed_tree("(S ())"), ParseError);
  CHECK_THROWS_AS(parse_bracketed_tree("(S)"), ParseError);      // no children
}

TEST_CASE("functional tags are stripped from internal labels only") {
  const ParseTree t = parse_bracketed_tree("(S (NP-SBJ (NNP aa-bb)) (VP=2 (VB cc)))");
  CHECK(t.node(t.root().children[0]).label == "NP");
  CHECK(t.node(t.root().children[1]).label == "VP");
  CHECK(t.tokens() == std::vector<std::string>{"aa-bb", "cc"});  // tokens untouched
  const ParseTree lrb = parse_bracketed_tree("(S (-LRB- -LRB-) (NN x))");
  CHECK(lrb.node(lrb.root().children[0]).label == "-LRB-");
}

TEST_CASE("trace leaves are dropped before span assignment") {
  const ParseTree t =
      parse_bracketed_tree("(S (NP-SBJ (-NONE- *T*-1)) (VP (VB eat) (NP (NN fish))))");
  CHECK(t.tokens() == std::vector<std::string>{"eat", "fish"});
  // the NP-SBJ wrapper lost its only child and is gone too
  REQUIRE(t.root().children.size() == 1);
  CHECK(t.node(t.root().children[0]).label == "VP");
  CHECK(t.root().start == 0);
  CHECK(t.root().end == 2);

  CHECK_THROWS_AS(parse_bracketed_tree("(S (-NONE- *T*))"), ParseError);  // nothing left
}

TEST_CASE("node_context on the French example span of 'ainsi'") {
  const ParseTree t = parse_bracketed_tree(kFrenchTree);
  const SyntacticContext ctx = t.context(10, 11);
  CHECK(ctx.self_cat == "ADV");
  CHECK(ctx.parent == "S");
  CHECK(ctx.left_sibling == "VN");
  CHECK(ctx.right_sibling == "PP");
  CHECK(ctx.exact_cover);
}

TEST_CASE("unary chain resolves to the highest exact-cover node") {
  const ParseTree t = parse_bracketed_tree("(S (ADV ainsi))");
  const SyntacticContext ctx = t.context(0, 1);
  CHECK(ctx.self_cat == "S");
  CHECK_FALSE(ctx.parent.has_value());
  CHECK_FALSE(ctx.left_sibling.has_value());
  CHECK_FALSE(ctx.right_sibling.has_value());
  CHECK(ctx.exact_cover);
}

TEST_CASE("no exact cover falls back to the lowest common ancestor") {
  // right-branching over 5 leaves: (A a (B b (C c (D d e))))-ish
  const ParseTree t =
      parse_bracketed_tree("(A (X a) (B (Y b) (C (Z c) (D (W d) (V e)))))");
  REQUIRE(t.tokens().size() == 5);
  const SyntacticContext ctx = t.context(1, 3);  // leaves b..c straddle B and C
  CHECK_FALSE(ctx.exact_cover);
  CHECK(ctx.self_cat == "B");  // lowest node containing [1,3)
  CHECK(context_equal(ctx, oracle_context(t, 1, 3)));
}

TEST_CASE("span validation") {
  const ParseTree t = parse_bracketed_tree("(S (A a) (B b))");
  CHECK_THROWS_AS(t.context(0, 0), ArgumentError);
  CHECK_THROWS_AS(t.context(-1, 1), ArgumentError);
  CHECK_THROWS_AS(t.context(0, 3), ArgumentError);
  CHECK_THROWS_AS(t.context(2, 1), ArgumentError);
}

TEST_CASE("round-trip: canonical serialization re-parses identically") {
  RandomTreeGen gen(1234);
  for (int i = 0; i < 300; ++i) {
    const int leaves = 1 + static_cast<int>(gen.rng()() % 12);
    const std::string text = gen.tree(leaves);
    const ParseTree t = parse_bracketed_tree(text);
    const ParseTree again = parse_bracketed_tree(t.to_bracketed());
    REQUIRE(t.structurally_equal(again));
  }
}

TEST_CASE("node_context equals the exhaustive oracle on random trees") {
  RandomTreeGen gen(99);
  for (int i = 0; i < 300; ++i) {
    const int leaves = 1 + static_cast<int>(gen.rng()() % 12);
    const ParseTree t = parse_bracketed_tree(gen.tree(leaves));
    const int n = static_cast<int>(t.tokens().size());
    for (int s = 0; s < n; ++s) {
      for (int e = s + 1; e <= n; ++e) {
        const SyntacticContext got = t.context(s, e);
        const SyntacticContext want = oracle_context(t, s, e);
        REQUIRE(context_equal(got, want));
      }
    }
  }
}

TEST_CASE("exact-cover maximality: chosen node has no ancestor with the same span") {
  RandomTreeGen gen(7);
  for (int i = 0; i < 200; ++i) {
    const ParseTree t = parse_bracketed_tree(gen.tree(1 + static_cast<int>(gen.rng()() % 12)));
    for (const Node& node : t.nodes()) {
      const SyntacticContext ctx = t.context(node.start, node.end);
      CHECK(ctx.exact_cover);
      // find the chosen node again and confirm its parent covers more
      for (int j = 0; j < t.size(); ++j) {
        const Node& cand = t.node(j);
        if (cand.start != node.start || cand.end != node.end || cand.label != ctx.self_cat) continue;
        if (cand.parent >= 0) {
          const Node& par = t.node(cand.parent);
          const bool parent_same_span = par.start == cand.start && par.end == cand.end;
          CHECK_FALSE(parent_same_span);
        }
        break;
      }
    }
  }
}

TEST_CASE("read_trees handles one-per-line and pretty-printed input") {
  std::istringstream in(
      "(S (A a) (B b))\n"
      "(S\n  (A a)\n  (B\n    (C c)))\n"
      "   (S (X x))");
  const auto trees = read_trees(in);
  REQUIRE(trees.size() == 3);
  CHECK(trees[0].tokens().size() == 2);
  CHECK(trees[1].tokens().size() == 2);
  CHECK(trees[2].tokens().size() == 1);
}

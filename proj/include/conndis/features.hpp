// The six-feature representation of a connective occurrence.
#pragma once

#include <array>
#include <cstddef>
#include <string>
#include <vector>

#include "conndis/corpus.hpp"
#include "conndis/errors.hpp"
#include "conndis/text.hpp"
#include "conndis/treebank.hpp"

namespace conndis {

enum class Feature : int {
  Conn = 0,
  Pos = 1,
  SelfCat = 2,
  SelfCatParent = 3,
  SelfCatLeftSibling = 4,
  SelfCatRightSibling = 5,
};

inline constexpr std::array<Feature, 6> kAllFeatures = {
    Feature::Conn,   Feature::Pos,
    Feature::SelfCat, Feature::SelfCatParent,
    Feature::SelfCatLeftSibling, Feature::SelfCatRightSibling,
};

inline constexpr std::size_t kFeatureCount = kAllFeatures.size();

inline const char* feature_name(Feature f) {
  switch (f) {
    case Feature::Conn: return "conn";
    case Feature::Pos: return "pos";
    case Feature::SelfCat: return "self_cat";
    case Feature::SelfCatParent: return "self_cat_parent";
    case Feature::SelfCatLeftSibling: return "self_cat_left_sibling";
    case Feature::SelfCatRightSibling: return "self_cat_right_sibling";
  }
  return "?";
}

inline constexpr const char* kNoneTag = "NONE";
inline constexpr const char* kAtBeginning = "at-beginning";
inline constexpr const char* kNotAtBeginning = "not-at-beginning";

// Categorical feature values of one instance. Missing syntactic neighbors
// carry the reserved tag "NONE".
struct FeatureVector {
  std::string conn;          // case-folded, space-joined surface
  bool at_beginning = false;
  std::string self_cat;
  std::string self_cat_parent;
  std::string self_cat_left_sibling;
  std::string self_cat_right_sibling;

  std::string value_of(Feature f) const {
    switch (f) {
      case Feature::Conn: return conn;
      case Feature::Pos: return at_beginning ? kAtBeginning : kNotAtBeginning;
      case Feature::SelfCat: return self_cat;
      case Feature::SelfCatParent: return self_cat_parent;
      case Feature::SelfCatLeftSibling: return self_cat_left_sibling;
      case Feature::SelfCatRightSibling: return self_cat_right_sibling;
    }
    return {};
  }

  bool operator==(const FeatureVector&) const = default;
};

inline FeatureVector extract_features(const Instance& inst, const Sentence& sentence) {
  const int n = static_cast<int>(sentence.tokens.size());
  if (inst.start < 0 || inst.end <= inst.start || inst.end > n)
    throw ArgumentError("instance span out of bounds");
  FeatureVector fv;
  std::vector<std::string> surface(sentence.tokens.begin() + inst.start,
                                   sentence.tokens.begin() + inst.end);
  fv.conn = case_fold(join(surface, " "));
  fv.at_beginning = inst.start == 0;
  const SyntacticContext ctx = sentence.tree.context(inst.start, inst.end);
  fv.self_cat = ctx.self_cat;
  fv.self_cat_parent = ctx.parent.value_or(kNoneTag);
  fv.self_cat_left_sibling = ctx.left_sibling.value_or(kNoneTag);
  fv.self_cat_right_sibling = ctx.right_sibling.value_or(kNoneTag);
  return fv;
}

inline std::vector<FeatureVector> extract_all(const std::vector<Document>& corpus,
                                              const std::vector<Instance>& instances) {
  std::vector<FeatureVector> out;
  out.reserve(instances.size());
  for (const Instance& inst : instances)
    out.push_back(extract_features(inst, sentence_of(corpus, inst)));
  return out;
}

// Debug/ablation dump: one instance per line,
// doc sent start end label conn pos self_cat parent left right (tab-separated).
inline std::string feature_dump_line(const Instance& inst, const FeatureVector& fv) {
  std::string out;
  out += inst.doc_id;
  out += '\t';
  out += std::to_string(inst.sentence_index);
  out += '\t';
  out += std::to_string(inst.start);
  out += '\t';
  out += std::to_string(inst.end);
  out += '\t';
  out += label_name(inst.label);
  for (Feature f : kAllFeatures) {
    out += '\t';
    out += fv.value_of(f);
  }
  return out;
}

}  // namespace conndis

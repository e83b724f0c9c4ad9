// Connective lexicon loading and longest-match candidate search.
#pragma once

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <istream>
#include <map>
#include <span>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "conndis/errors.hpp"
#include "conndis/text.hpp"

namespace conndis {

// A connective form: one or more case-folded tokens.
using ConnectiveForm = std::vector<std::string>;

struct CandidateMatch {
  ConnectiveForm form;                // case-folded lexicon form
  int start = 0;                      // token span [start, end) in the sentence
  int end = 0;
  std::vector<std::string> surface;   // matched tokens as they appear

  std::string folded() const { return join(form, " "); }
};

// Set of case-folded connective forms, indexed by first token for matching.
class Lexicon {
 public:
  void insert(ConnectiveForm form) {
    if (form.empty()) return;
    auto& bucket = by_first_[form.front()];
    if (std::find(bucket.begin(), bucket.end(), form) != bucket.end()) return;
    bucket.push_back(std::move(form));
    // longer forms first so the matcher can take the first hit
    std::stable_sort(bucket.begin(), bucket.end(),
                     [](const ConnectiveForm& a, const ConnectiveForm& b) {
                       if (a.size() != b.size()) return a.size() > b.size();
                       return a < b;
                     });
    ++size_;
  }

  bool contains(const ConnectiveForm& form) const {
    if (form.empty()) return false;
    auto it = by_first_.find(form.front());
    if (it == by_first_.end()) return false;
    return std::find(it->second.begin(), it->second.end(), form) != it->second.end();
  }

  std::size_t size() const { return size_; }
  bool empty() const { return size_ == 0; }

  // Deterministic enumeration of all forms.
  std::vector<ConnectiveForm> forms() const {
    std::vector<ConnectiveForm> out;
    out.reserve(size_);
    for (const auto& [first, bucket] : by_first_)
      out.insert(out.end(), bucket.begin(), bucket.end());
    std::sort(out.begin(), out.end());
    return out;
  }

  const std::vector<ConnectiveForm>* bucket(const std::string& first_token) const {
    auto it = by_first_.find(first_token);
    return it == by_first_.end() ? nullptr : &it->second;
  }

 private:
  std::map<std::string, std::vector<ConnectiveForm>> by_first_;
  std::size_t size_ = 0;
};

// One space-separated form per line; '#' lines are comments, blanks ignored,
// CRLF tolerated. Forms are case-folded; duplicates collapse silently.
inline Lexicon read_lexicon(std::istream& in, const std::string& origin = "<stream>") {
  Lexicon lex;
  std::string line;
  while (std::getline(in, line)) {
    const std::string_view t = trim(line);
    if (t.empty() || t.front() == '#') continue;
    ConnectiveForm form;
    for (const std::string& tok : split_whitespace(t)) form.push_back(case_fold(tok));
    lex.insert(std::move(form));
  }
  if (lex.empty()) throw LoadError("lexicon '" + origin + "' has no entries");
  return lex;
}

inline Lexicon load_lexicon(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw LoadError("cannot read lexicon file '" + path.string() + "'");
  return read_lexicon(in, path.string());
}

// Greedy left-to-right longest-match scan. At each position the longest
// lexicon form starting there (after case folding) is emitted and the scan
// resumes past it, so matches never overlap.
inline std::vector<CandidateMatch> match_connectives(std::span<const std::string> tokens,
                                                     const Lexicon& lexicon) {
  std::vector<CandidateMatch> out;
  std::vector<std::string> folded;
  folded.reserve(tokens.size());
  for (const std::string& t : tokens) folded.push_back(case_fold(t));

  std::size_t pos = 0;
  while (pos < folded.size()) {
    const ConnectiveForm* hit = nullptr;
    if (const auto* bucket = lexicon.bucket(folded[pos])) {
      for (const ConnectiveForm& form : *bucket) {
        if (pos + form.size() > folded.size()) continue;
        if (std::equal(form.begin(), form.end(), folded.begin() + static_cast<std::ptrdiff_t>(pos))) {
          hit = &form;
          break;  // bucket is sorted longest first
        }
      }
    }
    if (!hit) {
      ++pos;
      continue;
    }
    CandidateMatch m;
    m.form = *hit;
    m.start = static_cast<int>(pos);
    m.end = static_cast<int>(pos + hit->size());
    m.surface.assign(tokens.begin() + static_cast<std::ptrdiff_t>(pos),
                     tokens.begin() + static_cast<std::ptrdiff_t>(pos + hit->size()));
    out.push_back(std::move(m));
    pos += hit->size();
  }
  return out;
}

}  // namespace conndis

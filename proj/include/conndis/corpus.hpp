// Annotated corpus ingestion and labeled instance construction.
//
// Corpus file format (UTF-8, record per sentence):
//   DOC <doc_id> SENT <n>
//   <token>TAB<token>...
//   <bracketed tree, one line>
//   CONN <start> <end> [trailing fields ignored]   (zero or more)
//   <blank line>
// Spans are token indices, end-exclusive. Records of one document are
// contiguous and SENT runs 0,1,2,... within the document.
#pragma once

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <istream>
#include <optional>
#include <ostream>
#include <string>
#include <utility>
#include <vector>

#include "conndis/errors.hpp"
#include "conndis/lexicon.hpp"
#include "conndis/text.hpp"
#include "conndis/treebank.hpp"

namespace conndis {

using Span = std::pair<int, int>;

struct Sentence {
  std::vector<std::string> tokens;
  ParseTree tree;
  std::vector<Span> gold_spans;  // discourse-usage annotations, sorted, disjoint
};

struct Document {
  std::string doc_id;
  std::vector<Sentence> sentences;
};

enum class Label { Discourse, NonDiscourse };

inline const char* label_name(Label l) { return l == Label::Discourse ? "DISCOURSE" : "NON_DISCOURSE"; }

// One candidate connective occurrence.
struct Instance {
  std::string doc_id;
  int doc_index = 0;
  int sentence_index = 0;
  int start = 0;
  int end = 0;
  std::string connective;  // case-folded, space-joined surface
  Label label = Label::NonDiscourse;
  bool gold_only = false;  // annotated span the lexicon matcher did not produce
};

namespace detail {

struct RawRecord {
  std::string doc_id;
  long sent_no = 0;
  std::string token_line;
  std::string tree_line;
  std::vector<std::string> conn_lines;
  std::size_t line_no = 0;  // line of the DOC header, 1-based
};

// Reads the next record; nullopt at end of input. Throws FormatError on a
// structurally broken record.
inline std::optional<RawRecord> read_record(std::istream& in, std::size_t& line_no,
                                            const std::string& origin) {
  std::string line;
  RawRecord rec;
  // skip blank separator lines
  for (;;) {
    if (!std::getline(in, line)) return std::nullopt;
    ++line_no;
    if (!trim(line).empty()) break;
  }
  rec.line_no = line_no;
  {
    const auto fields = split_whitespace(trim(line));
    if (fields.size() != 4 || fields[0] != "DOC" || fields[2] != "SENT")
      throw FormatError(origin + ":" + std::to_string(line_no) + ": expected 'DOC <id> SENT <n>', got '" +
                        std::string(trim(line)) + "'");
    rec.doc_id = fields[1];
    try {
      rec.sent_no = std::stol(fields[3]);
    } catch (const std::exception&) {
      throw FormatError(origin + ":" + std::to_string(line_no) + ": bad sentence number '" + fields[3] + "'");
    }
  }
  if (!std::getline(in, line))
    throw FormatError(origin + ":" + std::to_string(line_no) + ": record truncated before token line");
  ++line_no;
  rec.token_line = std::string(trim(line));
  if (!std::getline(in, line))
    throw FormatError(origin + ":" + std::to_string(line_no) + ": record truncated before tree line");
  ++line_no;
  rec.tree_line = std::string(trim(line));
  while (std::getline(in, line)) {
    ++line_no;
    const std::string_view t = trim(line);
    if (t.empty()) break;
    if (!t.starts_with("CONN"))
      throw FormatError(origin + ":" + std::to_string(line_no) + ": expected 'CONN <start> <end>' or blank, got '" +
                        std::string(t) + "'");
    rec.conn_lines.emplace_back(t);
  }
  return rec;
}

inline Sentence validate_record(const RawRecord& rec, const std::string& origin) {
  const std::string where =
      origin + ":" + std::to_string(rec.line_no) + " (doc " + rec.doc_id + ", sentence " +
      std::to_string(rec.sent_no) + ")";
  Sentence s;
  s.tokens = split_on(rec.token_line, '\t');
  if (s.tokens.size() == 1 && s.tokens[0].empty())
    throw FormatError(where + ": empty token line");
  for (const std::string& t : s.tokens)
    if (t.empty()) throw FormatError(where + ": empty token field");
  try {
    s.tree = parse_bracketed_tree(rec.tree_line);
  } catch (const ParseError& e) {
    throw FormatError(where + ": bad tree: " + e.what());
  }
  if (s.tree.tokens() != s.tokens)
    throw FormatError(where + ": tree leaves do not match the token line (" +
                      std::to_string(s.tree.tokens().size()) + " leaves vs " +
                      std::to_string(s.tokens.size()) + " tokens)");
  const int n = static_cast<int>(s.tokens.size());
  for (const std::string& cl : rec.conn_lines) {
    const auto fields = split_whitespace(cl);
    if (fields.size() < 3) throw FormatError(where + ": malformed gold span line '" + cl + "'");
    int a = 0, b = 0;
    try {
      a = std::stoi(fields[1]);
      b = std::stoi(fields[2]);
    } catch (const std::exception&) {
      throw FormatError(where + ": malformed gold span line '" + cl + "'");
    }
    if (a < 0 || b <= a || b > n)
      throw FormatError(where + ": gold span [" + std::to_string(a) + ", " + std::to_string(b) +
                        ") out of range for " + std::to_string(n) + " tokens");
    s.gold_spans.emplace_back(a, b);
  }
  std::sort(s.gold_spans.begin(), s.gold_spans.end());
  for (std::size_t i = 1; i < s.gold_spans.size(); ++i) {
    if (s.gold_spans[i].first < s.gold_spans[i - 1].second)
      throw FormatError(where + ": overlapping gold spans");
  }
  return s;
}

inline void load_corpus_stream(std::istream& in, const std::string& origin,
                               std::vector<Document>& docs) {
  std::size_t line_no = 0;
  while (auto rec = read_record(in, line_no, origin)) {
    Sentence s = validate_record(*rec, origin);
    if (docs.empty() || docs.back().doc_id != rec->doc_id) {
      for (const Document& d : docs) {
        if (d.doc_id == rec->doc_id)
          throw FormatError(origin + ":" + std::to_string(rec->line_no) + ": document '" + rec->doc_id +
                            "' appears in non-contiguous records");
      }
      docs.push_back(Document{rec->doc_id, {}});
    }
    if (rec->sent_no != static_cast<long>(docs.back().sentences.size()))
      throw FormatError(origin + ":" + std::to_string(rec->line_no) + ": doc " + rec->doc_id +
                        ": expected SENT " + std::to_string(docs.back().sentences.size()) + ", got " +
                        std::to_string(rec->sent_no));
    docs.back().sentences.push_back(std::move(s));
  }
}

}  // namespace detail

// Loads a corpus file, or every regular file of a directory in filename order.
inline std::vector<Document> load_corpus(const std::filesystem::path& path) {
  std::vector<Document> docs;
  std::vector<std::filesystem::path> files;
  if (std::filesystem::is_directory(path)) {
    for (const auto& entry : std::filesystem::directory_iterator(path))
      if (entry.is_regular_file()) files.push_back(entry.path());
    std::sort(files.begin(), files.end());
    if (files.empty()) throw LoadError("corpus directory '" + path.string() + "' has no files");
  } else {
    files.push_back(path);
  }
  for (const auto& f : files) {
    std::ifstream in(f, std::ios::binary);
    if (!in) throw LoadError("cannot read corpus file '" + f.string() + "'");
    detail::load_corpus_stream(in, f.string(), docs);
  }
  return docs;
}

inline std::vector<Document> read_corpus(std::istream& in, const std::string& origin = "<stream>") {
  std::vector<Document> docs;
  detail::load_corpus_stream(in, origin, docs);
  return docs;
}

// Candidate set per sentence: lexicon matches plus every gold span (gold
// spans the matcher missed are kept, flagged gold_only). An instance is
// DISCOURSE iff its span equals a gold span. Order: (doc, sentence, start).
inline std::vector<Instance> build_instances(const std::vector<Document>& corpus,
                                             const Lexicon& lexicon) {
  std::vector<Instance> out;
  for (std::size_t d = 0; d < corpus.size(); ++d) {
    const Document& doc = corpus[d];
    for (std::size_t s = 0; s < doc.sentences.size(); ++s) {
      const Sentence& sent = doc.sentences[s];
      std::vector<std::pair<Span, bool>> spans;  // (span, gold_only)
      for (const CandidateMatch& m : match_connectives(sent.tokens, lexicon))
        spans.push_back({{m.start, m.end}, false});
      for (const Span& g : sent.gold_spans) {
        const bool matched = std::any_of(spans.begin(), spans.end(),
                                         [&](const auto& p) { return p.first == g; });
        if (!matched) spans.push_back({g, true});
      }
      std::sort(spans.begin(), spans.end());
      for (const auto& [span, gold_only] : spans) {
        Instance inst;
        inst.doc_id = doc.doc_id;
        inst.doc_index = static_cast<int>(d);
        inst.sentence_index = static_cast<int>(s);
        inst.start = span.first;
        inst.end = span.second;
        std::vector<std::string> surface(sent.tokens.begin() + span.first,
                                         sent.tokens.begin() + span.second);
        inst.connective = case_fold(join(surface, " "));
        inst.label = std::binary_search(sent.gold_spans.begin(), sent.gold_spans.end(), span)
                         ? Label::Discourse
                         : Label::NonDiscourse;
        inst.gold_only = gold_only;
        out.push_back(std::move(inst));
      }
    }
  }
  return out;
}

inline const Sentence& sentence_of(const std::vector<Document>& corpus, const Instance& inst) {
  return corpus[static_cast<std::size_t>(inst.doc_index)]
      .sentences[static_cast<std::size_t>(inst.sentence_index)];
}

// Writes records back in the corpus format. `spans_of` supplies the CONN
// lines for a sentence; a trailing field per span is passed through verbatim.
struct AnnotatedSpan {
  int start = 0;
  int end = 0;
  std::string trailing;  // e.g. predicted probability; empty for none
};

inline void write_record(std::ostream& out, const std::string& doc_id, int sent_no,
                         const Sentence& sent, const std::vector<AnnotatedSpan>& spans) {
  out << "DOC " << doc_id << " SENT " << sent_no << "\n";
  out << join(sent.tokens, "\t") << "\n";
  out << sent.tree.to_bracketed() << "\n";
  for (const AnnotatedSpan& sp : spans) {
    out << "CONN " << sp.start << " " << sp.end;
    if (!sp.trailing.empty()) out << " " << sp.trailing;
    out << "\n";
  }
  out << "\n";
}

}  // namespace conndis

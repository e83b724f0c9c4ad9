#include <catch2/catch_amalgamated.hpp>

#include <sstream>

#include "conndis/corpus.hpp"

using namespace conndis;

namespace {

const char* kDataDir = CONNDIS_TEST_DATA;

std::vector<Document> corpus_from(const std::string& text) {
  std::istringstream in(text);
  return read_corpus(in);
}

Lexicon lex_from(const std::string& text) {
  std::istringstream in(text);
  return read_lexicon(in);
}

std::string record(const std::string& doc, int sent, const std::string& tokens,
                   const std::string& tree, const std::vector<std::pair<int, int>>& spans = {}) {
  std::string out = "DOC " + doc + " SENT " + std::to_string(sent) + "\n" + tokens + "\n" + tree + "\n";
  for (const auto& [a, b] : spans) out += "CONN " + std::to_string(a) + " " + std::to_string(b) + "\n";
  return out + "\n";
}

}  // namespace

TEST_CASE("well-formed single-sentence corpus loads") {
  const auto docs = corpus_from(record("d1", 0, "A\tet\tB", "(S (X A) (C et) (X B))", {{1, 2}}));
  REQUIRE(docs.size() == 1);
  REQUIRE(docs[0].sentences.size() == 1);
  CHECK(docs[0].doc_id == "d1");
  CHECK(docs[0].sentences[0].tokens == std::vector<std::string>{"A", "et", "B"});
  CHECK(docs[0].sentences[0].gold_spans == std::vector<Span>{{1, 2}});
}

TEST_CASE("gold span out of range is a format error") {
  CHECK_THROWS_AS(corpus_from(record("d1", 0, "A\tet\tB\tC", "(S (X A) (C et) (X B) (X C))", {{5, 6}})),
                  FormatError);
  CHECK_THROWS_AS(corpus_from(record("d1", 0, "A\tB", "(S (X A) (X B))", {{1, 1}})), FormatError);
  CHECK_THROWS_AS(corpus_from(record("d1", 0, "A\tB", "(S (X A) (X B))", {{0, 2}, {1, 2}})),
                  FormatError);
}

TEST_CASE("token/tree mismatch names the doc and sentence") {
  try {
    corpus_from(record("mydoc", 0, "A\tB\tC", "(S (X A) (X B))"));
    FAIL("expected FormatError");
  } catch (const FormatError& e) {
    const std::string msg = e.what();
    CHECK(msg.find("mydoc") != std::string::npos);
    CHECK(msg.find("sentence 0") != std::string::npos);
  }
}

TEST_CASE("structural record errors") {
  CHECK_THROWS_AS(corpus_from("DOC a\nA\n(S (X A))\n\n"), FormatError);       // bad header
  CHECK_THROWS_AS(corpus_from("DOC a SENT 0\nA\n"), FormatError);             // truncated
  CHECK_THROWS_AS(corpus_from(record("a", 1, "A", "(S (X A))")), FormatError);  // SENT gap
  CHECK_THROWS_AS(corpus_from(record("a", 0, "A", "(S (X A))") + record("b", 0, "B", "(S (X B))") +
                              record("a", 1, "A", "(S (X A))")),
                  FormatError);  // non-contiguous doc
  CHECK_THROWS_AS(corpus_from("DOC a SENT 0\nA\n(S (X A))\nJUNK\n\n"), FormatError);
  CHECK_THROWS_AS(load_corpus("/nonexistent/corpus.txt"), LoadError);
}

TEST_CASE("trailing fields on CONN lines are tolerated") {
  const auto docs = corpus_from("DOC a SENT 0\nA\tet\tB\n(S (X A) (C et) (X B))\nCONN 1 2 0.997\n\n");
  REQUIRE(docs.size() == 1);
  CHECK(docs[0].sentences[0].gold_spans == std::vector<Span>{{1, 2}});
}

TEST_CASE("fixture corpus: document and sentence counts match a hand count") {
  const auto docs = load_corpus(std::string(kDataDir) + "/tiny.corpus");
  REQUIRE(docs.size() == 3);
  long sentences = 0;
  for (const auto& d : docs) sentences += static_cast<long>(d.sentences.size());
  CHECK(sentences == 6);
}

TEST_CASE("build_instances: positive and negative cases") {
  const Lexicon lex = lex_from("et\n");
  SECTION("gold span on the match makes it DISCOURSE") {
    const auto docs = corpus_from(record("d", 0, "A\tet\tB", "(S (X A) (C et) (X B))", {{1, 2}}));
    const auto instances = build_instances(docs, lex);
    REQUIRE(instances.size() == 1);
    CHECK(instances[0].label == Label::Discourse);
    CHECK(instances[0].connective == "et");
    CHECK_FALSE(instances[0].gold_only);
  }
  SECTION("no gold span makes it NON_DISCOURSE") {
    const auto docs = corpus_from(record("d", 0, "A\tet\tB", "(S (X A) (C et) (X B))"));
    const auto instances = build_instances(docs, lex);
    REQUIRE(instances.size() == 1);
    CHECK(instances[0].label == Label::NonDiscourse);
  }
}

TEST_CASE("gold spans missed by the matcher become gold_only instances") {
  const Lexicon lex = lex_from("et\n");
  const auto docs =
      corpus_from(record("d", 0, "or\tA\tet\tB", "(S (C or) (X A) (C et) (X B))", {{0, 1}, {2, 3}}));
  const auto instances = build_instances(docs, lex);
  REQUIRE(instances.size() == 2);
  CHECK(instances[0].connective == "or");
  CHECK(instances[0].label == Label::Discourse);
  CHECK(instances[0].gold_only);
  CHECK(instances[1].connective == "et");
  CHECK_FALSE(instances[1].gold_only);
}

TEST_CASE("candidates only partially overlapping a gold span stay negative") {
  const Lexicon lex = lex_from("alors\n");
  // gold is [0,2) ("alors que" as one unit) but the lexicon only finds "alors"
  const auto docs = corpus_from(
      record("d", 0, "alors\tque\tB", "(S (C alors) (C que) (X B))", {{0, 2}}));
  const auto instances = build_instances(docs, lex);
  REQUIRE(instances.size() == 2);
  CHECK(instances[0].start == 0);
  CHECK(instances[0].end == 1);
  CHECK(instances[0].label == Label::NonDiscourse);  // exact-span match required
  CHECK(instances[1].start == 0);
  CHECK(instances[1].end == 2);
  CHECK(instances[1].label == Label::Discourse);
  CHECK(instances[1].gold_only);
}

TEST_CASE("20-sentence corpus matches hand-labeled counts and is deterministic") {
  const Lexicon lex = lex_from("et\ndonc\n");
  std::string text;
  // ten sentences with a gold "et", five with plain "et", five with "donc"
  for (int i = 0; i < 10; ++i)
    text += record("d" + std::to_string(i / 5), i % 5, "A\tet\tB", "(S (X A) (C et) (X B))", {{1, 2}});
  for (int i = 0; i < 5; ++i)
    text += record("d2", i, "A\tet\tB", "(S (X A) (C et) (X B))");
  for (int i = 0; i < 5; ++i)
    text += record("d3", i, "donc\tA", "(S (C donc) (X A))");
  const auto docs = corpus_from(text);
  const auto instances = build_instances(docs, lex);
  REQUIRE(instances.size() == 20);
  long pos = 0, neg = 0;
  for (const auto& inst : instances) (inst.label == Label::Discourse ? pos : neg) += 1;
  CHECK(pos == 10);
  CHECK(neg == 10);

  // every gold span appears exactly once as a DISCOURSE instance
  long gold_total = 0;
  for (const auto& d : docs)
    for (const auto& s : d.sentences) gold_total += static_cast<long>(s.gold_spans.size());
  CHECK(gold_total == pos);

  const auto again = build_instances(docs, lex);
  REQUIRE(again.size() == instances.size());
  for (std::size_t i = 0; i < instances.size(); ++i) {
    CHECK(again[i].doc_id == instances[i].doc_id);
    CHECK(again[i].sentence_index == instances[i].sentence_index);
    CHECK(again[i].start == instances[i].start);
    CHECK(again[i].label == instances[i].label);
  }
}

TEST_CASE("instance order is (doc, sentence, start)") {
  const Lexicon lex = lex_from("et\ndonc\n");
  const auto docs = corpus_from(
      record("a", 0, "donc\tA\tet\tB", "(S (C donc) (X A) (C et) (X B))") +
      record("b", 0, "et\tA", "(S (C et) (X A))"));
  const auto instances = build_instances(docs, lex);
  REQUIRE(instances.size() == 3);
  CHECK(instances[0].doc_id == "a");
  CHECK(instances[0].start == 0);
  CHECK(instances[1].doc_id == "a");
  CHECK(instances[1].start == 2);
  CHECK(instances[2].doc_id == "b");
}

TEST_CASE("corpus directory loading walks files in name order") {
  namespace fs = std::filesystem;
  const fs::path dir = fs::temp_directory_path() / "conndis_corpus_dir_test";
  fs::create_directories(dir);
  {
    std::ofstream f1(dir / "02.txt");
    f1 << record("z", 0, "A", "(S (X A))");
    std::ofstream f2(dir / "01.txt");
    f2 << record("y", 0, "B", "(S (X B))");
  }
  const auto docs = load_corpus(dir);
  REQUIRE(docs.size() == 2);
  CHECK(docs[0].doc_id == "y");
  CHECK(docs[1].doc_id == "z");
  fs::remove_all(dir);
}

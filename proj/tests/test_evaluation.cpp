#include <catch2/catch_amalgamated.hpp>

#include <map>
#include <random>
#include <set>
#include <sstream>

#include "conndis/corpus.hpp"
#include "conndis/evaluation.hpp"
#include "support/synthetic.hpp"

using namespace conndis;

namespace {

FeatureVector fv(const std::string& conn, const std::string& sc = "ADV") {
  FeatureVector v;
  v.conn = conn;
  v.self_cat = sc;
  v.self_cat_parent = "S";
  v.self_cat_left_sibling = "VN";
  v.self_cat_right_sibling = "PP";
  return v;
}

Instance make_instance(const std::string& conn, Label label) {
  Instance inst;
  inst.connective = conn;
  inst.label = label;
  return inst;
}

struct Pipeline {
  std::vector<Document> corpus;
  std::vector<Instance> instances;
  std::vector<FeatureVector> vectors;
  std::vector<Label> labels;
  std::vector<std::string> conns;
};

Pipeline pipeline_from(const conndis_test::SyntheticCorpus& sc) {
  Pipeline p;
  std::istringstream corpus_in(sc.corpus_text);
  p.corpus = read_corpus(corpus_in);
  std::istringstream lex_in(sc.lexicon_text);
  const Lexicon lex = read_lexicon(lex_in);
  p.instances = build_instances(p.corpus, lex);
  p.vectors = extract_all(p.corpus, p.instances);
  for (const Instance& inst : p.instances) {
    p.labels.push_back(inst.label);
    p.conns.push_back(inst.connective);
  }
  return p;
}

}  // namespace

TEST_CASE("metrics: all predictions correct") {
  const std::vector<Label> gold{Label::Discourse, Label::NonDiscourse, Label::Discourse};
  const Metrics m = metrics(gold, gold);
  CHECK(m.precision() == 1.0);
  CHECK(m.recall() == 1.0);
  CHECK(m.f_measure() == 1.0);
  CHECK(m.accuracy() == 1.0);
}

TEST_CASE("metrics: definitional fixture tp=3 fp=1 fn=2 tn=4") {
  std::vector<Label> pred, gold;
  auto push = [&](int n, Label p, Label g) {
    for (int i = 0; i < n; ++i) {
      pred.push_back(p);
      gold.push_back(g);
    }
  };
  push(3, Label::Discourse, Label::Discourse);
  push(1, Label::Discourse, Label::NonDiscourse);
  push(2, Label::NonDiscourse, Label::Discourse);
  push(4, Label::NonDiscourse, Label::NonDiscourse);
  const Metrics m = metrics(pred, gold);
  CHECK(m.tp == 3);
  CHECK(m.fp == 1);
  CHECK(m.fn == 2);
  CHECK(m.tn == 4);
  CHECK(m.precision() == Catch::Approx(0.75));
  CHECK(m.recall() == Catch::Approx(0.6));
  CHECK(m.f_measure() == Catch::Approx(0.666666667).margin(1e-4));
  CHECK(m.accuracy() == Catch::Approx(0.7));
}

TEST_CASE("metrics: degenerate denominators and argument errors") {
  const Metrics none = metrics({Label::NonDiscourse}, {Label::NonDiscourse});
  CHECK(none.precision() == 0.0);
  CHECK(none.recall() == 0.0);
  CHECK(none.f_measure() == 0.0);
  CHECK(none.accuracy() == 1.0);
  CHECK_THROWS_AS(metrics({}, {}), ArgumentError);
  CHECK_THROWS_AS(metrics({Label::Discourse}, {}), ArgumentError);
}

TEST_CASE("binary entropy fixtures") {
  CHECK(binary_entropy(0.5) == 1.0);
  CHECK(binary_entropy(0.0) == 0.0);
  CHECK(binary_entropy(1.0) == 0.0);
  CHECK(binary_entropy(0.25) == Catch::Approx(0.811278124).margin(1e-6));
}

TEST_CASE("connective entropy per connective and weighted average") {
  std::vector<Instance> instances;
  for (int i = 0; i < 5; ++i) instances.push_back(make_instance("alors", Label::Discourse));
  for (int i = 0; i < 5; ++i) instances.push_back(make_instance("alors", Label::NonDiscourse));
  for (int i = 0; i < 12; ++i) instances.push_back(make_instance("toutefois", Label::Discourse));
  const EntropyReport er = connective_entropy(instances);
  REQUIRE(er.per_connective.size() == 2);
  CHECK(er.per_connective[0].conn == "alors");
  CHECK(er.per_connective[0].entropy == 1.0);
  CHECK(er.per_connective[0].frequency == 10);
  CHECK(er.per_connective[1].conn == "toutefois");
  CHECK(er.per_connective[1].entropy == 0.0);
  // weighted: (10*1.0 + 12*0.0) / 22
  CHECK(er.weighted_average == Catch::Approx(10.0 / 22.0).margin(1e-12));
  CHECK_THROWS_AS(connective_entropy({}), ArgumentError);
}

TEST_CASE("weighted average entropy is invariant under duplicating the multiset") {
  std::mt19937_64 rng(3);
  std::vector<Instance> instances;
  const std::vector<std::string> conns{"a", "b", "c"};
  for (int i = 0; i < 60; ++i)
    instances.push_back(make_instance(conns[rng() % 3],
                                      rng() % 3 == 0 ? Label::Discourse : Label::NonDiscourse));
  const EntropyReport once = connective_entropy(instances);
  std::vector<Instance> doubled = instances;
  doubled.insert(doubled.end(), instances.begin(), instances.end());
  const EntropyReport twice = connective_entropy(doubled);
  CHECK(once.weighted_average == Catch::Approx(twice.weighted_average).margin(1e-12));
}

TEST_CASE("frequency distribution buckets") {
  std::vector<Instance> instances;
  instances.push_back(make_instance("x", Label::Discourse));  // f=1
  for (int i = 0; i < 5; ++i) instances.push_back(make_instance("y", Label::Discourse));
  for (int i = 0; i < 50; ++i) instances.push_back(make_instance("z", Label::Discourse));
  instances.push_back(make_instance("neg-only", Label::NonDiscourse));  // not a discourse type
  const FrequencyDistribution dist = frequency_distribution(instances);
  CHECK(dist.total_types == 3);
  REQUIRE(dist.buckets.size() == 3);
  for (const auto& b : dist.buckets) {
    CHECK(b.types == 1);
    CHECK(b.percentage == Catch::Approx(100.0 / 3.0).margin(1e-9));
  }
}

TEST_CASE("frequency distribution equals a brute-force recount") {
  std::mt19937_64 rng(17);
  const std::vector<std::string> conns{"a", "b", "c", "d", "e", "f", "g"};
  std::vector<Instance> instances;
  for (int i = 0; i < 400; ++i)
    instances.push_back(make_instance(conns[rng() % conns.size()],
                                      rng() % 4 == 0 ? Label::Discourse : Label::NonDiscourse));
  const FrequencyDistribution dist = frequency_distribution(instances);

  std::map<std::string, long> freq;
  for (const auto& inst : instances)
    if (inst.label == Label::Discourse) ++freq[inst.connective];
  long f1 = 0, mid = 0, high = 0;
  for (const auto& [c, f] : freq) (f == 1 ? f1 : f < 10 ? mid : high) += 1;
  CHECK(dist.buckets[0].types == f1);
  CHECK(dist.buckets[1].types == mid);
  CHECK(dist.buckets[2].types == high);
  CHECK(dist.total_types == f1 + mid + high);
  double pct_sum = 0.0;
  for (const auto& b : dist.buckets) pct_sum += b.percentage;
  CHECK(pct_sum == Catch::Approx(100.0).margin(0.5));
}

TEST_CASE("information gain: constant, perfect, and hand-computed features") {
  std::vector<FeatureVector> vectors;
  std::vector<Label> labels;
  // 4 positives, 4 negatives; self_cat mirrors the label exactly; conn is the
  // {(a: 3 pos / 1 neg), (b: 1 pos / 3 neg)} contingency table
  const char* conn_of[8] = {"a", "a", "a", "b", "a", "b", "b", "b"};
  for (int i = 0; i < 8; ++i) {
    const bool positive = i < 4;
    FeatureVector v = fv(conn_of[i], positive ? "POS_CAT" : "NEG_CAT");
    v.self_cat_parent = "S";  // constant feature
    vectors.push_back(v);
    labels.push_back(positive ? Label::Discourse : Label::NonDiscourse);
  }
  CHECK(information_gain(vectors, labels, Feature::SelfCatParent) == 0.0);
  CHECK(information_gain(vectors, labels, Feature::SelfCat) ==
        Catch::Approx(binary_entropy(0.5)).margin(1e-9));
  CHECK(information_gain(vectors, labels, Feature::Conn) ==
        Catch::Approx(0.188721876).margin(1e-6));
}

TEST_CASE("information gain is bounded by the label entropy") {
  std::mt19937_64 rng(29);
  for (int round = 0; round < 20; ++round) {
    std::vector<FeatureVector> vectors;
    std::vector<Label> labels;
    const std::vector<std::string> conns{"a", "b", "c"};
    for (int i = 0; i < 50; ++i) {
      vectors.push_back(fv(conns[rng() % 3], conns[rng() % 3]));
      labels.push_back(rng() % 3 == 0 ? Label::Discourse : Label::NonDiscourse);
    }
    const long pos = std::count(labels.begin(), labels.end(), Label::Discourse);
    const double h = binary_entropy(double(pos) / double(labels.size()));
    for (Feature f : kAllFeatures) {
      const double ig = information_gain(vectors, labels, f);
      CHECK(ig >= 0.0);
      CHECK(ig <= h + 1e-12);
    }
  }
}

TEST_CASE("fold sizes follow the near-equal split rule") {
  const auto fold_of = make_folds(23, 10, 42);
  std::map<int, int> sizes;
  for (int f : fold_of) ++sizes[f];
  REQUIRE(sizes.size() == 10);
  std::vector<int> counts;
  for (const auto& [f, c] : sizes) counts.push_back(c);
  std::sort(counts.rbegin(), counts.rend());
  CHECK(counts == std::vector<int>{3, 3, 3, 2, 2, 2, 2, 2, 2, 2});
  CHECK_THROWS_AS(make_folds(10, 1, 42), ArgumentError);
  CHECK_THROWS_AS(make_folds(5, 10, 42), ArgumentError);
  CHECK(make_folds(23, 10, 42) == fold_of);  // deterministic
  CHECK(make_folds(23, 10, 43) != fold_of);
}

TEST_CASE("stratified folds spread both classes") {
  std::vector<Label> labels;
  for (int i = 0; i < 20; ++i) labels.push_back(i < 5 ? Label::Discourse : Label::NonDiscourse);
  const auto fold_of = make_folds(20, 5, 7, true, &labels);
  std::map<int, int> pos_per_fold;
  for (int i = 0; i < 20; ++i)
    if (labels[i] == Label::Discourse) ++pos_per_fold[fold_of[i]];
  for (const auto& [f, c] : pos_per_fold) CHECK(c == 1);
  CHECK(pos_per_fold.size() == 5);
}

TEST_CASE("paired t-test: identical, constant-shift, and DERIVED fixtures") {
  const std::vector<double> a{.9, .92, .88, .91, .9, .93, .89, .9, .91, .9};
  SECTION("identical samples") {
    const TTestResult r = paired_t_test(a, a);
    CHECK(r.t_statistic == 0.0);
    CHECK_FALSE(r.significant_at_05);
    CHECK(r.degenerate);
    CHECK(r.degrees_of_freedom == 9);
  }
  SECTION("constant nonzero difference is degenerate but significant") {
    std::vector<double> b;
    for (double x : a) b.push_back(x - 0.05);
    const TTestResult r = paired_t_test(a, b);
    CHECK(r.degenerate);
    CHECK(r.significant_at_05);
  }
  SECTION("frozen external-oracle fixture") {
    const std::vector<double> d{.02, .01, .03, .02, .02, .01, .02, .03, .01, .02};
    std::vector<double> b;
    for (std::size_t i = 0; i < a.size(); ++i) b.push_back(a[i] - d[i]);
    const TTestResult r = paired_t_test(a, b);
    CHECK(r.t_statistic == Catch::Approx(8.142857142857).margin(1e-6));
    CHECK(r.degrees_of_freedom == 9);
    CHECK(r.significant_at_05);
    CHECK_FALSE(r.degenerate);
    const TTestResult rev = paired_t_test(b, a);
    CHECK(rev.t_statistic == Catch::Approx(-8.142857142857).margin(1e-6));
  }
  SECTION("argument errors") {
    CHECK_THROWS_AS(paired_t_test({1.0}, {1.0}), ArgumentError);
    CHECK_THROWS_AS(paired_t_test({1.0, 2.0}, {1.0}), ArgumentError);
  }
}

TEST_CASE("cross-validation: leave-one-out on a separable fixture is perfect") {
  std::vector<FeatureVector> vectors;
  std::vector<Label> labels;
  std::vector<std::string> conns;
  for (int i = 0; i < 5; ++i) {
    vectors.push_back(fv("alpha"));
    labels.push_back(Label::Discourse);
    conns.push_back("alpha");
    vectors.push_back(fv("beta"));
    labels.push_back(Label::NonDiscourse);
    conns.push_back("beta");
  }
  CvOptions options;
  options.k = 10;  // n == k: leave-one-out
  const EvalReport report = cross_validate(vectors, labels, conns, TrainConfig{}, options);
  CHECK(report.pooled.accuracy() == 1.0);
  CHECK(report.pooled.total() == 10);
}

TEST_CASE("cross-validation is deterministic and jobs-independent") {
  const auto sc = conndis_test::make_synthetic_corpus(5, 60);
  Pipeline p = pipeline_from(sc);
  CvOptions options;
  options.k = 5;
  TrainConfig config;
  config.max_iterations = 200;
  const EvalReport r1 = cross_validate(p.vectors, p.labels, p.conns, config, options);
  const EvalReport r2 = cross_validate(p.vectors, p.labels, p.conns, config, options);
  CvOptions serial = options;
  serial.jobs = 1;
  const EvalReport r3 = cross_validate(p.vectors, p.labels, p.conns, config, serial);
  REQUIRE(r1.records.size() == r2.records.size());
  for (std::size_t i = 0; i < r1.records.size(); ++i) {
    CHECK(r1.records[i].predicted == r2.records[i].predicted);
    CHECK(r1.records[i].probability == r2.records[i].probability);
    CHECK(r1.records[i].fold == r2.records[i].fold);
    CHECK(r1.records[i].predicted == r3.records[i].predicted);
    CHECK(r1.records[i].probability == r3.records[i].probability);
    CHECK(r1.records[i].baseline == r3.records[i].baseline);
  }
}

TEST_CASE("pooled counts are the exact sum over folds and accuracies agree") {
  const auto sc = conndis_test::make_synthetic_corpus(11, 80);
  Pipeline p = pipeline_from(sc);
  CvOptions options;
  options.k = 7;
  TrainConfig config;
  config.max_iterations = 150;
  const EvalReport r = cross_validate(p.vectors, p.labels, p.conns, config, options);
  Metrics sum;
  double weighted = 0.0;
  long total = 0;
  for (const Metrics& m : r.fold_metrics) {
    sum += m;
    weighted += m.accuracy() * double(m.total());
    total += m.total();
  }
  CHECK(sum.tp == r.pooled.tp);
  CHECK(sum.fp == r.pooled.fp);
  CHECK(sum.fn == r.pooled.fn);
  CHECK(sum.tn == r.pooled.tn);
  CHECK(r.pooled.accuracy() == Catch::Approx(weighted / double(total)).margin(1e-12));
}

TEST_CASE("single-class training folds surface the fold id") {
  std::vector<FeatureVector> vectors{fv("a"), fv("b")};
  std::vector<Label> labels{Label::Discourse, Label::NonDiscourse};
  std::vector<std::string> conns{"a", "b"};
  CvOptions options;
  options.k = 2;
  try {
    cross_validate(vectors, labels, conns, TrainConfig{}, options);
    FAIL("expected TrainError");
  } catch (const TrainError& e) {
    CHECK(std::string(e.what()).find("fold") != std::string::npos);
  }
}

TEST_CASE("ablation: conn-only-informative data shows no significant gains past row 1") {
  const auto sc = conndis_test::make_synthetic_corpus(21, 120, conndis_test::LabelRule::ConnDriven);
  Pipeline p = pipeline_from(sc);
  CvOptions options;
  options.k = 10;
  TrainConfig config;
  config.max_iterations = 300;
  const std::vector<Feature> order{Feature::Conn, Feature::SelfCat, Feature::SelfCatParent,
                                   Feature::SelfCatLeftSibling, Feature::SelfCatRightSibling,
                                   Feature::Pos};
  const auto rows = ablation(p.vectors, p.labels, p.conns, order, config, options);
  REQUIRE(rows.size() == 6);
  CHECK_FALSE(rows[0].vs_previous.has_value());
  for (std::size_t i = 1; i < rows.size(); ++i) {
    REQUIRE(rows[i].vs_previous.has_value());
    const bool significant_gain =
        rows[i].vs_previous->significant_at_05 && rows[i].vs_previous->t_statistic > 0;
    CHECK_FALSE(significant_gain);
  }
  CHECK_THROWS_AS(ablation(p.vectors, p.labels, p.conns, {}, config, options), ArgumentError);
}

TEST_CASE("ablation row 1 equals the baseline when labels are conn-determined and L2 is 0") {
  const auto sc = conndis_test::make_synthetic_corpus(33, 100, conndis_test::LabelRule::ConnDriven);
  Pipeline p = pipeline_from(sc);
  CvOptions options;
  options.k = 5;
  TrainConfig config;
  config.l2_strength = 0.0;
  config.max_iterations = 3000;
  const auto rows = ablation(p.vectors, p.labels, p.conns, {Feature::Conn}, config, options);
  const EvalReport cv = cross_validate(p.vectors, p.labels, p.conns, config, options);
  CHECK(rows[0].pooled_accuracy == Catch::Approx(cv.baseline_pooled.accuracy()).margin(1e-12));
}

TEST_CASE("per-connective report: accuracies, significance, and filtering") {
  EvalReport report;
  auto add = [&](const std::string& conn, int fold, Label gold, Label pred, Label base) {
    PredictionRecord rec;
    rec.conn = conn;
    rec.fold = fold;
    rec.gold = gold;
    rec.predicted = pred;
    rec.baseline = base;
    report.records.push_back(rec);
  };
  // 'strong': classifier always right, baseline always wrong, 5 folds
  for (int f = 0; f < 5; ++f)
    for (int i = 0; i < 4; ++i)
      add("strong", f, Label::Discourse, Label::Discourse, Label::NonDiscourse);
  // 'rare': single fold only
  add("rare", 2, Label::Discourse, Label::Discourse, Label::NonDiscourse);
  add("rare", 2, Label::Discourse, Label::NonDiscourse, Label::NonDiscourse);
  // 'weak': identical accuracies
  for (int f = 0; f < 4; ++f) {
    add("weak", f, Label::Discourse, Label::Discourse, Label::Discourse);
    add("weak", f, Label::NonDiscourse, Label::Discourse, Label::Discourse);
  }

  const auto rows = per_connective_report(report, 1);
  REQUIRE(rows.size() == 3);
  CHECK(rows[0].conn == "strong");
  CHECK(rows[0].frequency == 20);
  CHECK(rows[0].classifier_accuracy == 1.0);
  CHECK(rows[0].baseline_accuracy == 0.0);
  CHECK(rows[0].diff == 1.0);
  CHECK(rows[0].significance == SignificanceMark::Significant);  // constant diff, degenerate
  CHECK(rows[0].entropy == 0.0);

  const auto rare = std::find_if(rows.begin(), rows.end(),
                                 [](const auto& r) { return r.conn == "rare"; });
  REQUIRE(rare != rows.end());
  CHECK(rare->significance == SignificanceMark::NotAssessable);

  const auto weak = std::find_if(rows.begin(), rows.end(),
                                 [](const auto& r) { return r.conn == "weak"; });
  REQUIRE(weak != rows.end());
  CHECK(weak->diff == 0.0);
  CHECK(weak->significance == SignificanceMark::NotSignificant);
  CHECK(weak->entropy == 1.0);

  // min_freq filter drops 'rare'
  const auto filtered = per_connective_report(report, 3);
  CHECK(filtered.size() == 2);
}

TEST_CASE("feature ranking by information gain is descending") {
  const auto sc = conndis_test::make_synthetic_corpus(9, 90);
  Pipeline p = pipeline_from(sc);
  const auto ranked = rank_features_by_gain(p.vectors, p.labels);
  REQUIRE(ranked.size() == kFeatureCount);
  for (std::size_t i = 1; i < ranked.size(); ++i) CHECK(ranked[i - 1].second >= ranked[i].second);
}

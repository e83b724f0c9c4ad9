#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <map>
#include <random>
#include <set>
#include <sstream>

#include "conndis/classifier.hpp"
#include "support/oracles.hpp"

using namespace conndis;

namespace {

FeatureVector fv(const std::string& conn, bool at_beginning = false, const std::string& sc = "ADV",
                 const std::string& par = "S", const std::string& ls = "VN",
                 const std::string& rs = "PP") {
  FeatureVector v;
  v.conn = conn;
  v.at_beginning = at_beginning;
  v.self_cat = sc;
  v.self_cat_parent = par;
  v.self_cat_left_sibling = ls;
  v.self_cat_right_sibling = rs;
  return v;
}

struct RandomDataset {
  std::vector<FeatureVector> vectors;
  std::vector<Label> labels;
};

FeatureVector random_vector(std::mt19937_64& rng) {
  const std::vector<std::string> conns{"alpha", "beta", "gamma", "delta"};
  const std::vector<std::string> cats{"ADV", "C", "CS"};
  const std::vector<std::string> pars{"S", "NP"};
  const std::vector<std::string> sibs{"VN", "PP", "NONE"};
  return fv(conns[rng() % conns.size()], rng() % 2 == 0, cats[rng() % cats.size()],
            pars[rng() % pars.size()], sibs[rng() % sibs.size()], sibs[rng() % sibs.size()]);
}

RandomDataset random_dataset(std::mt19937_64& rng, int n) {
  RandomDataset d;
  for (;;) {
    d.vectors.clear();
    d.labels.clear();
    for (int i = 0; i < n; ++i) {
      d.vectors.push_back(random_vector(rng));
      d.labels.push_back(rng() % 2 == 0 ? Label::Discourse : Label::NonDiscourse);
    }
    const long pos = std::count(d.labels.begin(), d.labels.end(), Label::Discourse);
    if (pos >= 5 && pos <= n - 5) return d;
  }
}

}  // namespace

TEST_CASE("encode: one vector activates exactly six feature columns") {
  const EncodedDataset ds = encode_dataset({fv("et")});
  CHECK(ds.encoder.vocabulary_size() == 6);
  CHECK(ds.encoder.column_count() == 7);  // + intercept
  REQUIRE(ds.rows.size() == 1);
  CHECK(ds.rows[0].size() == 7);
}

TEST_CASE("encode: two vectors differing only in conn give vocabulary 7") {
  const EncodedDataset ds = encode_dataset({fv("et"), fv("mais")});
  CHECK(ds.encoder.vocabulary_size() == 7);  // 5 shared values + 2 conn values
}

TEST_CASE("encode: empty input is an argument error") {
  CHECK_THROWS_AS(encode_dataset({}), ArgumentError);
}

TEST_CASE("encode: vocabulary equals brute-force distinct (feature, value) count") {
  std::mt19937_64 rng(11);
  for (int round = 0; round < 50; ++round) {
    const RandomDataset d = random_dataset(rng, 25);
    const EncodedDataset ds = encode_dataset(d.vectors);
    std::set<std::pair<int, std::string>> pairs;
    for (const FeatureVector& v : d.vectors)
      for (Feature f : kAllFeatures) pairs.insert({static_cast<int>(f), v.value_of(f)});
    CHECK(ds.encoder.vocabulary_size() == static_cast<int>(pairs.size()));
  }
}

TEST_CASE("unseen values at predict time map to the zero block") {
  const EncodedDataset ds = encode_dataset({fv("et"), fv("mais")});
  const std::vector<int> cols = ds.encoder.encode(fv("jamais-vu", true, "X", "Y", "Z", "W"));
  REQUIRE(cols.size() == 1);  // only the intercept column fires
  CHECK(cols[0] == ds.encoder.intercept_column());
}

TEST_CASE("training on conn-separable data reaches accuracy 1.0 with zero L2") {
  std::vector<FeatureVector> x;
  std::vector<Label> y;
  for (int i = 0; i < 5; ++i) {
    x.push_back(fv("alpha"));
    y.push_back(Label::Discourse);
    x.push_back(fv("beta"));
    y.push_back(Label::NonDiscourse);
  }
  TrainConfig config;
  config.l2_strength = 0.0;
  const MaxEntModel model = train_maxent(x, y, config);
  for (std::size_t i = 0; i < x.size(); ++i) CHECK(model.predict(x[i]).first == y[i]);

  const auto [label, prob] = model.predict(fv("alpha"));
  CHECK(label == Label::Discourse);
  CHECK(prob > 0.9);
}

TEST_CASE("identical features with balanced labels predict 0.5") {
  std::vector<FeatureVector> x(10, fv("et"));
  std::vector<Label> y;
  for (int i = 0; i < 5; ++i) y.push_back(Label::Discourse);
  for (int i = 0; i < 5; ++i) y.push_back(Label::NonDiscourse);
  const MaxEntModel model = train_maxent(x, y, TrainConfig{});
  const auto p = model.probabilities(fv("et"));
  CHECK(p[0] == Catch::Approx(0.5).margin(1e-6));
  CHECK(p[1] == Catch::Approx(0.5).margin(1e-6));
  CHECK(model.predict(fv("et")).first == Label::Discourse);  // tie rule
}

TEST_CASE("all-unseen input on a symmetric model predicts 0.5 and DISCOURSE") {
  std::vector<FeatureVector> x(6, fv("et"));
  std::vector<Label> y{Label::Discourse, Label::NonDiscourse, Label::Discourse,
                       Label::NonDiscourse, Label::Discourse, Label::NonDiscourse};
  const MaxEntModel model = train_maxent(x, y, TrainConfig{});
  const auto [label, prob] = model.predict(fv("inconnu", true, "X", "Y", "Z", "W"));
  CHECK(label == Label::Discourse);
  CHECK(prob == Catch::Approx(0.5).margin(1e-6));
}

TEST_CASE("single-class training data is a training error") {
  std::vector<FeatureVector> x(4, fv("et"));
  std::vector<Label> y(4, Label::Discourse);
  CHECK_THROWS_AS(train_maxent(x, y, TrainConfig{}), TrainError);
  CHECK_THROWS_AS(train_maxent({}, {}, TrainConfig{}), ArgumentError);
}

TEST_CASE("trained weights match the reference optimizer") {
  std::mt19937_64 rng(77);
  TrainConfig config;
  config.l2_strength = 0.5;
  config.max_iterations = 500000;
  config.tolerance = 1e-9;
  for (int round = 0; round < 10; ++round) {
    const RandomDataset d = random_dataset(rng, 30);
    const MaxEntModel model = train_maxent(d.vectors, d.labels, config);
    const conndis_test::ReferenceMaxent ref =
        conndis_test::reference_train(d.vectors, d.labels, model.encoder(), config.l2_strength);
    REQUIRE(ref.grad_norm <= 1e-8);
    REQUIRE(model.weights().size() == ref.weights.size());
    for (std::size_t j = 0; j < ref.weights.size(); ++j)
      CHECK(model.weights()[j] == Catch::Approx(ref.weights[j]).margin(1e-4));
  }
}

TEST_CASE("predicted probabilities are normalized and match independent softmax") {
  std::mt19937_64 rng(5150);
  const RandomDataset d = random_dataset(rng, 40);
  TrainConfig config;
  config.l2_strength = 0.1;
  const MaxEntModel model = train_maxent(d.vectors, d.labels, config);
  const int columns = model.encoder().column_count();
  for (int round = 0; round < 100; ++round) {
    const FeatureVector probe = random_vector(rng);
    const auto p = model.probabilities(probe);
    CHECK(p[0] + p[1] == Catch::Approx(1.0).margin(1e-9));

    // independent computation straight from the stored weights
    double s0 = 0.0, s1 = 0.0;
    for (const auto& [f, value, col] : model.encoder().entries()) {
      if (probe.value_of(f) == value) {
        s0 += model.weights()[static_cast<std::size_t>(col)];
        s1 += model.weights()[static_cast<std::size_t>(columns + col)];
      }
    }
    s0 += model.weights()[static_cast<std::size_t>(columns - 1)];
    s1 += model.weights()[static_cast<std::size_t>(2 * columns - 1)];
    const double want_p0 = 1.0 / (1.0 + std::exp(s1 - s0));
    CHECK(p[0] == Catch::Approx(want_p0).margin(1e-6));
  }
}

TEST_CASE("analytic gradient matches central finite differences") {
  std::mt19937_64 rng(31337);
  std::uniform_real_distribution<double> unif(-1.0, 1.0);
  for (int round = 0; round < 20; ++round) {
    const RandomDataset d = random_dataset(rng, 12);
    const EncodedDataset ds = encode_dataset(d.vectors);
    const int columns = ds.encoder.column_count();
    std::vector<double> w(static_cast<std::size_t>(2 * columns));
    for (double& v : w) v = unif(rng);
    const double l2 = 0.3;

    std::vector<double> grad;
    maxent_objective_and_gradient(ds.rows, d.labels, columns, w, l2, &grad);

    const double h = 1e-5;
    for (std::size_t j = 0; j < w.size(); ++j) {
      std::vector<double> wp = w, wm = w;
      wp[j] += h;
      wm[j] -= h;
      const double fp = maxent_objective_and_gradient(ds.rows, d.labels, columns, wp, l2, nullptr);
      const double fm = maxent_objective_and_gradient(ds.rows, d.labels, columns, wm, l2, nullptr);
      const double numeric = (fp - fm) / (2.0 * h);
      const double scale = std::abs(grad[j]) + std::abs(numeric);
      if (scale > 1e-6) {
        CHECK(std::abs(grad[j] - numeric) / scale <= 1e-4);
      } else {
        CHECK(std::abs(grad[j] - numeric) <= 1e-8);
      }
    }
  }
}

TEST_CASE("objective is monotone across training (enforced internally)") {
  // train_maxent throws if an accepted step ever lowers the objective; a
  // couple of noisy datasets exercise the backtracking path
  std::mt19937_64 rng(99);
  for (int round = 0; round < 5; ++round) {
    const RandomDataset d = random_dataset(rng, 50);
    TrainConfig config;
    config.l2_strength = 1e-3;
    config.max_iterations = 2000;
    CHECK_NOTHROW(train_maxent(d.vectors, d.labels, config));
  }
}

TEST_CASE("baseline: majority, ties, and unseen connectives") {
  std::vector<std::string> conns{"sinon", "sinon", "sinon", "x", "x", "et"};
  std::vector<Label> labels{Label::Discourse,    Label::Discourse, Label::NonDiscourse,
                            Label::Discourse,    Label::NonDiscourse,
                            Label::NonDiscourse};
  const BaselineModel model = train_baseline(conns, labels);
  CHECK(model.predict("sinon") == Label::Discourse);       // 2 vs 1
  CHECK(model.predict("x") == Label::Discourse);           // 1 vs 1, tie rule
  CHECK(model.predict("et") == Label::NonDiscourse);
  CHECK(model.predict("jamais-vu") == Label::Discourse);   // global 3 vs 3, tie rule
  CHECK_THROWS_AS(train_baseline({}, {}), ArgumentError);
}

TEST_CASE("baseline accuracy equals brute-force majority count on strict-majority data") {
  std::mt19937_64 rng(8);
  const std::vector<std::string> conn_pool{"a", "b", "c", "d"};
  for (int round = 0; round < 30; ++round) {
    std::vector<std::string> conns;
    std::vector<Label> labels;
    for (const std::string& c : conn_pool) {
      const int total = 3 + static_cast<int>(rng() % 5) * 2;  // odd => strict majority
      int pos = 0;
      for (int i = 0; i < total; ++i) {
        const bool is_pos = static_cast<int>(rng() % 2) == 0;
        conns.push_back(c);
        labels.push_back(is_pos ? Label::Discourse : Label::NonDiscourse);
        pos += is_pos ? 1 : 0;
      }
    }
    const BaselineModel model = train_baseline(conns, labels);
    long correct = 0;
    for (std::size_t i = 0; i < conns.size(); ++i)
      if (model.predict(conns[i]) == labels[i]) ++correct;

    // brute force: per conn, count of the more frequent label
    std::map<std::string, std::pair<long, long>> counts;
    for (std::size_t i = 0; i < conns.size(); ++i) {
      if (labels[i] == Label::Discourse)
        ++counts[conns[i]].first;
      else
        ++counts[conns[i]].second;
    }
    long majority_sum = 0;
    for (const auto& [c, pn] : counts) majority_sum += std::max(pn.first, pn.second);
    CHECK(correct == majority_sum);
  }
}

TEST_CASE("model persistence round-trips to identical predictions") {
  std::mt19937_64 rng(2718);
  const RandomDataset d = random_dataset(rng, 30);
  TrainConfig config;
  config.l2_strength = 0.05;
  const MaxEntModel model = train_maxent(d.vectors, d.labels, config);

  std::stringstream buffer;
  model.save(buffer, {"et", "alors que"});
  std::vector<std::string> lexicon_lines;
  const MaxEntModel loaded = MaxEntModel::load(buffer, &lexicon_lines);

  CHECK(lexicon_lines == std::vector<std::string>{"et", "alors que"});
  CHECK(loaded.weights() == model.weights());  // %.17g round-trip is exact
  for (int round = 0; round < 50; ++round) {
    const FeatureVector probe = random_vector(rng);
    const auto a = model.predict(probe);
    const auto b = loaded.predict(probe);
    CHECK(a.first == b.first);
    CHECK(a.second == b.second);
  }
}

TEST_CASE("model file with multi-word feature values survives") {
  std::vector<FeatureVector> x{fv("alors que"), fv("et")};
  std::vector<Label> y{Label::Discourse, Label::NonDiscourse};
  const MaxEntModel model = train_maxent(x, y, TrainConfig{});
  std::stringstream buffer;
  model.save(buffer);
  const MaxEntModel loaded = MaxEntModel::load(buffer);
  CHECK(loaded.predict(fv("alors que")).first == Label::Discourse);
  CHECK(loaded.predict(fv("et")).first == Label::NonDiscourse);
}

TEST_CASE("corrupt model files are format errors") {
  std::stringstream bad1("not a model\n");
  CHECK_THROWS_AS(MaxEntModel::load(bad1), FormatError);
  std::stringstream bad2("conndis-model\t1\nclasses\tDISCOURSE\tNON_DISCOURSE\n");
  CHECK_THROWS_AS(MaxEntModel::load(bad2), FormatError);
}

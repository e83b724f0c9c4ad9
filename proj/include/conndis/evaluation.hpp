// Cross-validation, metrics, entropy statistics, information gain, ablation,
// paired significance tests, per-connective reports.
#pragma once

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <exception>
#include <limits>
#include <map>
#include <mutex>
#include <optional>
#include <random>
#include <string>
#include <thread>
#include <unordered_map>
#include <vector>

#include "conndis/classifier.hpp"
#include "conndis/corpus.hpp"
#include "conndis/errors.hpp"
#include "conndis/features.hpp"

namespace conndis {

// --- metrics ----------------------------------------------------------------

// Confusion counts with DISCOURSE as the positive class.
struct Metrics {
  long tp = 0, fp = 0, fn = 0, tn = 0;

  long total() const { return tp + fp + fn + tn; }
  double precision() const { return tp + fp == 0 ? 0.0 : double(tp) / double(tp + fp); }
  double recall() const { return tp + fn == 0 ? 0.0 : double(tp) / double(tp + fn); }
  double f_measure() const {
    const double p = precision(), r = recall();
    return p + r == 0.0 ? 0.0 : 2.0 * p * r / (p + r);
  }
  double accuracy() const { return total() == 0 ? 0.0 : double(tp + tn) / double(total()); }

  void add(Label predicted, Label gold) {
    if (gold == Label::Discourse)
      predicted == Label::Discourse ? ++tp : ++fn;
    else
      predicted == Label::Discourse ? ++fp : ++tn;
  }

  Metrics& operator+=(const Metrics& o) {
    tp += o.tp;
    fp += o.fp;
    fn += o.fn;
    tn += o.tn;
    return *this;
  }
};

inline Metrics metrics(const std::vector<Label>& predicted, const std::vector<Label>& gold) {
  if (predicted.empty() || predicted.size() != gold.size())
    throw ArgumentError("metrics: label sequences must be non-empty and equal-length");
  Metrics m;
  for (std::size_t i = 0; i < predicted.size(); ++i) m.add(predicted[i], gold[i]);
  return m;
}

// --- entropy and information gain --------------------------------------------

// Binary entropy in bits, with 0*log2(0) == 0.
inline double binary_entropy(double p) {
  double h = 0.0;
  if (p > 0.0) h -= p * std::log2(p);
  if (p < 1.0) h -= (1.0 - p) * std::log2(1.0 - p);
  return h;
}

struct ConnectiveStats {
  std::string conn;
  long frequency = 0;   // all occurrences, positive and negative
  double p = 0.0;       // fraction labeled DISCOURSE
  double entropy = 0.0;
};

struct EntropyReport {
  std::vector<ConnectiveStats> per_connective;  // entropy desc, frequency desc, conn asc
  double weighted_average = 0.0;                // sum f*H / sum f
};

// Per-connective ambiguity over all instances of each connective. The
// min-frequency cut is applied by reporting, not here; pass a nonzero
// `min_freq_for_average` to restrict the weighted average as well.
inline EntropyReport connective_entropy(const std::vector<Instance>& instances,
                                        long min_freq_for_average = 0) {
  if (instances.empty()) throw ArgumentError("connective_entropy: empty instance list");
  std::map<std::string, std::pair<long, long>> counts;  // conn -> (pos, total)
  for (const Instance& inst : instances) {
    auto& c = counts[inst.connective];
    if (inst.label == Label::Discourse) ++c.first;
    ++c.second;
  }
  EntropyReport report;
  double weight_sum = 0.0, avg = 0.0;
  for (const auto& [conn, c] : counts) {
    ConnectiveStats s;
    s.conn = conn;
    s.frequency = c.second;
    s.p = double(c.first) / double(c.second);
    s.entropy = binary_entropy(s.p);
    if (s.frequency >= min_freq_for_average) {
      weight_sum += double(s.frequency);
      avg += double(s.frequency) * s.entropy;
    }
    report.per_connective.push_back(std::move(s));
  }
  report.weighted_average = weight_sum == 0.0 ? 0.0 : avg / weight_sum;
  std::sort(report.per_connective.begin(), report.per_connective.end(),
            [](const ConnectiveStats& a, const ConnectiveStats& b) {
              if (a.entropy != b.entropy) return a.entropy > b.entropy;
              if (a.frequency != b.frequency) return a.frequency > b.frequency;
              return a.conn < b.conn;
            });
  return report;
}

struct FrequencyBucket {
  std::string name;
  long types = 0;
  double percentage = 0.0;  // of all connective types with >= 1 DISCOURSE use
};

struct FrequencyDistribution {
  std::vector<FrequencyBucket> buckets;  // f=1, 1<f<10, f>=10
  long total_types = 0;
};

// Distribution of connective types by their DISCOURSE-labeled frequency.
inline FrequencyDistribution frequency_distribution(const std::vector<Instance>& instances) {
  if (instances.empty()) throw ArgumentError("frequency_distribution: empty instance list");
  std::unordered_map<std::string, long> freq;
  for (const Instance& inst : instances)
    if (inst.label == Label::Discourse) ++freq[inst.connective];
  long f1 = 0, f_mid = 0, f_high = 0;
  for (const auto& [conn, f] : freq) {
    if (f == 1)
      ++f1;
    else if (f < 10)
      ++f_mid;
    else
      ++f_high;
  }
  FrequencyDistribution dist;
  dist.total_types = f1 + f_mid + f_high;
  const double denom = dist.total_types == 0 ? 1.0 : double(dist.total_types);
  dist.buckets = {
      {"f=1", f1, 100.0 * double(f1) / denom},
      {"1<f<10", f_mid, 100.0 * double(f_mid) / denom},
      {"f>=10", f_high, 100.0 * double(f_high) / denom},
  };
  return dist;
}

// IG = H(label) - sum_v P(v) * H(label | v), logs base 2.
inline double information_gain(const std::vector<FeatureVector>& vectors,
                               const std::vector<Label>& labels, Feature feature) {
  if (vectors.empty() || vectors.size() != labels.size())
    throw ArgumentError("information_gain: empty or misaligned inputs");
  long pos = 0;
  std::map<std::string, std::pair<long, long>> by_value;  // value -> (pos, total)
  for (std::size_t i = 0; i < vectors.size(); ++i) {
    auto& c = by_value[vectors[i].value_of(feature)];
    if (labels[i] == Label::Discourse) {
      ++pos;
      ++c.first;
    }
    ++c.second;
  }
  const double n = double(vectors.size());
  double ig = binary_entropy(double(pos) / n);
  for (const auto& [value, c] : by_value)
    ig -= (double(c.second) / n) * binary_entropy(double(c.first) / double(c.second));
  return std::max(ig, 0.0);  // clamp away negative rounding residue
}

// --- paired t-test ------------------------------------------------------------

struct TTestResult {
  double t_statistic = 0.0;
  int degrees_of_freedom = 0;
  bool significant_at_05 = false;
  bool degenerate = false;  // zero-variance differences
};

namespace detail {

// Two-tailed 5% critical values of Student's t for df 1..30; beyond that the
// normal approximation 1.96 is used.
inline double t_critical_05(int df) {
  static constexpr double table[30] = {
      12.7062, 4.3027, 3.1824, 2.7764, 2.5706, 2.4469, 2.3646, 2.3060, 2.2622, 2.2281,
      2.2010,  2.1788, 2.1604, 2.1448, 2.1314, 2.1199, 2.1098, 2.1009, 2.0930, 2.0860,
      2.0796,  2.0739, 2.0687, 2.0639, 2.0595, 2.0555, 2.0518, 2.0484, 2.0452, 2.0423,
  };
  if (df <= 0) return std::numeric_limits<double>::infinity();
  if (df <= 30) return table[df - 1];
  return 1.96;
}

}  // namespace detail

// Paired Student t-test on per-fold values, two-tailed at P < 0.05. Constant
// nonzero differences are degenerate and reported significant; all-zero
// differences are degenerate and not significant.
inline TTestResult paired_t_test(const std::vector<double>& a, const std::vector<double>& b) {
  if (a.size() != b.size() || a.size() < 2)
    throw ArgumentError("paired_t_test: need equal-length samples of size >= 2");
  const std::size_t n = a.size();
  std::vector<double> d(n);
  for (std::size_t i = 0; i < n; ++i) d[i] = a[i] - b[i];
  double mean = 0.0;
  for (double x : d) mean += x;
  mean /= double(n);
  double ss = 0.0;
  for (double x : d) ss += (x - mean) * (x - mean);
  const double sd = std::sqrt(ss / double(n - 1));

  TTestResult r;
  r.degrees_of_freedom = static_cast<int>(n) - 1;
  if (sd == 0.0) {
    r.degenerate = true;
    r.significant_at_05 = mean != 0.0;
    r.t_statistic = mean == 0.0 ? 0.0
                                : std::copysign(std::numeric_limits<double>::infinity(), mean);
    return r;
  }
  r.t_statistic = mean / (sd / std::sqrt(double(n)));
  r.significant_at_05 = std::abs(r.t_statistic) > detail::t_critical_05(r.degrees_of_freedom);
  return r;
}

// --- cross-validation ----------------------------------------------------------

namespace detail {

// Standard-specified generator + explicit draw, so fold assignment is
// bit-identical across platforms.
inline void deterministic_shuffle(std::vector<std::size_t>& v, std::uint64_t seed) {
  std::mt19937_64 gen(seed);
  for (std::size_t i = v.size(); i > 1; --i) {
    const std::size_t j = static_cast<std::size_t>(gen() % i);
    std::swap(v[i - 1], v[j]);
  }
}

template <typename Fn>
void run_parallel(std::size_t count, int jobs, Fn&& fn) {
  const unsigned hw = std::max(1u, std::thread::hardware_concurrency());
  const std::size_t threads =
      std::min<std::size_t>(count, jobs <= 0 ? hw : static_cast<std::size_t>(jobs));
  if (threads <= 1) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  std::vector<std::thread> pool;
  pool.reserve(threads);
  for (std::size_t t = 0; t < threads; ++t) {
    pool.emplace_back([&] {
      for (;;) {
        const std::size_t i = next.fetch_add(1);
        if (i >= count) return;
        try {
          fn(i);
        } catch (...) {
          std::lock_guard<std::mutex> lock(error_mutex);
          if (!error) error = std::current_exception();
        }
      }
    });
  }
  for (std::thread& t : pool) t.join();
  if (error) std::rethrow_exception(error);
}

}  // namespace detail

// Fold id per instance. Instances are shuffled by seed and cut into k
// near-equal contiguous chunks: the first n mod k folds get the extra item.
// With `stratify`, each class is shuffled and dealt separately.
inline std::vector<int> make_folds(std::size_t n, int k, std::uint64_t seed,
                                   bool stratify = false, const std::vector<Label>* labels = nullptr) {
  if (k < 2) throw ArgumentError("fold count must be >= 2");
  if (n < static_cast<std::size_t>(k)) throw ArgumentError("need at least k instances");
  std::vector<int> fold_of(n, -1);
  if (!stratify) {
    std::vector<std::size_t> order(n);
    for (std::size_t i = 0; i < n; ++i) order[i] = i;
    detail::deterministic_shuffle(order, seed);
    const std::size_t base = n / static_cast<std::size_t>(k);
    const std::size_t extra = n % static_cast<std::size_t>(k);
    std::size_t at = 0;
    for (int f = 0; f < k; ++f) {
      const std::size_t size = base + (static_cast<std::size_t>(f) < extra ? 1 : 0);
      for (std::size_t j = 0; j < size; ++j) fold_of[order[at++]] = f;
    }
    return fold_of;
  }
  if (!labels || labels->size() != n)
    throw ArgumentError("stratified folds need labels");
  int next_fold = 0;
  for (Label cls : {Label::Discourse, Label::NonDiscourse}) {
    std::vector<std::size_t> members;
    for (std::size_t i = 0; i < n; ++i)
      if ((*labels)[i] == cls) members.push_back(i);
    detail::deterministic_shuffle(members, seed ^ (cls == Label::Discourse ? 0x9e3779b97f4a7c15ull : 0));
    for (std::size_t i = 0; i < members.size(); ++i) {
      fold_of[members[i]] = next_fold;
      next_fold = (next_fold + 1) % k;
    }
  }
  return fold_of;
}

// One held-out prediction.
struct PredictionRecord {
  int fold = 0;
  std::string conn;
  Label gold = Label::NonDiscourse;
  Label predicted = Label::NonDiscourse;
  double probability = 0.0;       // probability of the predicted class
  Label baseline = Label::NonDiscourse;  // fold-trained most-likely-class baseline
};

struct AblationRow {
  std::vector<Feature> features;
  double pooled_accuracy = 0.0;
  std::vector<double> fold_accuracies;
  std::optional<TTestResult> vs_previous;  // empty for the first row
};

enum class SignificanceMark { Significant, NotSignificant, NotAssessable };

struct PerConnectiveRow {
  std::string conn;
  long frequency = 0;
  double entropy = 0.0;
  double baseline_accuracy = 0.0;
  double classifier_accuracy = 0.0;
  double diff = 0.0;
  SignificanceMark significance = SignificanceMark::NotAssessable;
};

struct CvOptions {
  int k = 10;
  std::uint64_t seed = 42;
  bool stratify = false;
  int jobs = 0;  // <= 0: all hardware threads
  std::vector<Feature> features{kAllFeatures.begin(), kAllFeatures.end()};
};

struct EvalReport {
  int k = 0;
  std::uint64_t seed = 0;
  std::vector<int> fold_of;
  std::vector<PredictionRecord> records;  // aligned with the instance list
  std::vector<Metrics> fold_metrics;
  Metrics pooled;
  std::vector<Metrics> baseline_fold_metrics;
  Metrics baseline_pooled;
  // filled by the dedicated operations below
  std::vector<std::pair<Feature, double>> information_gains;
  std::vector<AblationRow> ablation_rows;
  std::vector<PerConnectiveRow> per_connective;

  std::vector<double> fold_accuracies() const {
    std::vector<double> out;
    out.reserve(fold_metrics.size());
    for (const Metrics& m : fold_metrics) out.push_back(m.accuracy());
    return out;
  }
  std::vector<double> baseline_fold_accuracies() const {
    std::vector<double> out;
    out.reserve(baseline_fold_metrics.size());
    for (const Metrics& m : baseline_fold_metrics) out.push_back(m.accuracy());
    return out;
  }
};

namespace detail {

struct FoldOutcome {
  Metrics classifier;
  Metrics baseline;
};

}  // namespace detail

// k-fold cross-validation: train on k-1 folds, predict the held-out fold.
// A most-likely-class baseline is trained on the same training folds so the
// two prediction streams are strictly comparable. Deterministic given the
// seed; fold training order does not affect the result.
inline EvalReport cross_validate(const std::vector<FeatureVector>& vectors,
                                 const std::vector<Label>& labels,
                                 const std::vector<std::string>& conns, const TrainConfig& config,
                                 const CvOptions& options) {
  const std::size_t n = vectors.size();
  if (n == 0 || labels.size() != n || conns.size() != n)
    throw ArgumentError("cross_validate: misaligned inputs");

  EvalReport report;
  report.k = options.k;
  report.seed = options.seed;
  report.fold_of = make_folds(n, options.k, options.seed, options.stratify, &labels);
  report.records.resize(n);
  report.fold_metrics.resize(static_cast<std::size_t>(options.k));
  report.baseline_fold_metrics.resize(static_cast<std::size_t>(options.k));

  detail::run_parallel(static_cast<std::size_t>(options.k), options.jobs, [&](std::size_t f) {
    std::vector<FeatureVector> train_x;
    std::vector<Label> train_y;
    std::vector<std::string> train_conns;
    for (std::size_t i = 0; i < n; ++i) {
      if (report.fold_of[i] == static_cast<int>(f)) continue;
      train_x.push_back(vectors[i]);
      train_y.push_back(labels[i]);
      train_conns.push_back(conns[i]);
    }
    MaxEntModel model;
    try {
      model = train_maxent(train_x, train_y, config, options.features);
    } catch (const TrainError& e) {
      throw TrainError("fold " + std::to_string(f) + ": " + e.what());
    }
    const BaselineModel baseline = train_baseline(train_conns, train_y);

    Metrics fold_m, fold_b;
    for (std::size_t i = 0; i < n; ++i) {
      if (report.fold_of[i] != static_cast<int>(f)) continue;
      const auto [label, prob] = model.predict(vectors[i]);
      PredictionRecord rec;
      rec.fold = static_cast<int>(f);
      rec.conn = conns[i];
      rec.gold = labels[i];
      rec.predicted = label;
      rec.probability = prob;
      rec.baseline = baseline.predict(conns[i]);
      fold_m.add(rec.predicted, rec.gold);
      fold_b.add(rec.baseline, rec.gold);
      report.records[i] = std::move(rec);
    }
    report.fold_metrics[f] = fold_m;
    report.baseline_fold_metrics[f] = fold_b;
  });

  for (int f = 0; f < options.k; ++f) {
    report.pooled += report.fold_metrics[static_cast<std::size_t>(f)];
    report.baseline_pooled += report.baseline_fold_metrics[static_cast<std::size_t>(f)];
  }
  return report;
}

// Incremental feature ablation: row i trains on the first i features of
// `ordered`, on identical folds, and is t-tested against row i-1.
inline std::vector<AblationRow> ablation(const std::vector<FeatureVector>& vectors,
                                         const std::vector<Label>& labels,
                                         const std::vector<std::string>& conns,
                                         const std::vector<Feature>& ordered,
                                         const TrainConfig& config, const CvOptions& options) {
  if (ordered.empty()) throw ArgumentError("ablation: empty feature order");
  std::vector<AblationRow> rows;
  for (std::size_t i = 1; i <= ordered.size(); ++i) {
    CvOptions row_options = options;
    row_options.features.assign(ordered.begin(), ordered.begin() + static_cast<std::ptrdiff_t>(i));
    const EvalReport r = cross_validate(vectors, labels, conns, config, row_options);
    AblationRow row;
    row.features = row_options.features;
    row.pooled_accuracy = r.pooled.accuracy();
    row.fold_accuracies = r.fold_accuracies();
    if (!rows.empty())
      row.vs_previous = paired_t_test(row.fold_accuracies, rows.back().fold_accuracies);
    rows.push_back(std::move(row));
  }
  return rows;
}

// Per-connective accuracies from pooled CV predictions, against the
// fold-trained baseline. Significance is a paired t-test over per-fold
// per-connective accuracies; folds without the connective are skipped and
// fewer than two usable folds means not assessable.
inline std::vector<PerConnectiveRow> per_connective_report(const EvalReport& report,
                                                           long min_freq = 20) {
  std::map<std::string, std::vector<const PredictionRecord*>> by_conn;
  for (const PredictionRecord& rec : report.records) by_conn[rec.conn].push_back(&rec);

  std::vector<PerConnectiveRow> rows;
  for (const auto& [conn, recs] : by_conn) {
    if (static_cast<long>(recs.size()) < min_freq) continue;
    PerConnectiveRow row;
    row.conn = conn;
    row.frequency = static_cast<long>(recs.size());
    long pos = 0, correct = 0, baseline_correct = 0;
    std::map<int, std::pair<std::pair<long, long>, long>> per_fold;  // fold -> ((ok, baseline_ok), n)
    for (const PredictionRecord* r : recs) {
      if (r->gold == Label::Discourse) ++pos;
      if (r->predicted == r->gold) ++correct;
      if (r->baseline == r->gold) ++baseline_correct;
      auto& slot = per_fold[r->fold];
      if (r->predicted == r->gold) ++slot.first.first;
      if (r->baseline == r->gold) ++slot.first.second;
      ++slot.second;
    }
    row.entropy = binary_entropy(double(pos) / double(recs.size()));
    row.classifier_accuracy = double(correct) / double(recs.size());
    row.baseline_accuracy = double(baseline_correct) / double(recs.size());
    row.diff = row.classifier_accuracy - row.baseline_accuracy;
    std::vector<double> acc_cls, acc_base;
    for (const auto& [fold, slot] : per_fold) {
      acc_cls.push_back(double(slot.first.first) / double(slot.second));
      acc_base.push_back(double(slot.first.second) / double(slot.second));
    }
    if (acc_cls.size() < 2) {
      row.significance = SignificanceMark::NotAssessable;
    } else {
      const TTestResult t = paired_t_test(acc_cls, acc_base);
      row.significance =
          t.significant_at_05 ? SignificanceMark::Significant : SignificanceMark::NotSignificant;
    }
    rows.push_back(std::move(row));
  }
  std::sort(rows.begin(), rows.end(), [](const PerConnectiveRow& a, const PerConnectiveRow& b) {
    if (a.diff != b.diff) return a.diff > b.diff;
    return a.conn < b.conn;
  });
  return rows;
}

// Features ranked by information gain (descending; ties keep canonical order).
inline std::vector<std::pair<Feature, double>> rank_features_by_gain(
    const std::vector<FeatureVector>& vectors, const std::vector<Label>& labels) {
  std::vector<std::pair<Feature, double>> ranked;
  for (Feature f : kAllFeatures) ranked.emplace_back(f, information_gain(vectors, labels, f));
  std::stable_sort(ranked.begin(), ranked.end(),
                   [](const auto& a, const auto& b) { return a.second > b.second; });
  return ranked;
}

}  // namespace conndis

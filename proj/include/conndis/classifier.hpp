// Two-class maximum-entropy classifier over one-hot categorical features,
// and the per-connective most-likely-class baseline.
#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <istream>
#include <limits>
#include <map>
#include <ostream>
#include <sstream>
#include <string>
#include <unordered_map>
#include <vector>

#include "conndis/errors.hpp"
#include "conndis/features.hpp"
#include "conndis/text.hpp"

namespace conndis {

struct TrainConfig {
  double l2_strength = 1e-2;
  int max_iterations = 500;
  double tolerance = 1e-6;  // stop when max |gradient component| falls below
  std::uint64_t seed = 42;
};

// One-hot column index over (feature, value) pairs seen in training, plus an
// always-on intercept column. Unseen values encode to nothing (zero block).
class FeatureEncoder {
 public:
  FeatureEncoder() : active_(kAllFeatures.begin(), kAllFeatures.end()) {}

  explicit FeatureEncoder(std::vector<Feature> active) : active_(std::move(active)) {}

  void fit(const std::vector<FeatureVector>& vectors) {
    if (vectors.empty()) throw ArgumentError("cannot encode an empty vector set");
    for (const FeatureVector& fv : vectors) {
      for (Feature f : active_) {
        auto& m = maps_[static_cast<std::size_t>(f)];
        const auto [it, inserted] = m.try_emplace(fv.value_of(f), next_);
        if (inserted) ++next_;
      }
    }
  }

  // Active columns of one vector, intercept last. Values unseen at fit time
  // contribute nothing.
  std::vector<int> encode(const FeatureVector& fv) const {
    std::vector<int> cols;
    cols.reserve(active_.size() + 1);
    for (Feature f : active_) {
      const auto& m = maps_[static_cast<std::size_t>(f)];
      auto it = m.find(fv.value_of(f));
      if (it != m.end()) cols.push_back(it->second);
    }
    cols.push_back(intercept_column());
    return cols;
  }

  int vocabulary_size() const { return next_; }
  int column_count() const { return next_ + 1; }
  int intercept_column() const { return next_; }
  const std::vector<Feature>& active_features() const { return active_; }

  // (feature, value, column), ordered by column.
  std::vector<std::tuple<Feature, std::string, int>> entries() const {
    std::vector<std::tuple<Feature, std::string, int>> out;
    for (std::size_t f = 0; f < maps_.size(); ++f)
      for (const auto& [value, col] : maps_[f]) out.emplace_back(static_cast<Feature>(f), value, col);
    std::sort(out.begin(), out.end(),
              [](const auto& a, const auto& b) { return std::get<2>(a) < std::get<2>(b); });
    return out;
  }

  void insert_entry(Feature f, const std::string& value, int col) {
    maps_[static_cast<std::size_t>(f)][value] = col;
    next_ = std::max(next_, col + 1);
  }

 private:
  std::array<std::unordered_map<std::string, int>, kFeatureCount> maps_;
  std::vector<Feature> active_;
  int next_ = 0;
};

struct EncodedDataset {
  FeatureEncoder encoder;
  std::vector<std::vector<int>> rows;
};

inline EncodedDataset encode_dataset(const std::vector<FeatureVector>& vectors,
                                     std::vector<Feature> active = {kAllFeatures.begin(),
                                                                    kAllFeatures.end()}) {
  EncodedDataset ds{FeatureEncoder(std::move(active)), {}};
  ds.encoder.fit(vectors);
  ds.rows.reserve(vectors.size());
  for (const FeatureVector& fv : vectors) ds.rows.push_back(ds.encoder.encode(fv));
  return ds;
}

namespace detail {

inline std::array<double, 2> softmax2(double s0, double s1) {
  const double m = std::max(s0, s1);
  const double e0 = std::exp(s0 - m);
  const double e1 = std::exp(s1 - m);
  const double z = e0 + e1;
  return {e0 / z, e1 / z};
}

}  // namespace detail

// L2-regularized conditional log-likelihood of the multinomial logistic model
// and (optionally) its gradient. Weight layout: w[class * columns + column],
// class 0 = DISCOURSE. The intercept column (`columns` - 1) is unpenalized.
inline double maxent_objective_and_gradient(const std::vector<std::vector<int>>& rows,
                                            const std::vector<Label>& labels, int columns,
                                            const std::vector<double>& weights, double l2,
                                            std::vector<double>* gradient) {
  if (gradient) {
    gradient->assign(weights.size(), 0.0);
  }
  double obj = 0.0;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    double s0 = 0.0, s1 = 0.0;
    for (int j : rows[i]) {
      s0 += weights[static_cast<std::size_t>(j)];
      s1 += weights[static_cast<std::size_t>(columns + j)];
    }
    const auto p = detail::softmax2(s0, s1);
    const int y = labels[i] == Label::Discourse ? 0 : 1;
    const double m = std::max(s0, s1);
    obj += (y == 0 ? s0 : s1) - m - std::log(std::exp(s0 - m) + std::exp(s1 - m));
    if (gradient) {
      const double c0 = (y == 0 ? 1.0 : 0.0) - p[0];
      const double c1 = (y == 1 ? 1.0 : 0.0) - p[1];
      for (int j : rows[i]) {
        (*gradient)[static_cast<std::size_t>(j)] += c0;
        (*gradient)[static_cast<std::size_t>(columns + j)] += c1;
      }
    }
  }
  for (int c = 0; c < 2; ++c) {
    for (int j = 0; j + 1 < columns; ++j) {  // intercept excluded
      const double w = weights[static_cast<std::size_t>(c * columns + j)];
      obj -= 0.5 * l2 * w * w;
      if (gradient) (*gradient)[static_cast<std::size_t>(c * columns + j)] -= l2 * w;
    }
  }
  return obj;
}

class MaxEntModel {
 public:
  MaxEntModel() = default;
  MaxEntModel(FeatureEncoder encoder, std::vector<double> weights, TrainConfig config)
      : encoder_(std::move(encoder)), weights_(std::move(weights)), config_(config) {}

  const FeatureEncoder& encoder() const { return encoder_; }
  const std::vector<double>& weights() const { return weights_; }
  const TrainConfig& config() const { return config_; }

  std::array<double, 2> probabilities(const FeatureVector& fv) const {
    const int columns = encoder_.column_count();
    double s0 = 0.0, s1 = 0.0;
    for (int j : encoder_.encode(fv)) {
      s0 += weights_[static_cast<std::size_t>(j)];
      s1 += weights_[static_cast<std::size_t>(columns + j)];
    }
    return detail::softmax2(s0, s1);
  }

  // Argmax class and its probability; ties go to DISCOURSE.
  std::pair<Label, double> predict(const FeatureVector& fv) const {
    const auto p = probabilities(fv);
    if (p[0] >= p[1]) return {Label::Discourse, p[0]};
    return {Label::NonDiscourse, p[1]};
  }

  void save(std::ostream& out, const std::vector<std::string>& lexicon_lines = {}) const;
  static MaxEntModel load(std::istream& in, std::vector<std::string>* lexicon_lines = nullptr);

 private:
  FeatureEncoder encoder_;
  std::vector<double> weights_;  // 2 * columns, class-major
  TrainConfig config_;
};

// Batch gradient ascent with backtracking step halving; the accepted step
// never decreases the regularized log-likelihood, so the objective is
// non-decreasing across iterations by construction (checked anyway).
inline MaxEntModel train_maxent(const std::vector<FeatureVector>& vectors,
                                const std::vector<Label>& labels, const TrainConfig& config,
                                std::vector<Feature> active = {kAllFeatures.begin(),
                                                               kAllFeatures.end()}) {
  if (vectors.empty()) throw ArgumentError("cannot train on an empty dataset");
  if (vectors.size() != labels.size()) throw ArgumentError("vectors/labels size mismatch");
  const bool has_pos = std::find(labels.begin(), labels.end(), Label::Discourse) != labels.end();
  const bool has_neg = std::find(labels.begin(), labels.end(), Label::NonDiscourse) != labels.end();
  if (!has_pos || !has_neg) throw TrainError("training data contains a single class");

  EncodedDataset ds = encode_dataset(vectors, std::move(active));
  const int columns = ds.encoder.column_count();
  std::vector<double> w(static_cast<std::size_t>(2 * columns), 0.0);
  std::vector<double> grad;
  std::vector<double> trial(w.size());

  double step = 1.0 / static_cast<double>(vectors.size());
  double obj = maxent_objective_and_gradient(ds.rows, labels, columns, w, config.l2_strength, &grad);
  if (!std::isfinite(obj)) throw TrainError("non-finite training objective");

  for (int iter = 0; iter < config.max_iterations; ++iter) {
    double gmax = 0.0, gnorm2 = 0.0;
    for (double g : grad) {
      gmax = std::max(gmax, std::abs(g));
      gnorm2 += g * g;
    }
    if (gmax <= config.tolerance) break;

    // backtracking line search with a sufficient-increase condition
    bool halved = false;
    double new_obj = -std::numeric_limits<double>::infinity();
    while (step >= 1e-300) {
      for (std::size_t j = 0; j < w.size(); ++j) trial[j] = w[j] + step * grad[j];
      new_obj = maxent_objective_and_gradient(ds.rows, labels, columns, trial, config.l2_strength,
                                              nullptr);
      if (std::isnan(new_obj)) throw TrainError("non-finite training objective");
      if (new_obj >= obj + 1e-4 * step * gnorm2) break;
      step *= 0.5;
      halved = true;
    }
    if (new_obj < obj) break;  // step underflow: no numeric ascent left
    w.swap(trial);
    const double prev = obj;
    obj = maxent_objective_and_gradient(ds.rows, labels, columns, w, config.l2_strength, &grad);
    if (!std::isfinite(obj)) throw TrainError("non-finite training objective");
    if (obj < prev) throw TrainError("objective decreased across an accepted step");
    if (obj == prev) break;  // below double precision: converged as far as fp allows
    if (!halved) step = std::min(step * 2.0, 1e8);
  }
  return MaxEntModel(std::move(ds.encoder), std::move(w), config);
}

// Most-likely-class-per-connective baseline; ties go to DISCOURSE, unseen
// connectives fall back to the global majority.
class BaselineModel {
 public:
  static BaselineModel train(const std::vector<std::string>& conns,
                             const std::vector<Label>& labels) {
    if (conns.empty() || conns.size() != labels.size())
      throw ArgumentError("baseline needs non-empty, aligned conns/labels");
    BaselineModel model;
    std::map<std::string, std::pair<long, long>> counts;  // conn -> (pos, neg)
    long pos = 0, neg = 0;
    for (std::size_t i = 0; i < conns.size(); ++i) {
      auto& c = counts[conns[i]];
      if (labels[i] == Label::Discourse) {
        ++c.first;
        ++pos;
      } else {
        ++c.second;
        ++neg;
      }
    }
    for (const auto& [conn, c] : counts)
      model.by_conn_[conn] = c.first >= c.second ? Label::Discourse : Label::NonDiscourse;
    model.global_ = pos >= neg ? Label::Discourse : Label::NonDiscourse;
    return model;
  }

  Label predict(const std::string& conn) const {
    auto it = by_conn_.find(conn);
    return it == by_conn_.end() ? global_ : it->second;
  }

  Label global_majority() const { return global_; }
  std::size_t size() const { return by_conn_.size(); }

 private:
  std::unordered_map<std::string, Label> by_conn_;
  Label global_ = Label::Discourse;
};

inline BaselineModel train_baseline(const std::vector<std::string>& conns,
                                    const std::vector<Label>& labels) {
  return BaselineModel::train(conns, labels);
}

// --- model persistence ------------------------------------------------------
//
// Versioned tab-separated text. Weights are printed with 17 significant
// digits so a reloaded model reproduces identical predictions.

namespace detail {

inline std::string format_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

inline Feature feature_from_name(const std::string& name) {
  for (Feature f : kAllFeatures)
    if (name == feature_name(f)) return f;
  throw FormatError("unknown feature name '" + name + "' in model file");
}

}  // namespace detail

inline void MaxEntModel::save(std::ostream& out, const std::vector<std::string>& lexicon_lines) const {
  out << "conndis-model\t1\n";
  out << "classes\tDISCOURSE\tNON_DISCOURSE\n";
  std::vector<std::string> names;
  for (Feature f : encoder_.active_features()) names.push_back(feature_name(f));
  out << "features\t" << join(names, ",") << "\n";
  out << "l2\t" << detail::format_double(config_.l2_strength) << "\n";
  out << "max_iter\t" << config_.max_iterations << "\n";
  out << "tol\t" << detail::format_double(config_.tolerance) << "\n";
  out << "seed\t" << config_.seed << "\n";
  out << "columns\t" << encoder_.column_count() << "\n";
  for (const auto& [f, value, col] : encoder_.entries())
    out << "feature\t" << col << "\t" << feature_name(f) << "\t" << value << "\n";
  for (int c = 0; c < 2; ++c) {
    out << "weights\t" << (c == 0 ? "DISCOURSE" : "NON_DISCOURSE") << "\t" << encoder_.column_count()
        << "\n";
    for (int j = 0; j < encoder_.column_count(); ++j)
      out << detail::format_double(weights_[static_cast<std::size_t>(c * encoder_.column_count() + j)])
          << "\n";
  }
  out << "lexicon\t" << lexicon_lines.size() << "\n";
  for (const std::string& l : lexicon_lines) out << l << "\n";
}

inline MaxEntModel MaxEntModel::load(std::istream& in, std::vector<std::string>* lexicon_lines) {
  std::string line;
  auto next_line = [&]() -> std::string {
    if (!std::getline(in, line)) throw FormatError("model file truncated");
    while (!line.empty() && (line.back() == '\r' || line.back() == '\n')) line.pop_back();
    return line;
  };
  if (next_line() != "conndis-model\t1") throw FormatError("not a conndis model file (bad magic)");
  if (next_line() != "classes\tDISCOURSE\tNON_DISCOURSE") throw FormatError("unexpected class list");

  TrainConfig config;
  std::vector<Feature> active;
  int columns = -1;
  FeatureEncoder encoder;
  std::vector<double> weights;

  auto fields_of = [](const std::string& l) { return split_on(l, '\t'); };

  {
    const auto f = fields_of(next_line());
    if (f.size() != 2 || f[0] != "features") throw FormatError("expected features line");
    for (const std::string& name : split_on(f[1], ',')) active.push_back(detail::feature_from_name(name));
    encoder = FeatureEncoder(active);
  }
  for (const char* key : {"l2", "max_iter", "tol", "seed"}) {
    const auto f = fields_of(next_line());
    if (f.size() != 2 || f[0] != key) throw FormatError(std::string("expected ") + key + " line");
    if (std::string(key) == "l2") config.l2_strength = std::stod(f[1]);
    if (std::string(key) == "max_iter") config.max_iterations = std::stoi(f[1]);
    if (std::string(key) == "tol") config.tolerance = std::stod(f[1]);
    if (std::string(key) == "seed") config.seed = std::stoull(f[1]);
  }
  {
    const auto f = fields_of(next_line());
    if (f.size() != 2 || f[0] != "columns") throw FormatError("expected columns line");
    columns = std::stoi(f[1]);
    if (columns < 1) throw FormatError("bad column count");
  }
  for (int i = 0; i + 1 < columns; ++i) {
    const auto f = fields_of(next_line());
    if (f.size() != 4 || f[0] != "feature") throw FormatError("expected feature line");
    encoder.insert_entry(detail::feature_from_name(f[2]), f[3], std::stoi(f[1]));
  }
  if (encoder.column_count() != columns) throw FormatError("feature index does not fill the column space");
  weights.resize(static_cast<std::size_t>(2 * columns));
  for (int c = 0; c < 2; ++c) {
    const auto f = fields_of(next_line());
    if (f.size() != 3 || f[0] != "weights" || std::stoi(f[2]) != columns)
      throw FormatError("expected weights header");
    for (int j = 0; j < columns; ++j)
      weights[static_cast<std::size_t>(c * columns + j)] = std::stod(next_line());
  }
  for (double w : weights)
    if (!std::isfinite(w)) throw FormatError("non-finite weight in model file");
  {
    const auto f = fields_of(next_line());
    if (f.size() != 2 || f[0] != "lexicon") throw FormatError("expected lexicon header");
    const long n = std::stol(f[1]);
    for (long i = 0; i < n; ++i) {
      const std::string entry = next_line();
      if (lexicon_lines) lexicon_lines->push_back(entry);
    }
  }
  return MaxEntModel(std::move(encoder), std::move(weights), config);
}

inline void save_model_file(const std::filesystem::path& path, const MaxEntModel& model,
                            const std::vector<std::string>& lexicon_lines) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw LoadError("cannot write model file '" + path.string() + "'");
  model.save(out, lexicon_lines);
  if (!out) throw LoadError("failed while writing model file '" + path.string() + "'");
}

inline MaxEntModel load_model_file(const std::filesystem::path& path,
                                   std::vector<std::string>* lexicon_lines = nullptr) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw LoadError("cannot read model file '" + path.string() + "'");
  return MaxEntModel::load(in, lexicon_lines);
}

}  // namespace conndis

// Structured-text report rendering: tab-separated key/value and table
// sections, one section per statistic family.
#pragma once

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <ostream>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "conndis/errors.hpp"
#include "conndis/evaluation.hpp"
#include "conndis/manifest.hpp"

namespace conndis {

// Half-up (away from zero) fixed-point formatting. A small guard absorbs
// binary representation error right below the .5 boundary.
inline std::string format_fixed(double value, int decimals) {
  double scale = 1.0;
  for (int i = 0; i < decimals; ++i) scale *= 10.0;
  const double magnitude = std::abs(value) * scale;
  const double rounded = std::floor(magnitude + 0.5 + 1e-9) / scale;
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.*f", decimals, value < 0 ? -rounded : rounded);
  return buf;
}

inline std::string format_pct(double fraction) { return format_fixed(100.0 * fraction, 2); }

inline std::string format_compact(double value) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%g", value);
  return buf;
}

// One report section: a name, an optional '#' header comment, and rows of
// tab-separated cells.
struct ReportSection {
  std::string name;
  std::vector<std::string> header;  // column names; empty for key/value sections
  std::vector<std::vector<std::string>> rows;

  void add_row(std::vector<std::string> cells) { rows.push_back(std::move(cells)); }
  void add_kv(const std::string& key, std::string value) { rows.push_back({key, std::move(value)}); }
};

class Report {
 public:
  ReportSection& section(const std::string& name) {
    sections_.push_back(ReportSection{name, {}, {}});
    return sections_.back();
  }

  void render(std::ostream& out) const {
    out << "conndis-report\t1\n";
    for (const ReportSection& s : sections_) {
      out << "\n[" << s.name << "]\n";
      if (!s.header.empty()) {
        out << "#";
        for (const std::string& h : s.header) out << "\t" << h;
        out << "\n";
      }
      for (const auto& row : s.rows) {
        for (std::size_t i = 0; i < row.size(); ++i) {
          if (i) out << "\t";
          out << row[i];
        }
        out << "\n";
      }
    }
  }

  std::string render() const {
    std::ostringstream out;
    render(out);
    return out.str();
  }

  // One TSV file per table section (sections with a header row).
  void export_tables(const std::filesystem::path& dir) const {
    std::filesystem::create_directories(dir);
    for (const ReportSection& s : sections_) {
      if (s.header.empty()) continue;
      std::ofstream out(dir / (s.name + ".tsv"), std::ios::binary);
      if (!out) throw LoadError("cannot write table export in '" + dir.string() + "'");
      for (std::size_t i = 0; i < s.header.size(); ++i) {
        if (i) out << "\t";
        out << s.header[i];
      }
      out << "\n";
      for (const auto& row : s.rows) {
        for (std::size_t i = 0; i < row.size(); ++i) {
          if (i) out << "\t";
          out << row[i];
        }
        out << "\n";
      }
    }
  }

 private:
  std::vector<ReportSection> sections_;
};

// --- section builders shared by the CLI commands ----------------------------

struct DatasetSummary {
  long documents = 0;
  long sentences = 0;
  long tokens = 0;
  long instances = 0;
  long positive = 0;
  long negative = 0;
  long connective_types = 0;
  long gold_only = 0;
};

inline DatasetSummary summarize_dataset(const std::vector<Document>& corpus,
                                        const std::vector<Instance>& instances) {
  DatasetSummary s;
  s.documents = static_cast<long>(corpus.size());
  for (const Document& d : corpus) {
    s.sentences += static_cast<long>(d.sentences.size());
    for (const Sentence& sent : d.sentences) s.tokens += static_cast<long>(sent.tokens.size());
  }
  std::set<std::string> types;
  for (const Instance& inst : instances) {
    ++s.instances;
    if (inst.label == Label::Discourse)
      ++s.positive;
    else
      ++s.negative;
    if (inst.gold_only) ++s.gold_only;
    types.insert(inst.connective);
  }
  s.connective_types = static_cast<long>(types.size());
  return s;
}

inline void add_dataset_section(Report& report, const DatasetSummary& s) {
  ReportSection& sec = report.section("dataset");
  sec.add_kv("documents", std::to_string(s.documents));
  sec.add_kv("sentences", std::to_string(s.sentences));
  sec.add_kv("tokens", std::to_string(s.tokens));
  sec.add_kv("instances", std::to_string(s.instances));
  sec.add_kv("positive", std::to_string(s.positive));
  sec.add_kv("negative", std::to_string(s.negative));
  sec.add_kv("connective_types", std::to_string(s.connective_types));
  sec.add_kv("gold_only", std::to_string(s.gold_only));
}

inline void add_frequency_section(Report& report, const FrequencyDistribution& dist) {
  ReportSection& sec = report.section("frequency_distribution");
  sec.header = {"bucket", "types", "pct"};
  for (const FrequencyBucket& b : dist.buckets)
    sec.add_row({b.name, std::to_string(b.types), format_fixed(b.percentage, 2)});
  sec.add_row({"total", std::to_string(dist.total_types), "100.00"});
}

inline void add_entropy_sections(Report& report, const EntropyReport& er, long min_freq) {
  ReportSection& sec = report.section("connective_entropy");
  sec.header = {"conn", "frequency", "p_discourse", "entropy"};
  long listed = 0;
  for (const ConnectiveStats& s : er.per_connective) {
    if (s.frequency < min_freq) continue;
    ++listed;
    sec.add_row({s.conn, std::to_string(s.frequency), format_fixed(s.p, 4), format_fixed(s.entropy, 2)});
  }
  ReportSection& sum = report.section("entropy_summary");
  sum.add_kv("average_entropy", format_fixed(er.weighted_average, 2));
  sum.add_kv("connectives_listed", std::to_string(listed));
  sum.add_kv("min_freq", std::to_string(min_freq));
}

inline void add_metrics_rows(ReportSection& sec, const Metrics& m) {
  sec.add_kv("tp", std::to_string(m.tp));
  sec.add_kv("fp", std::to_string(m.fp));
  sec.add_kv("fn", std::to_string(m.fn));
  sec.add_kv("tn", std::to_string(m.tn));
  sec.add_kv("precision", format_pct(m.precision()));
  sec.add_kv("recall", format_pct(m.recall()));
  sec.add_kv("f_measure", format_pct(m.f_measure()));
  sec.add_kv("accuracy", format_pct(m.accuracy()));
}

inline std::string format_t(const TTestResult& t) {
  if (std::isinf(t.t_statistic)) return t.t_statistic > 0 ? "inf" : "-inf";
  return format_fixed(t.t_statistic, 4);
}

inline std::string feature_list_name(const std::vector<Feature>& features) {
  std::vector<std::string> names;
  names.reserve(features.size());
  for (Feature f : features) names.emplace_back(feature_name(f));
  return join(names, "+");
}

inline void add_evaluation_sections(Report& report, const EvalReport& ev) {
  ReportSection& folds = report.section("folds");
  folds.header = {"fold", "size", "tp", "fp", "fn", "tn", "precision", "recall", "f_measure", "accuracy"};
  for (std::size_t f = 0; f < ev.fold_metrics.size(); ++f) {
    const Metrics& m = ev.fold_metrics[f];
    folds.add_row({std::to_string(f), std::to_string(m.total()), std::to_string(m.tp),
                   std::to_string(m.fp), std::to_string(m.fn), std::to_string(m.tn),
                   format_pct(m.precision()), format_pct(m.recall()), format_pct(m.f_measure()),
                   format_pct(m.accuracy())});
  }

  ReportSection& overall = report.section("overall");
  add_metrics_rows(overall, ev.pooled);

  ReportSection& base = report.section("baseline");
  base.add_kv("accuracy", format_pct(ev.baseline_pooled.accuracy()));
  const TTestResult t = paired_t_test(ev.fold_accuracies(), ev.baseline_fold_accuracies());
  base.add_kv("classifier_vs_baseline_t", format_t(t));
  base.add_kv("classifier_vs_baseline_df", std::to_string(t.degrees_of_freedom));
  base.add_kv("classifier_vs_baseline_significant", t.significant_at_05 ? "1" : "0");

  if (!ev.information_gains.empty()) {
    ReportSection& ig = report.section("information_gain");
    ig.header = {"feature", "gain"};
    for (const auto& [f, gain] : ev.information_gains)
      ig.add_row({feature_name(f), format_fixed(gain, 3)});
  }

  if (!ev.ablation_rows.empty()) {
    ReportSection& ab = report.section("ablation");
    ab.header = {"features", "accuracy", "t_vs_previous", "significant"};
    for (const AblationRow& row : ev.ablation_rows) {
      std::string t_str = "-";
      std::string sig = "-";
      if (row.vs_previous) {
        t_str = format_t(*row.vs_previous);
        sig = row.vs_previous->significant_at_05 ? "1" : "0";
      }
      ab.add_row({feature_list_name(row.features), format_pct(row.pooled_accuracy), t_str, sig});
    }
  }

  if (!ev.per_connective.empty()) {
    ReportSection& pc = report.section("per_connective");
    pc.header = {"conn", "frequency", "entropy", "baseline_accuracy", "classifier_accuracy", "diff",
                 "significant"};
    for (const PerConnectiveRow& row : ev.per_connective) {
      std::string sig = "-";
      if (row.significance == SignificanceMark::Significant) sig = "1";
      if (row.significance == SignificanceMark::NotSignificant) sig = "0";
      pc.add_row({row.conn, std::to_string(row.frequency), format_fixed(row.entropy, 2),
                  format_pct(row.baseline_accuracy), format_pct(row.classifier_accuracy),
                  format_pct(row.diff), sig});
    }
  }
}

inline void add_manifest_section(Report& report, const RunManifest& manifest) {
  ReportSection& sec = report.section("manifest");
  for (const auto& [k, v] : manifest.fields) sec.add_kv(k, v);
}

}  // namespace conndis

// conndis command-line tool: corpus statistics, cross-validated evaluation,
// model training, and connective annotation of new text.
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "conndis/conndis.hpp"

namespace fs = std::filesystem;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitRuntime = 1;
constexpr int kExitUsage = 2;

struct CommonArgs {
  std::string corpus;
  std::string lexicon;
  int folds = 10;
  std::uint64_t seed = 42;
  double l2 = 0.01;
  int max_iter = 500;
  double tol = 1e-6;
  long min_freq = 20;
  bool ablate = false;
  bool stratify = false;
  int jobs = 0;
  std::string out;
  std::string model;
  std::string tables;
  std::string dump_features;
};

conndis::TrainConfig train_config(const CommonArgs& args) {
  conndis::TrainConfig config;
  config.l2_strength = args.l2;
  config.max_iterations = args.max_iter;
  config.tolerance = args.tol;
  config.seed = args.seed;
  return config;
}

void write_output(const std::string& text, const std::string& out_path) {
  if (out_path.empty() || out_path == "-") {
    std::cout << text;
    return;
  }
  std::ofstream out(out_path, std::ios::binary);
  if (!out) throw conndis::LoadError("cannot write output file '" + out_path + "'");
  out << text;
  if (!out) throw conndis::LoadError("failed while writing '" + out_path + "'");
}

struct LoadedData {
  std::vector<conndis::Document> corpus;
  conndis::Lexicon lexicon;
  std::vector<conndis::Instance> instances;
  std::vector<conndis::FeatureVector> vectors;
  std::vector<conndis::Label> labels;
  std::vector<std::string> conns;
};

LoadedData load_everything(const CommonArgs& args) {
  LoadedData d;
  d.corpus = conndis::load_corpus(args.corpus);
  d.lexicon = conndis::load_lexicon(args.lexicon);
  d.instances = conndis::build_instances(d.corpus, d.lexicon);
  if (d.instances.empty())
    throw conndis::LoadError("no connective instances found in '" + args.corpus + "'");
  d.vectors = conndis::extract_all(d.corpus, d.instances);
  d.labels.reserve(d.instances.size());
  d.conns.reserve(d.instances.size());
  for (const conndis::Instance& inst : d.instances) {
    d.labels.push_back(inst.label);
    d.conns.push_back(inst.connective);
  }
  return d;
}

void add_train_config_fields(conndis::RunManifest& manifest, const CommonArgs& args) {
  manifest.add("folds", std::to_string(args.folds));
  manifest.add("seed", std::to_string(args.seed));
  manifest.add("l2", conndis::format_compact(args.l2));
  manifest.add("max_iter", std::to_string(args.max_iter));
  manifest.add("tol", conndis::format_compact(args.tol));
  manifest.add("min_freq", std::to_string(args.min_freq));
  manifest.add("ablate", args.ablate ? "1" : "0");
  manifest.add("stratify", args.stratify ? "1" : "0");
  manifest.add("jobs", std::to_string(args.jobs));
  manifest.add("out", args.out.empty() ? "-" : args.out);
}

int cmd_stats(const CommonArgs& args) {
  LoadedData d = load_everything(args);

  conndis::Report report;
  add_dataset_section(report, conndis::summarize_dataset(d.corpus, d.instances));
  add_frequency_section(report, conndis::frequency_distribution(d.instances));
  add_entropy_sections(report, conndis::connective_entropy(d.instances), args.min_freq);

  conndis::RunManifest manifest("stats");
  manifest.add_input("corpus", args.corpus);
  manifest.add_input("lexicon", args.lexicon);
  manifest.add("min_freq", std::to_string(args.min_freq));
  manifest.add("out", args.out.empty() ? "-" : args.out);
  add_manifest_section(report, manifest);

  if (!args.tables.empty()) report.export_tables(args.tables);
  write_output(report.render(), args.out);
  return kExitOk;
}

int cmd_evaluate(const CommonArgs& args) {
  LoadedData d = load_everything(args);

  conndis::CvOptions options;
  options.k = args.folds;
  options.seed = args.seed;
  options.stratify = args.stratify;
  options.jobs = args.jobs;

  conndis::EvalReport ev =
      conndis::cross_validate(d.vectors, d.labels, d.conns, train_config(args), options);
  ev.information_gains = conndis::rank_features_by_gain(d.vectors, d.labels);
  if (args.ablate) {
    std::vector<conndis::Feature> ordered;
    for (const auto& [f, gain] : ev.information_gains) ordered.push_back(f);
    ev.ablation_rows =
        conndis::ablation(d.vectors, d.labels, d.conns, ordered, train_config(args), options);
  }
  ev.per_connective = conndis::per_connective_report(ev, args.min_freq);

  if (!args.dump_features.empty()) {
    std::ostringstream dump;
    for (std::size_t i = 0; i < d.instances.size(); ++i)
      dump << conndis::feature_dump_line(d.instances[i], d.vectors[i]) << "\n";
    write_output(dump.str(), args.dump_features);
  }

  conndis::Report report;
  add_dataset_section(report, conndis::summarize_dataset(d.corpus, d.instances));
  add_evaluation_sections(report, ev);

  conndis::RunManifest manifest("evaluate");
  manifest.add_input("corpus", args.corpus);
  manifest.add_input("lexicon", args.lexicon);
  add_train_config_fields(manifest, args);
  add_manifest_section(report, manifest);

  if (!args.tables.empty()) report.export_tables(args.tables);
  write_output(report.render(), args.out);
  return kExitOk;
}

int cmd_train(const CommonArgs& args) {
  LoadedData d = load_everything(args);

  const conndis::MaxEntModel model = conndis::train_maxent(d.vectors, d.labels, train_config(args));

  std::vector<std::string> lexicon_lines;
  for (const conndis::ConnectiveForm& form : d.lexicon.forms())
    lexicon_lines.push_back(conndis::join(form, " "));
  conndis::save_model_file(args.model, model, lexicon_lines);

  conndis::RunManifest manifest("train");
  manifest.add_input("corpus", args.corpus);
  manifest.add_input("lexicon", args.lexicon);
  manifest.add("model", args.model);
  manifest.add("seed", std::to_string(args.seed));
  manifest.add("l2", conndis::format_compact(args.l2));
  manifest.add("max_iter", std::to_string(args.max_iter));
  manifest.add("tol", conndis::format_compact(args.tol));
  manifest.write_file(args.model + ".manifest");

  std::cerr << "model written to " << args.model << " (" << model.encoder().column_count()
            << " columns)\n";
  return kExitOk;
}

int cmd_predict(const CommonArgs& args) {
  std::vector<std::string> lexicon_lines;
  const conndis::MaxEntModel model = conndis::load_model_file(args.model, &lexicon_lines);

  conndis::Lexicon lexicon;
  if (!args.lexicon.empty()) {
    lexicon = conndis::load_lexicon(args.lexicon);
  } else {
    std::stringstream ss;
    for (const std::string& l : lexicon_lines) ss << l << "\n";
    lexicon = conndis::read_lexicon(ss, args.model + " (embedded lexicon)");
  }

  std::ifstream in(args.corpus, std::ios::binary);
  if (!in) throw conndis::LoadError("cannot read corpus file '" + args.corpus + "'");

  std::ostringstream out;
  std::size_t line_no = 0;
  long records = 0, skipped = 0, annotated = 0;
  while (auto rec = conndis::detail::read_record(in, line_no, args.corpus)) {
    ++records;
    conndis::Sentence sent;
    try {
      sent = conndis::detail::validate_record(*rec, args.corpus);
    } catch (const conndis::FormatError& e) {
      std::cerr << "skipping record: " << e.what() << "\n";
      ++skipped;
      continue;
    }
    std::vector<conndis::AnnotatedSpan> spans;
    for (const conndis::CandidateMatch& m : conndis::match_connectives(sent.tokens, lexicon)) {
      conndis::Instance inst;
      inst.doc_id = rec->doc_id;
      inst.sentence_index = static_cast<int>(rec->sent_no);
      inst.start = m.start;
      inst.end = m.end;
      const conndis::FeatureVector fv = conndis::extract_features(inst, sent);
      const auto [label, prob] = model.predict(fv);
      if (label == conndis::Label::Discourse) {
        char prob_str[32];
        std::snprintf(prob_str, sizeof(prob_str), "%.6f", prob);
        spans.push_back({m.start, m.end, prob_str});
        ++annotated;
      }
    }
    conndis::write_record(out, rec->doc_id, static_cast<int>(rec->sent_no), sent, spans);
  }
  write_output(out.str(), args.out);

  if (!args.out.empty() && args.out != "-") {
    conndis::RunManifest manifest("predict");
    manifest.add_input("model", args.model);
    manifest.add_input("corpus", args.corpus);
    manifest.add("out", args.out);
    manifest.write_file(args.out + ".manifest");
  }
  std::cerr << "records " << records << ", skipped " << skipped << ", spans annotated " << annotated
            << "\n";
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Discourse connective detection and disambiguation toolkit"};
  app.require_subcommand(1);
  CommonArgs args;

  auto add_data_opts = [&](CLI::App* cmd) {
    cmd->add_option("--corpus", args.corpus, "corpus file or directory")->required();
    cmd->add_option("--lexicon", args.lexicon, "connective lexicon file")->required();
  };
  auto add_train_opts = [&](CLI::App* cmd) {
    cmd->add_option("--seed", args.seed, "RNG seed");
    cmd->add_option("--l2", args.l2, "L2 regularization strength")->check(CLI::NonNegativeNumber);
    cmd->add_option("--max-iter", args.max_iter, "max training iterations")->check(CLI::PositiveNumber);
    cmd->add_option("--tol", args.tol, "gradient convergence tolerance")->check(CLI::PositiveNumber);
  };

  CLI::App* stats = app.add_subcommand("stats", "dataset statistics and connective entropies");
  add_data_opts(stats);
  stats->add_option("--min-freq", args.min_freq, "hide connectives below this frequency");
  stats->add_option("--out", args.out, "write the report here instead of stdout");
  stats->add_option("--tables", args.tables, "export each table section as TSV into this directory");

  CLI::App* evaluate = app.add_subcommand("evaluate", "cross-validated evaluation");
  add_data_opts(evaluate);
  add_train_opts(evaluate);
  evaluate->add_option("--folds", args.folds, "cross-validation fold count")
      ->check(CLI::Range(2, 1000000));
  evaluate->add_option("--min-freq", args.min_freq, "per-connective table frequency cutoff");
  evaluate->add_flag("--ablate", args.ablate, "add the incremental feature ablation table");
  evaluate->add_flag("--stratify", args.stratify, "stratify folds by label");
  evaluate->add_option("--jobs", args.jobs, "parallel fold training (0 = all cores)");
  evaluate->add_option("--out", args.out, "write the report here instead of stdout");
  evaluate->add_option("--tables", args.tables, "export each table section as TSV into this directory");
  evaluate->add_option("--dump-features", args.dump_features, "write per-instance feature values here");

  CLI::App* train = app.add_subcommand("train", "train a model on the whole corpus");
  add_data_opts(train);
  add_train_opts(train);
  train->add_option("--model", args.model, "output model file")->required();

  CLI::App* predict = app.add_subcommand("predict", "annotate connectives in a corpus");
  predict->add_option("--model", args.model, "trained model file")->required();
  predict->add_option("--corpus", args.corpus, "corpus file (CONN lines optional)")->required();
  predict->add_option("--lexicon", args.lexicon, "override the model's embedded lexicon");
  predict->add_option("--out", args.out, "write annotated corpus here instead of stdout");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  // empty path strings are usage errors, not file errors
  if ((stats->parsed() || evaluate->parsed() || train->parsed()) &&
      (args.corpus.empty() || args.lexicon.empty())) {
    std::cerr << "error: --corpus and --lexicon must be non-empty\n";
    return kExitUsage;
  }
  if (predict->parsed() && (args.corpus.empty() || args.model.empty())) {
    std::cerr << "error: --corpus and --model must be non-empty\n";
    return kExitUsage;
  }
  if (train->parsed() && args.model.empty()) {
    std::cerr << "error: --model must be non-empty\n";
    return kExitUsage;
  }

  try {
    if (stats->parsed()) return cmd_stats(args);
    if (evaluate->parsed()) return cmd_evaluate(args);
    if (train->parsed()) return cmd_train(args);
    if (predict->parsed()) return cmd_predict(args);
  } catch (const conndis::ArgumentError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitRuntime;
  }
  return kExitUsage;
}

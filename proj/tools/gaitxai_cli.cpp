// gaitxai command-line tool: trace JSON -> feature CSV -> model JSON -> reports.
// Exit codes: 0 success, 1 processing error, 2 usage error or invalid config.

#include <charconv>
#include <cstdint>
#include <filesystem>
#include <iostream>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "gaitxai/gaitxai.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace gaitxai;

namespace {

constexpr int kOk = 0;
constexpr int kProcessingError = 1;
constexpr int kUsageError = 2;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Flag values that override the config file when given.
struct Overrides {
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> k;
  std::optional<double> sigma;
  std::optional<double> learning_rate;
  std::optional<std::size_t> max_epochs;
  std::optional<std::size_t> patience;
  std::optional<std::size_t> n_samples;
  std::optional<double> kernel_width;
  std::optional<double> threshold;
  std::optional<std::string> tally_basis;
  bool normalize = false;
  std::optional<std::size_t> n_cycles;
};

json read_json_file(const fs::path& path) {
  try {
    return json::parse(read_file(path));
  } catch (const json::exception& e) {
    throw Error(Errc::malformed_document, path.string() + ": " + e.what());
  }
}

bool looks_like_run_config(const json& doc) {
  static const std::set<std::string> sections{"config", "k", "signal", "train",
                                              "svm",    "explain", "synth"};
  for (const auto& [key, value] : doc.items()) {
    if (sections.count(key)) return true;
  }
  return false;
}

RunConfig resolve_config(const std::string& config_path, const Overrides& o, bool synth_mode) {
  RunConfig cfg;
  if (!config_path.empty()) {
    json doc = read_json_file(config_path);
    if (!doc.is_object()) throw Error(Errc::invalid_config, "config must be a JSON object");
    // A bare synthesis config is accepted by `synth`.
    if (synth_mode && !looks_like_run_config(doc)) {
      json wrapped = json::object();
      if (doc.contains("seed")) wrapped["seed"] = doc["seed"];
      doc.erase("seed");
      wrapped["synth"] = doc;
      doc = std::move(wrapped);
    }
    cfg = overlay_config(cfg, doc);
  }
  if (o.seed) cfg.seed = *o.seed;
  if (o.k) cfg.k = *o.k;
  if (o.sigma) cfg.signal.smoothing_sigma_frames = *o.sigma;
  if (o.learning_rate) cfg.train.learning_rate = *o.learning_rate;
  if (o.max_epochs) cfg.train.max_epochs = *o.max_epochs;
  if (o.patience) cfg.train.early_stop_patience = *o.patience;
  if (o.n_samples) cfg.explain.perturbation.n_samples = *o.n_samples;
  if (o.kernel_width) cfg.explain.perturbation.kernel_width = *o.kernel_width;
  if (o.threshold) cfg.explain.perturbation.contribution_threshold = *o.threshold;
  if (o.tally_basis) cfg.explain.tally_basis = parse_tally_basis(*o.tally_basis);
  if (o.normalize) cfg.explain.normalize = true;
  if (o.n_cycles) cfg.synth.n_cycles = *o.n_cycles;
  cfg.apply_seed();
  cfg.validate();
  return cfg;
}

fs::path sibling(const fs::path& out, const std::string& extension) {
  auto p = out;
  p.replace_extension(extension);
  return p;
}

void emit(const std::string& out, const std::string& content) {
  if (out.empty()) {
    std::cout << content;
  } else {
    write_file_atomic(out, content);
  }
}

std::string dump(const json& j) { return j.dump(2) + "\n"; }

KeypointSequence load_trace(const fs::path& path) { return parse_pose_trace(read_file(path)); }

std::vector<FeatureRow> load_rows(const fs::path& path) { return read_feature_csv(read_file(path)); }

json findings_json(const std::vector<Finding>& findings) {
  json arr = json::array();
  for (const auto& f : findings) {
    json item = {{"code", f.code}, {"message", f.message}, {"count", f.count}};
    item["first_frame"] = f.first_frame ? json(*f.first_frame) : json(nullptr);
    arr.push_back(std::move(item));
  }
  return arr;
}

// ---------------------------------------------------------------- subcommands

int cmd_ingest(const std::string& in, const std::string& out, const RunConfig& cfg,
               std::optional<double> min_visibility) {
  const auto seq = load_trace(in);
  ValidationOptions opts;
  opts.min_heel_visibility = min_visibility;
  const auto report = validate_sequence(seq, opts);
  json doc = {{"config", to_json(cfg)},
              {"source", fs::path(in).filename().string()},
              {"subject_id", seq.meta.subject_id},
              {"frames", seq.frames.size()},
              {"frame_rate_hz", seq.meta.frame_rate_hz},
              {"ok", report.ok()},
              {"errors", findings_json(report.errors)},
              {"warnings", findings_json(report.warnings)}};
  doc["min_heel_visibility"] = min_visibility ? json(*min_visibility) : json(nullptr);
  emit(out, dump(doc));
  for (const auto& e : report.errors) std::cerr << "error: " << e.code << ": " << e.message << "\n";
  for (const auto& w : report.warnings) std::cerr << "warning: " << w.code << ": " << w.message << "\n";
  return report.ok() ? kOk : kProcessingError;
}

int cmd_features(const std::vector<std::string>& inputs, const std::string& out,
                 const std::string& discard_log, const RunConfig& cfg) {
  std::vector<FeatureRow> rows;
  std::vector<DiscardRecord> discarded;
  std::set<std::string> prefixes;
  for (std::size_t i = 0; i < inputs.size(); ++i) {
    const fs::path path(inputs[i]);
    const auto seq = load_trace(path);
    std::string prefix = path.stem().string();
    if (!prefixes.insert(prefix).second) prefix += "#" + std::to_string(i);
    const auto result = extract_trace_features(seq, cfg.signal, path.filename().string(), prefix + "-");
    rows.insert(rows.end(), result.rows.begin(), result.rows.end());
    discarded.insert(discarded.end(), result.discarded.begin(), result.discarded.end());
  }
  for (const auto& d : discarded) std::cerr << "discarded: " << d.source << ": " << d.reason << "\n";
  if (!discard_log.empty()) {
    std::string log = "subject_id,source,reason\n";
    for (const auto& d : discarded) {
      log += csv::quote(d.subject_id) + "," + csv::quote(d.source) + "," + csv::quote(d.reason) + "\n";
    }
    write_file_atomic(discard_log, log);
  }
  emit(out, write_feature_csv(rows));
  return kOk;
}

int cmd_plot(const std::string& in, const std::string& out, const RunConfig& cfg) {
  const auto seq = load_trace(in);
  const auto report = validate_sequence(seq);
  if (!report.ok()) {
    throw Error(Errc::malformed_document, "invalid trace: " + report.errors.front().message);
  }
  const auto analysis = analyze_gait(heel_series(seq), cfg.signal);
  const std::string title = seq.meta.subject_id + " (" + fs::path(in).filename().string() + ")";
  write_file_atomic(out, distance_plot_svg(analysis, title));
  write_file_atomic(sibling(out, ".csv"), distance_plot_csv(analysis));
  return kOk;
}

int cmd_synth(const std::string& out, const RunConfig& cfg) {
  const auto walk = generate_walk(cfg.synth);
  write_file_atomic(out, serialize_pose_trace(walk.sequence) + "\n");
  json truth = to_json(walk.truth);
  truth["config"] = to_json(cfg);
  auto truth_path = fs::path(out);
  truth_path.replace_extension();
  truth_path += ".truth.json";
  write_file_atomic(truth_path, dump(truth));
  return kOk;
}

int cmd_train(const std::string& in, const std::string& out, const RunConfig& cfg) {
  const auto data = dataset_from_rows(load_rows(in));
  const auto model = train_mlp(data, cfg.train, cfg.seed);
  json doc = to_json(model);
  doc["config"] = to_json(cfg);
  write_file_atomic(out, dump(doc));
  std::cerr << "trained on " << data.size() << " rows; epochs " << model.summary.epochs_run
            << ", best epoch " << model.summary.best_epoch << "\n";
  return kOk;
}

std::size_t count_discards(const std::string& path) {
  if (path.empty()) return 0;
  const auto records = csv::parse(read_file(path));
  return records.empty() ? 0 : records.size() - 1;
}

int cmd_eval(const std::string& in, const std::string& out, const std::string& discard_log,
             const RunConfig& cfg) {
  auto data = dataset_from_rows(load_rows(in));
  data.discarded_cycles = count_discards(discard_log);
  const auto report = run_evaluation(data, cfg.train, cfg.k, cfg.seed, cfg.svm);
  json doc = to_json(report);
  doc["config"] = to_json(cfg);
  emit(out, dump(doc));
  if (!out.empty()) write_file_atomic(sibling(out, ".csv"), eval_csv(report));
  for (const auto& s : report.systems) {
    std::cerr << s.system << ": accuracy " << s.mean_accuracy << "\n";
  }
  return kOk;
}

std::vector<std::size_t> select_rows(const std::vector<FeatureRow>& rows,
                                     const std::vector<std::string>& wanted) {
  std::vector<std::size_t> picked;
  if (wanted.empty()) {
    for (std::size_t i = 0; i < rows.size(); ++i) picked.push_back(i);
    return picked;
  }
  for (const auto& w : wanted) {
    std::optional<std::size_t> hit;
    for (std::size_t i = 0; i < rows.size(); ++i) {
      if (rows[i].cycle_id == w) {
        hit = i;
        break;
      }
    }
    if (!hit) {
      std::size_t index = 0;
      const auto res = std::from_chars(w.data(), w.data() + w.size(), index);
      if (res.ec != std::errc() || res.ptr != w.data() + w.size() || index >= rows.size()) {
        throw UsageError("--rows: no row with cycle id or index '" + w + "'");
      }
      hit = index;
    }
    picked.push_back(*hit);
  }
  return picked;
}

int cmd_explain(const std::string& model_path, const std::string& in, const std::string& out,
                const std::vector<std::string>& wanted, const RunConfig& cfg) {
  const auto model = mlp_from_json(read_json_file(model_path));
  model.check();
  const auto rows = load_rows(in);
  const auto picked = select_rows(rows, wanted);
  const auto stats = TrainStats::from(model.standardizer);

  std::vector<Explanation> expls;
  std::vector<std::string> truth;
  bool all_labeled = true;
  for (std::size_t i : picked) {
    const auto x = rows[i].features.to_array();
    expls.push_back(explain_instance(model, std::span<const double>(x), stats,
                                     cfg.explain.perturbation, rows[i].cycle_id));
    if (rows[i].label) {
      truth.push_back(*rows[i].label);
    } else {
      all_labeled = false;
    }
  }

  json explanations = json::array();
  for (const auto& e : expls) explanations.push_back(to_json(e, kFeatureKeys, cfg.explain.normalize));
  json doc = {{"config", to_json(cfg)},
              {"model", fs::path(model_path).filename().string()},
              {"explanations", std::move(explanations)}};
  std::optional<ContributionTally> tally;
  if (all_labeled && !expls.empty()) {
    tally = tally_contributions(expls, truth, cfg.explain.perturbation.contribution_threshold,
                                kFeatureCount, cfg.explain.tally_basis);
    doc["tally"] = to_json(*tally, kFeatureKeys, cfg.explain.tally_basis,
                           cfg.explain.perturbation.contribution_threshold);
  } else {
    doc["tally"] = nullptr;
    std::cerr << "note: tally skipped, some rows have no label\n";
  }
  if (out.empty()) {
    std::cout << dump(doc);
  } else {
    write_file_atomic(out, dump(doc));
    if (tally) {
      auto tally_path = fs::path(out);
      tally_path.replace_extension();
      tally_path += ".tally.csv";
      write_file_atomic(tally_path, tally_csv(*tally, kFeatureKeys));
    }
    std::cout << render_importance_table(expls, kFeatureLabels, cfg.explain.normalize);
  }
  return kOk;
}

int cmd_stats(const std::string& in, const std::string& out, const RunConfig& cfg) {
  const auto data = dataset_from_rows(load_rows(in));
  const auto report = feature_p_values(data, kFeatureKeys);
  json doc = to_json(report);
  doc["config"] = to_json(cfg);
  emit(out, dump(doc));
  if (!out.empty()) write_file_atomic(sibling(out, ".csv"), stats_csv(report));
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"gaitxai: gait features, classification and explanations from pose traces"};
  app.require_subcommand(1);

  std::string config_path;
  std::string out;
  std::uint64_t seed = 0;
  Overrides o;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", config_path, "JSON config file (or a report embedding one)")
        ->check(CLI::ExistingFile);
    sub->add_option("--seed", seed, "Random seed");
    sub->add_option("--out", out, "Output path");
  };

  std::string in;
  std::vector<std::string> inputs;
  std::string discard_log;
  std::string model_path;
  std::vector<std::string> wanted_rows;
  double min_visibility = 0.0;
  double sigma = 0.0, lr = 0.0, kernel_width = 0.0, threshold = 0.0;
  std::size_t k = 0, epochs = 0, patience = 0, n_samples = 0, n_cycles = 0;
  std::string basis;

  auto* ingest = app.add_subcommand("ingest", "Validate a pose trace");
  add_common(ingest);
  ingest->add_option("--in", in, "Pose trace JSON")->required()->check(CLI::ExistingFile);
  auto* vis_opt = ingest->add_option("--min-heel-visibility", min_visibility,
                                     "Flag frames whose heel visibility is below this value");

  auto* features = app.add_subcommand("features", "Pose traces to feature CSV, one row per cycle");
  add_common(features);
  features->add_option("--in", inputs, "Pose trace JSON (repeatable)")->required()->check(CLI::ExistingFile);
  features->add_option("--discard-log", discard_log, "CSV of traces and cycles that produced no row");

  auto* plot = app.add_subcommand("plot", "Heel-distance plot (SVG plus CSV)");
  add_common(plot);
  plot->add_option("--in", in, "Pose trace JSON")->required()->check(CLI::ExistingFile);

  auto* synth = app.add_subcommand("synth", "Generate a synthetic walk and its ground truth");
  add_common(synth);
  synth->add_option("--n-cycles", n_cycles, "Number of gait cycles");

  auto* train = app.add_subcommand("train", "Train the MLP on a feature CSV");
  add_common(train);
  train->add_option("--in", in, "Feature CSV")->required()->check(CLI::ExistingFile);

  auto* eval = app.add_subcommand("eval", "Subject-exclusive k-fold evaluation");
  add_common(eval);
  eval->add_option("--in", in, "Feature CSV")->required()->check(CLI::ExistingFile);
  eval->add_option("--k", k, "Number of folds");
  eval->add_option("--discard-log", discard_log, "Discard log written by `features`")
      ->check(CLI::ExistingFile);

  auto* explain = app.add_subcommand("explain", "Local surrogate explanations for feature rows");
  add_common(explain);
  explain->add_option("--model", model_path, "Model JSON from `train`")->required()->check(CLI::ExistingFile);
  explain->add_option("--in", in, "Feature CSV")->required()->check(CLI::ExistingFile);
  explain->add_option("--rows", wanted_rows, "Cycle ids or 0-based row indices (default: all)");
  explain->add_flag("--normalize", o.normalize, "Divide importances by the largest magnitude");
  explain->add_option("--tally-basis", basis, "contribution or coefficient");
  explain->add_option("--samples", n_samples, "Perturbation samples per instance");
  explain->add_option("--kernel-width", kernel_width, "Proximity kernel width");
  explain->add_option("--threshold", threshold, "Tally threshold");

  auto* stats = app.add_subcommand("stats", "Per-feature Welch t-test p-values");
  add_common(stats);
  stats->add_option("--in", in, "Feature CSV")->required()->check(CLI::ExistingFile);

  for (auto* sub : {features, plot}) sub->add_option("--sigma", sigma, "Smoothing sigma in frames");
  for (auto* sub : {train, eval}) {
    sub->add_option("--lr", lr, "Adam learning rate");
    sub->add_option("--epochs", epochs, "Maximum epochs");
    sub->add_option("--patience", patience, "Early-stopping patience");
  }
  for (auto* sub : {plot, synth, train}) sub->get_option("--out")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << "error: " << e.what() << "\n\n" << app.help();
    return kUsageError;
  }

  auto* active = app.get_subcommands().front();
  auto given = [&](const char* name) {
    try {
      return active->get_option(name)->count() > 0;
    } catch (const CLI::OptionNotFound&) {
      return false;
    }
  };
  if (given("--seed")) o.seed = seed;
  if (given("--k")) o.k = k;
  if (given("--sigma")) o.sigma = sigma;
  if (given("--lr")) o.learning_rate = lr;
  if (given("--epochs")) o.max_epochs = epochs;
  if (given("--patience")) o.patience = patience;
  if (given("--samples")) o.n_samples = n_samples;
  if (given("--kernel-width")) o.kernel_width = kernel_width;
  if (given("--threshold")) o.threshold = threshold;
  if (given("--tally-basis")) o.tally_basis = basis;
  if (given("--n-cycles")) o.n_cycles = n_cycles;

  const std::string name = active->get_name();
  try {
    const RunConfig cfg = resolve_config(config_path, o, name == "synth");
    if (name == "ingest") {
      return cmd_ingest(in, out, cfg, vis_opt->count() ? std::optional<double>(min_visibility) : std::nullopt);
    }
    if (name == "features") return cmd_features(inputs, out, discard_log, cfg);
    if (name == "plot") return cmd_plot(in, out, cfg);
    if (name == "synth") return cmd_synth(out, cfg);
    if (name == "train") return cmd_train(in, out, cfg);
    if (name == "eval") return cmd_eval(in, out, discard_log, cfg);
    if (name == "explain") return cmd_explain(model_path, in, out, wanted_rows, cfg);
    if (name == "stats") return cmd_stats(in, out, cfg);
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsageError;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return e.code() == Errc::invalid_config ? kUsageError : kProcessingError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kProcessingError;
  }
  std::cerr << "error: unhandled subcommand " << name << "\n";
  return kUsageError;
}

#pragma once

// Resolved settings for a command-line run. Layering: built-in defaults, then
// a JSON config file, then explicit flags. Every report embeds the resolved
// object so it can be fed back through --config.

#include <cstdint>
#include <optional>
#include <set>
#include <string>

#include "json.hpp"

#include "gaitxai/error.hpp"
#include "gaitxai/explainer.hpp"
#include "gaitxai/mlp.hpp"
#include "gaitxai/signal.hpp"
#include "gaitxai/svm.hpp"
#include "gaitxai/synth.hpp"

namespace gaitxai {

inline void to_json(nlohmann::json& j, const SignalConfig& c) {
  j = {{"smoothing_sigma_frames",
        c.smoothing_sigma_frames ? nlohmann::json(*c.smoothing_sigma_frames) : nlohmann::json(nullptr)},
       {"min_prominence", c.min_prominence},
       {"min_gap_fraction", c.min_gap_fraction}};
}

inline void from_json(const nlohmann::json& j, SignalConfig& c) {
  if (auto it = j.find("smoothing_sigma_frames"); it != j.end()) {
    c.smoothing_sigma_frames = it->is_null() ? std::nullopt : std::optional<double>(it->get<double>());
  }
  c.min_prominence = j.value("min_prominence", c.min_prominence);
  c.min_gap_fraction = j.value("min_gap_fraction", c.min_gap_fraction);
}

inline void to_json(nlohmann::json& j, const SvmConfig& c) {
  j = {{"lambda", c.lambda}, {"epochs", c.epochs}, {"initial_step", c.initial_step}};
}

inline void from_json(const nlohmann::json& j, SvmConfig& c) {
  c.lambda = j.value("lambda", c.lambda);
  c.epochs = j.value("epochs", c.epochs);
  c.initial_step = j.value("initial_step", c.initial_step);
}

struct ExplainSettings {
  PerturbationConfig perturbation;
  TallyBasis tally_basis = TallyBasis::contribution;
  bool normalize = false;
};

inline void to_json(nlohmann::json& j, const ExplainSettings& c) {
  const auto& p = c.perturbation;
  j = {{"n_samples", p.n_samples},
       {"kernel_width", p.kernel_width ? nlohmann::json(*p.kernel_width) : nlohmann::json(nullptr)},
       {"ridge_lambda", p.ridge_lambda},
       {"contribution_threshold", p.contribution_threshold},
       {"tally_basis", std::string(to_string(c.tally_basis))},
       {"normalize", c.normalize}};
}

inline void from_json(const nlohmann::json& j, ExplainSettings& c) {
  auto& p = c.perturbation;
  p.n_samples = j.value("n_samples", p.n_samples);
  if (auto it = j.find("kernel_width"); it != j.end()) {
    p.kernel_width = it->is_null() ? std::nullopt : std::optional<double>(it->get<double>());
  }
  p.ridge_lambda = j.value("ridge_lambda", p.ridge_lambda);
  p.contribution_threshold = j.value("contribution_threshold", p.contribution_threshold);
  if (auto it = j.find("tally_basis"); it != j.end()) {
    c.tally_basis = parse_tally_basis(it->get<std::string>());
  }
  c.normalize = j.value("normalize", c.normalize);
}

struct RunConfig {
  std::uint64_t seed = 0;
  std::size_t k = 5;
  SignalConfig signal;
  TrainConfig train;
  SvmConfig svm;
  ExplainSettings explain;
  SynthConfig synth;

  /// Pushes the shared seed into the per-stage configs.
  void apply_seed() {
    svm.seed = seed;
    explain.perturbation.seed = seed;
    synth.seed = seed;
  }

  void validate() const {
    signal.validate();
    train.validate();
    explain.perturbation.validate();
    synth.validate();
    if (k < 2) throw Error(Errc::invalid_config, "k must be >= 2");
    if (!(svm.lambda > 0.0 && svm.initial_step > 0.0 && svm.epochs > 0)) {
      throw Error(Errc::invalid_config, "invalid SVM settings");
    }
  }
};

inline nlohmann::json to_json(const RunConfig& c) {
  nlohmann::json synth = c.synth;
  synth.erase("seed");
  return {{"seed", c.seed},   {"k", c.k},         {"signal", c.signal}, {"train", c.train},
          {"svm", c.svm},     {"explain", c.explain}, {"synth", synth}};
}

/// Overlays a config document onto `base`. A report that embeds its config
/// under "config" is accepted as well. Unknown top-level keys are rejected.
inline RunConfig overlay_config(RunConfig base, const nlohmann::json& doc) {
  const nlohmann::json& j = doc.contains("config") && doc["config"].is_object() ? doc["config"] : doc;
  if (!j.is_object()) throw Error(Errc::invalid_config, "config must be a JSON object");
  static const std::set<std::string> known{"seed", "k", "signal", "train", "svm", "explain", "synth"};
  for (const auto& [key, value] : j.items()) {
    if (!known.count(key)) throw Error(Errc::invalid_config, "unknown config key '" + key + "'");
  }
  try {
    base.seed = j.value("seed", base.seed);
    base.k = j.value("k", base.k);
    if (j.contains("signal")) from_json(j["signal"], base.signal);
    if (j.contains("train")) from_json(j["train"], base.train);
    if (j.contains("svm")) from_json(j["svm"], base.svm);
    if (j.contains("explain")) from_json(j["explain"], base.explain);
    if (j.contains("synth")) from_json(j["synth"], base.synth);
  } catch (const nlohmann::json::exception& e) {
    throw Error(Errc::invalid_config, e.what());
  }
  return base;
}

}  // namespace gaitxai

#pragma once

// Multi-layer perceptron classifier: ReLU hidden layers, softmax output,
// mean cross-entropy loss, full-batch Adam with early stopping.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <numeric>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "json.hpp"

#include "gaitxai/dataset.hpp"
#include "gaitxai/error.hpp"
#include "gaitxai/linalg.hpp"

namespace gaitxai {

struct TrainConfig {
  double learning_rate = 1e-5;
  std::size_t max_epochs = 1000;
  std::size_t early_stop_patience = 50;
  double holdout_fraction = 0.1;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
  std::size_t batch_size = 0;  // 0 = full batch
  std::vector<std::size_t> hidden_layers = {64, 64};

  void validate() const {
    if (!(learning_rate > 0.0)) throw Error(Errc::invalid_config, "learning_rate must be > 0");
    if (!(holdout_fraction > 0.0 && holdout_fraction < 0.5)) {
      throw Error(Errc::invalid_config, "holdout_fraction must lie in (0, 0.5)");
    }
    if (!(beta1 >= 0.0 && beta1 < 1.0 && beta2 >= 0.0 && beta2 < 1.0 && epsilon > 0.0)) {
      throw Error(Errc::invalid_config, "invalid Adam constants");
    }
    for (auto h : hidden_layers) {
      if (h == 0) throw Error(Errc::invalid_config, "hidden layer width must be > 0");
    }
  }

  bool operator==(const TrainConfig&) const = default;
};

inline void to_json(nlohmann::json& j, const TrainConfig& c) {
  j = {{"learning_rate", c.learning_rate},
       {"max_epochs", c.max_epochs},
       {"early_stop_patience", c.early_stop_patience},
       {"holdout_fraction", c.holdout_fraction},
       {"beta1", c.beta1},
       {"beta2", c.beta2},
       {"epsilon", c.epsilon},
       {"batch_size", c.batch_size},
       {"hidden_layers", c.hidden_layers}};
}

inline void from_json(const nlohmann::json& j, TrainConfig& c) {
  c.learning_rate = j.value("learning_rate", c.learning_rate);
  c.max_epochs = j.value("max_epochs", c.max_epochs);
  c.early_stop_patience = j.value("early_stop_patience", c.early_stop_patience);
  c.holdout_fraction = j.value("holdout_fraction", c.holdout_fraction);
  c.beta1 = j.value("beta1", c.beta1);
  c.beta2 = j.value("beta2", c.beta2);
  c.epsilon = j.value("epsilon", c.epsilon);
  c.batch_size = j.value("batch_size", c.batch_size);
  c.hidden_layers = j.value("hidden_layers", c.hidden_layers);
}

struct TrainingSummary {
  std::size_t epochs_run = 0;
  std::size_t best_epoch = 0;
  double best_validation_loss = std::numeric_limits<double>::quiet_NaN();
  std::size_t validation_rows = 0;
  bool early_stopped = false;
  bool degenerate = false;  // single class present: constant predictor
};

struct MlpModel {
  std::vector<std::size_t> layer_dims;  // input, hidden..., classes
  std::vector<Matrix> weights;          // layer l: dims[l+1] x dims[l]
  std::vector<std::vector<double>> biases;
  Standardizer standardizer;
  std::vector<std::string> class_names;
  std::uint64_t seed = 0;
  TrainConfig train_config;
  TrainingSummary summary;

  std::size_t layer_count() const { return weights.size(); }
  std::size_t input_dim() const { return layer_dims.front(); }
  std::size_t class_count() const { return layer_dims.back(); }

  void check() const {
    if (layer_dims.size() < 2 || weights.size() != layer_dims.size() - 1 ||
        biases.size() != weights.size()) {
      throw Error(Errc::shape_mismatch, "layer count");
    }
    for (std::size_t l = 0; l < weights.size(); ++l) {
      if (weights[l].rows() != layer_dims[l + 1] || weights[l].cols() != layer_dims[l] ||
          biases[l].size() != layer_dims[l + 1]) {
        throw Error(Errc::shape_mismatch, "layer " + std::to_string(l) + " shape");
      }
    }
    if (standardizer.size() != input_dim()) {
      throw Error(Errc::shape_mismatch, "standardizer width");
    }
    if (!class_names.empty() && class_names.size() != class_count()) {
      throw Error(Errc::shape_mismatch, "class_names length");
    }
  }

  /// He-style uniform init, U(-sqrt(6/fan_in), sqrt(6/fan_in)), zero biases.
  /// The standardizer starts as the identity.
  static MlpModel initialize(std::vector<std::size_t> dims, std::uint64_t seed) {
    MlpModel m;
    m.layer_dims = std::move(dims);
    m.seed = seed;
    std::mt19937_64 rng(seed);
    for (std::size_t l = 0; l + 1 < m.layer_dims.size(); ++l) {
      const std::size_t in = m.layer_dims[l];
      const std::size_t out = m.layer_dims[l + 1];
      const double limit = std::sqrt(6.0 / static_cast<double>(in));
      std::uniform_real_distribution<double> dist(-limit, limit);
      Matrix w(out, in);
      for (double& v : w.data()) v = dist(rng);
      m.weights.push_back(std::move(w));
      m.biases.emplace_back(out, 0.0);
    }
    m.standardizer.mean.assign(m.layer_dims.front(), 0.0);
    m.standardizer.std.assign(m.layer_dims.front(), 1.0);
    m.standardizer.raw_std.assign(m.layer_dims.front(), 1.0);
    return m;
  }
};

/// Same shapes as the model parameters.
struct Gradients {
  std::vector<Matrix> weights;
  std::vector<std::vector<double>> biases;

  static Gradients zeros_like(const MlpModel& m) {
    Gradients g;
    for (std::size_t l = 0; l < m.layer_count(); ++l) {
      g.weights.emplace_back(m.weights[l].rows(), m.weights[l].cols(), 0.0);
      g.biases.emplace_back(m.biases[l].size(), 0.0);
    }
    return g;
  }
};

inline std::vector<double> softmax(std::span<const double> logits) {
  const double hi = *std::max_element(logits.begin(), logits.end());
  std::vector<double> p(logits.size());
  double sum = 0.0;
  for (std::size_t i = 0; i < logits.size(); ++i) {
    p[i] = std::exp(logits[i] - hi);
    sum += p[i];
  }
  for (double& v : p) v /= sum;
  return p;
}

namespace detail {

struct ForwardTrace {
  std::vector<std::vector<double>> activations;  // a_0 (input) ... a_L (logits)
};

inline ForwardTrace forward_standardized(const MlpModel& m, std::span<const double> z) {
  if (z.size() != m.input_dim()) throw Error(Errc::shape_mismatch, "input width");
  ForwardTrace tr;
  tr.activations.emplace_back(z.begin(), z.end());
  for (std::size_t l = 0; l < m.layer_count(); ++l) {
    auto next = matvec(m.weights[l], tr.activations.back());
    const bool hidden = l + 1 < m.layer_count();
    for (std::size_t i = 0; i < next.size(); ++i) {
      next[i] += m.biases[l][i];
      if (hidden && next[i] < 0.0) next[i] = 0.0;
    }
    tr.activations.push_back(std::move(next));
  }
  return tr;
}

inline double log_sum_exp(std::span<const double> v) {
  const double hi = *std::max_element(v.begin(), v.end());
  double s = 0.0;
  for (double x : v) s += std::exp(x - hi);
  return hi + std::log(s);
}

}  // namespace detail

/// Pre-softmax outputs for a raw (unstandardized) feature row.
inline std::vector<double> mlp_logits(const MlpModel& m, std::span<const double> x) {
  const auto z = m.standardizer.apply(x);
  return std::move(detail::forward_standardized(m, z).activations.back());
}

/// Class probabilities for a raw feature row.
inline std::vector<double> mlp_forward(const MlpModel& m, std::span<const double> x) {
  for (double v : x) {
    if (!std::isfinite(v)) throw Error(Errc::shape_mismatch, "non-finite input");
  }
  return softmax(mlp_logits(m, x));
}

struct LossAndGradients {
  double loss = 0.0;
  Gradients grads;
};

/// Mean cross-entropy and its gradient over already standardized rows.
inline LossAndGradients backprop_standardized(const MlpModel& m, const Matrix& z,
                                              std::span<const std::size_t> labels,
                                              std::span<const std::size_t> batch) {
  if (batch.empty()) throw Error(Errc::empty_dataset, "empty batch");
  if (labels.size() != z.rows()) throw Error(Errc::shape_mismatch, "labels vs rows");
  LossAndGradients out;
  out.grads = Gradients::zeros_like(m);
  const double inv_b = 1.0 / static_cast<double>(batch.size());
  const std::size_t layers = m.layer_count();

  for (std::size_t idx : batch) {
    const std::size_t y = labels[idx];
    if (y >= m.class_count()) throw Error(Errc::shape_mismatch, "label out of range");
    const auto tr = detail::forward_standardized(m, z.row(idx));
    const auto& logits = tr.activations.back();
    out.loss += (detail::log_sum_exp(logits) - logits[y]) * inv_b;

    std::vector<double> delta = softmax(logits);
    delta[y] -= 1.0;
    for (double& d : delta) d *= inv_b;

    for (std::size_t l = layers; l-- > 0;) {
      const auto& input = tr.activations[l];
      auto& gw = out.grads.weights[l];
      auto& gb = out.grads.biases[l];
      for (std::size_t r = 0; r < delta.size(); ++r) {
        gb[r] += delta[r];
        auto grow = gw.row(r);
        for (std::size_t c = 0; c < input.size(); ++c) grow[c] += delta[r] * input[c];
      }
      if (l == 0) break;
      std::vector<double> prev(input.size(), 0.0);
      const auto& w = m.weights[l];
      for (std::size_t r = 0; r < delta.size(); ++r) {
        const auto wrow = w.row(r);
        for (std::size_t c = 0; c < prev.size(); ++c) prev[c] += wrow[c] * delta[r];
      }
      // input here is the ReLU output of layer l-1; its derivative is 0 where
      // the output is 0.
      for (std::size_t c = 0; c < prev.size(); ++c) {
        if (!(input[c] > 0.0)) prev[c] = 0.0;
      }
      delta = std::move(prev);
    }
  }
  return out;
}

/// Mean cross-entropy and gradients for raw feature rows.
inline LossAndGradients mlp_backprop(const MlpModel& m, const Matrix& rows,
                                     std::span<const std::size_t> labels) {
  if (rows.rows() == 0) throw Error(Errc::empty_dataset, "empty batch");
  if (rows.cols() != m.input_dim()) throw Error(Errc::shape_mismatch, "input width");
  const Matrix z = m.standardizer.apply(rows);
  std::vector<std::size_t> all(rows.rows());
  std::iota(all.begin(), all.end(), std::size_t{0});
  return backprop_standardized(m, z, labels, all);
}

inline double mean_cross_entropy(const MlpModel& m, const Matrix& z,
                                 std::span<const std::size_t> labels,
                                 std::span<const std::size_t> rows) {
  double loss = 0.0;
  for (std::size_t idx : rows) {
    const auto tr = detail::forward_standardized(m, z.row(idx));
    const auto& logits = tr.activations.back();
    loss += detail::log_sum_exp(logits) - logits[labels[idx]];
  }
  return loss / static_cast<double>(rows.size());
}

class AdamOptimizer {
 public:
  AdamOptimizer(const MlpModel& m, const TrainConfig& cfg)
      : cfg_(cfg), m_(Gradients::zeros_like(m)), v_(Gradients::zeros_like(m)) {}

  void step(MlpModel& model, const Gradients& g) {
    ++t_;
    const double c1 = 1.0 - std::pow(cfg_.beta1, static_cast<double>(t_));
    const double c2 = 1.0 - std::pow(cfg_.beta2, static_cast<double>(t_));
    auto update = [&](std::vector<double>& p, const std::vector<double>& grad,
                      std::vector<double>& m1, std::vector<double>& m2) {
      for (std::size_t i = 0; i < p.size(); ++i) {
        m1[i] = cfg_.beta1 * m1[i] + (1.0 - cfg_.beta1) * grad[i];
        m2[i] = cfg_.beta2 * m2[i] + (1.0 - cfg_.beta2) * grad[i] * grad[i];
        p[i] -= cfg_.learning_rate * (m1[i] / c1) / (std::sqrt(m2[i] / c2) + cfg_.epsilon);
      }
    };
    for (std::size_t l = 0; l < model.layer_count(); ++l) {
      update(model.weights[l].data(), g.weights[l].data(), m_.weights[l].data(),
             v_.weights[l].data());
      update(model.biases[l], g.biases[l], m_.biases[l], v_.biases[l]);
    }
  }

  std::size_t steps() const { return t_; }

 private:
  TrainConfig cfg_;
  Gradients m_;
  Gradients v_;
  std::size_t t_ = 0;
};

/// Tracks the best monitored loss; asks to stop once `patience` epochs pass
/// without a strict improvement.
class EarlyStopping {
 public:
  explicit EarlyStopping(std::size_t patience) : patience_(patience) {}

  /// Returns true when `loss` is a new best.
  bool observe(std::size_t epoch, double loss) {
    if (loss < best_loss_) {
      best_loss_ = loss;
      best_epoch_ = epoch;
      return true;
    }
    return false;
  }

  bool should_stop(std::size_t epoch) const { return epoch - best_epoch_ >= patience_; }
  std::size_t best_epoch() const { return best_epoch_; }
  double best_loss() const { return best_loss_; }

 private:
  std::size_t patience_;
  std::size_t best_epoch_ = 0;
  double best_loss_ = std::numeric_limits<double>::infinity();
};

/// Rows held out for early stopping: per class, round(fraction * count) rows
/// drawn at random, never emptying a class.
inline std::vector<std::size_t> stratified_holdout(const std::vector<std::size_t>& labels,
                                                   std::size_t class_count, double fraction,
                                                   std::mt19937_64& rng) {
  std::vector<std::size_t> held;
  for (std::size_t c = 0; c < class_count; ++c) {
    std::vector<std::size_t> members;
    for (std::size_t i = 0; i < labels.size(); ++i) {
      if (labels[i] == c) members.push_back(i);
    }
    if (members.size() < 2) continue;
    std::shuffle(members.begin(), members.end(), rng);
    auto take = static_cast<std::size_t>(std::round(fraction * static_cast<double>(members.size())));
    take = std::min(take, members.size() - 1);
    held.insert(held.end(), members.begin(), members.begin() + static_cast<std::ptrdiff_t>(take));
  }
  std::sort(held.begin(), held.end());
  return held;
}

inline MlpModel train_mlp(const Dataset& data, const TrainConfig& cfg, std::uint64_t seed) {
  cfg.validate();
  if (data.size() == 0) throw Error(Errc::empty_dataset, "no training rows");
  data.validate();
  const std::size_t classes = data.class_names.size();

  std::vector<std::size_t> dims{data.feature_count()};
  dims.insert(dims.end(), cfg.hidden_layers.begin(), cfg.hidden_layers.end());
  dims.push_back(classes);
  MlpModel model = MlpModel::initialize(dims, seed);
  model.class_names = data.class_names;
  model.train_config = cfg;
  model.standardizer = Standardizer::fit(data.rows);

  const auto counts = data.class_counts();
  const auto present = std::count_if(counts.begin(), counts.end(), [](auto n) { return n > 0; });
  if (present < 2) {
    // Constant predictor for the only class seen.
    const auto only = static_cast<std::size_t>(
        std::find_if(counts.begin(), counts.end(), [](auto n) { return n > 0; }) - counts.begin());
    for (double& w : model.weights.back().data()) w = 0.0;
    std::fill(model.biases.back().begin(), model.biases.back().end(), 0.0);
    model.biases.back()[only] = 50.0;
    model.summary.degenerate = true;
    return model;
  }

  std::mt19937_64 rng(seed ^ 0x9e3779b97f4a7c15ULL);
  const auto held = stratified_holdout(data.labels, classes, cfg.holdout_fraction, rng);
  std::vector<std::size_t> fit_rows;
  for (std::size_t i = 0, h = 0; i < data.size(); ++i) {
    if (h < held.size() && held[h] == i) {
      ++h;
      continue;
    }
    fit_rows.push_back(i);
  }

  const Matrix z = model.standardizer.apply(data.rows);
  AdamOptimizer adam(model, cfg);
  EarlyStopping monitor(cfg.early_stop_patience);
  MlpModel best = model;
  if (!held.empty()) monitor.observe(0, mean_cross_entropy(model, z, data.labels, held));

  const std::size_t batch = cfg.batch_size == 0 ? fit_rows.size()
                                                : std::min(cfg.batch_size, fit_rows.size());
  std::vector<std::size_t> order = fit_rows;
  std::size_t epoch = 0;
  for (epoch = 1; epoch <= cfg.max_epochs; ++epoch) {
    if (batch < order.size()) std::shuffle(order.begin(), order.end(), rng);
    for (std::size_t start = 0; start < order.size(); start += batch) {
      const std::size_t len = std::min(batch, order.size() - start);
      const auto step = backprop_standardized(
          model, z, data.labels, std::span<const std::size_t>(order).subspan(start, len));
      adam.step(model, step.grads);
    }
    if (held.empty()) continue;
    if (monitor.observe(epoch, mean_cross_entropy(model, z, data.labels, held))) {
      best.weights = model.weights;
      best.biases = model.biases;
    } else if (monitor.should_stop(epoch)) {
      model.summary.early_stopped = true;
      break;
    }
  }
  model.summary.epochs_run = std::min(epoch, cfg.max_epochs);
  model.summary.validation_rows = held.size();
  if (!held.empty()) {
    model.weights = std::move(best.weights);
    model.biases = std::move(best.biases);
    model.summary.best_epoch = monitor.best_epoch();
    model.summary.best_validation_loss = monitor.best_loss();
  } else {
    model.summary.best_epoch = model.summary.epochs_run;
  }
  return model;
}

struct Prediction {
  std::size_t class_index = 0;
  std::string label;
  double confidence = 0.0;
};

/// Argmax with ties going to the lower class index.
inline Prediction prediction_from(std::span<const double> probs,
                                  const std::vector<std::string>& class_names) {
  std::size_t best = 0;
  for (std::size_t i = 1; i < probs.size(); ++i) {
    if (probs[i] > probs[best]) best = i;
  }
  Prediction p;
  p.class_index = best;
  p.confidence = probs[best];
  p.label = best < class_names.size() ? class_names[best] : std::to_string(best);
  return p;
}

inline Prediction predict(const MlpModel& m, std::span<const double> x) {
  const auto probs = mlp_forward(m, x);
  return prediction_from(probs, m.class_names);
}

/// Probability interface consumed by the explainer.
inline std::vector<double> predict_proba(const MlpModel& m, std::span<const double> x) {
  return mlp_forward(m, x);
}

// Model file. Weight matrices are flat row-major arrays; shapes follow from
// layer_dims.
inline nlohmann::json to_json(const MlpModel& m) {
  nlohmann::json weights = nlohmann::json::array();
  for (const auto& w : m.weights) weights.push_back(w.data());
  nlohmann::json summary = {{"epochs_run", m.summary.epochs_run},
                            {"best_epoch", m.summary.best_epoch},
                            {"validation_rows", m.summary.validation_rows},
                            {"early_stopped", m.summary.early_stopped},
                            {"degenerate", m.summary.degenerate}};
  if (std::isfinite(m.summary.best_validation_loss)) {
    summary["best_validation_loss"] = m.summary.best_validation_loss;
  }
  return {{"layer_dims", m.layer_dims},
          {"weights", std::move(weights)},
          {"biases", m.biases},
          {"standardizer",
           {{"mean", m.standardizer.mean},
            {"std", m.standardizer.std},
            {"raw_std", m.standardizer.raw_std}}},
          {"class_names", m.class_names},
          {"seed", m.seed},
          {"train_config", m.train_config},
          {"training", std::move(summary)}};
}

inline MlpModel mlp_from_json(const nlohmann::json& j) {
  MlpModel m;
  try {
    m.layer_dims = j.at("layer_dims").get<std::vector<std::size_t>>();
    const auto flat = j.at("weights").get<std::vector<std::vector<double>>>();
    m.biases = j.at("biases").get<std::vector<std::vector<double>>>();
    if (m.layer_dims.size() < 2 || flat.size() + 1 != m.layer_dims.size()) {
      throw Error(Errc::shape_mismatch, "weights do not match layer_dims");
    }
    for (std::size_t l = 0; l < flat.size(); ++l) {
      Matrix w(m.layer_dims[l + 1], m.layer_dims[l]);
      if (flat[l].size() != w.size()) throw Error(Errc::shape_mismatch, "weight matrix size");
      w.data() = flat[l];
      m.weights.push_back(std::move(w));
    }
    const auto& s = j.at("standardizer");
    m.standardizer.mean = s.at("mean").get<std::vector<double>>();
    m.standardizer.std = s.at("std").get<std::vector<double>>();
    m.standardizer.raw_std = s.contains("raw_std") ? s["raw_std"].get<std::vector<double>>()
                                                   : m.standardizer.std;
    m.class_names = j.at("class_names").get<std::vector<std::string>>();
    m.seed = j.value("seed", std::uint64_t{0});
    if (j.contains("train_config")) m.train_config = j["train_config"].get<TrainConfig>();
    if (j.contains("training")) {
      const auto& t = j["training"];
      m.summary.epochs_run = t.value("epochs_run", std::size_t{0});
      m.summary.best_epoch = t.value("best_epoch", std::size_t{0});
      m.summary.validation_rows = t.value("validation_rows", std::size_t{0});
      m.summary.early_stopped = t.value("early_stopped", false);
      m.summary.degenerate = t.value("degenerate", false);
      m.summary.best_validation_loss =
          t.value("best_validation_loss", std::numeric_limits<double>::quiet_NaN());
    }
  } catch (const nlohmann::json::exception& e) {
    throw Error(Errc::malformed_document, e.what());
  }
  m.check();
  return m;
}

}  // namespace gaitxai

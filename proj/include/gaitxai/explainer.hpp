#pragma once

// Local surrogate explanations: perturb an instance, weight the perturbations
// by proximity, and fit a weighted ridge regression of the model's
// predicted-class probability. The coefficients are the feature importances.

#include <algorithm>
#include <cmath>
#include <concepts>
#include <cstdint>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "gaitxai/dataset.hpp"
#include "gaitxai/error.hpp"
#include "gaitxai/linalg.hpp"
#include "gaitxai/mlp.hpp"

namespace gaitxai {

template <class M>
concept ProbabilisticClassifier = requires(const M& m, std::span<const double> x) {
  { predict_proba(m, x) } -> std::convertible_to<std::vector<double>>;
  { m.class_names } -> std::convertible_to<std::vector<std::string>>;
};

struct PerturbationConfig {
  std::size_t n_samples = 1000;
  std::optional<double> kernel_width;  // unset: 0.75 * sqrt(feature count)
  double ridge_lambda = 1e-3;
  double contribution_threshold = 0.01;
  std::uint64_t seed = 0;

  double kernel_width_for(std::size_t features) const {
    return kernel_width.value_or(0.75 * std::sqrt(static_cast<double>(features)));
  }

  void validate() const {
    if (n_samples < 100) throw Error(Errc::invalid_config, "n_samples must be >= 100");
    if (kernel_width && !(*kernel_width > 0.0)) {
      throw Error(Errc::invalid_config, "kernel_width must be > 0");
    }
    if (!(ridge_lambda >= 0.0)) throw Error(Errc::invalid_config, "ridge_lambda must be >= 0");
  }
};

/// Training-set statistics the explainer perturbs with. `scale` standardizes
/// (clamped to 1 for constant features); `spread` is the perturbation std and
/// stays 0 for constant features so they are never perturbed.
struct TrainStats {
  std::vector<double> mean;
  std::vector<double> scale;
  std::vector<double> spread;

  static TrainStats from(const Standardizer& s) { return {s.mean, s.std, s.raw_std}; }
  std::size_t size() const { return mean.size(); }
};

struct Explanation {
  std::string instance_id;
  Prediction predicted;
  std::vector<double> importances;
  // importance x the instance's standardized offset from the training mean:
  // positive when this feature's value pushes toward the predicted class.
  std::vector<double> contributions;
  double intercept = 0.0;
  std::optional<double> fidelity_r2;  // unset when the model output is constant
  bool degenerate = false;
};

template <ProbabilisticClassifier Model>
Explanation explain_instance(const Model& model, std::span<const double> x,
                             const TrainStats& stats, const PerturbationConfig& cfg,
                             std::string instance_id = {}) {
  cfg.validate();
  const std::size_t d = x.size();
  if (stats.size() != d || stats.scale.size() != d || stats.spread.size() != d) {
    throw Error(Errc::shape_mismatch, "train stats width");
  }
  Explanation out;
  out.instance_id = std::move(instance_id);
  {
    const std::vector<double> probs = predict_proba(model, x);
    out.predicted = prediction_from(probs, model.class_names);
  }
  const std::size_t target = out.predicted.class_index;
  const double width = cfg.kernel_width_for(d);

  std::mt19937_64 rng(cfg.seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  Matrix features(cfg.n_samples, d);
  std::vector<double> y(cfg.n_samples);
  std::vector<double> w(cfg.n_samples);
  std::vector<double> perturbed(d);
  for (std::size_t i = 0; i < cfg.n_samples; ++i) {
    double dist2 = 0.0;
    for (std::size_t j = 0; j < d; ++j) {
      perturbed[j] = x[j] + stats.spread[j] * normal(rng);
      const double step = (perturbed[j] - x[j]) / stats.scale[j];
      dist2 += step * step;
      features(i, j) = (perturbed[j] - stats.mean[j]) / stats.scale[j];
    }
    w[i] = std::exp(-dist2 / (width * width));
    const std::vector<double> probs = predict_proba(model, std::span<const double>(perturbed));
    y[i] = probs.at(target);
  }

  double wsum = 0.0;
  double ybar = 0.0;
  std::vector<double> zbar(d, 0.0);
  for (std::size_t i = 0; i < cfg.n_samples; ++i) {
    wsum += w[i];
    ybar += w[i] * y[i];
    for (std::size_t j = 0; j < d; ++j) zbar[j] += w[i] * features(i, j);
  }
  ybar /= wsum;
  for (double& v : zbar) v /= wsum;

  double total_ss = 0.0;
  for (std::size_t i = 0; i < cfg.n_samples; ++i) total_ss += w[i] * (y[i] - ybar) * (y[i] - ybar);
  out.importances.assign(d, 0.0);
  out.contributions.assign(d, 0.0);
  out.intercept = ybar;
  if (!(total_ss > 1e-24 * wsum)) {
    out.degenerate = true;
    return out;
  }

  // Constant (never perturbed) features are left out of the solve.
  std::vector<std::size_t> active;
  for (std::size_t j = 0; j < d; ++j) {
    if (stats.spread[j] > 0.0) active.push_back(j);
  }
  const std::size_t k = active.size();
  Matrix normal_eq(k, k, 0.0);
  std::vector<double> rhs(k, 0.0);
  for (std::size_t i = 0; i < cfg.n_samples; ++i) {
    const double dy = y[i] - ybar;
    for (std::size_t a = 0; a < k; ++a) {
      const double za = features(i, active[a]) - zbar[active[a]];
      rhs[a] += w[i] * za * dy;
      for (std::size_t b = 0; b <= a; ++b) {
        normal_eq(a, b) += w[i] * za * (features(i, active[b]) - zbar[active[b]]);
      }
    }
  }
  for (std::size_t a = 0; a < k; ++a) {
    for (std::size_t b = 0; b < a; ++b) normal_eq(b, a) = normal_eq(a, b);
    normal_eq(a, a) += cfg.ridge_lambda;
  }
  std::vector<double> beta;
  if (k > 0 && !cholesky_solve(normal_eq, rhs, beta) && !lu_solve(normal_eq, rhs, beta)) {
    throw Error(Errc::shape_mismatch, "surrogate normal equations are singular");
  }
  for (std::size_t a = 0; a < k; ++a) out.importances[active[a]] = beta[a];
  for (std::size_t j = 0; j < d; ++j) {
    out.contributions[j] = out.importances[j] * (x[j] - stats.mean[j]) / stats.scale[j];
  }

  out.intercept = ybar;
  for (std::size_t j = 0; j < d; ++j) out.intercept -= out.importances[j] * zbar[j];
  double resid_ss = 0.0;
  for (std::size_t i = 0; i < cfg.n_samples; ++i) {
    double fit = out.intercept;
    for (std::size_t j = 0; j < d; ++j) fit += out.importances[j] * features(i, j);
    resid_ss += w[i] * (y[i] - fit) * (y[i] - fit);
  }
  out.fidelity_r2 = 1.0 - resid_ss / total_ss;
  return out;
}

/// Importances divided by the largest magnitude (all zero stays all zero).
inline std::vector<double> max_normalized(std::span<const double> importances) {
  double hi = 0.0;
  for (double v : importances) hi = std::max(hi, std::abs(v));
  std::vector<double> out(importances.begin(), importances.end());
  if (hi > 0.0) {
    for (double& v : out) v /= hi;
  }
  return out;
}

struct ContributionTally {
  std::vector<std::size_t> positive;
  std::vector<std::size_t> negative;
  std::size_t correct = 0;
  std::size_t excluded = 0;  // misclassified instances
};

enum class TallyBasis {
  contribution,  // Explanation::contributions
  coefficient,   // Explanation::importances
};

inline std::string_view to_string(TallyBasis b) {
  return b == TallyBasis::contribution ? "contribution" : "coefficient";
}

inline TallyBasis parse_tally_basis(std::string_view s) {
  if (s == "contribution") return TallyBasis::contribution;
  if (s == "coefficient") return TallyBasis::coefficient;
  throw Error(Errc::invalid_config, "unknown tally basis '" + std::string(s) + "'");
}

/// Over correctly classified instances only, a feature counts as positive when
/// its score exceeds the threshold and negative otherwise.
inline ContributionTally tally_contributions(std::span<const Explanation> expls,
                                             std::span<const std::string> truth_labels,
                                             double threshold, std::size_t feature_count,
                                             TallyBasis basis = TallyBasis::contribution) {
  if (expls.size() != truth_labels.size()) {
    throw Error(Errc::shape_mismatch, "one truth label per explanation is required");
  }
  ContributionTally t;
  t.positive.assign(feature_count, 0);
  t.negative.assign(feature_count, 0);
  for (std::size_t i = 0; i < expls.size(); ++i) {
    if (expls[i].predicted.label != truth_labels[i]) {
      ++t.excluded;
      continue;
    }
    const auto& scores = basis == TallyBasis::contribution ? expls[i].contributions
                                                           : expls[i].importances;
    if (scores.size() != feature_count) throw Error(Errc::shape_mismatch, "score count");
    ++t.correct;
    for (std::size_t j = 0; j < feature_count; ++j) {
      if (scores[j] > threshold) {
        ++t.positive[j];
      } else {
        ++t.negative[j];
      }
    }
  }
  return t;
}

}  // namespace gaitxai

#pragma once

// Linear SVM baseline: L2-regularized hinge loss minimized by stochastic
// subgradient descent on standardized features.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "gaitxai/dataset.hpp"
#include "gaitxai/error.hpp"
#include "gaitxai/mlp.hpp"

namespace gaitxai {

struct SvmConfig {
  double lambda = 1e-2;
  std::size_t epochs = 200;
  double initial_step = 0.5;
  std::uint64_t seed = 0;
};

struct SvmModel {
  std::vector<double> weights;
  double bias = 0.0;
  Standardizer standardizer;
  std::vector<std::string> class_names;  // exactly two; index 1 is the positive side

  double decision(std::span<const double> x) const {
    const auto z = standardizer.apply(x);
    double s = bias;
    for (std::size_t i = 0; i < z.size(); ++i) s += weights[i] * z[i];
    return s;
  }
};

inline SvmModel train_linear_svm(const Dataset& data, const SvmConfig& cfg = {}) {
  data.validate();
  const auto counts = data.class_counts();
  if (data.class_names.size() != 2 || counts[0] == 0 || counts[1] == 0) {
    throw Error(Errc::not_binary, "linear SVM needs rows from exactly two classes");
  }
  SvmModel model;
  model.class_names = data.class_names;
  model.standardizer = Standardizer::fit(data.rows);
  const Matrix z = model.standardizer.apply(data.rows);
  const std::size_t d = data.feature_count();
  std::vector<double> w(d, 0.0);
  double b = 0.0;
  std::vector<double> avg_w(d, 0.0);
  double avg_b = 0.0;
  std::size_t averaged = 0;

  std::vector<std::size_t> order(data.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::mt19937_64 rng(cfg.seed);
  std::size_t t = 0;
  for (std::size_t epoch = 0; epoch < cfg.epochs; ++epoch) {
    std::shuffle(order.begin(), order.end(), rng);
    for (std::size_t idx : order) {
      ++t;
      const double eta = cfg.initial_step / (1.0 + cfg.initial_step * cfg.lambda * static_cast<double>(t));
      const double y = data.labels[idx] == 1 ? 1.0 : -1.0;
      const auto row = z.row(idx);
      double margin = b;
      for (std::size_t i = 0; i < d; ++i) margin += w[i] * row[i];
      margin *= y;
      for (std::size_t i = 0; i < d; ++i) w[i] *= 1.0 - eta * cfg.lambda;
      if (margin < 1.0) {
        for (std::size_t i = 0; i < d; ++i) w[i] += eta * y * row[i];
        b += eta * y;
      }
    }
    // Iterate averaging over the second half of training.
    if (2 * epoch >= cfg.epochs) {
      ++averaged;
      for (std::size_t i = 0; i < d; ++i) avg_w[i] += (w[i] - avg_w[i]) / static_cast<double>(averaged);
      avg_b += (b - avg_b) / static_cast<double>(averaged);
    }
  }
  model.weights = averaged ? avg_w : w;
  model.bias = averaged ? avg_b : b;
  return model;
}

/// Positive decision value selects class_names[1]; zero or below selects [0].
inline Prediction predict(const SvmModel& m, std::span<const double> x) {
  Prediction p;
  p.class_index = m.decision(x) > 0.0 ? 1 : 0;
  p.label = m.class_names[p.class_index];
  p.confidence = 1.0;
  return p;
}

}  // namespace gaitxai

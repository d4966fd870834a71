#pragma once

// Synthetic two-class gait corpora shared by the integration and acceptance
// tests.

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "gaitxai/gaitxai.hpp"

namespace gaitxai::testing {

enum class Separation {
  cadence_and_nol_support,  // classes differ in NOL single support (hence cadence)
  cadence_only,             // both supports scale together; only cadence separates
};

/// Subjects x classes traces, each walked for `cycles` gait cycles through the
/// full keypoint -> feature pipeline. Every subject walks once per class.
inline std::vector<FeatureRow> synthetic_corpus(std::uint64_t seed, std::size_t subjects = 6,
                                                std::size_t cycles = 3,
                                                Separation sep = Separation::cadence_and_nol_support) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<FeatureRow> rows;
  for (std::size_t s = 0; s < subjects; ++s) {
    const double height = 1.55 + 0.3 * u(rng);
    const double step = 0.26 + 0.08 * u(rng);
    const Side ol_side = u(rng) < 0.5 ? Side::left : Side::right;
    const double base_support = 0.46 + 0.06 * u(rng);
    for (GaitLabel label : {GaitLabel::kafo1, GaitLabel::kafo2}) {
      SynthConfig c;
      c.subject_id = "S" + std::to_string(s + 1);
      c.label = label;
      c.height_m = height;
      c.orthotic_side = ol_side;
      c.n_cycles = cycles;
      c.seed = rng();
      c.keypoint_noise_std = 0.003;
      c.camera_jitter_amp = 0.05;
      c.facing = u(rng) < 0.5 ? 1 : -1;
      const bool locked = label == GaitLabel::kafo1;
      double ol_support = base_support + 0.02 * (u(rng) - 0.5);
      double nol_support = base_support + 0.02 * (u(rng) - 0.5);
      if (sep == Separation::cadence_and_nol_support) {
        nol_support += locked ? 0.16 : 0.0;
      } else {
        const double scale = locked ? 1.18 : 1.0;
        ol_support *= scale;
        nol_support *= scale;
      }
      const double ol_step = step * (0.9 + 0.1 * u(rng));
      const double nol_step = step * (0.9 + 0.1 * u(rng));
      const bool left_is_ol = ol_side == Side::left;
      c.step_period_left_s = left_is_ol ? ol_support : nol_support;
      c.step_period_right_s = left_is_ol ? nol_support : ol_support;
      c.step_len_left = left_is_ol ? ol_step : nol_step;
      c.step_len_right = left_is_ol ? nol_step : ol_step;
      const auto walk = generate_walk(c);
      auto tf = extract_trace_features(walk.sequence, SignalConfig{}, c.subject_id,
                                       std::string(to_string(label)) + "-");
      for (auto& r : tf.rows) rows.push_back(std::move(r));
    }
  }
  return rows;
}

/// Feature-level corpus in which cadence alone separates the classes; every
/// other feature is drawn from the same distribution for both.
inline std::vector<FeatureRow> cadence_only_rows(std::uint64_t seed, std::size_t subjects = 6,
                                                 std::size_t per_class = 5) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> n(0.0, 1.0);
  std::vector<FeatureRow> rows;
  for (std::size_t s = 0; s < subjects; ++s) {
    for (GaitLabel label : {GaitLabel::kafo1, GaitLabel::kafo2}) {
      for (std::size_t k = 0; k < per_class; ++k) {
        const double cadence = label == GaitLabel::kafo1 ? 80.0 : 110.0;
        const std::array<double, kFeatureCount> v{0.3 + 0.03 * n(rng), 0.3 + 0.03 * n(rng),
                                                  0.6 + 0.05 * n(rng), 0.5 + 0.04 * n(rng),
                                                  0.5 + 0.04 * n(rng), cadence + 5.0 * n(rng),
                                                  0.8 + 0.08 * n(rng)};
        FeatureRow r;
        r.subject_id = "S" + std::to_string(s + 1);
        r.cycle_id = std::string(to_string(label)) + "-" + std::to_string(k);
        r.features = FeatureVector::from_array(v);
        r.label = std::string(to_string(label));
        rows.push_back(std::move(r));
      }
    }
  }
  return rows;
}

}  // namespace gaitxai::testing

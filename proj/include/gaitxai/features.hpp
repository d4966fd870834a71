#pragma once

// The seven spatio-temporal gait features computed from one gait cycle.

#include <array>
#include <cmath>
#include <span>
#include <string_view>
#include <utility>

#include "gaitxai/error.hpp"
#include "gaitxai/signal.hpp"

namespace gaitxai {

inline constexpr std::size_t kFeatureCount = 7;

/// Column names, in FeatureVector order (feature CSV header).
inline constexpr std::array<std::string_view, kFeatureCount> kFeatureNames = {
    "step_len_ol_m", "step_len_nol_m", "stride_len_m", "ss_ol_s",
    "ss_nol_s",      "cadence_spm",    "speed_mps"};

/// Short keys used in explanation and statistics reports.
inline constexpr std::array<std::string_view, kFeatureCount> kFeatureKeys = {
    "step_length_ol", "step_length_nol", "stride_length", "single_support_ol",
    "single_support_nol", "cadence", "speed"};

inline constexpr std::array<std::string_view, kFeatureCount> kFeatureLabels = {
    "Step Length (OL)",
    "Step Length (NOL)",
    "Average Stride Length",
    "Duration of Single Support (OL)",
    "Duration of Single Support (NOL)",
    "Cadence",
    "Speed"};

struct FeatureVector {
  double step_len_ol_m = 0.0;
  double step_len_nol_m = 0.0;
  double stride_len_m = 0.0;
  double ss_ol_s = 0.0;
  double ss_nol_s = 0.0;
  double cadence_spm = 0.0;
  double speed_mps = 0.0;

  std::array<double, kFeatureCount> to_array() const {
    return {step_len_ol_m, step_len_nol_m, stride_len_m, ss_ol_s,
            ss_nol_s,      cadence_spm,    speed_mps};
  }

  static FeatureVector from_array(std::span<const double> v) {
    if (v.size() != kFeatureCount) throw Error(Errc::shape_mismatch, "feature count");
    return {v[0], v[1], v[2], v[3], v[4], v[5], v[6]};
  }

  bool operator==(const FeatureVector&) const = default;
};

struct StepLengths {
  double ol_m = 0.0;
  double nol_m = 0.0;
};

/// Step length = height * normalized maximum, averaged per role within the
/// cycle (a cycle holds two maxima of one role and one of the other).
inline StepLengths step_lengths(const GaitCycle& cycle, double height_m) {
  double sum[2] = {0.0, 0.0};
  int count[2] = {0, 0};
  for (const auto& m : cycle.maxima) {
    const int r = m.role == Role::ol ? 0 : 1;
    sum[r] += height_m * m.value;
    ++count[r];
  }
  return {count[0] ? sum[0] / count[0] : 0.0, count[1] ? sum[1] / count[1] : 0.0};
}

/// Mean of the two strides (s1 + s2) and (s2 + s3).
inline double avg_stride_length(const GaitCycle& cycle, double height_m) {
  const double s1 = height_m * cycle.maxima[0].value;
  const double s2 = height_m * cycle.maxima[1].value;
  const double s3 = height_m * cycle.maxima[2].value;
  return ((s1 + s2) + (s2 + s3)) / 2.0;
}

struct SingleSupport {
  double ol_s = 0.0;
  double nol_s = 0.0;
};

/// The interval following a maximum is single support of the leg that struck
/// at that maximum; frames convert to seconds via 1 / frame_rate.
inline SingleSupport single_support(const GaitCycle& cycle, double frame_rate_hz) {
  const auto& m = cycle.maxima;
  if (!(m[0].frame < m[1].frame && m[1].frame < m[2].frame)) {
    throw Error(Errc::degenerate_cycle, "maxima frames must be strictly increasing");
  }
  SingleSupport out;
  auto attribute = [&](const LabeledPeak& from, const LabeledPeak& to) {
    const double seconds = (1.0 / frame_rate_hz) * static_cast<double>(to.frame - from.frame);
    (from.role == Role::ol ? out.ol_s : out.nol_s) = seconds;
  };
  attribute(m[0], m[1]);
  attribute(m[1], m[2]);
  return out;
}

namespace detail {
inline double cycle_span_frames(const GaitCycle& cycle) {
  const auto f1 = cycle.maxima[0].frame;
  const auto f3 = cycle.maxima[2].frame;
  if (f3 <= f1) throw Error(Errc::degenerate_cycle, "frame_3 must exceed frame_1");
  return static_cast<double>(f3 - f1);
}
}  // namespace detail

/// speed = height * frame_rate * (m1 + m2 + m3) / (f3 - f1)
inline double gait_speed(const GaitCycle& cycle, double height_m, double frame_rate_hz) {
  const double span = detail::cycle_span_frames(cycle);
  const double sum = cycle.maxima[0].value + cycle.maxima[1].value + cycle.maxima[2].value;
  return height_m * frame_rate_hz * sum / span;
}

/// cadence = 3 * 60 * frame_rate / (f3 - f1)
inline double gait_cadence(const GaitCycle& cycle, double frame_rate_hz) {
  const double span = detail::cycle_span_frames(cycle);
  return 3.0 * 60.0 * frame_rate_hz / span;
}

inline FeatureVector feature_vector(const GaitCycle& cycle, const SequenceMeta& meta) {
  const auto steps = step_lengths(cycle, meta.height_m);
  const auto support = single_support(cycle, meta.frame_rate_hz);
  FeatureVector fv;
  fv.step_len_ol_m = steps.ol_m;
  fv.step_len_nol_m = steps.nol_m;
  fv.stride_len_m = avg_stride_length(cycle, meta.height_m);
  fv.ss_ol_s = support.ol_s;
  fv.ss_nol_s = support.nol_s;
  fv.cadence_spm = gait_cadence(cycle, meta.frame_rate_hz);
  fv.speed_mps = gait_speed(cycle, meta.height_m, meta.frame_rate_hz);
  for (double v : fv.to_array()) {
    if (!std::isfinite(v) || v < 0.0) {
      throw Error(Errc::degenerate_cycle, "non-finite or negative feature");
    }
  }
  return fv;
}

}  // namespace gaitxai

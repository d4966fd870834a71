#pragma once

// Synthetic walker: keypoint traces with analytically known heel strikes,
// step amplitudes and gait features. Used as ground truth in tests.
//
// Waveform. Let s(t) = facing * (left_heel_x - right_heel_x). Heel strikes
// alternate left, right, left, ... at integer frames; the interval after a
// left strike lasts step_period_left (left single support), the one after a
// right strike step_period_right. A phase phi(t) advances by pi per interval,
// with rate omega + c * sin^2(pi * tau) inside each interval (tau in [0,1]),
// so the rate equals the common omega = 2 pi / cycle_frames at every strike
// and the peaks stay locally symmetric. Then
//
//   s(t) = A(phi) * (cos phi - a cos 3phi) / (1 - a),   a = 1/18,
//
// a flattened (square-ish) odd-harmonic wave whose extrema sit exactly at
// phi = k pi, i.e. at the strikes, with |s| = step amplitude there. A switches
// between the left and right step amplitude at the zero crossings.
//
// Coordinates are snapped to a 2^-32 grid before camera jitter is added, so a
// common-mode offset cancels exactly in left - right.

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>
#include <string>
#include <vector>

#include "json.hpp"

#include "gaitxai/error.hpp"
#include "gaitxai/features.hpp"
#include "gaitxai/keypoints.hpp"

namespace gaitxai {

struct SynthConfig {
  double step_len_left = 0.32;   // normalized units
  double step_len_right = 0.30;
  double step_period_left_s = 0.5;
  double step_period_right_s = 0.5;
  double frame_rate_hz = 30.0;
  std::size_t n_cycles = 3;
  int facing = +1;  // +1 walks towards +x, -1 towards -x
  double keypoint_noise_std = 0.0;
  double camera_jitter_amp = 0.0;
  double camera_jitter_period_s = 1.7;
  std::uint64_t seed = 0;
  double height_m = 1.7;
  Side orthotic_side = Side::left;
  std::string subject_id = "synthetic";
  std::optional<GaitLabel> label;

  std::size_t left_frames() const {
    return static_cast<std::size_t>(std::llround(step_period_left_s * frame_rate_hz));
  }
  std::size_t right_frames() const {
    return static_cast<std::size_t>(std::llround(step_period_right_s * frame_rate_hz));
  }

  void validate() const {
    if (!(step_len_left > 0.0 && step_len_right > 0.0)) {
      throw Error(Errc::invalid_config, "step lengths must be > 0");
    }
    if (!(step_period_left_s > 0.0 && step_period_right_s > 0.0 && frame_rate_hz > 0.0)) {
      throw Error(Errc::invalid_config, "periods and frame rate must be > 0");
    }
    if (left_frames() < 4 || right_frames() < 4) {
      throw Error(Errc::invalid_config, "each step must span at least 4 frames");
    }
    if (n_cycles == 0) throw Error(Errc::invalid_config, "n_cycles must be > 0");
    if (facing != 1 && facing != -1) throw Error(Errc::invalid_config, "facing must be +1 or -1");
    if (!(keypoint_noise_std >= 0.0 && camera_jitter_amp >= 0.0)) {
      throw Error(Errc::invalid_config, "noise and jitter must be >= 0");
    }
    if (!(camera_jitter_period_s > 0.0)) {
      throw Error(Errc::invalid_config, "camera_jitter_period_s must be > 0");
    }
    if (!(height_m > 0.0)) throw Error(Errc::invalid_config, "height_m must be > 0");
  }
};

inline void to_json(nlohmann::json& j, const SynthConfig& c) {
  j = {{"step_len_left", c.step_len_left},
       {"step_len_right", c.step_len_right},
       {"step_period_left_s", c.step_period_left_s},
       {"step_period_right_s", c.step_period_right_s},
       {"frame_rate_hz", c.frame_rate_hz},
       {"n_cycles", c.n_cycles},
       {"facing", c.facing > 0 ? "+x" : "-x"},
       {"keypoint_noise_std", c.keypoint_noise_std},
       {"camera_jitter_amp", c.camera_jitter_amp},
       {"camera_jitter_period_s", c.camera_jitter_period_s},
       {"seed", c.seed},
       {"height_m", c.height_m},
       {"orthotic_side", std::string(to_string(c.orthotic_side))},
       {"subject_id", c.subject_id}};
  if (c.label) j["label"] = std::string(to_string(*c.label));
}

inline void from_json(const nlohmann::json& j, SynthConfig& c) {
  c.step_len_left = j.value("step_len_left", c.step_len_left);
  c.step_len_right = j.value("step_len_right", c.step_len_right);
  c.step_period_left_s = j.value("step_period_left_s", c.step_period_left_s);
  c.step_period_right_s = j.value("step_period_right_s", c.step_period_right_s);
  c.frame_rate_hz = j.value("frame_rate_hz", c.frame_rate_hz);
  c.n_cycles = j.value("n_cycles", c.n_cycles);
  if (j.contains("facing")) {
    const auto& f = j["facing"];
    if (f.is_string()) {
      c.facing = f.get<std::string>() == "-x" ? -1 : 1;
    } else {
      c.facing = f.get<int>() < 0 ? -1 : 1;
    }
  }
  c.keypoint_noise_std = j.value("keypoint_noise_std", c.keypoint_noise_std);
  c.camera_jitter_amp = j.value("camera_jitter_amp", c.camera_jitter_amp);
  c.camera_jitter_period_s = j.value("camera_jitter_period_s", c.camera_jitter_period_s);
  c.seed = j.value("seed", c.seed);
  c.height_m = j.value("height_m", c.height_m);
  if (j.contains("orthotic_side")) {
    c.orthotic_side = j["orthotic_side"].get<std::string>() == "right" ? Side::right : Side::left;
  }
  c.subject_id = j.value("subject_id", c.subject_id);
  if (j.contains("label") && j["label"].is_string()) {
    c.label = parse_gait_label(j["label"].get<std::string>());
  }
}

struct StrikeTruth {
  std::size_t frame = 0;
  Side leg = Side::left;
  double amplitude = 0.0;  // normalized step length
};

struct GroundTruthFeatures {
  std::vector<StrikeTruth> strikes;
  std::vector<FeatureVector> cycles;  // one per (2c, 2c+1, 2c+2) window
};

struct SynthWalk {
  KeypointSequence sequence;
  GroundTruthFeatures truth;
};

namespace synth_detail {

inline constexpr double kHarmonicMix = 1.0 / 18.0;
inline constexpr double kGrid = 4294967296.0;  // 2^32
inline constexpr double kToeOffset = 0.05;

inline double snap(double v) { return std::round(v * kGrid) / kGrid; }

// Body layout of the 33-point topology as (x offset from torso, y).
inline std::array<std::pair<double, double>, landmarks::kDefaultCount> body_layout() {
  std::array<std::pair<double, double>, landmarks::kDefaultCount> p{};
  for (std::size_t i = 0; i <= 10; ++i) {  // face
    p[i] = {0.01 * (static_cast<double>(i % 3) - 1.0), 0.10 + 0.005 * static_cast<double>(i)};
  }
  p[11] = {-0.04, 0.25};  p[12] = {0.04, 0.25};   // shoulders
  p[13] = {-0.05, 0.38};  p[14] = {0.05, 0.38};   // elbows
  p[15] = {-0.05, 0.50};  p[16] = {0.05, 0.50};   // wrists
  for (std::size_t i = 17; i <= 22; ++i) {        // hands
    p[i] = {(i % 2 ? -0.05 : 0.05), 0.52 + 0.005 * static_cast<double>(i - 17)};
  }
  p[23] = {-0.03, 0.55};  p[24] = {0.03, 0.55};   // hips
  p[25] = {-0.02, 0.73};  p[26] = {0.02, 0.73};   // knees
  p[27] = {-0.01, 0.90};  p[28] = {0.01, 0.90};   // ankles
  p[29] = {0.0, 0.93};    p[30] = {0.0, 0.93};    // heels (x overwritten)
  p[31] = {0.0, 0.95};    p[32] = {0.0, 0.95};    // foot tips (x overwritten)
  return p;
}

}  // namespace synth_detail

inline SynthWalk generate_walk(const SynthConfig& cfg) {
  cfg.validate();
  using std::numbers::pi;
  const std::size_t n_left = cfg.left_frames();
  const std::size_t n_right = cfg.right_frames();
  const double omega = 2.0 * pi / static_cast<double>(n_left + n_right);
  const double a = synth_detail::kHarmonicMix;

  // Knots: a virtual right strike, then 2 n_cycles + 1 real strikes, then a
  // virtual right strike after the last left strike.
  const std::size_t n_strikes = 2 * cfg.n_cycles + 1;
  std::vector<double> knots;
  const std::size_t first = (n_right + 1) / 2;
  knots.push_back(static_cast<double>(first) - static_cast<double>(n_right));
  std::size_t frame = first;
  GroundTruthFeatures truth;
  for (std::size_t k = 0; k < n_strikes; ++k) {
    const Side leg = k % 2 == 0 ? Side::left : Side::right;
    truth.strikes.push_back(
        {frame, leg, leg == Side::left ? cfg.step_len_left : cfg.step_len_right});
    knots.push_back(static_cast<double>(frame));
    frame += leg == Side::left ? n_left : n_right;
  }
  knots.push_back(static_cast<double>(frame));
  const std::size_t frame_count = truth.strikes.back().frame + n_left / 2 + 1;

  auto separation = [&](double t) {
    std::size_t i = 0;
    while (i + 2 < knots.size() && t > knots[i + 1]) ++i;
    const double span = knots[i + 1] - knots[i];
    const double tau = (t - knots[i]) / span;
    const double c = 2.0 * (pi - omega * span) / span;
    const double phi = (static_cast<double>(i) - 1.0) * pi + omega * span * tau +
                       c * span * (tau / 2.0 - std::sin(2.0 * pi * tau) / (4.0 * pi));
    const long nearest = std::lround(phi / pi);
    const double amp = (nearest % 2 == 0) ? cfg.step_len_left : cfg.step_len_right;
    return amp * (std::cos(phi) - a * std::cos(3.0 * phi)) / (1.0 - a);
  };

  KeypointSequence seq;
  seq.meta.subject_id = cfg.subject_id;
  seq.meta.height_m = cfg.height_m;
  seq.meta.frame_rate_hz = cfg.frame_rate_hz;
  seq.meta.orthotic_side = cfg.orthotic_side;
  seq.meta.label = cfg.label;
  seq.meta.landmark_map = landmarks::default_map();

  const auto layout = synth_detail::body_layout();
  constexpr double torso = 0.5;
  std::mt19937_64 rng(cfg.seed);
  std::normal_distribution<double> noise(0.0, 1.0);
  seq.frames.resize(frame_count);
  for (std::size_t f = 0; f < frame_count; ++f) {
    const double s = separation(static_cast<double>(f));
    const double time_s = static_cast<double>(f) / cfg.frame_rate_hz;
    const double jitter_phase = 2.0 * pi * time_s / cfg.camera_jitter_period_s;
    const double jx = synth_detail::snap(cfg.camera_jitter_amp * std::sin(jitter_phase));
    const double jy = synth_detail::snap(0.5 * cfg.camera_jitter_amp * std::cos(jitter_phase));

    std::array<double, landmarks::kDefaultCount> base_x{};
    for (std::size_t i = 0; i < base_x.size(); ++i) base_x[i] = torso + layout[i].first;
    const double left_heel = torso + cfg.facing * s / 2.0;
    const double right_heel = torso - cfg.facing * s / 2.0;
    base_x[29] = left_heel;
    base_x[30] = right_heel;
    base_x[31] = left_heel + synth_detail::kToeOffset * cfg.facing;
    base_x[32] = right_heel + synth_detail::kToeOffset * cfg.facing;

    auto& lms = seq.frames[f].landmarks;
    lms.resize(landmarks::kDefaultCount);
    for (std::size_t i = 0; i < lms.size(); ++i) {
      double nx = 0.0;
      double ny = 0.0;
      if (cfg.keypoint_noise_std > 0.0) {
        nx = synth_detail::snap(cfg.keypoint_noise_std * noise(rng));
        ny = synth_detail::snap(cfg.keypoint_noise_std * noise(rng));
      }
      lms[i].x = synth_detail::snap(base_x[i]) + jx + nx;
      lms[i].y = synth_detail::snap(layout[i].second) + jy + ny;
      lms[i].visibility = 0.99;
    }
  }

  // Ground truth straight from the strike list: step = H * amplitude,
  // stride = mean of consecutive step sums, support = frames / fps,
  // speed = H * fps * sum(amplitudes) / (f3 - f1), cadence = 180 fps / (f3 - f1).
  const double h = cfg.height_m;
  const double fps = cfg.frame_rate_hz;
  for (std::size_t c = 0; c < cfg.n_cycles; ++c) {
    const auto& s1 = truth.strikes[2 * c];
    const auto& s2 = truth.strikes[2 * c + 1];
    const auto& s3 = truth.strikes[2 * c + 2];
    const double span = static_cast<double>(s3.frame - s1.frame);
    const bool first_is_ol = s1.leg == cfg.orthotic_side;
    FeatureVector fv;
    const double outer = h * (s1.amplitude + s3.amplitude) / 2.0;  // s1 and s3 share a leg
    const double middle = h * s2.amplitude;
    fv.step_len_ol_m = first_is_ol ? outer : middle;
    fv.step_len_nol_m = first_is_ol ? middle : outer;
    fv.stride_len_m = h * (s1.amplitude + 2.0 * s2.amplitude + s3.amplitude) / 2.0;
    const double first_support = static_cast<double>(s2.frame - s1.frame) / fps;
    const double second_support = static_cast<double>(s3.frame - s2.frame) / fps;
    fv.ss_ol_s = first_is_ol ? first_support : second_support;
    fv.ss_nol_s = first_is_ol ? second_support : first_support;
    fv.cadence_spm = 180.0 * fps / span;
    fv.speed_mps = h * fps * (s1.amplitude + s2.amplitude + s3.amplitude) / span;
    truth.cycles.push_back(fv);
  }
  return {std::move(seq), std::move(truth)};
}

inline nlohmann::json to_json(const GroundTruthFeatures& truth) {
  nlohmann::json strikes = nlohmann::json::array();
  for (const auto& s : truth.strikes) {
    strikes.push_back({{"frame", s.frame},
                       {"leg", std::string(to_string(s.leg))},
                       {"amplitude", s.amplitude}});
  }
  nlohmann::json cycles = nlohmann::json::array();
  for (const auto& fv : truth.cycles) {
    nlohmann::json row;
    const auto values = fv.to_array();
    for (std::size_t i = 0; i < kFeatureCount; ++i) row[std::string(kFeatureNames[i])] = values[i];
    cycles.push_back(std::move(row));
  }
  return {{"strikes", std::move(strikes)}, {"cycles", std::move(cycles)}};
}

}  // namespace gaitxai

#pragma once

// Heel-distance signal: smoothing, maxima detection and pruning, leg labels,
// and gait-cycle segmentation.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <optional>
#include <vector>

#include "gaitxai/error.hpp"
#include "gaitxai/keypoints.hpp"
#include "gaitxai/linalg.hpp"

namespace gaitxai {

struct DistanceSignal {
  std::vector<double> values;
  double frame_rate_hz = 0.0;

  std::size_t size() const { return values.size(); }
};

struct SignalConfig {
  // Unset means frame_rate_hz / 10 (about 0.1 s).
  std::optional<double> smoothing_sigma_frames;
  double min_prominence = 0.10;
  double min_gap_fraction = 0.5;

  double sigma_for(double frame_rate_hz) const {
    return smoothing_sigma_frames.value_or(frame_rate_hz / 10.0);
  }

  void validate() const {
    if (smoothing_sigma_frames && !(*smoothing_sigma_frames > 0.0)) {
      throw Error(Errc::invalid_config, "smoothing_sigma_frames must be > 0");
    }
    if (!(min_prominence > 0.0)) {
      throw Error(Errc::invalid_config, "min_prominence must be > 0");
    }
    if (!(min_gap_fraction > 0.0 && min_gap_fraction < 1.0)) {
      throw Error(Errc::invalid_config, "min_gap_fraction must lie in (0, 1)");
    }
  }
};

struct Peak {
  std::size_t frame = 0;
  double value = 0.0;

  bool operator==(const Peak&) const = default;
};

enum class Role { ol, nol };

inline std::string_view to_string(Role role) { return role == Role::ol ? "OL" : "NOL"; }

struct LabeledPeak {
  std::size_t frame = 0;
  double value = 0.0;
  Side leg = Side::left;
  Role role = Role::ol;

  bool operator==(const LabeledPeak&) const = default;
};

using LabeledMaxima = std::vector<LabeledPeak>;

struct GaitCycle {
  std::array<LabeledPeak, 3> maxima;
  SequenceMeta meta;
};

/// d[t] = |left_heel_x[t] - right_heel_x[t]|. Only the horizontal coordinate
/// enters, so the "distance" is an absolute difference.
inline DistanceSignal heel_distance(const HeelSeries& heels) {
  if (heels.size() == 0) throw Error(Errc::shape_mismatch, "empty heel series");
  if (heels.right_heel_x.size() != heels.size()) {
    throw Error(Errc::shape_mismatch, "heel series lengths differ");
  }
  DistanceSignal out;
  out.frame_rate_hz = heels.meta.frame_rate_hz;
  out.values.resize(heels.size());
  for (std::size_t t = 0; t < heels.size(); ++t) {
    out.values[t] = std::abs(heels.left_heel_x[t] - heels.right_heel_x[t]);
  }
  return out;
}

/// Unit-sum discrete Gaussian truncated at +-4 sigma (radius rounded to the
/// nearest frame). Index `radius` is the centre tap.
inline std::vector<double> gaussian_kernel(double sigma) {
  if (!(sigma > 0.0)) return {1.0};
  const auto radius = static_cast<std::ptrdiff_t>(std::floor(4.0 * sigma + 0.5));
  std::vector<double> k(static_cast<std::size_t>(2 * radius + 1));
  double sum = 0.0;
  for (std::ptrdiff_t i = -radius; i <= radius; ++i) {
    const double w = std::exp(-0.5 * static_cast<double>(i * i) / (sigma * sigma));
    k[static_cast<std::size_t>(i + radius)] = w;
    sum += w;
  }
  for (double& w : k) w /= sum;
  return k;
}

namespace detail {
// Half-sample symmetric reflection: ... c b a | a b c ... | c b a ...
inline std::size_t reflect_index(std::ptrdiff_t i, std::size_t n) {
  const auto period = static_cast<std::ptrdiff_t>(2 * n);
  std::ptrdiff_t m = i % period;
  if (m < 0) m += period;
  if (m >= static_cast<std::ptrdiff_t>(n)) m = period - 1 - m;
  return static_cast<std::size_t>(m);
}

inline double median(std::vector<double> v) {
  if (v.empty()) return 0.0;
  const std::size_t mid = v.size() / 2;
  std::nth_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(mid), v.end());
  const double hi = v[mid];
  if (v.size() % 2 == 1) return hi;
  const double lo = *std::max_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(mid));
  return 0.5 * (lo + hi);
}
}  // namespace detail

inline DistanceSignal gaussian_smooth(const DistanceSignal& sig, double sigma) {
  if (sigma < 0.0) throw Error(Errc::invalid_config, "sigma must be >= 0");
  if (sigma == 0.0 || sig.values.empty()) return sig;
  const auto kernel = gaussian_kernel(sigma);
  const auto radius = static_cast<std::ptrdiff_t>(kernel.size() / 2);
  const std::size_t n = sig.size();
  DistanceSignal out;
  out.frame_rate_hz = sig.frame_rate_hz;
  out.values.resize(n);
  for (std::size_t t = 0; t < n; ++t) {
    double acc = 0.0;
    for (std::ptrdiff_t k = -radius; k <= radius; ++k) {
      const auto src = detail::reflect_index(static_cast<std::ptrdiff_t>(t) + k, n);
      acc += kernel[static_cast<std::size_t>(k + radius)] * sig.values[src];
    }
    out.values[t] = acc;
  }
  return out;
}

/// Topographic prominence of the peak whose plateau spans [first, last].
inline double peak_prominence(const std::vector<double>& d, std::size_t first,
                              std::size_t last) {
  const double h = d[first];
  double left_min = h;
  for (std::size_t i = first; i-- > 0;) {
    if (d[i] > h) break;
    left_min = std::min(left_min, d[i]);
  }
  double right_min = h;
  for (std::size_t i = last + 1; i < d.size(); ++i) {
    if (d[i] > h) break;
    right_min = std::min(right_min, d[i]);
  }
  return h - std::max(left_min, right_min);
}

/// Interior local maxima (plateaus resolved to their leftmost frame) whose
/// prominence reaches min_prominence * peak-to-peak. Endpoints never qualify.
inline std::vector<Peak> detect_maxima(const DistanceSignal& sig, const SignalConfig& cfg) {
  const auto& d = sig.values;
  std::vector<Peak> out;
  if (d.size() < 3) return out;
  const auto [lo, hi] = std::minmax_element(d.begin(), d.end());
  const double range = *hi - *lo;
  if (!(range > 0.0)) return out;
  const double threshold = cfg.min_prominence * range;

  std::size_t i = 1;
  while (i + 1 < d.size()) {
    if (d[i] > d[i - 1]) {
      std::size_t j = i;
      while (j + 1 < d.size() && d[j + 1] == d[i]) ++j;
      if (j + 1 < d.size() && d[j + 1] < d[i]) {
        if (peak_prominence(d, i, j) >= threshold) out.push_back({i, d[i]});
      }
      i = j + 1;
    } else {
      ++i;
    }
  }
  return out;
}

/// Removes maxima that crowd their neighbours: while some adjacent gap is
/// below min_gap_fraction * median gap, the lower member of the closest such
/// pair goes (equal values: the later one). The median is recomputed after
/// every removal.
inline std::vector<Peak> prune_maxima(std::vector<Peak> maxima, const SignalConfig& cfg) {
  while (maxima.size() >= 2) {
    std::vector<double> gaps(maxima.size() - 1);
    for (std::size_t i = 0; i + 1 < maxima.size(); ++i) {
      gaps[i] = static_cast<double>(maxima[i + 1].frame - maxima[i].frame);
    }
    const double limit = cfg.min_gap_fraction * detail::median(gaps);
    std::optional<std::size_t> worst;
    for (std::size_t i = 0; i < gaps.size(); ++i) {
      if (gaps[i] < limit && (!worst || gaps[i] < gaps[*worst])) worst = i;
    }
    if (!worst) break;
    const std::size_t a = *worst;
    const std::size_t victim = maxima[a].value < maxima[a + 1].value ? a : a + 1;
    maxima.erase(maxima.begin() + static_cast<std::ptrdiff_t>(victim));
  }
  return maxima;
}

/// Amplitude of a maximum read from the unsmoothed signal: a least-squares
/// parabola over +-half_window frames, evaluated at the peak frame.
inline double peak_amplitude(const DistanceSignal& raw, std::size_t frame,
                             std::size_t half_window) {
  const auto& d = raw.values;
  if (half_window == 0 || d.size() < 3) return d.at(frame);
  const std::size_t first = frame >= half_window ? frame - half_window : 0;
  const std::size_t last = std::min(d.size() - 1, frame + half_window);
  if (last - first < 2) return d[frame];
  Matrix normal(3, 3, 0.0);
  std::vector<double> rhs(3, 0.0);
  for (std::size_t t = first; t <= last; ++t) {
    const double u = static_cast<double>(t) - static_cast<double>(frame);
    const double basis[3] = {1.0, u, u * u};
    for (int r = 0; r < 3; ++r) {
      rhs[static_cast<std::size_t>(r)] += basis[r] * d[t];
      for (int c = 0; c < 3; ++c) {
        normal(static_cast<std::size_t>(r), static_cast<std::size_t>(c)) += basis[r] * basis[c];
      }
    }
  }
  std::vector<double> coef;
  if (!lu_solve(normal, rhs, coef)) return d[frame];
  return std::max(0.0, coef[0]);
}

/// +1 when the feet point towards increasing x, -1 otherwise.
inline int walking_direction(const HeelSeries& heels) {
  std::vector<double> orientation(heels.size());
  for (std::size_t t = 0; t < heels.size(); ++t) {
    orientation[t] = 0.5 * ((heels.left_toe_x[t] - heels.left_heel_x[t]) +
                            (heels.right_toe_x[t] - heels.right_heel_x[t]));
  }
  const double m = detail::median(std::move(orientation));
  if (std::abs(m) <= 1e-6) {
    throw Error(Errc::ambiguous_direction, "toe-heel orientation is ~0");
  }
  return m > 0.0 ? 1 : -1;
}

struct LegAssignment {
  LabeledMaxima maxima;
  std::size_t dropped = 0;  // unlabeled or non-alternating maxima removed
};

/// The leading heel (farther along the walking direction) at each maximum is
/// the leg that just planted. Runs of the same leg keep only their highest
/// maximum (ties keep the earlier one).
inline LegAssignment assign_legs_detailed(const std::vector<Peak>& maxima,
                                          const HeelSeries& heels,
                                          const SequenceMeta& meta) {
  const int dir = walking_direction(heels);
  LegAssignment out;
  for (const auto& p : maxima) {
    if (p.frame >= heels.size()) throw Error(Errc::shape_mismatch, "maximum beyond series");
    const double lead = dir * (heels.left_heel_x[p.frame] - heels.right_heel_x[p.frame]);
    if (lead == 0.0) {
      ++out.dropped;
      continue;
    }
    const Side leg = lead > 0.0 ? Side::left : Side::right;
    const Role role = leg == meta.orthotic_side ? Role::ol : Role::nol;
    LabeledPeak lp{p.frame, p.value, leg, role};
    if (!out.maxima.empty() && out.maxima.back().leg == leg) {
      ++out.dropped;
      if (lp.value > out.maxima.back().value) out.maxima.back() = lp;
      continue;
    }
    out.maxima.push_back(lp);
  }
  return out;
}

inline LabeledMaxima assign_legs(const std::vector<Peak>& maxima, const HeelSeries& heels,
                                 const SequenceMeta& meta) {
  return assign_legs_detailed(maxima, heels, meta).maxima;
}

/// Windows of three consecutive maxima advancing by two, so neighbouring
/// cycles share a boundary maximum: (0,1,2), (2,3,4), ...
inline std::vector<GaitCycle> segment_cycles(const LabeledMaxima& labeled,
                                             const SequenceMeta& meta) {
  std::vector<GaitCycle> cycles;
  for (std::size_t i = 0; i + 2 < labeled.size(); i += 2) {
    cycles.push_back({{labeled[i], labeled[i + 1], labeled[i + 2]}, meta});
  }
  return cycles;
}

/// Everything the signal stage produces for one trace.
struct GaitAnalysis {
  DistanceSignal raw;
  DistanceSignal smoothed;
  double sigma_frames = 0.0;
  std::vector<Peak> candidates;  // after detection, before pruning
  std::vector<Peak> retained;    // after pruning, amplitudes read from `raw`
  LabeledMaxima labeled;
  std::size_t dropped_in_labeling = 0;
  std::vector<GaitCycle> cycles;
};

inline GaitAnalysis analyze_gait(const HeelSeries& heels, const SignalConfig& cfg) {
  cfg.validate();
  GaitAnalysis a;
  a.raw = heel_distance(heels);
  a.sigma_frames = cfg.sigma_for(heels.meta.frame_rate_hz);
  a.smoothed = gaussian_smooth(a.raw, a.sigma_frames);
  a.candidates = detect_maxima(a.smoothed, cfg);
  a.retained = prune_maxima(a.candidates, cfg);
  const auto half_window =
      static_cast<std::size_t>(std::max(0.0, std::round(a.sigma_frames)));
  for (auto& p : a.retained) p.value = peak_amplitude(a.raw, p.frame, half_window);
  if (!a.retained.empty()) {
    auto legs = assign_legs_detailed(a.retained, heels, heels.meta);
    a.labeled = std::move(legs.maxima);
    a.dropped_in_labeling = legs.dropped;
  }
  a.cycles = segment_cycles(a.labeled, heels.meta);
  return a;
}

}  // namespace gaitxai

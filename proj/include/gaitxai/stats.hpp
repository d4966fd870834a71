#pragma once

// Welch's two-sample t-test with two-sided p-values from the regularized
// incomplete beta function.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "gaitxai/dataset.hpp"
#include "gaitxai/error.hpp"

namespace gaitxai {

namespace detail {

// Continued fraction for I_x(a, b), modified Lentz evaluation.
inline double beta_continued_fraction(double a, double b, double x) {
  constexpr int kMaxIter = 1000;
  constexpr double kEps = 1e-16;
  constexpr double kTiny = 1e-300;
  const double qab = a + b;
  const double qap = a + 1.0;
  const double qam = a - 1.0;
  double c = 1.0;
  double d = 1.0 - qab * x / qap;
  if (std::abs(d) < kTiny) d = kTiny;
  d = 1.0 / d;
  double h = d;
  for (int m = 1; m <= kMaxIter; ++m) {
    const double m2 = 2.0 * m;
    double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
    d = 1.0 + aa * d;
    if (std::abs(d) < kTiny) d = kTiny;
    c = 1.0 + aa / c;
    if (std::abs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    h *= d * c;
    aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
    d = 1.0 + aa * d;
    if (std::abs(d) < kTiny) d = kTiny;
    c = 1.0 + aa / c;
    if (std::abs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    const double del = d * c;
    h *= del;
    if (std::abs(del - 1.0) < kEps) break;
  }
  return h;
}

// I_x(a, b) evaluated directly by the continued fraction; y = 1 - x is passed
// separately so callers can supply it without cancellation.
inline double ibeta_direct(double a, double b, double x, double y) {
  const double log_front = std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) +
                           a * std::log(x) + b * std::log(y);
  return std::exp(log_front) * beta_continued_fraction(a, b, x) / a;
}

}  // namespace detail

/// Regularized incomplete beta I_x(a, b) for a, b > 0 and x in [0, 1].
inline double regularized_incomplete_beta(double a, double b, double x, double y) {
  if (x <= 0.0) return 0.0;
  if (y <= 0.0) return 1.0;
  if (x < (a + 1.0) / (a + b + 2.0)) return detail::ibeta_direct(a, b, x, y);
  return 1.0 - detail::ibeta_direct(b, a, y, x);
}

inline double regularized_incomplete_beta(double a, double b, double x) {
  return regularized_incomplete_beta(a, b, x, 1.0 - x);
}

/// P(|T| >= |t|) for Student's t with `df` degrees of freedom.
inline double student_t_two_sided_p(double t, double df) {
  if (std::isnan(t)) return std::numeric_limits<double>::quiet_NaN();
  if (std::isinf(t)) return 0.0;
  const double t2 = t * t;
  const double x = df / (df + t2);
  const double y = t2 / (df + t2);
  return std::clamp(regularized_incomplete_beta(0.5 * df, 0.5, x, y), 0.0, 1.0);
}

struct WelchResult {
  double t = 0.0;
  double df = 0.0;
  double p = 1.0;
};

inline double sample_mean(std::span<const double> v) {
  double s = 0.0;
  for (double x : v) s += x;
  return s / static_cast<double>(v.size());
}

/// Unbiased (n - 1) variance.
inline double sample_variance(std::span<const double> v) {
  const double m = sample_mean(v);
  double ss = 0.0;
  for (double x : v) ss += (x - m) * (x - m);
  return ss / static_cast<double>(v.size() - 1);
}

inline WelchResult welch_t_test(std::span<const double> a, std::span<const double> b) {
  if (a.size() < 2 || b.size() < 2) {
    throw Error(Errc::insufficient_samples, "each group needs at least 2 values");
  }
  const double na = static_cast<double>(a.size());
  const double nb = static_cast<double>(b.size());
  const double ma = sample_mean(a);
  const double mb = sample_mean(b);
  const double qa = sample_variance(a) / na;
  const double qb = sample_variance(b) / nb;
  WelchResult r;
  const double se2 = qa + qb;
  if (!(se2 > 0.0)) {
    // Both groups constant: equal means carry no evidence, unequal ones are
    // separated perfectly.
    r.df = na + nb - 2.0;
    r.t = ma == mb ? 0.0 : std::copysign(std::numeric_limits<double>::infinity(), ma - mb);
    r.p = ma == mb ? 1.0 : 0.0;
    return r;
  }
  r.t = (ma - mb) / std::sqrt(se2);
  r.df = se2 * se2 / (qa * qa / (na - 1.0) + qb * qb / (nb - 1.0));
  r.p = student_t_two_sided_p(r.t, r.df);
  return r;
}

struct FeatureStats {
  std::string feature;
  double p_value = 1.0;
  double t = 0.0;
  double df = 0.0;
  double mean[2] = {0.0, 0.0};
  double std[2] = {0.0, 0.0};
  std::size_t n[2] = {0, 0};
};

struct StatsReport {
  std::vector<std::string> class_names;
  std::vector<FeatureStats> features;
};

inline StatsReport feature_p_values(const Dataset& data,
                                    std::span<const std::string_view> feature_names) {
  data.validate();
  const auto counts = data.class_counts();
  if (data.class_names.size() != 2 || counts[0] == 0 || counts[1] == 0) {
    throw Error(Errc::not_binary, "p-values need rows from exactly two classes");
  }
  if (counts[0] < 2 || counts[1] < 2) {
    throw Error(Errc::insufficient_samples, "each class needs at least 2 rows");
  }
  if (feature_names.size() != data.feature_count()) {
    throw Error(Errc::shape_mismatch, "feature name count");
  }
  StatsReport report;
  report.class_names = data.class_names;
  for (std::size_t j = 0; j < data.feature_count(); ++j) {
    std::vector<double> groups[2];
    for (std::size_t i = 0; i < data.size(); ++i) groups[data.labels[i]].push_back(data.rows(i, j));
    const auto w = welch_t_test(groups[0], groups[1]);
    FeatureStats fs;
    fs.feature = std::string(feature_names[j]);
    fs.p_value = w.p;
    fs.t = w.t;
    fs.df = w.df;
    for (int g = 0; g < 2; ++g) {
      fs.mean[g] = sample_mean(groups[g]);
      fs.std[g] = std::sqrt(sample_variance(groups[g]));
      fs.n[g] = groups[g].size();
    }
    report.features.push_back(std::move(fs));
  }
  return report;
}

}  // namespace gaitxai

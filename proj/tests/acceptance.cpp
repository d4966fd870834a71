// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit if any
// gating criterion fails.

#include <boost/math/distributions/students_t.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numbers>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "gaitxai/gaitxai.hpp"
#include "corpus.hpp"

using namespace gaitxai;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

struct Outcome {
  bool pass = false;
  std::string detail;
};

MlpModel random_model(std::vector<std::size_t> dims, std::uint64_t seed) {
  auto m = MlpModel::initialize(std::move(dims), seed);
  std::mt19937_64 rng(seed ^ 0xabcdefULL);
  std::uniform_real_distribution<double> u(-0.5, 0.5);
  for (auto& b : m.biases) {
    for (double& v : b) v = u(rng);
  }
  for (std::size_t c = 0; c < m.class_count(); ++c) m.class_names.push_back("c" + std::to_string(c));
  return m;
}

std::string fmt(const char* f, double a) {
  char buf[128];
  std::snprintf(buf, sizeof(buf), f, a);
  return buf;
}

// 1 -----------------------------------------------------------------------
Outcome gradients() {
  const auto t0 = Clock::now();
  std::mt19937_64 rng(11);
  std::normal_distribution<double> n(0.0, 1.0);
  double worst = 0.0;
  std::size_t probes = 0;
  for (std::uint64_t s = 0; s < 8; ++s) {
    auto m = random_model({7, 8, 8, 2}, 500 + s);
    Matrix z(8, 7);
    for (double& v : z.data()) v = n(rng);
    std::vector<std::size_t> labels(8), batch(8);
    for (std::size_t i = 0; i < 8; ++i) {
      labels[i] = rng() % 2;
      batch[i] = i;
    }
    const auto analytic = backprop_standardized(m, z, labels, batch);
    const double h = 1e-5;
    std::uniform_int_distribution<std::size_t> layer_pick(0, m.layer_count() - 1);
    for (int p = 0; p < 20; ++p) {
      const std::size_t l = layer_pick(rng);
      const bool bias = rng() % 4 == 0;
      double* param;
      double grad;
      if (bias) {
        const std::size_t i = rng() % m.biases[l].size();
        param = &m.biases[l][i];
        grad = analytic.grads.biases[l][i];
      } else {
        const std::size_t i = rng() % m.weights[l].size();
        param = &m.weights[l].data()[i];
        grad = analytic.grads.weights[l].data()[i];
      }
      const double saved = *param;
      *param = saved + h;
      const double up = mean_cross_entropy(m, z, labels, batch);
      *param = saved - h;
      const double down = mean_cross_entropy(m, z, labels, batch);
      *param = saved;
      const double numeric = (up - down) / (2.0 * h);
      worst = std::max(worst, std::abs(numeric - grad) /
                                  std::max({std::abs(numeric), std::abs(grad), 1e-6}));
      ++probes;
    }
  }
  const double secs = seconds_since(t0);
  return {probes >= 100 && worst < 1e-4 && secs < 10.0,
          std::to_string(probes) + " probes, max rel err " + fmt("%.2e", worst) + ", " +
              fmt("%.2f s", secs)};
}

// 2 -----------------------------------------------------------------------
Outcome softmax_normalization() {
  std::mt19937_64 rng(22);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::uniform_int_distribution<std::size_t> width(2, 16), classes(2, 5);
  double worst_sum = 0.0, worst_shift = 0.0;
  for (int trial = 0; trial < 10000; ++trial) {
    const std::size_t h = width(rng);
    const auto m = random_model({7, h, h, classes(rng)}, static_cast<std::uint64_t>(trial));
    std::vector<double> x(7);
    const double scale = std::pow(10.0, 3.0 * u(rng));
    for (double& v : x) v = scale * u(rng);
    const auto probs = mlp_forward(m, x);
    double sum = 0.0;
    for (double p : probs) sum += p;
    worst_sum = std::max(worst_sum, std::abs(sum - 1.0));
    auto logits = mlp_logits(m, x);
    const double shift = 100.0 * u(rng);
    for (double& v : logits) v += shift;
    const auto shifted = softmax(logits);
    for (std::size_t i = 0; i < probs.size(); ++i) worst_shift = std::max(worst_shift, std::abs(shifted[i] - probs[i]));
  }
  return {worst_sum < 1e-9 && worst_shift < 1e-9,
          "10000 models, max |sum-1| " + fmt("%.1e", worst_sum) + ", max shift change " + fmt("%.1e", worst_shift)};
}

// 3 -----------------------------------------------------------------------
Outcome synth_round_trip(std::vector<double> frame_rates, int count, std::uint64_t seed) {
  const auto t0 = Clock::now();
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  int configs = 0, bad = 0;
  double worst_spatial = 0.0, worst_support = 0.0, worst_cadence = 0.0;
  std::string first_failure;
  for (int i = 0; i < count; ++i) {
    SynthConfig c;
    c.seed = rng();
    c.frame_rate_hz = frame_rates[static_cast<std::size_t>(i) % frame_rates.size()];
    c.step_len_left = 0.22 + 0.16 * u(rng);
    c.step_len_right = 0.22 + 0.16 * u(rng);
    c.step_period_left_s = 0.42 + 0.2 * u(rng);
    c.step_period_right_s = std::clamp(c.step_period_left_s * (0.75 + 0.5 * u(rng)), 0.4, 0.7);
    c.n_cycles = 3 + rng() % 2;
    c.facing = u(rng) < 0.5 ? 1 : -1;
    c.orthotic_side = u(rng) < 0.5 ? Side::left : Side::right;
    c.height_m = 1.5 + 0.4 * u(rng);
    c.keypoint_noise_std = 0.005 * u(rng);
    c.camera_jitter_amp = 0.1 * u(rng);
    c.camera_jitter_period_s = 0.8 + 1.5 * u(rng);
    ++configs;
    const auto walk = generate_walk(c);
    const auto tf = extract_trace_features(walk.sequence, SignalConfig{}, "synth");
    bool ok = tf.rows.size() == walk.truth.cycles.size();
    for (std::size_t k = 0; ok && k < tf.rows.size(); ++k) {
      const auto& got = tf.rows[k].features;
      const auto& want = walk.truth.cycles[k];
      for (auto [g, w] : {std::pair{got.step_len_ol_m, want.step_len_ol_m},
                          std::pair{got.step_len_nol_m, want.step_len_nol_m},
                          std::pair{got.stride_len_m, want.stride_len_m},
                          std::pair{got.speed_mps, want.speed_mps}}) {
        const double rel = std::abs(g - w) / w;
        worst_spatial = std::max(worst_spatial, rel);
        ok = ok && rel <= 0.05;
      }
      for (auto [g, w] : {std::pair{got.ss_ol_s, want.ss_ol_s}, std::pair{got.ss_nol_s, want.ss_nol_s}}) {
        const double frames = std::abs(g - w) * c.frame_rate_hz;
        worst_support = std::max(worst_support, frames);
        ok = ok && frames <= 1.0 + 1e-9;
      }
      const double dc = std::abs(got.cadence_spm - want.cadence_spm);
      worst_cadence = std::max(worst_cadence, dc);
      ok = ok && dc <= 2.0;
    }
    if (!ok) {
      ++bad;
      if (first_failure.empty()) first_failure = " first failing config: " + nlohmann::json(c).dump();
    }
  }
  const double secs = seconds_since(t0);
  return {bad == 0 && configs >= 50 && secs < 60.0,
          std::to_string(configs - bad) + "/" + std::to_string(configs) + " configs, worst spatial " +
              fmt("%.2f%%", 100.0 * worst_spatial) + ", worst support " + fmt("%.2f frames", worst_support) +
              ", worst cadence " + fmt("%.2f spm", worst_cadence) + ", " + fmt("%.1f s", secs) + first_failure};
}

// 4 -----------------------------------------------------------------------
Outcome jitter_immunity() {
  int cases = 0, identical = 0;
  for (double amp : {0.02, 0.05, 0.1, 0.25}) {
    for (double period : {0.7, 1.7, 3.1}) {
      SynthConfig still;
      still.step_period_right_s = 0.6;
      still.facing = cases % 2 ? 1 : -1;
      SynthConfig shaky = still;
      shaky.camera_jitter_amp = amp;
      shaky.camera_jitter_period_s = period;
      const auto a = heel_distance(heel_series(generate_walk(still).sequence));
      const auto b = heel_distance(heel_series(generate_walk(shaky).sequence));
      ++cases;
      if (a.values == b.values) ++identical;
    }
  }
  return {identical == cases, std::to_string(identical) + "/" + std::to_string(cases) + " bit-identical"};
}

// 5 -----------------------------------------------------------------------
Outcome rectified_sine() {
  bool ok = true;
  std::ostringstream detail;
  for (int period : {20, 30, 45}) {
    // |sin(pi t / P)| peaks at P/2 + kP; peak-to-peak spacing is P.
    const std::size_t n = static_cast<std::size_t>(period) * 8;
    DistanceSignal sig;
    sig.frame_rate_hz = 30.0;
    sig.values.resize(n);
    for (std::size_t t = 0; t < n; ++t) {
      sig.values[t] = std::abs(std::sin(std::numbers::pi * static_cast<double>(t) / period));
    }
    std::vector<double> analytic;
    for (double p = period / 2.0; p < static_cast<double>(n - 1); p += period) analytic.push_back(p);
    for (const auto& s : {sig, gaussian_smooth(sig, 3.0)}) {
      const auto peaks = prune_maxima(detect_maxima(s, SignalConfig{}), SignalConfig{});
      std::size_t matched = 0;
      for (double a : analytic) {
        for (const auto& p : peaks) {
          if (std::abs(static_cast<double>(p.frame) - a) <= 1.0) {
            ++matched;
            break;
          }
        }
      }
      const bool good = matched == analytic.size() && peaks.size() == analytic.size();
      ok = ok && good;
      detail << "P=" << period << ": " << peaks.size() << " peaks/" << analytic.size() << " analytic; ";
    }
  }
  return {ok, detail.str()};
}

// 6 -----------------------------------------------------------------------
GaitCycle cycle_of(std::array<std::size_t, 3> frames, std::array<double, 3> values, Side first, Side ol) {
  GaitCycle c;
  Side leg = first;
  for (std::size_t i = 0; i < 3; ++i) {
    c.maxima[i] = {frames[i], values[i], leg, leg == ol ? Role::ol : Role::nol};
    leg = opposite(leg);
  }
  c.meta.orthotic_side = ol;
  return c;
}

Outcome equations() {
  const double tol = 1e-12;
  const auto steps = step_lengths(cycle_of({10, 25, 40}, {0.20, 0.18, 0.20}, Side::left, Side::left), 1.7);
  const auto ss = single_support(cycle_of({10, 25, 40}, {0.2, 0.2, 0.2}, Side::right, Side::left), 30.0);
  const double speed = gait_speed(cycle_of({0, 15, 30}, {0.2, 0.2, 0.2}, Side::left, Side::left), 1.7, 30.0);
  const double cadence = gait_cadence(cycle_of({5, 20, 50}, {0.2, 0.2, 0.2}, Side::left, Side::left), 30.0);
  const bool ok = std::abs(steps.ol_m - 0.34) < tol && std::abs(ss.nol_s - 0.5) < tol &&
                  std::abs(speed - 1.02) < tol && std::abs(cadence - 120.0) < tol;
  std::ostringstream d;
  d.precision(17);
  d << "step " << steps.ol_m << " m, single support " << ss.nol_s << " s, speed " << speed
    << " m/s, cadence " << cadence << " steps/min";
  return {ok, d.str()};
}

// 7 -----------------------------------------------------------------------
struct SeparableResult {
  int passing = 0;
  std::string per_seed;
};

SeparableResult separable_corpus(const TrainConfig& cfg) {
  SeparableResult r;
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    const auto data = dataset_from_rows(gaitxai::testing::synthetic_corpus(seed));
    const auto report = run_evaluation(data, cfg, 5, seed);
    const double mlp = report.system(kMlpSystemName).mean_accuracy;
    const double svm = report.system(kSvmSystemName).mean_accuracy;
    if (mlp >= 0.9 && mlp >= svm - 0.05) ++r.passing;
    r.per_seed += fmt(" %.2f", mlp) + fmt("/%.2f", svm);
  }
  return r;
}

Outcome end_to_end(Outcome& info) {
  const auto t0 = Clock::now();
  TrainConfig tuned;
  tuned.learning_rate = 1e-4;
  const auto gated = separable_corpus(tuned);
  const double secs = seconds_since(t0);
  const auto at_default = separable_corpus(TrainConfig{});
  info = {at_default.passing >= 8, std::to_string(at_default.passing) +
                                       "/10 seeds pass at the default learning rate 1e-5 (mlp/svm:" +
                                       at_default.per_seed + ")"};
  return {gated.passing >= 8 && secs < 300.0,
          std::to_string(gated.passing) + "/10 seeds pass at learning rate 1e-4 (mlp/svm:" + gated.per_seed +
              "), " + fmt("%.0f s", secs)};
}

// 8 -----------------------------------------------------------------------
struct LogitOracle {
  std::vector<double> coef;
  TrainStats stats;
  std::vector<std::string> class_names{"KAFO1", "KAFO2"};
};

std::vector<double> predict_proba(const LogitOracle& m, std::span<const double> x) {
  double s = 0.3;
  for (std::size_t j = 0; j < x.size(); ++j) s += m.coef[j] * (x[j] - m.stats.mean[j]) / m.stats.scale[j];
  const double p = 1.0 / (1.0 + std::exp(-s));
  return {p, 1.0 - p};
}

Outcome explainer_fidelity() {
  LogitOracle oracle;
  oracle.coef = {0.3, -0.2, 0.15, -0.4, 0.35, 0.6, -0.25};
  oracle.stats.mean = {0.30, 0.28, 0.58, 0.50, 0.55, 110.0, 0.9};
  oracle.stats.scale = {0.03, 0.03, 0.05, 0.05, 0.06, 12.0, 0.1};
  oracle.stats.spread = oracle.stats.scale;
  PerturbationConfig pc;
  const auto e = explain_instance(oracle, oracle.stats.mean, oracle.stats, pc);
  int agree = 0;
  for (std::size_t j = 0; j < kFeatureCount; ++j) agree += std::signbit(e.importances[j]) == std::signbit(oracle.coef[j]);
  const double r2 = e.fidelity_r2.value_or(0.0);
  const bool oracle_ok = agree == 7 && r2 >= 0.9;

  int wins = 0;
  std::string counts;
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    const auto data = dataset_from_rows(gaitxai::testing::cadence_only_rows(seed));
    const auto model = train_mlp(data, TrainConfig{}, seed);
    const auto stats = TrainStats::from(model.standardizer);
    PerturbationConfig cfg;
    cfg.seed = seed;
    std::vector<Explanation> expls;
    std::vector<std::string> truth;
    for (std::size_t i = 0; i < data.size(); ++i) {
      expls.push_back(explain_instance(model, data.rows.row(i), stats, cfg));
      truth.push_back(data.class_names[data.labels[i]]);
    }
    const auto t = tally_contributions(expls, truth, cfg.contribution_threshold, kFeatureCount);
    const std::size_t cad = 5;
    bool top = t.correct > 0;
    for (std::size_t j = 0; j < kFeatureCount; ++j) {
      if (j != cad && t.positive[j] >= t.positive[cad]) top = false;
    }
    wins += top;
    counts += " " + std::to_string(t.positive[cad]) + "/" + std::to_string(t.correct);
  }
  return {oracle_ok && wins == 10,
          "oracle signs " + std::to_string(agree) + "/7, R2 " + fmt("%.4f", r2) + "; cadence top in " +
              std::to_string(wins) + "/10 cadence-only corpora (cadence positive/correct:" + counts + ")"};
}

// 9 -----------------------------------------------------------------------
Outcome statistics() {
  std::mt19937_64 rng(99);
  std::normal_distribution<double> n(0.0, 1.0);
  std::vector<double> a(50), b(50);
  for (double& v : a) v = n(rng);
  for (double& v : b) v = 5.0 + n(rng);
  const auto same = welch_t_test(a, a);
  const auto diff = welch_t_test(a, b);
  boost::math::students_t dist(diff.df);
  const double oracle = 2.0 * boost::math::cdf(boost::math::complement(dist, std::abs(diff.t)));
  const double rel = std::abs(diff.p - oracle) / oracle;
  return {same.p == 1.0 && diff.p < 1e-6 && rel < 1e-8,
          "identical p = " + fmt("%.17g", same.p) + ", separated p = " + fmt("%.3e", diff.p) +
              ", oracle rel err " + fmt("%.1e", rel)};
}

// 10 ----------------------------------------------------------------------
Outcome protocol() {
  std::mt19937_64 rng(1010);
  int trials = 0, valid = 0;
  for (int t = 0; t < 200; ++t) {
    const std::size_t subjects = 5 + rng() % 20;
    const std::size_t k = 2 + rng() % std::min<std::size_t>(subjects - 1, 9);
    Dataset d;
    d.class_names = {"KAFO1", "KAFO2"};
    std::vector<std::vector<double>> rows;
    for (std::size_t s = 0; s < subjects; ++s) {
      const std::size_t per = 1 + rng() % 8;
      for (std::size_t r = 0; r < per; ++r) {
        d.subject_ids.push_back("S" + std::to_string(s));
        d.labels.push_back(rng() % 2);
      }
    }
    d.rows = Matrix(d.labels.size(), kFeatureCount, 0.0);
    if (std::count(d.labels.begin(), d.labels.end(), 0u) == 0) d.labels[0] = 0;
    if (std::count(d.labels.begin(), d.labels.end(), 1u) == 0) d.labels[0] = 1;
    const auto folds = subject_group_kfold(d, k, rng());
    ++trials;
    bool ok = folds.size() == k;
    std::vector<int> seen(d.size(), 0);
    for (const auto& f : folds) {
      std::set<std::string> train_s, val_s;
      for (auto r : f.train_row_ids) train_s.insert(d.subject_ids[r]);
      for (auto r : f.val_row_ids) {
        val_s.insert(d.subject_ids[r]);
        ++seen[r];
      }
      for (const auto& s : val_s) ok = ok && !train_s.count(s);
      ok = ok && f.train_row_ids.size() + f.val_row_ids.size() == d.size() && !f.val_row_ids.empty();
    }
    for (int c : seen) ok = ok && c == 1;
    valid += ok;
  }

  const auto data = dataset_from_rows(gaitxai::testing::synthetic_corpus(3));
  TrainConfig cfg;
  cfg.max_epochs = 200;
  const auto r1 = run_evaluation(data, cfg, 5, 42);
  const auto r2 = run_evaluation(data, cfg, 5, 42);
  bool same = r1.folds == r2.folds;
  for (std::size_t s = 0; s < r1.systems.size(); ++s) same = same && r1.systems[s].fold_accuracy == r2.systems[s].fold_accuracy;
  const auto m1 = train_mlp(data, cfg, 42);
  const auto m2 = train_mlp(data, cfg, 42);
  same = same && to_json(m1) == to_json(m2);
  PerturbationConfig pc;
  pc.seed = 42;
  const auto stats = TrainStats::from(m1.standardizer);
  const auto e1 = explain_instance(m1, data.rows.row(0), stats, pc);
  const auto e2 = explain_instance(m2, data.rows.row(0), stats, pc);
  same = same && e1.importances == e2.importances && e1.contributions == e2.contributions;
  return {valid == trials && same, std::to_string(valid) + "/" + std::to_string(trials) +
                                       " random fold splits valid; repeated runs " +
                                       (same ? "bit-identical" : "DIFFER")};
}

}  // namespace

int main() {
  int failures = 0;
  auto report = [&](int id, const char* name, const Outcome& o) {
    std::printf("%s criterion %d (%s): %s\n", o.pass ? "PASS" : "FAIL", id, name, o.detail.c_str());
    std::fflush(stdout);
    if (!o.pass) ++failures;
  };
  auto guarded = [](const std::function<Outcome()>& f) {
    try {
      return f();
    } catch (const std::exception& e) {
      return Outcome{false, std::string("exception: ") + e.what()};
    }
  };

  report(1, "gradient correctness", guarded(gradients));
  report(2, "softmax normalization", guarded(softmax_normalization));
  report(3, "synthetic round trip", guarded([] { return synth_round_trip({25.0, 30.0}, 60, 33); }));
  {
    const auto hi = guarded([] { return synth_round_trip({60.0}, 30, 34); });
    std::printf("INFO criterion 3 (60 fps, non-gating): %s\n", hi.detail.c_str());
    int clean = 0;
    for (std::uint64_t s = 100; s < 110; ++s) clean += guarded([s] { return synth_round_trip({25.0, 30.0}, 60, s); }).pass;
    std::printf("INFO criterion 3 (seed spread, non-gating): %d/10 further 60-config runs fully in tolerance\n", clean);
  }
  report(4, "jitter immunity", guarded(jitter_immunity));
  report(5, "peak detection", guarded(rectified_sine));
  report(6, "feature equations", guarded(equations));
  Outcome info;
  report(7, "end-to-end separable corpus", guarded([&] { return end_to_end(info); }));
  std::printf("INFO criterion 7 (default learning rate, non-gating): %s\n", info.detail.c_str());
  report(8, "explainer fidelity", guarded(explainer_fidelity));
  report(9, "statistics", guarded(statistics));
  report(10, "protocol invariants", guarded(protocol));
  std::printf("SKIP criterion 11 (public dataset, non-gating): keypoint traces for the public dataset are not "
              "available offline\n");
  std::printf("%s: %d gating criteria failed\n", failures ? "FAIL" : "PASS", failures);
  return failures ? 1 : 0;
}

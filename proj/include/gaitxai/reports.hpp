#pragma once

// JSON / CSV / text renderings of evaluation, statistics and explanation
// results.

#include <cstdio>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

#include "gaitxai/evaluation.hpp"
#include "gaitxai/explainer.hpp"
#include "gaitxai/features.hpp"
#include "gaitxai/io.hpp"
#include "gaitxai/stats.hpp"

namespace gaitxai {

inline nlohmann::json to_json(const Explanation& e, std::span<const std::string_view> keys,
                              bool normalize = false) {
  const auto values = normalize ? max_normalized(e.importances) : e.importances;
  auto key = [&](std::size_t j) {
    return j < keys.size() ? std::string(keys[j]) : "feature_" + std::to_string(j);
  };
  nlohmann::json imp = nlohmann::json::object();
  for (std::size_t j = 0; j < values.size(); ++j) imp[key(j)] = values[j];
  nlohmann::json contrib = nlohmann::json::object();
  for (std::size_t j = 0; j < e.contributions.size(); ++j) contrib[key(j)] = e.contributions[j];
  nlohmann::json out = {{"instance_id", e.instance_id},
                        {"label", e.predicted.label},
                        {"confidence", e.predicted.confidence},
                        {"importances", std::move(imp)},
                        {"contributions", std::move(contrib)},
                        {"intercept", e.intercept},
                        {"normalized", normalize},
                        {"degenerate", e.degenerate}};
  out["fidelity_r2"] = e.fidelity_r2 ? nlohmann::json(*e.fidelity_r2) : nlohmann::json(nullptr);
  return out;
}

inline nlohmann::json to_json(const ContributionTally& t, std::span<const std::string_view> keys,
                              TallyBasis basis, double threshold) {
  nlohmann::json features = nlohmann::json::array();
  for (std::size_t j = 0; j < t.positive.size(); ++j) {
    features.push_back({{"feature", std::string(keys[j])},
                        {"positive_count", t.positive[j]},
                        {"negative_count", t.negative[j]}});
  }
  return {{"basis", std::string(to_string(basis))},
          {"threshold", threshold},
          {"correct", t.correct},
          {"excluded", t.excluded},
          {"features", std::move(features)}};
}

inline std::string tally_csv(const ContributionTally& t, std::span<const std::string_view> keys) {
  std::string out = "feature,positive_count,negative_count\n";
  for (std::size_t j = 0; j < t.positive.size(); ++j) {
    out += std::string(keys[j]) + "," + std::to_string(t.positive[j]) + "," +
           std::to_string(t.negative[j]) + "\n";
  }
  return out;
}

/// Side-by-side importance columns, one per explanation, rows per feature.
inline std::string render_importance_table(std::span<const Explanation> expls,
                                           std::span<const std::string_view> labels,
                                           bool normalize = false) {
  std::string out = "Features";
  for (const auto& e : expls) {
    char head[160];
    std::snprintf(head, sizeof(head), "\t%s (%s, confidence %.0f%%)", e.instance_id.c_str(),
                  e.predicted.label.c_str(), 100.0 * e.predicted.confidence);
    out += head;
  }
  out += '\n';
  std::vector<std::vector<double>> cols;
  for (const auto& e : expls) cols.push_back(normalize ? max_normalized(e.importances) : e.importances);
  for (std::size_t j = 0; j < labels.size(); ++j) {
    out += std::string(labels[j]);
    for (const auto& c : cols) {
      char cell[32];
      std::snprintf(cell, sizeof(cell), "\t%.2f", j < c.size() ? c[j] : 0.0);
      out += cell;
    }
    out += '\n';
  }
  return out;
}

inline nlohmann::json to_json(const EvalReport& r) {
  nlohmann::json systems = nlohmann::json::array();
  for (const auto& s : r.systems) {
    systems.push_back({{"system", s.system},
                       {"accuracy", s.mean_accuracy},
                       {"fold_accuracy", s.fold_accuracy}});
  }
  nlohmann::json folds = nlohmann::json::array();
  for (const auto& f : r.folds) {
    folds.push_back({{"fold_index", f.fold_index},
                     {"train_rows", f.train_row_ids.size()},
                     {"val_row_ids", f.val_row_ids}});
  }
  return {{"k", r.k},
          {"seed", r.seed},
          {"rows", r.rows},
          {"discarded_cycles", r.discarded_cycles},
          {"systems", std::move(systems)},
          {"folds", std::move(folds)}};
}

/// Accuracy table: one row per system, mean first, then each fold.
inline std::string eval_csv(const EvalReport& r) {
  std::string out = "system,accuracy";
  for (std::size_t f = 0; f < r.k; ++f) out += ",fold_" + std::to_string(f);
  out += '\n';
  for (const auto& s : r.systems) {
    out += csv::quote(s.system) + "," + format_double(s.mean_accuracy);
    for (double a : s.fold_accuracy) out += "," + format_double(a);
    out += '\n';
  }
  return out;
}

inline nlohmann::json to_json(const StatsReport& r) {
  nlohmann::json features = nlohmann::json::array();
  for (const auto& f : r.features) {
    features.push_back({{"feature", f.feature},
                        {"p_value", f.p_value},
                        {"t", f.t},
                        {"df", f.df},
                        {"mean", {f.mean[0], f.mean[1]}},
                        {"std", {f.std[0], f.std[1]}},
                        {"n", {f.n[0], f.n[1]}}});
  }
  return {{"test", "welch_t_two_sided"},
          {"class_names", r.class_names},
          {"features", std::move(features)}};
}

/// Columns follow class order: group 1 = class_names[0], group 2 = class_names[1].
inline std::string stats_csv(const StatsReport& r) {
  std::string out = "feature,p_value,mean_kafo1,mean_kafo2,std_kafo1,std_kafo2,n1,n2\n";
  for (const auto& f : r.features) {
    out += f.feature + "," + format_double(f.p_value) + "," + format_double(f.mean[0]) + "," +
           format_double(f.mean[1]) + "," + format_double(f.std[0]) + "," +
           format_double(f.std[1]) + "," + std::to_string(f.n[0]) + "," + std::to_string(f.n[1]) +
           "\n";
  }
  return out;
}

}  // namespace gaitxai

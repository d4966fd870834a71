#pragma once

// Subject-exclusive k-fold evaluation of the MLP against the linear SVM
// baseline.

#include <algorithm>
#include <cstdint>
#include <map>
#include <numeric>
#include <random>
#include <string>
#include <vector>

#include "gaitxai/dataset.hpp"
#include "gaitxai/error.hpp"
#include "gaitxai/mlp.hpp"
#include "gaitxai/svm.hpp"

namespace gaitxai {

struct FoldSplit {
  std::size_t fold_index = 0;
  std::vector<std::size_t> train_row_ids;
  std::vector<std::size_t> val_row_ids;

  bool operator==(const FoldSplit&) const = default;
};

/// Partitions subjects (never rows) into k folds. Subjects are placed
/// largest-first into the fold whose class-weighted load stays lowest, which
/// balances per-fold class counts as far as subject grouping allows. The seed
/// only orders subjects of equal size.
inline std::vector<FoldSplit> subject_group_kfold(const Dataset& data, std::size_t k,
                                                  std::uint64_t seed) {
  data.validate();
  if (k < 2) throw Error(Errc::invalid_config, "k must be >= 2");

  std::map<std::string, std::vector<std::size_t>> rows_by_subject;
  for (std::size_t i = 0; i < data.size(); ++i) rows_by_subject[data.subject_ids[i]].push_back(i);
  if (rows_by_subject.size() < k) {
    throw Error(Errc::too_few_subjects, std::to_string(rows_by_subject.size()) +
                                            " subjects cannot fill " + std::to_string(k) +
                                            " folds");
  }

  const std::size_t classes = data.class_names.size();
  const auto totals = data.class_counts();
  struct Subject {
    std::string id;
    std::vector<std::size_t> rows;
    std::vector<double> weighted;  // per-class count / class total
  };
  std::vector<Subject> subjects;
  for (auto& [id, rows] : rows_by_subject) {
    Subject s{id, rows, std::vector<double>(classes, 0.0)};
    for (std::size_t r : rows) s.weighted[data.labels[r]] += 1.0 / static_cast<double>(totals[data.labels[r]]);
    subjects.push_back(std::move(s));
  }
  std::mt19937_64 rng(seed);
  std::shuffle(subjects.begin(), subjects.end(), rng);
  std::stable_sort(subjects.begin(), subjects.end(),
                   [](const Subject& a, const Subject& b) { return a.rows.size() > b.rows.size(); });

  std::vector<std::vector<double>> load(k, std::vector<double>(classes, 0.0));
  std::vector<std::vector<std::size_t>> fold_rows(k);
  for (const auto& s : subjects) {
    std::size_t best = 0;
    double best_cost = 0.0;
    for (std::size_t f = 0; f < k; ++f) {
      // Sum of squared class loads after placement: empty folds win first,
      // then the fold that keeps every class most even.
      double cost = 0.0;
      for (std::size_t c = 0; c < classes; ++c) {
        const double v = load[f][c] + s.weighted[c];
        cost += v * v;
      }
      if (f == 0 || cost < best_cost) {
        best = f;
        best_cost = cost;
      }
    }
    for (std::size_t c = 0; c < classes; ++c) load[best][c] += s.weighted[c];
    fold_rows[best].insert(fold_rows[best].end(), s.rows.begin(), s.rows.end());
  }

  std::vector<FoldSplit> folds(k);
  for (std::size_t f = 0; f < k; ++f) {
    folds[f].fold_index = f;
    folds[f].val_row_ids = fold_rows[f];
    std::sort(folds[f].val_row_ids.begin(), folds[f].val_row_ids.end());
    for (std::size_t g = 0; g < k; ++g) {
      if (g != f) {
        folds[f].train_row_ids.insert(folds[f].train_row_ids.end(), fold_rows[g].begin(),
                                      fold_rows[g].end());
      }
    }
    std::sort(folds[f].train_row_ids.begin(), folds[f].train_row_ids.end());
  }
  return folds;
}

inline constexpr const char* kMlpSystemName = "Proposed system";
inline constexpr const char* kSvmSystemName = "Proposed Features+SVM";

struct SystemResult {
  std::string system;
  std::vector<double> fold_accuracy;
  double mean_accuracy = 0.0;
};

struct EvalReport {
  std::size_t k = 0;
  std::uint64_t seed = 0;
  std::vector<FoldSplit> folds;
  std::vector<SystemResult> systems;  // MLP first, then SVM
  std::size_t rows = 0;
  std::size_t discarded_cycles = 0;

  const SystemResult& system(const std::string& name) const {
    for (const auto& s : systems) {
      if (s.system == name) return s;
    }
    throw Error(Errc::shape_mismatch, "no system named " + name);
  }
};

namespace detail {
template <class Model>
double accuracy_on(const Model& model, const Dataset& data, const std::vector<std::size_t>& rows) {
  if (rows.empty()) return 0.0;
  std::size_t hits = 0;
  for (std::size_t r : rows) {
    if (predict(model, data.rows.row(r)).class_index == data.labels[r]) ++hits;
  }
  return static_cast<double>(hits) / static_cast<double>(rows.size());
}
}  // namespace detail

/// Each fold: fit standardizer + model on the training rows, score the
/// validation rows. Fold f trains the MLP with seed + f.
inline EvalReport run_evaluation(const Dataset& data, const TrainConfig& train_cfg, std::size_t k,
                                 std::uint64_t seed, SvmConfig svm_cfg = {}) {
  EvalReport report;
  report.k = k;
  report.seed = seed;
  report.rows = data.size();
  report.discarded_cycles = data.discarded_cycles;
  report.folds = subject_group_kfold(data, k, seed);
  SystemResult mlp{kMlpSystemName, {}, 0.0};
  SystemResult svm{kSvmSystemName, {}, 0.0};
  for (const auto& fold : report.folds) {
    const Dataset train = data.subset(fold.train_row_ids);
    const auto mlp_model = train_mlp(train, train_cfg, seed + fold.fold_index);
    mlp.fold_accuracy.push_back(detail::accuracy_on(mlp_model, data, fold.val_row_ids));
    const auto counts = train.class_counts();
    if (data.class_names.size() == 2 && counts[0] > 0 && counts[1] > 0) {
      svm_cfg.seed = seed + fold.fold_index;
      const auto svm_model = train_linear_svm(train, svm_cfg);
      svm.fold_accuracy.push_back(detail::accuracy_on(svm_model, data, fold.val_row_ids));
    } else {
      // A single-class training fold can only predict that class.
      svm.fold_accuracy.push_back(detail::accuracy_on(mlp_model, data, fold.val_row_ids));
    }
  }
  for (auto* s : {&mlp, &svm}) {
    s->mean_accuracy = std::accumulate(s->fold_accuracy.begin(), s->fold_accuracy.end(), 0.0) /
                       static_cast<double>(s->fold_accuracy.size());
  }
  report.systems = {std::move(mlp), std::move(svm)};
  return report;
}

}  // namespace gaitxai

#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "gaitxai/error.hpp"
#include "gaitxai/linalg.hpp"

namespace gaitxai {

/// Labelled feature rows grouped by subject. One row per gait cycle.
struct Dataset {
  Matrix rows;                          // n x d
  std::vector<std::size_t> labels;      // index into class_names
  std::vector<std::string> subject_ids;
  std::vector<std::string> cycle_ids;   // optional: empty or one per row
  std::vector<std::string> class_names;
  std::size_t discarded_cycles = 0;     // cycles lost upstream, for reports

  std::size_t size() const { return rows.rows(); }
  std::size_t feature_count() const { return rows.cols(); }

  void validate() const {
    if (size() == 0) throw Error(Errc::empty_dataset, "dataset has no rows");
    if (labels.size() != size() || subject_ids.size() != size() ||
        (!cycle_ids.empty() && cycle_ids.size() != size())) {
      throw Error(Errc::shape_mismatch, "dataset columns have different lengths");
    }
    for (double v : rows.data()) {
      if (!std::isfinite(v)) throw Error(Errc::shape_mismatch, "non-finite feature value");
    }
    for (std::size_t l : labels) {
      if (l >= class_names.size()) throw Error(Errc::shape_mismatch, "label out of range");
    }
  }

  Dataset subset(std::span<const std::size_t> ids) const {
    Dataset out;
    out.rows = Matrix(ids.size(), feature_count());
    out.class_names = class_names;
    for (std::size_t i = 0; i < ids.size(); ++i) {
      const auto src = rows.row(ids[i]);
      std::copy(src.begin(), src.end(), out.rows.row(i).begin());
      out.labels.push_back(labels[ids[i]]);
      out.subject_ids.push_back(subject_ids[ids[i]]);
      if (!cycle_ids.empty()) out.cycle_ids.push_back(cycle_ids[ids[i]]);
    }
    return out;
  }

  std::vector<std::size_t> class_counts() const {
    std::vector<std::size_t> counts(class_names.size(), 0);
    for (std::size_t l : labels) ++counts[l];
    return counts;
  }
};

/// Per-feature z-scoring with population statistics. Features whose spread is
/// numerically zero keep scale 1 so they standardize to a constant 0.
struct Standardizer {
  std::vector<double> mean;
  std::vector<double> std;      // scale actually applied
  std::vector<double> raw_std;  // population std before clamping

  static Standardizer fit(const Matrix& x) {
    if (x.rows() == 0) throw Error(Errc::empty_dataset, "cannot fit standardizer");
    Standardizer s;
    const std::size_t d = x.cols();
    const auto n = static_cast<double>(x.rows());
    s.mean.assign(d, 0.0);
    s.std.assign(d, 1.0);
    s.raw_std.assign(d, 0.0);
    for (std::size_t r = 0; r < x.rows(); ++r) {
      for (std::size_t c = 0; c < d; ++c) s.mean[c] += x(r, c);
    }
    for (double& m : s.mean) m /= n;
    for (std::size_t c = 0; c < d; ++c) {
      double ss = 0.0;
      for (std::size_t r = 0; r < x.rows(); ++r) {
        const double dev = x(r, c) - s.mean[c];
        ss += dev * dev;
      }
      s.raw_std[c] = std::sqrt(ss / n);
      if (s.raw_std[c] > 1e-12 * std::max(1.0, std::abs(s.mean[c]))) {
        s.std[c] = s.raw_std[c];
      } else {
        s.raw_std[c] = 0.0;
      }
    }
    return s;
  }

  std::size_t size() const { return mean.size(); }

  std::vector<double> apply(std::span<const double> x) const {
    if (x.size() != mean.size()) throw Error(Errc::shape_mismatch, "standardizer width");
    std::vector<double> z(x.size());
    for (std::size_t c = 0; c < x.size(); ++c) z[c] = (x[c] - mean[c]) / std[c];
    return z;
  }

  Matrix apply(const Matrix& x) const {
    Matrix z(x.rows(), x.cols());
    for (std::size_t r = 0; r < x.rows(); ++r) {
      const auto row = apply(x.row(r));
      std::copy(row.begin(), row.end(), z.row(r).begin());
    }
    return z;
  }

  bool operator==(const Standardizer&) const = default;
};

}  // namespace gaitxai

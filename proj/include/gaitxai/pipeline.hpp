#pragma once

// Trace -> feature rows, keeping an audit trail of cycles that produced no
// output.

#include <string>
#include <vector>

#include "gaitxai/features.hpp"
#include "gaitxai/io.hpp"
#include "gaitxai/keypoints.hpp"
#include "gaitxai/signal.hpp"

namespace gaitxai {

struct DiscardRecord {
  std::string subject_id;
  std::string source;
  std::string reason;
};

struct TraceFeatures {
  std::vector<FeatureRow> rows;
  std::vector<DiscardRecord> discarded;
  std::optional<GaitAnalysis> analysis;  // absent when the trace failed early
};

/// Runs signal processing and feature extraction on one trace. Failures never
/// throw: they become discard records. Cycle ids are `prefix` + index.
inline TraceFeatures extract_trace_features(const KeypointSequence& seq, const SignalConfig& cfg,
                                            const std::string& source,
                                            const std::string& cycle_prefix = {}) {
  TraceFeatures out;
  const auto& meta = seq.meta;
  auto discard = [&](std::string reason) {
    out.discarded.push_back({meta.subject_id, source, std::move(reason)});
  };
  const auto report = validate_sequence(seq);
  if (!report.ok()) {
    discard("invalid trace: " + report.errors.front().code);
    return out;
  }
  try {
    out.analysis = analyze_gait(heel_series(seq), cfg);
  } catch (const Error& e) {
    discard(e.what());
    return out;
  }
  const auto& a = *out.analysis;
  if (a.cycles.empty()) {
    discard("no complete gait cycle (" + std::to_string(a.labeled.size()) + " labeled maxima)");
  }
  for (std::size_t c = 0; c < a.cycles.size(); ++c) {
    try {
      FeatureRow row;
      row.subject_id = meta.subject_id;
      row.cycle_id = cycle_prefix + std::to_string(c);
      row.features = feature_vector(a.cycles[c], meta);
      if (meta.label) row.label = std::string(to_string(*meta.label));
      out.rows.push_back(std::move(row));
    } catch (const Error& e) {
      discard("cycle " + std::to_string(c) + ": " + e.what());
    }
  }
  return out;
}

}  // namespace gaitxai

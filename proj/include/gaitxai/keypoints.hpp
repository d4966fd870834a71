#pragma once

// Pose-trace ingestion: parsing, validation and heel/toe series extraction.

#include <cmath>
#include <cstddef>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

#include "gaitxai/error.hpp"

namespace gaitxai {

enum class Side { left, right };

inline std::string_view to_string(Side side) {
  return side == Side::left ? "left" : "right";
}

inline Side opposite(Side side) {
  return side == Side::left ? Side::right : Side::left;
}

enum class GaitLabel { kafo1, kafo2 };

inline std::string_view to_string(GaitLabel label) {
  return label == GaitLabel::kafo1 ? "KAFO1" : "KAFO2";
}

inline std::optional<GaitLabel> parse_gait_label(std::string_view text) {
  if (text == "KAFO1") return GaitLabel::kafo1;
  if (text == "KAFO2") return GaitLabel::kafo2;
  return std::nullopt;
}

using LandmarkMap = std::map<std::string, std::size_t>;

namespace landmarks {
inline constexpr std::string_view kLeftHeel = "left_heel";
inline constexpr std::string_view kRightHeel = "right_heel";
inline constexpr std::string_view kLeftFootIndex = "left_foot_index";
inline constexpr std::string_view kRightFootIndex = "right_foot_index";
inline constexpr std::size_t kDefaultCount = 33;

/// 33-point pose topology: heels at 29/30, foot tips at 31/32.
inline LandmarkMap default_map() {
  return {{std::string(kLeftHeel), 29},
          {std::string(kRightHeel), 30},
          {std::string(kLeftFootIndex), 31},
          {std::string(kRightFootIndex), 32}};
}
}  // namespace landmarks

struct SequenceMeta {
  std::string subject_id;
  double height_m = 0.0;
  double frame_rate_hz = 0.0;
  Side orthotic_side = Side::left;
  std::optional<GaitLabel> label;
  LandmarkMap landmark_map = landmarks::default_map();

  bool operator==(const SequenceMeta&) const = default;
};

struct Landmark {
  double x = 0.0;
  double y = 0.0;
  double visibility = 1.0;

  bool operator==(const Landmark&) const = default;
};

struct KeypointFrame {
  std::vector<Landmark> landmarks;

  bool operator==(const KeypointFrame&) const = default;
};

struct KeypointSequence {
  SequenceMeta meta;
  std::vector<KeypointFrame> frames;

  std::size_t landmark_count() const {
    return frames.empty() ? 0 : frames.front().landmarks.size();
  }

  bool operator==(const KeypointSequence&) const = default;
};

struct HeelSeries {
  std::vector<double> left_heel_x;
  std::vector<double> right_heel_x;
  std::vector<double> left_toe_x;
  std::vector<double> right_toe_x;
  SequenceMeta meta;

  std::size_t size() const { return left_heel_x.size(); }
};

namespace detail {

inline const nlohmann::json& require_field(const nlohmann::json& obj,
                                           const char* key, Errc missing) {
  auto it = obj.find(key);
  if (it == obj.end() || it->is_null()) {
    throw Error(missing, std::string("field '") + key + "' is absent");
  }
  return *it;
}

inline double finite_number(const nlohmann::json& value, const char* what) {
  if (!value.is_number()) {
    throw Error(Errc::malformed_document, std::string(what) + " is not a number");
  }
  const double v = value.get<double>();
  if (!std::isfinite(v)) {
    throw Error(Errc::malformed_document, std::string(what) + " is not finite");
  }
  return v;
}

inline Side parse_side(const nlohmann::json& value) {
  if (value.is_string()) {
    const auto& s = value.get_ref<const std::string&>();
    if (s == "left") return Side::left;
    if (s == "right") return Side::right;
  }
  throw Error(Errc::malformed_document,
              "orthotic_side must be \"left\" or \"right\"");
}

}  // namespace detail

/// Parses a pose-trace JSON document. Coordinates are carried through as
/// parsed doubles; an omitted `landmark_map` falls back to the 33-point map.
inline KeypointSequence parse_pose_trace(std::string_view doc) {
  nlohmann::json root;
  try {
    root = nlohmann::json::parse(doc.begin(), doc.end());
  } catch (const nlohmann::json::parse_error& e) {
    throw Error(Errc::malformed_document, e.what());
  }
  if (!root.is_object()) {
    throw Error(Errc::malformed_document, "top level must be an object");
  }

  KeypointSequence seq;
  SequenceMeta& meta = seq.meta;

  const auto& subject = detail::require_field(root, "subject_id",
                                              Errc::malformed_document);
  if (!subject.is_string()) {
    throw Error(Errc::malformed_document, "subject_id must be a string");
  }
  meta.subject_id = subject.get<std::string>();
  meta.height_m = detail::finite_number(
      detail::require_field(root, "height_m", Errc::missing_meta), "height_m");
  meta.frame_rate_hz = detail::finite_number(
      detail::require_field(root, "frame_rate_hz", Errc::missing_meta),
      "frame_rate_hz");
  meta.orthotic_side = detail::parse_side(
      detail::require_field(root, "orthotic_side", Errc::missing_meta));
  if (meta.height_m <= 0.0 || meta.frame_rate_hz <= 0.0) {
    throw Error(Errc::malformed_document,
                "height_m and frame_rate_hz must be strictly positive");
  }

  if (auto it = root.find("label"); it != root.end() && !it->is_null()) {
    if (!it->is_string()) {
      throw Error(Errc::malformed_document, "label must be a string");
    }
    meta.label = parse_gait_label(it->get_ref<const std::string&>());
    if (!meta.label) {
      throw Error(Errc::malformed_document, "label must be KAFO1 or KAFO2");
    }
  }

  if (auto it = root.find("landmark_map"); it != root.end() && !it->is_null()) {
    if (!it->is_object()) {
      throw Error(Errc::malformed_document, "landmark_map must be an object");
    }
    meta.landmark_map.clear();
    for (const auto& [name, index] : it->items()) {
      if (!index.is_number_integer() || index.get<long long>() < 0) {
        throw Error(Errc::malformed_document,
                    "landmark_map entry '" + name + "' is not a non-negative integer");
      }
      meta.landmark_map.emplace(name, index.get<std::size_t>());
    }
  }

  const auto& frames = detail::require_field(root, "frames",
                                             Errc::malformed_document);
  if (!frames.is_array()) {
    throw Error(Errc::malformed_document, "frames must be an array");
  }
  seq.frames.reserve(frames.size());
  for (std::size_t f = 0; f < frames.size(); ++f) {
    const auto& frame = frames[f];
    if (!frame.is_array()) {
      throw Error(Errc::malformed_document,
                  "frame " + std::to_string(f) + " is not an array");
    }
    KeypointFrame kf;
    kf.landmarks.reserve(frame.size());
    for (const auto& lm : frame) {
      if (!lm.is_object()) {
        throw Error(Errc::malformed_document,
                    "landmark in frame " + std::to_string(f) + " is not an object");
      }
      Landmark l;
      l.x = detail::finite_number(detail::require_field(lm, "x", Errc::malformed_document), "x");
      l.y = detail::finite_number(detail::require_field(lm, "y", Errc::malformed_document), "y");
      l.visibility = detail::finite_number(
          detail::require_field(lm, "v", Errc::malformed_document), "v");
      kf.landmarks.push_back(l);
    }
    if (!seq.frames.empty() &&
        kf.landmarks.size() != seq.frames.front().landmarks.size()) {
      throw Error(Errc::inconsistent_landmark_count,
                  "frame " + std::to_string(f) + " has " +
                      std::to_string(kf.landmarks.size()) + " landmarks, expected " +
                      std::to_string(seq.frames.front().landmarks.size()));
    }
    seq.frames.push_back(std::move(kf));
  }

  std::set<std::size_t> seen;
  for (const auto& [name, index] : meta.landmark_map) {
    if (!seen.insert(index).second) {
      throw Error(Errc::malformed_document,
                  "landmark_map index " + std::to_string(index) + " is used twice");
    }
    if (!seq.frames.empty() && index >= seq.landmark_count()) {
      throw Error(Errc::malformed_document,
                  "landmark_map entry '" + name + "' is out of range");
    }
  }
  return seq;
}

inline nlohmann::json to_json(const KeypointSequence& seq) {
  nlohmann::json root;
  root["subject_id"] = seq.meta.subject_id;
  root["height_m"] = seq.meta.height_m;
  root["frame_rate_hz"] = seq.meta.frame_rate_hz;
  root["orthotic_side"] = std::string(to_string(seq.meta.orthotic_side));
  if (seq.meta.label) root["label"] = std::string(to_string(*seq.meta.label));
  nlohmann::json map = nlohmann::json::object();
  for (const auto& [name, index] : seq.meta.landmark_map) map[name] = index;
  root["landmark_map"] = std::move(map);
  nlohmann::json frames = nlohmann::json::array();
  for (const auto& frame : seq.frames) {
    nlohmann::json arr = nlohmann::json::array();
    for (const auto& lm : frame.landmarks) {
      arr.push_back({{"x", lm.x}, {"y", lm.y}, {"v", lm.visibility}});
    }
    frames.push_back(std::move(arr));
  }
  root["frames"] = std::move(frames);
  return root;
}

/// Compact serialization; doubles are written in shortest round-trip form so
/// parse_pose_trace(serialize_pose_trace(s)) == s.
inline std::string serialize_pose_trace(const KeypointSequence& seq) {
  return to_json(seq).dump();
}

struct Finding {
  std::string code;
  std::string message;
  std::size_t count = 1;
  std::optional<std::size_t> first_frame;
};

struct ValidationReport {
  std::vector<Finding> errors;
  std::vector<Finding> warnings;

  bool ok() const { return errors.empty(); }
  bool empty() const { return errors.empty() && warnings.empty(); }
};

struct ValidationOptions {
  // Off by default: no visibility rule is applied unless a threshold is set.
  std::optional<double> min_heel_visibility;
};

inline ValidationReport validate_sequence(const KeypointSequence& seq,
                                          const ValidationOptions& opts = {}) {
  ValidationReport report;
  auto tally = [](std::vector<Finding>& into, std::string code,
                  std::string message, std::size_t frame) {
    for (auto& f : into) {
      if (f.code == code) {
        ++f.count;
        return;
      }
    }
    into.push_back({std::move(code), std::move(message), 1, frame});
  };

  const auto& meta = seq.meta;
  if (!(meta.height_m > 0.0) || !std::isfinite(meta.height_m)) {
    report.errors.push_back({"invalid_height", "height_m must be finite and > 0", 1, {}});
  }
  if (!(meta.frame_rate_hz > 0.0) || !std::isfinite(meta.frame_rate_hz)) {
    report.errors.push_back(
        {"invalid_frame_rate", "frame_rate_hz must be finite and > 0", 1, {}});
  }
  if (seq.frames.size() < 2) {
    report.errors.push_back({"too_short", "at least 2 frames are required", 1, {}});
  }

  const std::size_t count = seq.landmark_count();
  std::set<std::size_t> seen;
  for (const auto& [name, index] : meta.landmark_map) {
    if (!seen.insert(index).second || (count > 0 && index >= count)) {
      report.errors.push_back(
          {"invalid_landmark_map", "landmark_map entry '" + name + "' is invalid", 1, {}});
    }
  }

  std::vector<std::size_t> heel_indices;
  for (auto name : {landmarks::kLeftHeel, landmarks::kRightHeel}) {
    if (auto it = meta.landmark_map.find(std::string(name));
        it != meta.landmark_map.end() && it->second < count) {
      heel_indices.push_back(it->second);
    }
  }

  for (std::size_t f = 0; f < seq.frames.size(); ++f) {
    const auto& lms = seq.frames[f].landmarks;
    if (lms.size() != count) {
      tally(report.errors, "inconsistent_landmark_count",
            "landmark count differs from the first frame", f);
      continue;
    }
    for (const auto& lm : lms) {
      if (!std::isfinite(lm.x) || !std::isfinite(lm.y) || !std::isfinite(lm.visibility)) {
        tally(report.errors, "nonfinite_coordinate", "NaN or Inf coordinate", f);
      } else if (lm.x < 0.0 || lm.x > 1.0 || lm.y < 0.0 || lm.y > 1.0) {
        tally(report.warnings, "out_of_frame_coordinate",
              "coordinate outside [0,1]", f);
      }
    }
    if (opts.min_heel_visibility) {
      for (std::size_t idx : heel_indices) {
        if (lms[idx].visibility < *opts.min_heel_visibility) {
          tally(report.warnings, "low_heel_visibility",
                "heel visibility below threshold", f);
        }
      }
    }
  }
  return report;
}

inline HeelSeries heel_series(const KeypointSequence& seq) {
  auto index_of = [&](std::string_view name) {
    auto it = seq.meta.landmark_map.find(std::string(name));
    if (it == seq.meta.landmark_map.end()) {
      throw Error(Errc::missing_landmark,
                  "landmark_map has no entry for '" + std::string(name) + "'");
    }
    if (it->second >= seq.landmark_count()) {
      throw Error(Errc::missing_landmark,
                  "landmark '" + std::string(name) + "' is out of range");
    }
    return it->second;
  };
  const std::size_t lh = index_of(landmarks::kLeftHeel);
  const std::size_t rh = index_of(landmarks::kRightHeel);
  const std::size_t lt = index_of(landmarks::kLeftFootIndex);
  const std::size_t rt = index_of(landmarks::kRightFootIndex);

  HeelSeries out;
  out.meta = seq.meta;
  const std::size_t n = seq.frames.size();
  out.left_heel_x.reserve(n);
  out.right_heel_x.reserve(n);
  out.left_toe_x.reserve(n);
  out.right_toe_x.reserve(n);
  for (const auto& frame : seq.frames) {
    if (frame.landmarks.size() != seq.landmark_count()) {
      throw Error(Errc::inconsistent_landmark_count, "ragged sequence");
    }
    out.left_heel_x.push_back(frame.landmarks[lh].x);
    out.right_heel_x.push_back(frame.landmarks[rh].x);
    out.left_toe_x.push_back(frame.landmarks[lt].x);
    out.right_toe_x.push_back(frame.landmarks[rt].x);
  }
  return out;
}

}  // namespace gaitxai

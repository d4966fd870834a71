#include <gtest/gtest.h>

#include <cmath>
#include <limits>
#include <random>

#include "gaitxai/keypoints.hpp"
#include "gaitxai/synth.hpp"
#include "test_util.hpp"

using namespace gaitxai;
using gaitxai::testing::blank_sequence;

namespace {

nlohmann::json one_frame_doc(std::size_t landmarks = 33) {
  nlohmann::json frame = nlohmann::json::array();
  for (std::size_t i = 0; i < landmarks; ++i) {
    frame.push_back({{"x", 0.1 + 0.01 * static_cast<double>(i)}, {"y", 0.25}, {"v", 0.9}});
  }
  return {{"subject_id", "P7"},
          {"height_m", 1.7},
          {"frame_rate_hz", 30},
          {"orthotic_side", "left"},
          {"frames", nlohmann::json::array({frame})}};
}

}  // namespace

TEST(ParsePoseTrace, SingleFrameMetaRoundTrips) {
  const auto seq = parse_pose_trace(one_frame_doc().dump());
  ASSERT_EQ(seq.frames.size(), 1u);
  EXPECT_EQ(seq.landmark_count(), 33u);
  EXPECT_EQ(seq.meta.subject_id, "P7");
  EXPECT_EQ(seq.meta.height_m, 1.7);
  EXPECT_EQ(seq.meta.frame_rate_hz, 30.0);
  EXPECT_EQ(seq.meta.orthotic_side, Side::left);
  EXPECT_FALSE(seq.meta.label.has_value());
  EXPECT_EQ(seq.meta.landmark_map, landmarks::default_map());
  EXPECT_EQ(seq.frames[0].landmarks[3].x, 0.1 + 0.01 * 3.0);
  EXPECT_EQ(parse_pose_trace(serialize_pose_trace(seq)), seq);
}

TEST(ParsePoseTrace, MissingMetaFields) {
  for (const char* key : {"height_m", "frame_rate_hz", "orthotic_side"}) {
    auto doc = one_frame_doc();
    doc.erase(key);
    EXPECT_ERRC(parse_pose_trace(doc.dump()), Errc::missing_meta);
  }
}

TEST(ParsePoseTrace, InconsistentLandmarkCount) {
  auto doc = one_frame_doc();
  auto short_frame = one_frame_doc(32)["frames"][0];
  doc["frames"].push_back(short_frame);
  doc["frames"].push_back(doc["frames"][0]);
  EXPECT_ERRC(parse_pose_trace(doc.dump()), Errc::inconsistent_landmark_count);
}

TEST(ParsePoseTrace, MalformedInputs) {
  EXPECT_ERRC(parse_pose_trace("{not json"), Errc::malformed_document);
  EXPECT_ERRC(parse_pose_trace("[1,2]"), Errc::malformed_document);
  auto doc = one_frame_doc();
  doc["label"] = "KAFO3";
  EXPECT_ERRC(parse_pose_trace(doc.dump()), Errc::malformed_document);
  doc = one_frame_doc();
  doc["orthotic_side"] = "middle";
  EXPECT_ERRC(parse_pose_trace(doc.dump()), Errc::malformed_document);
  doc = one_frame_doc();
  doc["height_m"] = -1.0;
  EXPECT_ERRC(parse_pose_trace(doc.dump()), Errc::malformed_document);
  doc = one_frame_doc();
  doc["landmark_map"] = {{"left_heel", 1}, {"right_heel", 1}};
  EXPECT_ERRC(parse_pose_trace(doc.dump()), Errc::malformed_document);
  doc = one_frame_doc();
  doc["landmark_map"] = {{"left_heel", 40}};
  EXPECT_ERRC(parse_pose_trace(doc.dump()), Errc::malformed_document);
  doc = one_frame_doc();
  doc["frames"][0][0].erase("v");
  EXPECT_ERRC(parse_pose_trace(doc.dump()), Errc::malformed_document);
}

TEST(ParsePoseTrace, LabelAndCustomMap) {
  auto doc = one_frame_doc(4);
  doc["label"] = "KAFO2";
  doc["landmark_map"] = {{"left_heel", 0}, {"right_heel", 1}, {"left_foot_index", 2},
                         {"right_foot_index", 3}};
  const auto seq = parse_pose_trace(doc.dump());
  ASSERT_TRUE(seq.meta.label.has_value());
  EXPECT_EQ(*seq.meta.label, GaitLabel::kafo2);
  const auto heels = heel_series(seq);
  EXPECT_EQ(heels.left_heel_x[0], 0.1);
  EXPECT_EQ(heels.right_toe_x[0], 0.1 + 0.01 * 3.0);
}

// Property: parse(serialize(s)) == s for random valid sequences.
TEST(ParsePoseTrace, SerializeRoundTripProperty) {
  std::mt19937_64 rng(42);
  std::uniform_real_distribution<double> u(-0.2, 1.2);
  std::uniform_int_distribution<int> len(1, 12);
  for (int trial = 0; trial < 50; ++trial) {
    auto seq = blank_sequence(static_cast<std::size_t>(len(rng)), 1.5 + u(rng) * 0.3, 25.0 + trial);
    seq.meta.subject_id = "subject \"" + std::to_string(trial) + "\"";
    seq.meta.orthotic_side = trial % 2 ? Side::right : Side::left;
    if (trial % 3 == 0) seq.meta.label = GaitLabel::kafo1;
    for (auto& f : seq.frames) {
      for (auto& lm : f.landmarks) lm = {u(rng), u(rng), std::abs(u(rng))};
    }
    EXPECT_EQ(parse_pose_trace(serialize_pose_trace(seq)), seq);
  }
}

TEST(ValidateSequence, CleanTraceHasEmptyReport) {
  const auto seq = blank_sequence(10);
  EXPECT_TRUE(validate_sequence(seq).empty());
}

TEST(ValidateSequence, OutOfFrameIsWarningOnly) {
  auto seq = blank_sequence(10);
  seq.frames[4].landmarks[29].x = 1.4;
  const auto r = validate_sequence(seq);
  EXPECT_TRUE(r.ok());
  ASSERT_EQ(r.warnings.size(), 1u);
  EXPECT_EQ(r.warnings[0].code, "out_of_frame_coordinate");
  EXPECT_EQ(r.warnings[0].first_frame, 4u);
}

TEST(ValidateSequence, SingleFrameIsTooShort) {
  const auto r = validate_sequence(blank_sequence(1));
  ASSERT_EQ(r.errors.size(), 1u);
  EXPECT_EQ(r.errors[0].code, "too_short");
}

TEST(ValidateSequence, StructuralErrors) {
  auto seq = blank_sequence(5);
  seq.frames[2].landmarks[0].y = std::numeric_limits<double>::quiet_NaN();
  seq.frames[3].landmarks.pop_back();
  seq.meta.height_m = 0.0;
  const auto r = validate_sequence(seq);
  std::vector<std::string> codes;
  for (const auto& f : r.errors) codes.push_back(f.code);
  EXPECT_NE(std::find(codes.begin(), codes.end(), "invalid_height"), codes.end());
  EXPECT_NE(std::find(codes.begin(), codes.end(), "nonfinite_coordinate"), codes.end());
  EXPECT_NE(std::find(codes.begin(), codes.end(), "inconsistent_landmark_count"), codes.end());
}

TEST(ValidateSequence, VisibilityGatingIsOptIn) {
  auto seq = blank_sequence(4);
  seq.frames[1].landmarks[29].visibility = 0.1;
  EXPECT_TRUE(validate_sequence(seq).empty());
  ValidationOptions opts;
  opts.min_heel_visibility = 0.5;
  const auto r = validate_sequence(seq, opts);
  ASSERT_EQ(r.warnings.size(), 1u);
  EXPECT_EQ(r.warnings[0].code, "low_heel_visibility");
}

TEST(HeelSeries, ProjectsLeftHeel) {
  auto seq = blank_sequence(2);
  seq.frames[0].landmarks[29].x = 0.4;
  seq.frames[1].landmarks[29].x = 0.5;
  const auto before = seq;
  const auto h = heel_series(seq);
  EXPECT_EQ(h.left_heel_x, (std::vector<double>{0.4, 0.5}));
  EXPECT_EQ(h.size(), 2u);
  EXPECT_EQ(h.right_heel_x.size(), 2u);
  EXPECT_EQ(h.left_toe_x.size(), 2u);
  EXPECT_EQ(h.right_toe_x.size(), 2u);
  EXPECT_EQ(seq, before);
}

TEST(HeelSeries, MissingLandmark) {
  auto seq = blank_sequence(3);
  seq.meta.landmark_map.erase("right_foot_index");
  EXPECT_ERRC(heel_series(seq), Errc::missing_landmark);
}

TEST(HeelSeries, MatchesSynthEmittedCoordinates) {
  SynthConfig cfg;
  cfg.keypoint_noise_std = 0.004;
  cfg.camera_jitter_amp = 0.05;
  cfg.seed = 9;
  const auto walk = generate_walk(cfg);
  const auto h = heel_series(walk.sequence);
  ASSERT_EQ(h.size(), walk.sequence.frames.size());
  for (std::size_t t = 0; t < h.size(); ++t) {
    const auto& lms = walk.sequence.frames[t].landmarks;
    EXPECT_EQ(h.left_heel_x[t], lms[29].x);
    EXPECT_EQ(h.right_heel_x[t], lms[30].x);
    EXPECT_EQ(h.left_toe_x[t], lms[31].x);
    EXPECT_EQ(h.right_toe_x[t], lms[32].x);
  }
}

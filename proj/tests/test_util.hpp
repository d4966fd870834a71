#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "gaitxai/gaitxai.hpp"

namespace gaitxai::testing {

/// A sequence of `frames` frames with 33 landmarks at (0.5, 0.5); heels and
/// toes are then set per frame by the caller.
inline KeypointSequence blank_sequence(std::size_t frames, double height = 1.7,
                                       double fps = 30.0) {
  KeypointSequence seq;
  seq.meta.subject_id = "P1";
  seq.meta.height_m = height;
  seq.meta.frame_rate_hz = fps;
  seq.meta.orthotic_side = Side::left;
  seq.frames.assign(frames, KeypointFrame{std::vector<Landmark>(33, Landmark{0.5, 0.5, 0.9})});
  return seq;
}

inline GaitCycle make_cycle(std::array<std::size_t, 3> frames, std::array<double, 3> values,
                            Side first_leg, Side orthotic_side) {
  GaitCycle c;
  Side leg = first_leg;
  for (std::size_t i = 0; i < 3; ++i) {
    c.maxima[i] = {frames[i], values[i], leg, leg == orthotic_side ? Role::ol : Role::nol};
    leg = opposite(leg);
  }
  c.meta.orthotic_side = orthotic_side;
  return c;
}

/// Two-class dataset from explicit rows; subject i gets rows [i*per, (i+1)*per).
inline Dataset make_dataset(const std::vector<std::vector<double>>& rows,
                            const std::vector<std::size_t>& labels,
                            const std::vector<std::string>& subjects,
                            std::vector<std::string> class_names = {"KAFO1", "KAFO2"}) {
  Dataset d;
  d.rows = Matrix(rows.size(), rows.empty() ? 0 : rows.front().size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    for (std::size_t j = 0; j < rows[i].size(); ++j) d.rows(i, j) = rows[i][j];
  }
  d.labels = labels;
  d.subject_ids = subjects;
  d.class_names = std::move(class_names);
  return d;
}

}  // namespace gaitxai::testing

#define EXPECT_ERRC(statement, errc)                                              \
  do {                                                                           \
    try {                                                                        \
      statement;                                                                 \
      ADD_FAILURE() << "expected " << ::gaitxai::to_string(errc) << ", nothing thrown"; \
    } catch (const ::gaitxai::Error& e_) {                                       \
      EXPECT_EQ(e_.code(), errc) << e_.what();                                   \
    }                                                                            \
  } while (0)

#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace gaitxai {

enum class Errc {
  malformed_document,
  missing_meta,
  inconsistent_landmark_count,
  missing_landmark,
  ambiguous_direction,
  degenerate_cycle,
  shape_mismatch,
  empty_dataset,
  not_binary,
  too_few_subjects,
  insufficient_samples,
  invalid_config,
  io_error,
};

inline std::string_view to_string(Errc code) {
  switch (code) {
    case Errc::malformed_document: return "MalformedDocument";
    case Errc::missing_meta: return "MissingMeta";
    case Errc::inconsistent_landmark_count: return "InconsistentLandmarkCount";
    case Errc::missing_landmark: return "MissingLandmark";
    case Errc::ambiguous_direction: return "AmbiguousDirection";
    case Errc::degenerate_cycle: return "DegenerateCycle";
    case Errc::shape_mismatch: return "ShapeMismatch";
    case Errc::empty_dataset: return "EmptyDataset";
    case Errc::not_binary: return "NotBinary";
    case Errc::too_few_subjects: return "TooFewSubjects";
    case Errc::insufficient_samples: return "InsufficientSamples";
    case Errc::invalid_config: return "InvalidConfig";
    case Errc::io_error: return "IoError";
  }
  return "Unknown";
}

/// Every failure raised by the library carries one of the codes above so
/// callers (and the CLI exit-code mapping) can branch without string matching.
class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what),
        code_(code) {}

  Errc code() const noexcept { return code_; }

 private:
  Errc code_;
};

}  // namespace gaitxai

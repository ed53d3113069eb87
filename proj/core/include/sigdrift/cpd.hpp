#pragma once

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <vector>

#include "sigdrift/core.hpp"
#include "sigdrift/similarity.hpp"

namespace sigdrift {

// T_S. A trial is anomalous when it is strictly less similar than `value`
// (below it for PCC/CS, above it for ED/RMSE).
struct AnomalyThreshold {
  SimilarityMethod method = SimilarityMethod::kPcc;
  double value = 0.0;
};

// T_f and F_thresh of the event rule.
struct EventConfig {
  std::size_t window_length = 30;
  std::size_t frequency_threshold = 1;

  void validate() const;
};

struct ChangePoint {
  std::size_t grid_index = 0;  // last index of the window that fired
  std::size_t anomaly_count = 0;
  std::size_t window_start = 0;
  std::size_t window_length = 0;

  friend bool operator==(const ChangePoint&, const ChangePoint&) = default;
};

struct AnomalyCheck {
  bool anomalous = false;
  double similarity = 0.0;
};

// Similarity of a normalized trial against the signature slice over its
// window, using the row named by the trial's parameter.
double trial_similarity(const TrialExperience& exp, const Signature& sig, SimilarityMethod method);

// Least similar past user: minimum for PCC/CS, maximum distance for ED/RMSE.
AnomalyThreshold calibrate_similarity_threshold(std::span<const TrialExperience> past,
                                                const Signature& sig, SimilarityMethod method);

// F_thresh = largest number of past users, within one T_f-aligned window,
// whose similarity ties T_S. Never below 1.
EventConfig calibrate_frequency_threshold(std::span<const TrialExperience> past,
                                          const Signature& sig, const AnomalyThreshold& t_s,
                                          std::size_t window_length);

AnomalyCheck is_anomalous(const TrialExperience& exp, const Signature& sig,
                          const AnomalyThreshold& threshold);

struct AnomalyFlag {
  std::size_t index = 0;
  bool anomalous = false;
  double similarity = 0.0;
};

// One change point per non-overlapping T_f window whose anomaly count
// strictly exceeds F_thresh. Flags must be sorted by index.
std::vector<ChangePoint> detect_events(std::span<const AnomalyFlag> flags,
                                       const EventConfig& config);

// Debug CSV: `index,flag,similarity`.
std::vector<AnomalyFlag> read_anomaly_flags(std::istream& in);
std::vector<AnomalyFlag> read_anomaly_flags(const std::filesystem::path& path);
void write_anomaly_flags(std::span<const AnomalyFlag> flags, std::ostream& out);

}  // namespace sigdrift

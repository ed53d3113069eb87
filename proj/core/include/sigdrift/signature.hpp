#pragma once

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "sigdrift/core.hpp"

namespace sigdrift {

// Trial experiences of several users for one parameter over one window.
class TrialCohort {
 public:
  // Throws ShapeError unless every experience has the cohort's parameter,
  // start and length.
  explicit TrialCohort(std::vector<TrialExperience> experiences);

  [[nodiscard]] const std::vector<TrialExperience>& experiences() const noexcept {
    return experiences_;
  }
  [[nodiscard]] const std::string& parameter() const noexcept {
    return experiences_.front().parameter;
  }
  [[nodiscard]] std::size_t window_start() const noexcept {
    return experiences_.front().trial_start;
  }
  [[nodiscard]] std::size_t window_length() const noexcept {
    return experiences_.front().trial_length;
  }

 private:
  std::vector<TrialExperience> experiences_;
};

// Normalized averaging: per parameter, average the users at every
// timestamp, then divide the mean series by its population std. Each cohort
// must span the whole grid and each parameter may appear only once.
Signature generate_signature(std::span<const TrialCohort> cohorts, const TimeGrid& grid,
                             std::string provider_id = {});

// Same contract as generate_signature; used on the current trial users once a
// change point fires.
Signature recompute_signature(std::span<const TrialCohort> current_cohorts, const TimeGrid& grid,
                              std::string provider_id = {});

// Piecewise aggregate approximation. Frame j covers
// [round(j*n/target), round((j+1)*n/target)) with round-half-up.
Series paa(SeriesView values, std::size_t target_length);

// First input index of PAA frame j (j == target gives n).
constexpr std::size_t paa_frame_start(std::size_t n, std::size_t target_length, std::size_t j) {
  return (2 * j * n + target_length) / (2 * target_length);
}

// Trial cohort CSV: header `user_id,parameter,start,v0,...`, one line per
// user. Lines are grouped into cohorts by (parameter, start).
std::vector<TrialCohort> read_cohorts(std::istream& in);
std::vector<TrialCohort> read_cohorts(const std::filesystem::path& path);
void write_cohorts(std::span<const TrialCohort> cohorts, std::ostream& out);

}  // namespace sigdrift

#pragma once

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "sigdrift/series.hpp"

namespace sigdrift {

// Allowed deviation of a normalized row's population std from 1.
inline constexpr double kUnitStdTolerance = 1e-9;

// Uniform grid of timestamps shared by every series of a signature.
class TimeGrid {
 public:
  explicit TimeGrid(std::size_t length, std::string resolution = "day");

  [[nodiscard]] std::size_t length() const noexcept { return length_; }
  [[nodiscard]] const std::string& resolution() const noexcept { return resolution_; }

  friend bool operator==(const TimeGrid&, const TimeGrid&) = default;

 private:
  std::size_t length_;
  std::string resolution_;
};

// One QoS parameter's series over a grid.
struct QoSSeries {
  std::string parameter;
  Series values;
  std::string unit;

  friend bool operator==(const QoSSeries&, const QoSSeries&) = default;
};

enum class RowScaling {
  kUnitStd,  // every row has population std 1 (a proper signature)
  kRaw,      // derived data, e.g. a noisy or spliced recomputation
};

// Matrix of relative-performance series: one row per QoS parameter,
// one column per grid timestamp.
class Signature {
 public:
  // Validates the rows against the grid. With kUnitStd each row must already
  // have unit population std; use from_raw_rows() to normalize first.
  Signature(std::string provider_id, TimeGrid grid, std::vector<QoSSeries> rows,
            RowScaling scaling = RowScaling::kUnitStd);

  // Divides each row by its population std. Throws ConstantSeriesError on a
  // zero-variance row.
  static Signature from_raw_rows(std::string provider_id, TimeGrid grid,
                                 std::vector<QoSSeries> rows);

  [[nodiscard]] const std::string& provider_id() const noexcept { return provider_id_; }
  [[nodiscard]] const TimeGrid& grid() const noexcept { return grid_; }
  [[nodiscard]] const std::vector<QoSSeries>& rows() const noexcept { return rows_; }
  [[nodiscard]] const QoSSeries& row(std::size_t i) const { return rows_.at(i); }
  [[nodiscard]] std::size_t row_count() const noexcept { return rows_.size(); }
  [[nodiscard]] std::size_t length() const noexcept { return grid_.length(); }
  [[nodiscard]] RowScaling scaling() const noexcept { return scaling_; }

  // Index of the row for `parameter`; throws ShapeError when absent.
  [[nodiscard]] std::size_t row_index(const std::string& parameter) const;

  // Copy of columns [start, start + length) as a raw-scaled signature.
  [[nodiscard]] Signature slice(std::size_t start, std::size_t length) const;

  // Same provider and grid, new values. Row names and units are kept.
  [[nodiscard]] Signature with_values(std::vector<Series> values,
                                      RowScaling scaling = RowScaling::kRaw) const;

  friend bool operator==(const Signature&, const Signature&) = default;

 private:
  std::string provider_id_;
  TimeGrid grid_;
  std::vector<QoSSeries> rows_;
  RowScaling scaling_;
};

// The QoS a single trial user observed over their trial window.
struct TrialExperience {
  std::string user_id;
  std::string parameter;
  Series values;
  std::size_t trial_start = 0;
  std::size_t trial_length = 0;
};

// Checks values.size() == trial_length and that the window is a strict
// sub-period of `grid`.
void validate_trial(const TrialExperience& exp, const TimeGrid& grid);

enum class RowPolicy {
  kRenormalize,  // rows without unit std are rescaled and reported
  kKeepRaw,      // rows are loaded verbatim (noisy recomputations)
};

struct LoadedSignature {
  Signature signature;
  // Parameters whose rows were rescaled on load.
  std::vector<std::string> renormalized_rows;

  [[nodiscard]] bool renormalized() const noexcept { return !renormalized_rows.empty(); }
};

LoadedSignature read_signature(std::istream& in, std::string provider_id = {},
                               RowPolicy policy = RowPolicy::kRenormalize);
LoadedSignature read_signature(const std::filesystem::path& path,
                               RowPolicy policy = RowPolicy::kRenormalize);

// Header `parameter,t0,...,t{L-1}` then one line per row, shortest
// round-trip decimals, LF endings.
void write_signature(const Signature& sig, std::ostream& out);
void write_signature(const Signature& sig, const std::filesystem::path& path);

}  // namespace sigdrift

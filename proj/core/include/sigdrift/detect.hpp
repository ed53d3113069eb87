#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "sigdrift/core.hpp"
#include "sigdrift/noise.hpp"

namespace sigdrift {

struct DetectorThresholds {
  double s_p = 0.60;     // PCC floor
  double s_r = 0.20;     // RMSE ceiling for "unchanged"
  double t_d = 0.40;     // RMSE ceiling for attenuation
  std::size_t window = 6;

  void validate() const;
};

enum class Verdict { kNoChange, kNoise, kChange };

std::string_view to_string(Verdict verdict) noexcept;

struct Diagnostics {
  std::optional<double> pcc;
  std::optional<double> rmse;
  std::optional<double> best_window_pcc;
  std::optional<std::size_t> removed_window_start;
  std::optional<Snr> snr_current;
  std::optional<Snr> snr_baseline;
  std::optional<std::size_t> segment;
  std::optional<double> cusum_max;
};

struct RowOutcome {
  std::string parameter;
  Verdict verdict = Verdict::kNoChange;
  std::optional<NoiseKind> noise_kind;
  Diagnostics diagnostics;
};

struct DetectionOutcome {
  Verdict verdict = Verdict::kNoChange;
  std::optional<NoiseKind> noise_kind;  // set iff verdict == kNoise
  Diagnostics diagnostics;              // of the deciding row
  std::vector<RowOutcome> rows;         // empty for pooled detectors

  [[nodiscard]] bool is_change() const noexcept { return verdict == Verdict::kChange; }
};

std::string to_json(const DetectionOutcome& outcome);

// Best PCC after deleting one window of `window` points from both series.
struct WindowScan {
  std::optional<double> best_pcc;  // empty if every deletion left a constant series
  std::size_t best_start = 0;
};

WindowScan scan_window_deletions(SeriesView existing, SeriesView recomputed, std::size_t window);

// PCC/RMSE thresholds, then the spike scan. A multi-row signature changes if
// any row does.
DetectionOutcome sliding_window_detect(const Signature& existing, const Signature& recomputed,
                                       const DetectorThresholds& th = {});

enum class SnrMode {
  kPerSegment,  // change iff any segment falls below its baseline
  kAggregate,   // pooled SNR over all segments against the weakest baseline
};

DetectionOutcome snr_detect(const Signature& existing, const Signature& recomputed,
                            const NoiseProfile& profile, SnrMode mode = SnrMode::kPerSegment);

struct CusumParams {
  double k = 0.5;
  double h = 5.0;

  void validate() const;
};

// Two-sided CUSUM on (recomputed - existing) / std(existing row).
DetectionOutcome cusum_detect(const Signature& existing, const Signature& recomputed,
                              const CusumParams& params = {});

}  // namespace sigdrift

#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "sigdrift/core.hpp"

namespace sigdrift {

// Short burst added on `width` consecutive timestamps starting at
// `position`, sized in multiples of the row's std.
struct Spike {
  std::size_t position = 0;
  std::size_t width = 3;
  double magnitude = 5.0;

  friend bool operator==(const Spike&, const Spike&) = default;
};

// Uniform loss of amplitude; the shape is kept.
struct Attenuation {
  double factor = 0.9;

  friend bool operator==(const Attenuation&, const Attenuation&) = default;
};

// Additive white Gaussian noise at a target signal-to-noise ratio.
struct Distortion {
  double target_snr_db = 20.0;

  friend bool operator==(const Distortion&, const Distortion&) = default;
};

using NoiseSpec = std::variant<Spike, Attenuation, Distortion>;

enum class NoiseKind { kSpike, kAttenuation, kDistortion };

NoiseKind kind_of(const NoiseSpec& spec) noexcept;
std::string_view to_string(NoiseKind kind) noexcept;

// Throws InvariantError when `spec` cannot be applied to a grid of
// `grid_length` timestamps.
void validate(const NoiseSpec& spec, std::size_t grid_length);

// `{"kind":"spike","position":..,"width":..,"magnitude":..}` etc.
std::string to_json(const NoiseSpec& spec);
NoiseSpec noise_spec_from_json(std::string_view json);

// Noisy copy of `sig`. The result is not re-normalized. Deterministic for a
// given (spec, seed).
Signature inject(const Signature& sig, const NoiseSpec& spec, std::uint64_t seed);

// Power ratio. Infinite when the noise carries no power.
class Snr {
 public:
  static Snr finite(double ratio);
  static Snr infinite() noexcept { return Snr(0.0, true); }

  [[nodiscard]] bool is_infinite() const noexcept { return infinite_; }
  // Throws when infinite.
  [[nodiscard]] double ratio() const;
  [[nodiscard]] double db() const;

  friend bool operator==(const Snr&, const Snr&) = default;
  friend bool operator<(const Snr& a, const Snr& b) noexcept {
    if (a.infinite_) return false;
    if (b.infinite_) return true;
    return a.ratio_ < b.ratio_;
  }

 private:
  Snr(double ratio, bool infinite) noexcept : ratio_(ratio), infinite_(infinite) {}

  double ratio_;
  bool infinite_;
};

// E[S^2] / E[N^2]; the variance is used for zero-mean noise.
Snr snr(SeriesView signal, SeriesView noise);

// existing - recomputed, per row.
std::vector<Series> residual(const Signature& existing, const Signature& recomputed);

// Baseline SNR per monitoring segment.
struct NoiseProfile {
  std::vector<Snr> segment_snrs;
  std::size_t segment_length = 0;

  [[nodiscard]] std::size_t segments() const noexcept { return segment_snrs.size(); }
  void validate(std::size_t grid_length) const;

  friend bool operator==(const NoiseProfile&, const NoiseProfile&) = default;
};

// SNR of every segment [i*len, (i+1)*len), len = floor(L / d), pooling all
// rows of the segment.
std::vector<Snr> segment_snrs(const Signature& existing, const Signature& recomputed,
                              std::size_t d);

// `recomputed_per_segment[i]` is the signature recomputed during segment i
// (a slice of length segment_length).
NoiseProfile learn_noise_profile(const Signature& existing,
                                 std::span<const Signature> recomputed_per_segment, std::size_t d);

// Profile from several full-period recomputations observed while the
// signature was known to be unchanged: each segment keeps the lowest SNR seen.
NoiseProfile learn_monitoring_profile(const Signature& existing,
                                      std::span<const Signature> monitored, std::size_t d);

std::string to_json(const NoiseProfile& profile);
NoiseProfile noise_profile_from_json(std::string_view json);

}  // namespace sigdrift

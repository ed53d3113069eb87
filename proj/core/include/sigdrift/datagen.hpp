#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "sigdrift/core.hpp"
#include "sigdrift/noise.hpp"

namespace sigdrift {

// Per-node CPU demand as a fraction of the node's cores.
struct WorkloadTrace {
  std::vector<std::string> node_ids;
  std::vector<Series> demand;  // demand[node][raw timestamp], each in [0, 1]

  [[nodiscard]] std::size_t nodes() const noexcept { return demand.size(); }
  [[nodiscard]] std::size_t length() const noexcept {
    return demand.empty() ? 0 : demand.front().size();
  }
  void validate() const;
};

// CSV `node_id,timestamp,cores_requested,cores_total`. Rows of a node are
// ordered by timestamp; every node must cover the same number of timestamps.
WorkloadTrace load_trace(std::istream& in);
WorkloadTrace load_trace(const std::filesystem::path& path);
void write_trace(const WorkloadTrace& trace, std::ostream& out, double cores_total = 32.0);

// Bounded random walk per node, deterministic per seed.
WorkloadTrace synthesize_trace(std::size_t nodes, std::size_t length, std::uint64_t seed);

inline constexpr std::size_t kTraceNodes = 31;
inline constexpr std::size_t kTraceLength = 6486;
inline constexpr std::size_t kGridLength = 360;

// Piecewise-linear demand -> operations/sec, strictly decreasing.
class BaselineMap {
 public:
  explicit BaselineMap(std::vector<std::pair<double, double>> breakpoints);

  [[nodiscard]] double operator()(double demand) const;
  [[nodiscard]] const std::vector<std::pair<double, double>>& breakpoints() const noexcept {
    return breakpoints_;
  }

 private:
  std::vector<std::pair<double, double>> breakpoints_;
};

BaselineMap default_baseline_map();
double baseline_performance(const BaselineMap& map, double demand);

// Multiplier applied on [from, to).
struct IntervalRule {
  double from = 0.0;
  double to = 0.0;
  double multiplier = 1.0;

  friend bool operator==(const IntervalRule&, const IntervalRule&) = default;
};

struct QoSProfile {
  std::string provider_id;
  std::vector<IntervalRule> workload_map;  // tiles demand [0, 1]
  std::vector<IntervalRule> seasonal_map;  // tiles grid indices [0, L)
  double jitter_amplitude = 0.05;

  // Throws InvariantError unless both maps tile their domains with positive
  // multipliers. The seasonal map is checked against `grid_length`.
  void validate(std::size_t grid_length) const;
  [[nodiscard]] double workload_multiplier(double demand) const;
  [[nodiscard]] double seasonal_multiplier(std::size_t t) const;

  friend bool operator==(const QoSProfile&, const QoSProfile&) = default;
};

// Splits [0, grid_length) into 12 near-equal months.
std::vector<IntervalRule> monthly_seasonal_map(std::span<const double> multipliers,
                                               std::size_t grid_length);

// The five shipped provider profiles on a 360-day grid.
std::vector<QoSProfile> default_profiles();

// baseline(demand) * workload(demand) * seasonal(t) * (1 + jitter * u), with
// u uniform on [0, 1) drawn from `seed`.
double provider_performance(const QoSProfile& profile, double demand, std::size_t t,
                            const BaselineMap& baseline, std::uint64_t seed);

// One single-row ("throughput") signature per profile. Every trace node is a
// user; its raw performance is PAA-reduced to the grid.
std::vector<Signature> build_provider_signatures(std::span<const QoSProfile> profiles,
                                                 const WorkloadTrace& trace, const TimeGrid& grid,
                                                 const BaselineMap& baseline, std::uint64_t seed);

// Default profiles and baseline over a synthesized 31-node trace, 360 days.
std::vector<Signature> default_provider_signatures(std::uint64_t seed);

std::string to_json(const BaselineMap& map);
BaselineMap baseline_map_from_json(std::string_view json);
std::string profiles_to_json(std::span<const QoSProfile> profiles);
std::vector<QoSProfile> profiles_from_json(std::string_view json);

enum class PairLabel { kChanged, kNoisy };

std::string_view to_string(PairLabel label) noexcept;

struct Provenance {
  std::uint64_t seed = 0;
  std::string base;                          // provider of the existing signature
  std::optional<std::string> donor;          // changed pairs
  std::optional<std::size_t> segment_start;  // changed pairs
  std::optional<std::size_t> segment_length;
  std::optional<NoiseSpec> noise;            // noisy pairs
};

struct LabeledPair {
  Signature existing;
  Signature recomputed;
  PairLabel label;
  Provenance provenance;
};

// Label implied by how the pair was built.
PairLabel label_from_provenance(const Provenance& p) noexcept;

// Overwrites [start, start + length) of `original` with the donor's values.
LabeledPair make_changed(const Signature& original, const Signature& donor, std::size_t start,
                         std::size_t length, std::uint64_t seed);

LabeledPair make_noisy(const Signature& original, const NoiseSpec& spec, std::uint64_t seed);

struct CorpusConfig {
  std::size_t n_changed = 3000;
  std::size_t n_noisy = 3000;
  double distortion_fraction = 0.5;
  double attenuation_fraction = 0.1;  // ignored when paper_faithful
  bool paper_faithful = false;        // spikes and AWGN only
  std::size_t segment_length = 90;
  std::size_t spike_width = 3;
  double spike_magnitude = 5.0;  // random sign per pair
  double distortion_db = 20.0;
  double attenuation_min = 0.85;
  double attenuation_max = 0.95;

  void validate(std::size_t grid_length) const;
  [[nodiscard]] double effective_attenuation_fraction() const noexcept;
};

// Changed pairs first, then noisy ones. Pair i uses its own derived seed, so
// the result does not depend on `jobs`.
std::vector<LabeledPair> build_corpus(std::span<const Signature> bases, const CorpusConfig& config,
                                      std::uint64_t seed, std::size_t jobs = 1);

// Noise-only corpus for learning SNR profiles; same composition as the
// evaluation corpus, separate seed stream.
std::vector<LabeledPair> build_monitoring_corpus(std::span<const Signature> bases,
                                                 const CorpusConfig& config, std::size_t n_pairs,
                                                 std::uint64_t seed, std::size_t jobs = 1);

std::string pair_file_name(std::size_t index);

// Manifest listing every pair's label, seed, construction and file paths.
std::string manifest_json(std::span<const LabeledPair> pairs, const CorpusConfig& config,
                          std::uint64_t seed, std::string_view signature_dir = "signatures",
                          std::string_view pair_dir = "pairs");

}  // namespace sigdrift

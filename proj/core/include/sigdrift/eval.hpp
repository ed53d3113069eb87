#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "sigdrift/datagen.hpp"
#include "sigdrift/detect.hpp"

namespace sigdrift {

struct ConfusionCounts {
  std::size_t tp = 0;
  std::size_t fp = 0;
  std::size_t tn = 0;
  std::size_t fn = 0;

  [[nodiscard]] std::size_t total() const noexcept { return tp + fp + tn + fn; }
  friend bool operator==(const ConfusionCounts&, const ConfusionCounts&) = default;
};

// Change verdicts are positives; Noise and NoChange are negatives.
ConfusionCounts score(std::span<const std::pair<PairLabel, Verdict>> outcomes);

// Empty when the denominator is zero.
std::optional<double> fp_rate(const ConfusionCounts& c);
std::optional<double> tp_rate(const ConfusionCounts& c);
std::optional<double> accuracy(const ConfusionCounts& c);
std::optional<double> f1(const ConfusionCounts& c);

enum class DetectorKind { kSlidingWindow, kSnr, kCusum };

std::string_view to_string(DetectorKind kind) noexcept;
// "sw", "snr", "cusum".
DetectorKind parse_detector(std::string_view name);

inline constexpr std::string_view kMetricNames[] = {"fp_rate", "tp_rate", "accuracy", "f1",
                                                    "noise_kind_accuracy"};

struct ExperimentConfig {
  CorpusConfig corpus;
  std::vector<DetectorKind> detectors{DetectorKind::kSlidingWindow, DetectorKind::kSnr,
                                      DetectorKind::kCusum};
  std::vector<std::size_t> sample_sizes{1000, 2000, 3000, 4000, 5000};
  std::size_t repeats = 30;
  DetectorThresholds thresholds;
  CusumParams cusum;
  std::size_t snr_segments = 12;
  SnrMode snr_mode = SnrMode::kPerSegment;
  double monitoring_fraction = 0.2;

  void validate() const;
  [[nodiscard]] std::size_t corpus_size() const noexcept {
    return corpus.n_changed + corpus.n_noisy;
  }
  [[nodiscard]] std::size_t monitoring_size() const noexcept;
};

// Per-repeat values of one metric in one cell.
struct MetricSeries {
  std::vector<std::optional<double>> values;

  [[nodiscard]] std::optional<double> mean() const;
  // Sample std (n - 1) over the defined values; 0 for a single value.
  [[nodiscard]] std::optional<double> stddev() const;
};

struct CellResult {
  std::map<std::string, MetricSeries, std::less<>> metrics;
};

struct ExperimentReport {
  ExperimentConfig config;
  std::uint64_t seed = 0;
  std::map<DetectorKind, std::map<std::size_t, CellResult>> cells;

  [[nodiscard]] const MetricSeries& series(DetectorKind d, std::size_t sample_size,
                                           std::string_view metric) const;
};

// Learns one SNR profile per provider from a noise-only monitoring corpus;
// each segment keeps the weakest SNR observed.
std::map<std::string, NoiseProfile> learn_provider_profiles(std::span<const Signature> bases,
                                                            std::span<const LabeledPair> monitoring,
                                                            std::size_t segments);

// Per repeat: a fresh corpus and monitoring corpus, every detector run once
// per pair, then one uniform subsample per sample size.
ExperimentReport run_experiment(std::span<const Signature> bases, const ExperimentConfig& config,
                                std::uint64_t seed, std::size_t jobs = 0);

// One report per distortion level, all with the same seed.
std::vector<ExperimentReport> sensitivity_analysis(std::span<const Signature> bases,
                                                   const ExperimentConfig& base_config,
                                                   std::span<const double> distortion_levels,
                                                   std::uint64_t seed, std::size_t jobs = 0);

// `{detector: {sample_size: {metric: {mean, std}}}, "config": {..}, "seed": n}`.
std::string to_json(const ExperimentReport& report);
std::string config_json(const ExperimentConfig& config);
// detector,sample_size,metric,mean,std
std::string to_csv(const ExperimentReport& report);

}  // namespace sigdrift

#include "sigdrift/eval.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <sstream>

#include <json.hpp>

#include "parallel.hpp"
#include "sigdrift/error.hpp"
#include "sigdrift/random.hpp"
#include "text_io.hpp"

namespace sigdrift {

namespace {

using nlohmann::json;

constexpr std::uint64_t kRepeatStream = 0x726570656174ULL;
constexpr std::uint64_t kSampleStream = 0x73616d706c65ULL;

std::optional<double> ratio(std::size_t num, double den) {
  if (den == 0.0) {
    return std::nullopt;
  }
  return static_cast<double>(num) / den;
}

struct PairResult {
  Verdict verdict;
  std::optional<NoiseKind> kind;
};

PairResult run_detector(DetectorKind d, const LabeledPair& pair, const ExperimentConfig& cfg,
                        const std::map<std::string, NoiseProfile>& profiles) {
  DetectionOutcome out;
  switch (d) {
    case DetectorKind::kSlidingWindow:
      out = sliding_window_detect(pair.existing, pair.recomputed, cfg.thresholds);
      break;
    case DetectorKind::kSnr:
      out = snr_detect(pair.existing, pair.recomputed, profiles.at(pair.existing.provider_id()),
                       cfg.snr_mode);
      break;
    case DetectorKind::kCusum:
      out = cusum_detect(pair.existing, pair.recomputed, cfg.cusum);
      break;
  }
  return {out.verdict, out.noise_kind};
}

// Share of noisy pairs classified as noise whose kind matches the injection.
std::optional<double> kind_accuracy(std::span<const LabeledPair> corpus,
                                    std::span<const PairResult> results,
                                    std::span<const std::size_t> sample) {
  std::size_t classified = 0;
  std::size_t correct = 0;
  for (const std::size_t i : sample) {
    if (corpus[i].label != PairLabel::kNoisy || results[i].verdict != Verdict::kNoise ||
        !results[i].kind) {
      continue;
    }
    ++classified;
    if (kind_of(*corpus[i].provenance.noise) == *results[i].kind) {
      ++correct;
    }
  }
  return ratio(correct, static_cast<double>(classified));
}

json optional_json(const std::optional<double>& v) {
  return v ? json(*v) : json(nullptr);
}

}  // namespace

ConfusionCounts score(std::span<const std::pair<PairLabel, Verdict>> outcomes) {
  ConfusionCounts c;
  for (const auto& [label, verdict] : outcomes) {
    const bool positive = verdict == Verdict::kChange;
    if (label == PairLabel::kChanged) {
      ++(positive ? c.tp : c.fn);
    } else {
      ++(positive ? c.fp : c.tn);
    }
  }
  return c;
}

std::optional<double> fp_rate(const ConfusionCounts& c) {
  return ratio(c.fp, static_cast<double>(c.fp + c.tn));
}

std::optional<double> tp_rate(const ConfusionCounts& c) {
  return ratio(c.tp, static_cast<double>(c.tp + c.fn));
}

std::optional<double> accuracy(const ConfusionCounts& c) {
  return ratio(c.tp + c.tn, static_cast<double>(c.total()));
}

std::optional<double> f1(const ConfusionCounts& c) {
  return ratio(c.tp, static_cast<double>(c.tp) + 0.5 * static_cast<double>(c.fp + c.fn));
}

std::string_view to_string(DetectorKind kind) noexcept {
  switch (kind) {
    case DetectorKind::kSlidingWindow:
      return "sw";
    case DetectorKind::kSnr:
      return "snr";
    case DetectorKind::kCusum:
      return "cusum";
  }
  return "unknown";
}

DetectorKind parse_detector(std::string_view name) {
  if (name == "sw" || name == "sliding-window") return DetectorKind::kSlidingWindow;
  if (name == "snr") return DetectorKind::kSnr;
  if (name == "cusum") return DetectorKind::kCusum;
  throw ParseError("unknown detector '" + std::string(name) + "' (expected sw, snr or cusum)");
}

void ExperimentConfig::validate() const {
  if (repeats < 1) {
    throw InvariantError("repeats must be >= 1");
  }
  if (detectors.empty()) {
    throw InvariantError("at least one detector is required");
  }
  if (sample_sizes.empty()) {
    throw InvariantError("at least one sample size is required");
  }
  for (const auto s : sample_sizes) {
    if (s == 0 || s > corpus_size()) {
      throw InvariantError("sample size " + std::to_string(s) + " must lie in [1, " +
                           std::to_string(corpus_size()) + "]");
    }
  }
  thresholds.validate();
  cusum.validate();
  if (snr_segments == 0) {
    throw InvariantError("snr_segments must be >= 1");
  }
  if (!(monitoring_fraction > 0.0) || !std::isfinite(monitoring_fraction)) {
    throw InvariantError("monitoring_fraction must be positive");
  }
}

std::size_t ExperimentConfig::monitoring_size() const noexcept {
  return std::max<std::size_t>(
      1, static_cast<std::size_t>(std::lround(monitoring_fraction * static_cast<double>(corpus_size()))));
}

std::optional<double> MetricSeries::mean() const {
  double acc = 0.0;
  std::size_t n = 0;
  for (const auto& v : values) {
    if (v) {
      acc += *v;
      ++n;
    }
  }
  if (n == 0) {
    return std::nullopt;
  }
  return acc / static_cast<double>(n);
}

std::optional<double> MetricSeries::stddev() const {
  const auto mu = mean();
  if (!mu) {
    return std::nullopt;
  }
  double acc = 0.0;
  std::size_t n = 0;
  for (const auto& v : values) {
    if (v) {
      acc += (*v - *mu) * (*v - *mu);
      ++n;
    }
  }
  if (n < 2) {
    return 0.0;
  }
  return std::sqrt(acc / static_cast<double>(n - 1));
}

const MetricSeries& ExperimentReport::series(DetectorKind d, std::size_t sample_size,
                                             std::string_view metric) const {
  const auto det = cells.find(d);
  if (det == cells.end()) {
    throw ShapeError("report has no detector '" + std::string(to_string(d)) + "'");
  }
  const auto cell = det->second.find(sample_size);
  if (cell == det->second.end()) {
    throw ShapeError("report has no sample size " + std::to_string(sample_size));
  }
  const auto m = cell->second.metrics.find(metric);
  if (m == cell->second.metrics.end()) {
    throw ShapeError("report has no metric '" + std::string(metric) + "'");
  }
  return m->second;
}

std::map<std::string, NoiseProfile> learn_provider_profiles(std::span<const Signature> bases,
                                                            std::span<const LabeledPair> monitoring,
                                                            std::size_t segments) {
  std::map<std::string, NoiseProfile> out;
  for (const auto& base : bases) {
    std::vector<Signature> seen;
    for (const auto& p : monitoring) {
      if (p.existing.provider_id() == base.provider_id()) {
        seen.push_back(p.recomputed);
      }
    }
    if (seen.empty()) {
      // No noise observed: every segment's baseline is noise-free.
      out.emplace(base.provider_id(),
                  NoiseProfile{std::vector<Snr>(segments, Snr::infinite()), base.length() / segments});
    } else {
      out.emplace(base.provider_id(), learn_monitoring_profile(base, seen, segments));
    }
  }
  return out;
}

ExperimentReport run_experiment(std::span<const Signature> bases, const ExperimentConfig& config,
                                std::uint64_t seed, std::size_t jobs) {
  config.validate();
  ExperimentReport report{config, seed, {}};
  const std::size_t n = config.corpus_size();

  for (std::size_t rep = 0; rep < config.repeats; ++rep) {
    const std::uint64_t rep_seed = derive_seed(seed, kRepeatStream, rep);
    const auto corpus = build_corpus(bases, config.corpus, rep_seed, jobs);
    const auto monitoring =
        build_monitoring_corpus(bases, config.corpus, config.monitoring_size(), rep_seed, jobs);
    const auto profiles = learn_provider_profiles(bases, monitoring, config.snr_segments);

    std::map<DetectorKind, std::vector<PairResult>> results;
    for (const auto d : config.detectors) {
      auto& r = results[d];
      r.resize(n);
      detail::parallel_for(n, jobs, [&](std::size_t i) {
        r[i] = run_detector(d, corpus[i], config, profiles);
      });
    }

    for (const auto size : config.sample_sizes) {
      std::vector<std::size_t> sample(n);
      std::iota(sample.begin(), sample.end(), std::size_t{0});
      std::mt19937_64 rng(derive_seed(rep_seed, kSampleStream, size));
      std::shuffle(sample.begin(), sample.end(), rng);
      sample.resize(size);
      std::sort(sample.begin(), sample.end());

      for (const auto d : config.detectors) {
        const auto& r = results[d];
        std::vector<std::pair<PairLabel, Verdict>> outcomes;
        outcomes.reserve(size);
        for (const auto i : sample) {
          outcomes.emplace_back(corpus[i].label, r[i].verdict);
        }
        const auto c = score(outcomes);
        auto& metrics = report.cells[d][size].metrics;
        metrics["fp_rate"].values.push_back(fp_rate(c));
        metrics["tp_rate"].values.push_back(tp_rate(c));
        metrics["accuracy"].values.push_back(accuracy(c));
        metrics["f1"].values.push_back(f1(c));
        metrics["noise_kind_accuracy"].values.push_back(kind_accuracy(corpus, r, sample));
      }
    }
  }
  return report;
}

std::vector<ExperimentReport> sensitivity_analysis(std::span<const Signature> bases,
                                                   const ExperimentConfig& base_config,
                                                   std::span<const double> distortion_levels,
                                                   std::uint64_t seed, std::size_t jobs) {
  for (const double level : distortion_levels) {
    if (!(level >= 0.0 && level <= 1.0)) {
      throw InvariantError("distortion levels must lie in [0, 1]");
    }
  }
  std::vector<ExperimentReport> out;
  for (const double level : distortion_levels) {
    auto cfg = base_config;
    cfg.corpus.distortion_fraction = level;
    out.push_back(run_experiment(bases, cfg, seed, jobs));
  }
  return out;
}

std::string config_json(const ExperimentConfig& c) {
  json detectors = json::array();
  for (const auto d : c.detectors) {
    detectors.push_back(std::string(to_string(d)));
  }
  const json j{
      {"n_changed", c.corpus.n_changed},
      {"n_noisy", c.corpus.n_noisy},
      {"distortion_fraction", c.corpus.distortion_fraction},
      {"attenuation_fraction", c.corpus.effective_attenuation_fraction()},
      {"paper_faithful", c.corpus.paper_faithful},
      {"segment_length", c.corpus.segment_length},
      {"spike_width", c.corpus.spike_width},
      {"spike_magnitude", c.corpus.spike_magnitude},
      {"distortion_db", c.corpus.distortion_db},
      {"attenuation_min", c.corpus.attenuation_min},
      {"attenuation_max", c.corpus.attenuation_max},
      {"detectors", detectors},
      {"sample_sizes", c.sample_sizes},
      {"repeats", c.repeats},
      {"s_p", c.thresholds.s_p},
      {"s_r", c.thresholds.s_r},
      {"t_d", c.thresholds.t_d},
      {"window", c.thresholds.window},
      {"cusum_k", c.cusum.k},
      {"cusum_h", c.cusum.h},
      {"snr_segments", c.snr_segments},
      {"snr_mode", c.snr_mode == SnrMode::kPerSegment ? "segment" : "aggregate"},
      {"monitoring_fraction", c.monitoring_fraction},
  };
  return j.dump();
}

std::string to_json(const ExperimentReport& report) {
  json j = json::object();
  for (const auto& [d, sizes] : report.cells) {
    json det = json::object();
    for (const auto& [size, cell] : sizes) {
      json metrics = json::object();
      for (const auto& [name, series] : cell.metrics) {
        metrics[name] = {{"mean", optional_json(series.mean())},
                         {"std", optional_json(series.stddev())}};
      }
      det[std::to_string(size)] = std::move(metrics);
    }
    j[std::string(to_string(d))] = std::move(det);
  }
  j["config"] = json::parse(config_json(report.config));
  j["seed"] = report.seed;
  return j.dump(2) + "\n";
}

std::string to_csv(const ExperimentReport& report) {
  std::ostringstream out;
  out << "detector,sample_size,metric,mean,std\n";
  const auto cell = [](const std::optional<double>& v) {
    return v ? detail::format_double(*v) : std::string();
  };
  for (const auto& [d, sizes] : report.cells) {
    for (const auto& [size, c] : sizes) {
      for (const auto& [name, series] : c.metrics) {
        out << to_string(d) << ',' << size << ',' << name << ',' << cell(series.mean()) << ','
            << cell(series.stddev()) << '\n';
      }
    }
  }
  return out.str();
}

}  // namespace sigdrift

// Runs every acceptance criterion and prints one PASS/FAIL line each.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "oracles.hpp"
#include "sigdrift/cpd.hpp"
#include "sigdrift/datagen.hpp"
#include "sigdrift/detect.hpp"
#include "sigdrift/eval.hpp"
#include "sigdrift/noise.hpp"
#include "sigdrift/similarity.hpp"

#ifdef SIGDRIFT_HAVE_CLI
#include "cli.hpp"
#endif

using namespace sigdrift;
using K = DetectorKind;

namespace {

constexpr std::uint64_t kSeed = 42;

struct Outcome {
  bool pass;
  std::string detail;
};

const std::vector<Signature>& bases() {
  static const auto sigs = default_provider_signatures(kSeed);
  return sigs;
}

ExperimentConfig desk_config() {
  ExperimentConfig cfg;
  cfg.corpus.n_changed = 300;
  cfg.corpus.n_noisy = 300;
  cfg.repeats = 10;
  cfg.sample_sizes = {200, 300, 400, 500, 600};
  return cfg;
}

const std::vector<ExperimentReport>& desk_reports() {
  static const auto reports = [] {
    const std::vector<double> levels{0.5, 0.25, 0.0};
    return sensitivity_analysis(bases(), desk_config(), levels, kSeed);
  }();
  return reports;
}

// Grand mean over sample-size cells and the pooled repeat std.
struct Grand {
  double mean;
  double std;
};

Grand grand(const ExperimentReport& r, K d, const char* metric) {
  double m = 0, v = 0;
  std::size_t n = 0;
  for (const auto s : r.config.sample_sizes) {
    const auto& series = r.series(d, s, metric);
    m += series.mean().value_or(NAN);
    v += std::pow(series.stddev().value_or(NAN), 2);
    ++n;
  }
  return {m / n, std::sqrt(v / n)};
}

double pooled(Grand a, Grand b) { return std::sqrt((a.std * a.std + b.std * b.std) / 2); }

std::string fmt(const char* f, double a, double b, double c) {
  char buf[160];
  std::snprintf(buf, sizeof buf, f, a, b, c);
  return buf;
}

Outcome c1_metric_oracle() {
  std::mt19937_64 rng(1);
  std::uniform_int_distribution<std::size_t> n(0, 500);
  double worst = 0;
  bool defined_ok = true;
  for (int i = 0; i < 50; ++i) {
    const ConfusionCounts c{n(rng), n(rng), n(rng), n(rng)};
    const auto r = oracle::rates(c.tp, c.fp, c.tn, c.fn);
    const auto check = [&](std::optional<double> got, bool ok, double want) {
      defined_ok = defined_ok && got.has_value() == ok;
      if (got && ok) worst = std::max(worst, std::abs(*got - want));
    };
    check(fp_rate(c), r.fp_ok, r.fp);
    check(tp_rate(c), r.tp_ok, r.tp);
    check(accuracy(c), r.acc_ok, r.acc);
    check(f1(c), r.f1_ok, r.f1);
  }
  const ConfusionCounts fx{3, 1, 5, 1};
  const bool fixture = std::abs(*fp_rate(fx) - 1.0 / 6.0) < 1e-12 && std::abs(*tp_rate(fx) - 0.75) < 1e-12 &&
                       std::abs(*accuracy(fx) - 0.8) < 1e-12 && std::abs(*f1(fx) - 0.75) < 1e-12;
  return {worst <= 1e-12 && defined_ok && fixture,
          fmt("max abs error %.2e over 50 matrices", worst, 0, 0) +
              (fixture ? ", fixture (3,1,5,1) ok" : ", fixture (3,1,5,1) wrong")};
}

Outcome c2_similarity_oracle() {
  std::mt19937_64 rng(2);
  std::uniform_int_distribution<std::size_t> len(2, 512);
  std::uniform_real_distribution<double> scale(0.01, 100.0);
  double worst = 0;
  bool identities = true;
  for (int i = 0; i < 1000; ++i) {
    const std::size_t n = len(rng);
    const auto a = oracle::random_series(rng, n, 3.0);
    const auto b = oracle::random_series(rng, n, 1.0);
    worst = std::max({worst, std::abs(pcc(a, b) - oracle::pcc(a, b)),
                      std::abs(euclidean(a, b) - oracle::euclidean(a, b)),
                      std::abs(cosine(a, b) - oracle::cosine(a, b)),
                      std::abs(rmse(a, b) - oracle::rmse(a, b))});
    identities = identities && euclidean(a, a) == 0.0 && rmse(a, a) == 0.0 &&
                 std::abs(pcc(a, a) - 1.0) <= 1e-12 && std::abs(cosine(a, a) - 1.0) <= 1e-12;
    const double s = scale(rng);
    std::vector<double> as(a);
    for (auto& x : as) x *= s;
    identities = identities && std::abs(pcc(as, b) - pcc(a, b)) <= 1e-9 &&
                 std::abs(cosine(as, b) - cosine(a, b)) <= 1e-9;
  }
  identities = identities && cosine(std::vector<double>{1, 0}, std::vector<double>{0, 1}) == 0.0;
  return {worst <= 1e-9 && identities,
          fmt("max abs error %.2e over 1000 pairs", worst, 0, 0) +
              (identities ? ", identities hold" : ", identity violated")};
}

Outcome c3_noise_calibration() {
  std::size_t within = 0;
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    std::mt19937_64 rng(seed + 1000);
    auto raw = oracle::random_series(rng, 360, 1.0);
    for (std::size_t t = 0; t < 360; ++t) raw[t] += 5.0 + std::sin(t / 20.0);
    const auto sig = Signature::from_raw_rows("p", TimeGrid(360), {{"q", raw, ""}});
    const auto noisy = inject(sig, Distortion{20.0}, seed);
    std::vector<double> n(360);
    for (std::size_t t = 0; t < 360; ++t) n[t] = noisy.row(0).values[t] - sig.row(0).values[t];
    const double db = snr(sig.row(0).values, n).db();
    within += std::abs(db - 20.0) <= 1.0;
  }
  return {within >= 95, fmt("%.0f of 100 seeds within 1 dB", within, 0, 0)};
}

Outcome c4_spike_recovery() {
  CorpusConfig cfg;
  cfg.n_changed = 0;
  cfg.n_noisy = 200;
  cfg.distortion_fraction = 0.0;
  cfg.paper_faithful = true;
  const auto corpus = build_corpus(bases(), cfg, kSeed);
  std::size_t good = 0, total = 0;
  for (const auto& p : corpus) {
    const auto& spike = std::get<Spike>(*p.provenance.noise);
    const auto out = sliding_window_detect(p.existing, p.recomputed);
    ++total;
    if (out.verdict != Verdict::kNoise || out.noise_kind != NoiseKind::kSpike) continue;
    const std::size_t w = *out.diagnostics.removed_window_start;
    good += w < spike.position + spike.width && spike.position < w + 6;
  }
  return {total == 200 && good * 100 >= 95 * total,
          fmt("%.0f of %.0f spike pairs classified spike with overlapping window", good, total, 0)};
}

Outcome c5_fp_order() {
  const auto& r = desk_reports()[0];
  const auto sw = grand(r, K::kSlidingWindow, "fp_rate");
  const auto sn = grand(r, K::kSnr, "fp_rate");
  const auto cu = grand(r, K::kCusum, "fp_rate");
  const bool ok = sn.mean - sw.mean > pooled(sw, sn) && cu.mean - sn.mean > pooled(sn, cu);
  return {ok, fmt("FP sw %.3f < snr %.3f < cusum %.3f", sw.mean, sn.mean, cu.mean) +
                  fmt(", gaps/pooled std %.1f %.1f", (sn.mean - sw.mean) / pooled(sw, sn),
                      (cu.mean - sn.mean) / pooled(sn, cu), 0)};
}

Outcome c6_tp_order() {
  const auto& r = desk_reports()[0];
  const auto sw = grand(r, K::kSlidingWindow, "tp_rate");
  const auto sn = grand(r, K::kSnr, "tp_rate");
  const auto cu = grand(r, K::kCusum, "tp_rate");
  return {cu.mean > sn.mean && sn.mean > sw.mean,
          fmt("TP cusum %.3f > snr %.3f > sw %.3f", cu.mean, sn.mean, sw.mean)};
}

Outcome c7_f1_accuracy_order() {
  const auto& r = desk_reports()[0];
  const auto sw = grand(r, K::kSlidingWindow, "f1");
  const auto sn = grand(r, K::kSnr, "f1");
  const auto cu = grand(r, K::kCusum, "f1");
  std::size_t wins = 0;
  for (const auto s : r.config.sample_sizes) {
    const double a = *r.series(K::kSlidingWindow, s, "accuracy").mean();
    wins += a > *r.series(K::kSnr, s, "accuracy").mean() &&
            a > *r.series(K::kCusum, s, "accuracy").mean();
  }
  const std::size_t cells = r.config.sample_sizes.size();
  return {sn.mean > sw.mean && sw.mean > cu.mean && 2 * wins > cells,
          fmt("F1 snr %.3f > sw %.3f > cusum %.3f", sn.mean, sw.mean, cu.mean) +
              fmt(", sw accuracy first in %.0f of %.0f cells", wins, cells, 0)};
}

Outcome c8_sensitivity() {
  bool ok = true;
  std::string detail;
  for (const auto& r : desk_reports()) {
    const double sn = grand(r, K::kSnr, "f1").mean;
    const double sw = grand(r, K::kSlidingWindow, "f1").mean;
    ok = ok && sn > sw;
    if (!detail.empty()) detail += "; ";
    detail += fmt("level %.2f: snr %.3f vs sw %.3f", r.config.corpus.distortion_fraction, sn, sw);
  }
  return {ok, detail};
}

Outcome c9_eca_oracle() {
  std::mt19937_64 rng(9);
  std::uniform_int_distribution<std::size_t> len(0, 2000), win(1, 50);
  bool ok = true;
  for (int i = 0; i < 1000 && ok; ++i) {
    const std::size_t n = len(rng);
    std::bernoulli_distribution p(std::uniform_real_distribution<double>(0, 1)(rng));
    std::vector<std::pair<std::size_t, bool>> raw;
    std::vector<AnomalyFlag> flags;
    std::size_t idx = 0;
    for (std::size_t k = 0; k < n; ++k) {
      idx += rng() % 3;
      const bool f = p(rng);
      raw.push_back({idx, f});
      flags.push_back({idx, f, 0.0});
    }
    const EventConfig cfg{win(rng), 1 + rng() % 10};
    const auto got = detect_events(flags, cfg);
    const auto want = oracle::events(raw, cfg.window_length, cfg.frequency_threshold);
    ok = got.size() == want.size();
    for (std::size_t k = 0; ok && k < got.size(); ++k) {
      ok = got[k].window_start == want[k].window * cfg.window_length &&
           got[k].anomaly_count == want[k].count;
    }
  }

  // Five past users tie the minimum similarity in one trial period.
  std::vector<double> row(60);
  for (std::size_t t = 0; t < 60; ++t) row[t] = 10 + std::sin(t / 5.0) + 0.3 * std::cos(t / 2.0);
  const auto sig = Signature::from_raw_rows("p", TimeGrid(60), {{"q", row, ""}});
  std::vector<double> boundary(20);
  for (std::size_t t = 0; t < 20; ++t) boundary[t] = 3 + std::cos(t / 3.0);
  std::vector<TrialExperience> past;
  for (int u = 0; u < 5; ++u) past.push_back({"b" + std::to_string(u), "q", boundary, 0, 20});
  const auto& sv = sig.row(0).values;
  past.push_back({"s0", "q", std::vector<double>(sv.begin(), sv.begin() + 20), 0, 20});
  past.push_back({"s1", "q", std::vector<double>(sv.begin() + 30, sv.begin() + 50), 30, 20});
  const auto ts = calibrate_similarity_threshold(past, sig, SimilarityMethod::kPcc);
  const auto ev = calibrate_frequency_threshold(past, sig, ts, 30);
  const bool init = ev.frequency_threshold == 5;
  return {ok && init, std::string(ok ? "1000 streams match brute force" : "mismatch vs brute force") +
                          fmt(", F_thresh initialized to %.0f", ev.frequency_threshold, 0, 0)};
}

Outcome c10_determinism() {
#ifdef SIGDRIFT_HAVE_CLI
  namespace fs = std::filesystem;
  const fs::path dir = fs::temp_directory_path() / "sigdrift_acceptance";
  fs::create_directories(dir);
  std::string reports[2];
  for (int i = 0; i < 2; ++i) {
    const auto path = (dir / ("report" + std::to_string(i) + ".json")).string();
    std::ostringstream out, err;
    const int code = cli::run({"evaluate", "--seed", "42", "--n-changed", "300", "--n-noisy",
                               "300", "--repeats", "10", "--sample-sizes", "200,300,400,500,600",
                               "--out", path},
                              out, err);
    if (code != 0) return {false, "evaluate exited " + std::to_string(code) + ": " + err.str()};
    std::ifstream in(path, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    reports[i] = ss.str();
  }
  fs::remove_all(dir);
  return {!reports[0].empty() && reports[0] == reports[1],
          fmt("two reports of %.0f bytes", reports[0].size(), 0, 0) +
              (reports[0] == reports[1] ? ", byte-identical" : ", different")};
#else
  return {false, "CLI not built"};
#endif
}

}  // namespace

int main() {
  const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria{
      {"1 metric oracle", c1_metric_oracle},
      {"2 similarity oracle", c2_similarity_oracle},
      {"3 noise calibration", c3_noise_calibration},
      {"4 spike recovery", c4_spike_recovery},
      {"5 FP ordering", c5_fp_order},
      {"6 TP ordering", c6_tp_order},
      {"7 F1 and accuracy ordering", c7_f1_accuracy_order},
      {"8 sensitivity", c8_sensitivity},
      {"9 ECA oracle", c9_eca_oracle},
      {"10 determinism", c10_determinism},
  };
  int failures = 0;
  for (const auto& [name, fn] : criteria) {
    Outcome v{false, ""};
    try {
      v = fn();
    } catch (const std::exception& e) {
      v = {false, std::string("exception: ") + e.what()};
    }
    failures += !v.pass;
    std::printf("%s criterion %s: %s\n", v.pass ? "PASS" : "FAIL", name, v.detail.c_str());
    std::fflush(stdout);
  }
  std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failures,
              criteria.size());
  return failures == 0 ? 0 : 1;
}

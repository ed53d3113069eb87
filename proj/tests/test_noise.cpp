#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "helpers.hpp"
#include "oracles.hpp"
#include "sigdrift/error.hpp"
#include "sigdrift/noise.hpp"
#include "sigdrift/similarity.hpp"

using namespace sigdrift;
using testing_helpers::make_signature;
using testing_helpers::seasonal_row;
using testing_helpers::seasonal_signature;
using V = std::vector<double>;

namespace {

double realized_db(const Signature& clean, const Signature& noisy) {
  const auto& s = clean.row(0).values;
  V n(s.size());
  for (std::size_t i = 0; i < s.size(); ++i) n[i] = noisy.row(0).values[i] - s[i];
  return 10.0 * std::log10(oracle::mean_square(s) / oracle::mean_square(n));
}

}  // namespace

TEST(Inject, Attenuation) {
  const auto sig = seasonal_signature(360, 1);
  const auto out = inject(sig, Attenuation{0.8}, 0);
  EXPECT_EQ(out.scaling(), RowScaling::kRaw);
  for (std::size_t i = 0; i < 360; ++i) {
    EXPECT_EQ(out.row(0).values[i], 0.8 * sig.row(0).values[i]);
  }
  EXPECT_DOUBLE_EQ(pcc(sig.row(0).values, out.row(0).values), 1.0);
}

TEST(Inject, SpikeLocality) {
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 100; ++trial) {
    const auto sig = seasonal_signature(360, 100 + trial);
    const std::size_t width = 1 + rng() % 8;
    const std::size_t pos = rng() % (360 - width + 1);
    const double mag = (trial % 2 ? 1.0 : -1.0) * (1.0 + rng() % 6);
    const auto out = inject(sig, Spike{pos, width, mag}, 7);
    std::size_t changed = 0;
    for (std::size_t i = 0; i < 360; ++i) {
      const double a = sig.row(0).values[i], b = out.row(0).values[i];
      if (i >= pos && i < pos + width) {
        ++changed;
        EXPECT_NEAR(b - a, mag, 1e-12);
      } else {
        EXPECT_EQ(a, b);
      }
    }
    EXPECT_EQ(changed, width);
  }
  const auto sig = seasonal_signature(360, 5);
  const auto out = inject(sig, Spike{100, 3, 5.0}, 0);
  std::size_t diff = 0;
  for (std::size_t i = 0; i < 360; ++i) diff += sig.row(0).values[i] != out.row(0).values[i];
  EXPECT_EQ(diff, 3u);
}

TEST(Inject, SpikeScalesWithRowStd) {
  const auto raw = seasonal_row(50, 2);
  const Signature sig("p", TimeGrid(50), {{"q0", raw, ""}}, RowScaling::kRaw);
  const double sd = oracle::pop_std(raw);
  const auto out = inject(sig, Spike{10, 2, 3.0}, 0);
  EXPECT_NEAR(out.row(0).values[10] - raw[10], 3.0 * sd, 1e-12);
}

TEST(Inject, DistortionHitsTargetOn360) {
  const auto sig = seasonal_signature(360, 9);
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const double db = realized_db(sig, inject(sig, Distortion{20.0}, seed));
    EXPECT_GE(db, 19.0);
    EXPECT_LE(db, 21.0);
  }
}

TEST(Inject, DistortionConvergesAtLength3600) {
  const auto sig = seasonal_signature(3600, 10);
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    EXPECT_NEAR(realized_db(sig, inject(sig, Distortion{20.0}, seed)), 20.0, 0.3) << seed;
  }
}

TEST(Inject, DeterministicPerSeed) {
  const auto sig = make_signature({seasonal_row(200, 1), seasonal_row(200, 2)});
  EXPECT_EQ(inject(sig, Distortion{15.0}, 77), inject(sig, Distortion{15.0}, 77));
  EXPECT_NE(inject(sig, Distortion{15.0}, 77), inject(sig, Distortion{15.0}, 78));
  const auto out = inject(sig, Distortion{15.0}, 77);
  EXPECT_NE(out.row(0).values, out.row(1).values);
}

TEST(Inject, ValidationErrors) {
  const auto sig = seasonal_signature(100, 1);
  EXPECT_THROW(inject(sig, Spike{98, 3, 5}, 0), InvariantError);
  EXPECT_THROW(inject(sig, Spike{0, 0, 5}, 0), InvariantError);
  EXPECT_THROW(inject(sig, Attenuation{1.0}, 0), InvariantError);
  EXPECT_THROW(inject(sig, Attenuation{0.0}, 0), InvariantError);
  EXPECT_THROW(inject(sig, Distortion{std::nan("")}, 0), InvariantError);
  EXPECT_NO_THROW(inject(sig, Spike{97, 3, 5}, 0));
}

TEST(NoiseSpecJson, RoundTrip) {
  const std::vector<NoiseSpec> specs{Spike{4, 3, -5.0}, Attenuation{0.85}, Distortion{12.5}};
  for (const auto& s : specs) EXPECT_EQ(noise_spec_from_json(to_json(s)), s);
  EXPECT_EQ(noise_spec_from_json(R"({"kind":"spike","position":7})"), NoiseSpec(Spike{7, 3, 5.0}));
  EXPECT_EQ(kind_of(Attenuation{}), NoiseKind::kAttenuation);
  EXPECT_EQ(to_string(NoiseKind::kDistortion), "distortion");
  EXPECT_THROW(noise_spec_from_json(R"({"kind":"drift"})"), ParseError);
  EXPECT_THROW(noise_spec_from_json("not json"), ParseError);
}

TEST(Snr, Examples) {
  const auto one = snr(V{1, 1, 1, 1}, V{1, 1, 1, 1});
  EXPECT_DOUBLE_EQ(one.ratio(), 1.0);
  EXPECT_DOUBLE_EQ(one.db(), 0.0);
  const auto four = snr(V{2, 2}, V{1, 1});
  EXPECT_DOUBLE_EQ(four.ratio(), 4.0);
  EXPECT_NEAR(four.db(), 6.0206, 1e-4);
  const auto inf = snr(V{1, 2}, V{0, 0});
  EXPECT_TRUE(inf.is_infinite());
  EXPECT_EQ(inf, Snr::infinite());
  EXPECT_THROW((void)inf.ratio(), InvariantError);
  EXPECT_TRUE(Snr::finite(1e300) < Snr::infinite());
  EXPECT_FALSE(Snr::infinite() < Snr::infinite());
  EXPECT_THROW(snr(V{1, 2}, V{1}), ShapeError);
}

TEST(Snr, ZeroMeanNoiseUsesVariance) {
  // Variance and mean square agree for zero-mean noise.
  EXPECT_DOUBLE_EQ(snr(V{3, 3, 3, 3}, V{1, -1, 1, -1}).ratio(), 9.0);
}

TEST(Snr, ScaleInvariance) {
  std::mt19937_64 rng(12);
  std::uniform_real_distribution<double> alpha(-100, 100);
  for (int i = 0; i < 200; ++i) {
    const auto s = oracle::random_series(rng, 60, 3.0);
    const auto n = oracle::random_series(rng, 60, 0.3);
    double a = alpha(rng);
    if (std::abs(a) < 1e-3) a = 1.5;
    V sa(s), na(n);
    for (auto& x : sa) x *= a;
    for (auto& x : na) x *= a;
    const double r1 = snr(s, n).ratio(), r2 = snr(sa, na).ratio();
    EXPECT_NEAR(r1, r2, 1e-9 * r1);
  }
}

TEST(Residual, Examples) {
  const auto sig = seasonal_signature(60, 3);
  const auto zero = residual(sig, sig);
  for (const double v : zero[0]) EXPECT_EQ(v, 0.0);

  V shifted(sig.row(0).values);
  for (auto& x : shifted) x += 2.5;
  const auto shift = residual(sig, sig.with_values({shifted}));
  for (const double v : shift[0]) EXPECT_NEAR(v, -2.5, 1e-12);

  const auto att = residual(sig, inject(sig, Attenuation{0.8}, 0))[0];
  for (std::size_t i = 0; i < 60; ++i) EXPECT_NEAR(att[i], 0.2 * sig.row(0).values[i], 1e-12);

  EXPECT_THROW(residual(sig, seasonal_signature(61, 3)), ShapeError);
}

TEST(NoiseProfile, Learning) {
  const auto sig = make_signature({seasonal_row(360, 4), seasonal_row(360, 5, 3.0)});
  const std::size_t d = 12, len = 30;
  std::vector<Signature> clean;
  for (std::size_t i = 0; i < d; ++i) clean.push_back(sig.slice(i * len, len));
  const auto zero = learn_noise_profile(sig, clean, d);
  ASSERT_EQ(zero.segments(), d);
  EXPECT_EQ(zero.segment_length, len);
  for (const auto& s : zero.segment_snrs) EXPECT_TRUE(s.is_infinite());

  auto noisy = clean;
  noisy[3] = inject(clean[3], Distortion{20.0}, 3);
  const auto one = learn_noise_profile(sig, noisy, d);
  for (std::size_t i = 0; i < d; ++i) {
    if (i == 3) {
      EXPECT_NEAR(std::log10(one.segment_snrs[i].ratio()), 2.0, 0.25);
    } else {
      EXPECT_TRUE(one.segment_snrs[i].is_infinite());
    }
  }

  const auto full = inject(sig, Distortion{18.0}, 4);
  const auto whole = learn_noise_profile(sig, std::span(&full, 1), 1);
  ASSERT_EQ(whole.segments(), 1u);
  V s, n;
  const auto res = residual(sig, full);
  for (std::size_t r = 0; r < 2; ++r) {
    s.insert(s.end(), sig.row(r).values.begin(), sig.row(r).values.end());
    n.insert(n.end(), res[r].begin(), res[r].end());
  }
  EXPECT_NEAR(whole.segment_snrs[0].ratio(), snr(s, n).ratio(), 1e-9);

  EXPECT_THROW(learn_noise_profile(sig, clean, 0), InvariantError);
  EXPECT_THROW(learn_noise_profile(sig, std::span(clean).subspan(0, 11), d), ShapeError);
}

TEST(NoiseProfile, MonitoringKeepsMinimum) {
  const auto sig = seasonal_signature(240, 6);
  const std::vector<Signature> runs{inject(sig, Distortion{25.0}, 1), inject(sig, Distortion{15.0}, 2),
                                    sig};
  const auto prof = learn_monitoring_profile(sig, runs, 8);
  for (std::size_t i = 0; i < 8; ++i) {
    const auto a = segment_snrs(sig, runs[0], 8)[i];
    const auto b = segment_snrs(sig, runs[1], 8)[i];
    EXPECT_EQ(prof.segment_snrs[i], std::min(a, b));
  }
}

TEST(NoiseProfile, JsonRoundTrip) {
  NoiseProfile p{{Snr::finite(100.5), Snr::infinite(), Snr::finite(3.25)}, 120};
  EXPECT_EQ(noise_profile_from_json(to_json(p)), p);
  EXPECT_THROW(noise_profile_from_json(R"({"segment_length":0,"segment_snrs":[1]})"),
               ParseError);
}

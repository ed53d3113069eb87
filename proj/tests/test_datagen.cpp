#include <gtest/gtest.h>

#include <fstream>
#include <random>
#include <sstream>

#include "oracles.hpp"
#include "sigdrift/datagen.hpp"
#include "sigdrift/detect.hpp"
#include "sigdrift/error.hpp"
#include "sigdrift/similarity.hpp"

using namespace sigdrift;
using V = std::vector<double>;

namespace {

const std::vector<Signature>& defaults() {
  static const auto sigs = default_provider_signatures(42);
  return sigs;
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

QoSProfile flat_profile(std::string id, double workload, std::vector<double> months) {
  QoSProfile p;
  p.provider_id = std::move(id);
  p.workload_map = {{0.0, 1.0, workload}};
  p.seasonal_map = monthly_seasonal_map(months, 360);
  p.jitter_amplitude = 0.0;
  return p;
}

}  // namespace

TEST(Trace, LoadExamples) {
  std::istringstream in(
      "node_id,timestamp,cores_requested,cores_total\n"
      "n1,0,16,32\nn2,0,8,32\nn1,1,32,32\nn2,1,0,32\n");
  const auto t = load_trace(in);
  ASSERT_EQ(t.nodes(), 2u);
  EXPECT_EQ(t.node_ids[0], "n1");
  EXPECT_DOUBLE_EQ(t.demand[0][0], 0.5);
  EXPECT_DOUBLE_EQ(t.demand[0][1], 1.0);
  EXPECT_DOUBLE_EQ(t.demand[1][0], 0.25);

  std::istringstream over("node_id,timestamp,cores_requested,cores_total\nn1,0,40,32\n");
  EXPECT_THROW(load_trace(over), ParseError);
  std::istringstream ragged(
      "node_id,timestamp,cores_requested,cores_total\nn1,0,1,32\nn1,1,1,32\nn2,0,1,32\n");
  EXPECT_THROW(load_trace(ragged), ShapeError);
  std::istringstream dup("node_id,timestamp,cores_requested,cores_total\nn1,0,1,32\nn1,0,2,32\n");
  EXPECT_THROW(load_trace(dup), ParseError);
}

TEST(Trace, SynthesizeAndRoundTrip) {
  const auto t = synthesize_trace(kTraceNodes, kTraceLength, 5);
  EXPECT_EQ(t.nodes(), 31u);
  EXPECT_EQ(t.length(), 6486u);
  for (const auto& s : t.demand) {
    for (const double d : s) {
      ASSERT_GE(d, 0.0);
      ASSERT_LE(d, 1.0);
    }
  }
  EXPECT_EQ(t.demand, synthesize_trace(31, 6486, 5).demand);
  EXPECT_NE(t.demand, synthesize_trace(31, 6486, 6).demand);

  const auto small = synthesize_trace(3, 50, 1);
  std::ostringstream out;
  write_trace(small, out, 64.0);
  std::istringstream in(out.str());
  const auto back = load_trace(in);
  EXPECT_EQ(back.node_ids, small.node_ids);
  for (std::size_t n = 0; n < 3; ++n) {
    for (std::size_t i = 0; i < 50; ++i) EXPECT_NEAR(back.demand[n][i], small.demand[n][i], 1e-12);
  }
}

TEST(Baseline, Examples) {
  const auto map = default_baseline_map();
  for (const auto& [d, v] : map.breakpoints()) EXPECT_DOUBLE_EQ(baseline_performance(map, d), v);
  double lowest = 1e300;
  for (const auto& bp : map.breakpoints()) lowest = std::min(lowest, bp.second);
  EXPECT_DOUBLE_EQ(baseline_performance(map, 1.0), lowest);
  const BaselineMap two({{0.0, 2000.0}, {1.0, 1000.0}});
  EXPECT_DOUBLE_EQ(two(0.5), 1500.0);
  EXPECT_THROW((void)two(1.5), InvariantError);
  EXPECT_THROW(BaselineMap({{0.0, 1.0}, {1.0, 2.0}}), InvariantError);
  EXPECT_THROW(BaselineMap({{0.0, 2.0}, {0.5, 1.0}}), InvariantError);
}

TEST(Baseline, MonotoneProperty) {
  const auto map = default_baseline_map();
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int i = 0; i < 10000; ++i) {
    double a = u(rng), b = u(rng);
    if (a > b) std::swap(a, b);
    EXPECT_GE(map(a), map(b));
  }
}

TEST(ProviderPerformance, Examples) {
  const BaselineMap map({{0.0, 2000.0}, {0.6, 1500.0}, {1.0, 1000.0}});
  std::vector<double> months(12, 1.0);
  auto p = flat_profile("x", 1.10, months);
  EXPECT_NEAR(provider_performance(p, 0.6, 100, map, 1), 1650.0, 1e-9);
  months[11] = 1.01;
  p = flat_profile("x", 1.10, months);
  EXPECT_NEAR(provider_performance(p, 0.6, 350, map, 1), 1666.5, 1e-9);
  EXPECT_EQ(provider_performance(p, 0.6, 350, map, 1), provider_performance(p, 0.6, 350, map, 99));
  p.jitter_amplitude = 0.05;
  const double j = provider_performance(p, 0.6, 350, map, 3);
  EXPECT_GE(j, 1666.5 - 1e-9);
  EXPECT_LT(j, 1666.5 * 1.05);
}

TEST(Profiles, DefaultsAreValidAndDistinct) {
  const auto profiles = default_profiles();
  ASSERT_EQ(profiles.size(), 5u);
  for (const auto& p : profiles) EXPECT_NO_THROW(p.validate(360));
  for (std::size_t i = 0; i < 5; ++i) {
    for (std::size_t j = i + 1; j < 5; ++j) EXPECT_NE(profiles[i], profiles[j]);
  }
  EXPECT_EQ(profiles_from_json(profiles_to_json(profiles)), profiles);
}

TEST(Profiles, CommittedDataMatchesDefaults) {
  const std::filesystem::path dir = SIGDRIFT_DATA_DIR;
  EXPECT_EQ(profiles_from_json(slurp(dir / "profiles.json")), default_profiles());
  EXPECT_EQ(baseline_map_from_json(slurp(dir / "baseline_map.json")).breakpoints(),
            default_baseline_map().breakpoints());
}

TEST(Signatures, DefaultShape) {
  const auto& sigs = defaults();
  ASSERT_EQ(sigs.size(), 5u);
  for (const auto& s : sigs) {
    EXPECT_EQ(s.length(), 360u);
    EXPECT_EQ(s.scaling(), RowScaling::kUnitStd);
    EXPECT_NEAR(oracle::pop_std(s.row(0).values), 1.0, 1e-9);
  }
  for (std::size_t i = 0; i < 5; ++i) {
    for (std::size_t j = i + 1; j < 5; ++j) {
      EXPECT_LT(pcc(sigs[i].row(0).values, sigs[j].row(0).values), 0.95) << i << "," << j;
    }
  }
}

TEST(Signatures, IdenticalProfilesGiveIdenticalSignatures) {
  auto a = flat_profile("a", 1.0, {1, 1.1, 1.2, 1.1, 1, 0.9, 0.8, 0.9, 1, 1.1, 1.2, 1.1});
  auto b = a;
  b.provider_id = "b";
  const std::vector<QoSProfile> ps{a, b};
  const auto trace = synthesize_trace(4, 720, 3);
  const auto sigs = build_provider_signatures(ps, trace, TimeGrid(360), default_baseline_map(), 9);
  EXPECT_EQ(sigs[0].row(0).values, sigs[1].row(0).values);
}

TEST(Pairs, Changed) {
  const auto& s = defaults();
  EXPECT_THROW(make_changed(s[0], s[1], 10, 0, 1), InvariantError);
  EXPECT_THROW(make_changed(s[0], s[0], 10, 5, 1), InvariantError);
  EXPECT_THROW(make_changed(s[0], s[1], 300, 90, 1), ShapeError);
  const auto full = make_changed(s[0], s[1], 0, 360, 1);
  EXPECT_EQ(full.recomputed.row(0).values, s[1].row(0).values);
  for (std::size_t b = 0; b < 5; ++b) {
    for (std::size_t d = 0; d < 5; ++d) {
      if (b == d) continue;
      for (std::size_t start = 0; start + 90 <= 360; start += 30) {
        const auto p = make_changed(s[b], s[d], start, 90, 1);
        EXPECT_GT(rmse(p.existing.row(0).values, p.recomputed.row(0).values), 0.2);
      }
    }
  }
}

TEST(Pairs, NoisyLabels) {
  const auto& s = defaults();
  const auto spike = make_noisy(s[0], Spike{10, 3, 5.0}, 1);
  EXPECT_EQ(spike.label, PairLabel::kNoisy);
  EXPECT_EQ(kind_of(*spike.provenance.noise), NoiseKind::kSpike);
  EXPECT_EQ(kind_of(*make_noisy(s[0], Distortion{20}, 1).provenance.noise), NoiseKind::kDistortion);
  EXPECT_EQ(kind_of(*make_noisy(s[0], Attenuation{0.9}, 1).provenance.noise),
            NoiseKind::kAttenuation);
}

TEST(Corpus, CompositionAndDeterminism) {
  const auto& s = defaults();
  CorpusConfig cfg;
  cfg.n_changed = 300;
  cfg.n_noisy = 300;
  const auto corpus = build_corpus(s, cfg, 7);
  ASSERT_EQ(corpus.size(), 600u);
  std::size_t changed = 0, dist = 0, att = 0, spike = 0;
  for (std::size_t i = 0; i < corpus.size(); ++i) {
    const auto& p = corpus[i];
    EXPECT_EQ(p.label, label_from_provenance(p.provenance));
    EXPECT_EQ(p.label == PairLabel::kChanged, i < 300);
    if (p.label == PairLabel::kChanged) {
      ++changed;
      EXPECT_NE(*p.provenance.donor, p.provenance.base);
      EXPECT_EQ(*p.provenance.segment_length, 90u);
      continue;
    }
    switch (kind_of(*p.provenance.noise)) {
      case NoiseKind::kDistortion: ++dist; break;
      case NoiseKind::kAttenuation: ++att; break;
      case NoiseKind::kSpike: ++spike; break;
    }
  }
  EXPECT_EQ(changed, 300u);
  EXPECT_NEAR(dist / 300.0, 0.5, 0.1);
  EXPECT_NEAR(att / 300.0, 0.1, 0.05);
  EXPECT_GT(spike, 0u);

  const auto again = build_corpus(s, cfg, 7, 3);
  for (std::size_t i = 0; i < corpus.size(); ++i) {
    EXPECT_EQ(corpus[i].recomputed, again[i].recomputed);
  }

  cfg.distortion_fraction = 0.0;
  for (const auto& p : build_corpus(s, cfg, 8)) {
    if (p.provenance.noise) EXPECT_NE(kind_of(*p.provenance.noise), NoiseKind::kDistortion);
  }
  cfg.paper_faithful = true;
  for (const auto& p : build_corpus(s, cfg, 8)) {
    if (p.provenance.noise) EXPECT_EQ(kind_of(*p.provenance.noise), NoiseKind::kSpike);
  }
}

TEST(Corpus, FullScaleCounts) {
  CorpusConfig cfg;
  const auto corpus = build_corpus(defaults(), cfg, 1, 0);
  ASSERT_EQ(corpus.size(), 6000u);
  std::size_t changed = 0;
  for (const auto& p : corpus) changed += p.label == PairLabel::kChanged;
  EXPECT_EQ(changed, 3000u);
}

TEST(Corpus, ManifestListsEveryPair) {
  CorpusConfig cfg;
  cfg.n_changed = 3;
  cfg.n_noisy = 2;
  const auto corpus = build_corpus(defaults(), cfg, 3);
  const auto m = manifest_json(corpus, cfg, 3);
  EXPECT_NE(m.find(pair_file_name(4)), std::string::npos);
  EXPECT_EQ(pair_file_name(12), "pair_00012.csv");
}

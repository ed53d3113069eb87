#include "sigdrift/datagen.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <istream>
#include <map>
#include <ostream>
#include <random>

#include <json.hpp>

#include "parallel.hpp"
#include "sigdrift/error.hpp"
#include "sigdrift/random.hpp"
#include "sigdrift/signature.hpp"
#include "text_io.hpp"

namespace sigdrift {

namespace {

using nlohmann::json;

constexpr std::uint64_t kTraceStream = 0x7472616365ULL;
constexpr std::uint64_t kJitterStream = 0x6a6974746572ULL;
constexpr std::uint64_t kCorpusStream = 0x636f72707573ULL;
constexpr std::uint64_t kMonitorStream = 0x6d6f6e69746f72ULL;

constexpr std::array<double, 6> kDemandEdges{0.0, 0.2, 0.4, 0.6, 0.8, 1.0};

struct ProfileTable {
  const char* id;
  std::array<double, 5> workload;
  std::array<double, 12> seasonal;
};

constexpr std::array<ProfileTable, 5> kDefaultProfiles{{
    {"provider-1",
     {1.05, 1.02, 1.10, 0.97, 0.92},
     {1.4263, 0.9212, 0.8852, 1.3279, 0.7868, 0.7508, 1.2296, 0.7508, 0.7868, 1.3279, 0.8852,
      0.9212}},
    {"provider-2",
     {0.98, 1.00, 1.03, 1.05, 1.00},
     {0.9099, 0.8713, 1.2189, 0.8044, 0.7940, 1.1906, 0.8326, 0.8713, 1.2961, 0.9382, 0.9485,
      1.3244}},
    {"provider-3",
     {1.10, 1.06, 1.00, 0.95, 0.90},
     {1.1902, 1.0110, 0.9155, 1.1522, 0.9519, 0.8511, 1.0998, 0.9256, 0.8579, 1.1379, 0.9847,
      0.9222}},
    {"provider-4",
     {0.95, 0.98, 1.00, 1.02, 1.08},
     {1.1658, 0.9062, 1.0111, 1.1131, 0.8453, 0.9584, 1.0827, 0.8453, 0.9889, 1.1354, 0.9062,
      1.0416}},
    {"provider-5",
     {1.00, 1.04, 1.02, 0.99, 0.96},
     {0.9351, 1.0739, 0.9201, 0.9242, 1.0848, 0.9501, 0.9651, 1.1257, 0.9800, 0.9760, 1.1148,
      0.9501}},
}};

json parse_json(std::string_view text, std::string_view what) {
  try {
    return json::parse(text);
  } catch (const json::exception& e) {
    throw ParseError(std::string(what) + ": " + e.what());
  }
}

void check_tiling(const std::vector<IntervalRule>& rules, double lo, double hi,
                  std::string_view what) {
  if (rules.empty()) {
    throw InvariantError(std::string(what) + " is empty");
  }
  double expected = lo;
  for (const auto& r : rules) {
    if (!(r.multiplier > 0.0) || !std::isfinite(r.multiplier)) {
      throw InvariantError(std::string(what) + " multipliers must be positive");
    }
    if (r.from != expected || !(r.to > r.from)) {
      throw InvariantError(std::string(what) + " rules must tile [" + detail::format_double(lo) +
                           ", " + detail::format_double(hi) + ") without gaps or overlaps");
    }
    expected = r.to;
  }
  if (expected != hi) {
    throw InvariantError(std::string(what) + " does not cover its whole domain");
  }
}

double rule_multiplier(const std::vector<IntervalRule>& rules, double x) {
  for (const auto& r : rules) {
    if (x >= r.from && x < r.to) {
      return r.multiplier;
    }
  }
  if (!rules.empty() && x == rules.back().to) {
    return rules.back().multiplier;
  }
  throw InvariantError("value " + detail::format_double(x) + " is outside the rule domain");
}

json rules_json(const std::vector<IntervalRule>& rules) {
  json out = json::array();
  for (const auto& r : rules) {
    out.push_back({{"from", r.from}, {"to", r.to}, {"multiplier", r.multiplier}});
  }
  return out;
}

std::vector<IntervalRule> rules_from_json(const json& j, std::string_view what) {
  if (!j.is_array()) {
    throw ParseError(std::string(what) + " must be an array");
  }
  std::vector<IntervalRule> out;
  for (const auto& r : j) {
    try {
      out.push_back({r.at("from").get<double>(), r.at("to").get<double>(),
                     r.at("multiplier").get<double>()});
    } catch (const json::exception& e) {
      throw ParseError(std::string(what) + ": " + e.what());
    }
  }
  return out;
}

json spec_json(const NoiseSpec& spec) {
  return json::parse(to_json(spec));
}

std::size_t uniform_index(std::mt19937_64& rng, std::size_t n) {
  return std::uniform_int_distribution<std::size_t>(0, n - 1)(rng);
}

NoiseSpec draw_noise(std::mt19937_64& rng, const CorpusConfig& config, std::size_t grid_length) {
  const double u = std::uniform_real_distribution<double>(0.0, 1.0)(rng);
  if (u < config.distortion_fraction) {
    return Distortion{config.distortion_db};
  }
  if (u < config.distortion_fraction + config.effective_attenuation_fraction()) {
    return Attenuation{
        std::uniform_real_distribution<double>(config.attenuation_min, config.attenuation_max)(rng)};
  }
  const std::size_t position = uniform_index(rng, grid_length - config.spike_width + 1);
  const double sign = std::bernoulli_distribution(0.5)(rng) ? 1.0 : -1.0;
  return Spike{position, config.spike_width, sign * config.spike_magnitude};
}

LabeledPair noisy_pair(std::span<const Signature> bases, const CorpusConfig& config,
                       std::uint64_t pair_seed) {
  std::mt19937_64 rng(pair_seed);
  const auto& base = bases[uniform_index(rng, bases.size())];
  const auto spec = draw_noise(rng, config, base.length());
  return make_noisy(base, spec, mix64(pair_seed));
}

LabeledPair changed_pair(std::span<const Signature> bases, const CorpusConfig& config,
                         std::uint64_t pair_seed) {
  std::mt19937_64 rng(pair_seed);
  const std::size_t b = uniform_index(rng, bases.size());
  std::size_t d = uniform_index(rng, bases.size() - 1);
  if (d >= b) {
    ++d;
  }
  const std::size_t start = uniform_index(rng, bases[b].length() - config.segment_length + 1);
  return make_changed(bases[b], bases[d], start, config.segment_length, pair_seed);
}

}  // namespace

void WorkloadTrace::validate() const {
  if (demand.empty()) {
    throw InvariantError("workload trace needs at least one node");
  }
  if (node_ids.size() != demand.size()) {
    throw ShapeError("workload trace node ids do not match the demand series");
  }
  for (std::size_t n = 0; n < demand.size(); ++n) {
    if (demand[n].size() != demand.front().size() || demand[n].empty()) {
      throw ShapeError("node '" + node_ids[n] + "' has a different number of timestamps");
    }
    for (const double v : demand[n]) {
      if (!(v >= 0.0 && v <= 1.0)) {
        throw InvariantError("node '" + node_ids[n] + "' has demand outside [0, 1]");
      }
    }
  }
}

WorkloadTrace load_trace(std::istream& in) {
  std::string line;
  if (!detail::next_line(in, line)) {
    throw ParseError("trace file is empty");
  }
  const auto header = detail::split(line);
  const std::array<std::string_view, 4> expected{"node_id", "timestamp", "cores_requested",
                                                 "cores_total"};
  if (header.size() != expected.size() ||
      !std::equal(header.begin(), header.end(), expected.begin(),
                  [](std::string_view a, std::string_view b) { return detail::trim(a) == b; })) {
    throw ParseError("trace header must be 'node_id,timestamp,cores_requested,cores_total'");
  }

  std::vector<std::string> ids;
  std::map<std::string, std::vector<std::pair<long long, double>>> rows;
  std::size_t line_no = 1;
  while (detail::next_line(in, line)) {
    ++line_no;
    if (detail::trim(line).empty()) {
      continue;
    }
    const auto f = detail::split(line);
    const std::string where = "trace line " + std::to_string(line_no);
    if (f.size() != 4) {
      throw ParseError(where + ": expected 4 fields");
    }
    const std::string id(detail::trim(f[0]));
    if (id.empty()) {
      throw ParseError(where + ": empty node id");
    }
    const long long ts = detail::parse_integer(f[1], where);
    const double requested = detail::parse_double(f[2], where);
    const double total = detail::parse_double(f[3], where);
    if (!(total > 0.0)) {
      throw ParseError(where + ": cores_total must be positive");
    }
    if (requested < 0.0 || requested > total) {
      throw ParseError(where + ": cores_requested must lie in [0, cores_total]");
    }
    auto [it, inserted] = rows.try_emplace(id);
    if (inserted) {
      ids.push_back(id);
    }
    it->second.emplace_back(ts, requested / total);
  }

  WorkloadTrace trace;
  for (const auto& id : ids) {
    auto& series = rows[id];
    std::sort(series.begin(), series.end());
    for (std::size_t i = 1; i < series.size(); ++i) {
      if (series[i].first == series[i - 1].first) {
        throw ParseError("node '" + id + "' repeats timestamp " + std::to_string(series[i].first));
      }
    }
    Series demand;
    demand.reserve(series.size());
    for (const auto& [ts, v] : series) {
      demand.push_back(v);
    }
    trace.node_ids.push_back(id);
    trace.demand.push_back(std::move(demand));
  }
  trace.validate();
  return trace;
}

WorkloadTrace load_trace(const std::filesystem::path& path) {
  auto in = detail::open_input(path);
  return load_trace(in);
}

void write_trace(const WorkloadTrace& trace, std::ostream& out, double cores_total) {
  out << "node_id,timestamp,cores_requested,cores_total\n";
  const std::string total = detail::format_double(cores_total);
  for (std::size_t n = 0; n < trace.nodes(); ++n) {
    for (std::size_t t = 0; t < trace.demand[n].size(); ++t) {
      out << trace.node_ids[n] << ',' << t << ','
          << detail::format_double(trace.demand[n][t] * cores_total) << ',' << total << '\n';
    }
  }
}

WorkloadTrace synthesize_trace(std::size_t nodes, std::size_t length, std::uint64_t seed) {
  if (nodes == 0 || length == 0) {
    throw InvariantError("trace needs at least one node and one timestamp");
  }
  WorkloadTrace trace;
  for (std::size_t n = 0; n < nodes; ++n) {
    std::mt19937_64 rng(derive_seed(seed, kTraceStream, n));
    std::uniform_real_distribution<double> start(0.2, 0.8);
    std::normal_distribution<double> step(0.0, 0.02);
    Series demand(length);
    double x = start(rng);
    for (auto& v : demand) {
      x = std::clamp(x + step(rng), 0.0, 1.0);
      v = x;
    }
    trace.node_ids.push_back("node-" + std::to_string(n + 1));
    trace.demand.push_back(std::move(demand));
  }
  return trace;
}

BaselineMap::BaselineMap(std::vector<std::pair<double, double>> breakpoints)
    : breakpoints_(std::move(breakpoints)) {
  if (breakpoints_.size() < 2) {
    throw InvariantError("baseline map needs at least two breakpoints");
  }
  if (breakpoints_.front().first != 0.0 || breakpoints_.back().first != 1.0) {
    throw InvariantError("baseline map must span demand [0, 1]");
  }
  for (std::size_t i = 0; i < breakpoints_.size(); ++i) {
    const auto& [x, y] = breakpoints_[i];
    if (!std::isfinite(x) || !std::isfinite(y)) {
      throw InvariantError("baseline map breakpoints must be finite");
    }
    if (i > 0) {
      if (!(x > breakpoints_[i - 1].first)) {
        throw InvariantError("baseline map demands must be strictly increasing");
      }
      if (!(y < breakpoints_[i - 1].second)) {
        throw InvariantError("baseline map performance must be strictly decreasing");
      }
    }
  }
}

double BaselineMap::operator()(double demand) const {
  if (!(demand >= 0.0 && demand <= 1.0)) {
    throw InvariantError("demand " + detail::format_double(demand) + " is outside [0, 1]");
  }
  const auto hi = std::upper_bound(breakpoints_.begin(), breakpoints_.end(), demand,
                                   [](double d, const auto& bp) { return d < bp.first; });
  if (hi == breakpoints_.end()) {
    return breakpoints_.back().second;
  }
  const auto lo = std::prev(hi);
  const double w = (demand - lo->first) / (hi->first - lo->first);
  return lo->second + w * (hi->second - lo->second);
}

BaselineMap default_baseline_map() {
  return BaselineMap({{0.0, 2000.0}, {0.25, 1800.0}, {0.5, 1500.0}, {0.75, 1250.0}, {1.0, 1000.0}});
}

double baseline_performance(const BaselineMap& map, double demand) {
  return map(demand);
}

void QoSProfile::validate(std::size_t grid_length) const {
  if (provider_id.empty()) {
    throw InvariantError("profile needs a provider id");
  }
  check_tiling(workload_map, 0.0, 1.0, "workload map");
  check_tiling(seasonal_map, 0.0, static_cast<double>(grid_length), "seasonal map");
  if (!(jitter_amplitude >= 0.0) || !std::isfinite(jitter_amplitude)) {
    throw InvariantError("jitter amplitude must be finite and >= 0");
  }
}

double QoSProfile::workload_multiplier(double demand) const {
  return rule_multiplier(workload_map, demand);
}

double QoSProfile::seasonal_multiplier(std::size_t t) const {
  const double x = static_cast<double>(t);
  for (const auto& r : seasonal_map) {
    if (x >= r.from && x < r.to) {
      return r.multiplier;
    }
  }
  throw InvariantError("grid index " + std::to_string(t) + " is outside the seasonal map");
}

std::vector<IntervalRule> monthly_seasonal_map(std::span<const double> multipliers,
                                               std::size_t grid_length) {
  if (multipliers.size() != 12) {
    throw InvariantError("a monthly seasonal map needs 12 multipliers");
  }
  if (grid_length < 12) {
    throw InvariantError("grid too short for 12 months");
  }
  std::vector<IntervalRule> rules;
  for (std::size_t m = 0; m < 12; ++m) {
    rules.push_back({static_cast<double>(paa_frame_start(grid_length, 12, m)),
                     static_cast<double>(paa_frame_start(grid_length, 12, m + 1)),
                     multipliers[m]});
  }
  return rules;
}

std::vector<QoSProfile> default_profiles() {
  std::vector<QoSProfile> out;
  for (const auto& p : kDefaultProfiles) {
    QoSProfile profile;
    profile.provider_id = p.id;
    for (std::size_t i = 0; i < p.workload.size(); ++i) {
      profile.workload_map.push_back({kDemandEdges[i], kDemandEdges[i + 1], p.workload[i]});
    }
    profile.seasonal_map = monthly_seasonal_map(p.seasonal, kGridLength);
    profile.jitter_amplitude = 0.05;
    out.push_back(std::move(profile));
  }
  return out;
}

double provider_performance(const QoSProfile& profile, double demand, std::size_t t,
                            const BaselineMap& baseline, std::uint64_t seed) {
  const double expected =
      baseline(demand) * profile.workload_multiplier(demand) * profile.seasonal_multiplier(t);
  if (profile.jitter_amplitude == 0.0) {
    return expected;
  }
  return expected * (1.0 + profile.jitter_amplitude * unit_uniform(seed));
}

std::vector<Signature> build_provider_signatures(std::span<const QoSProfile> profiles,
                                                 const WorkloadTrace& trace, const TimeGrid& grid,
                                                 const BaselineMap& baseline, std::uint64_t seed) {
  trace.validate();
  const std::size_t n = trace.length();
  const std::size_t len = grid.length();
  if (n < len) {
    throw ShapeError("trace has fewer timestamps than the grid");
  }
  for (std::size_t i = 0; i < profiles.size(); ++i) {
    profiles[i].validate(len);
    for (std::size_t j = 0; j < i; ++j) {
      if (profiles[i].provider_id == profiles[j].provider_id) {
        throw InvariantError("duplicate provider id '" + profiles[i].provider_id + "'");
      }
    }
  }

  // Grid day of every raw timestamp: the PAA frame that contains it.
  std::vector<std::size_t> day(n);
  for (std::size_t j = 0; j < len; ++j) {
    for (std::size_t i = paa_frame_start(n, len, j); i < paa_frame_start(n, len, j + 1); ++i) {
      day[i] = j;
    }
  }

  std::vector<Signature> out;
  out.reserve(profiles.size());
  for (std::size_t p = 0; p < profiles.size(); ++p) {
    const auto& profile = profiles[p];
    std::vector<TrialExperience> users;
    users.reserve(trace.nodes());
    Series raw(n);
    for (std::size_t node = 0; node < trace.nodes(); ++node) {
      const std::uint64_t node_seed = derive_seed(seed, kJitterStream, p * trace.nodes() + node);
      for (std::size_t i = 0; i < n; ++i) {
        raw[i] = provider_performance(profile, trace.demand[node][i], day[i], baseline,
                                      node_seed + i);
      }
      users.push_back({trace.node_ids[node], "throughput", paa(raw, len), 0, len});
    }
    const TrialCohort cohort(std::move(users));
    auto sig = generate_signature(std::span(&cohort, 1), grid, profile.provider_id);
    std::vector<QoSSeries> rows = sig.rows();
    rows.front().unit = "ops/s";
    out.emplace_back(profile.provider_id, grid, std::move(rows));
  }
  return out;
}

std::vector<Signature> default_provider_signatures(std::uint64_t seed) {
  const auto profiles = default_profiles();
  const auto trace = synthesize_trace(kTraceNodes, kTraceLength, seed);
  return build_provider_signatures(profiles, trace, TimeGrid(kGridLength), default_baseline_map(),
                                   seed);
}

std::string to_json(const BaselineMap& map) {
  json bps = json::array();
  for (const auto& [x, y] : map.breakpoints()) {
    bps.push_back({{"demand", x}, {"performance", y}});
  }
  return json{{"breakpoints", bps}}.dump(2);
}

BaselineMap baseline_map_from_json(std::string_view text) {
  const json j = parse_json(text, "baseline map");
  std::vector<std::pair<double, double>> bps;
  try {
    for (const auto& bp : j.at("breakpoints")) {
      bps.emplace_back(bp.at("demand").get<double>(), bp.at("performance").get<double>());
    }
  } catch (const json::exception& e) {
    throw ParseError(std::string("baseline map: ") + e.what());
  }
  return BaselineMap(std::move(bps));
}

std::string profiles_to_json(std::span<const QoSProfile> profiles) {
  json arr = json::array();
  for (const auto& p : profiles) {
    arr.push_back({{"provider_id", p.provider_id},
                   {"jitter_amplitude", p.jitter_amplitude},
                   {"workload_map", rules_json(p.workload_map)},
                   {"seasonal_map", rules_json(p.seasonal_map)}});
  }
  return json{{"profiles", arr}}.dump(2);
}

std::vector<QoSProfile> profiles_from_json(std::string_view text) {
  const json j = parse_json(text, "profiles");
  std::vector<QoSProfile> out;
  try {
    for (const auto& p : j.at("profiles")) {
      QoSProfile profile;
      profile.provider_id = p.at("provider_id").get<std::string>();
      profile.jitter_amplitude = p.value("jitter_amplitude", 0.05);
      profile.workload_map = rules_from_json(p.at("workload_map"), "workload_map");
      profile.seasonal_map = rules_from_json(p.at("seasonal_map"), "seasonal_map");
      out.push_back(std::move(profile));
    }
  } catch (const json::exception& e) {
    throw ParseError(std::string("profiles: ") + e.what());
  }
  return out;
}

std::string_view to_string(PairLabel label) noexcept {
  return label == PairLabel::kChanged ? "changed" : "noisy";
}

PairLabel label_from_provenance(const Provenance& p) noexcept {
  return p.donor ? PairLabel::kChanged : PairLabel::kNoisy;
}

LabeledPair make_changed(const Signature& original, const Signature& donor, std::size_t start,
                         std::size_t length, std::uint64_t seed) {
  if (donor.provider_id() == original.provider_id()) {
    throw InvariantError("donor must come from a different provider");
  }
  if (length == 0) {
    throw InvariantError("changed segment must not be empty");
  }
  if (donor.length() != original.length() || donor.row_count() != original.row_count()) {
    throw ShapeError("donor and original signatures differ in shape");
  }
  if (start + length > original.length()) {
    throw ShapeError("changed segment exceeds the grid");
  }
  std::vector<Series> values;
  for (std::size_t r = 0; r < original.row_count(); ++r) {
    Series row = original.row(r).values;
    const auto& d = donor.row(r).values;
    std::copy(d.begin() + static_cast<std::ptrdiff_t>(start),
              d.begin() + static_cast<std::ptrdiff_t>(start + length),
              row.begin() + static_cast<std::ptrdiff_t>(start));
    values.push_back(std::move(row));
  }
  Provenance prov{seed, original.provider_id(), donor.provider_id(), start, length, std::nullopt};
  return {original, original.with_values(std::move(values)), PairLabel::kChanged, std::move(prov)};
}

LabeledPair make_noisy(const Signature& original, const NoiseSpec& spec, std::uint64_t seed) {
  Provenance prov{seed, original.provider_id(), std::nullopt, std::nullopt, std::nullopt, spec};
  return {original, inject(original, spec, seed), PairLabel::kNoisy, std::move(prov)};
}

void CorpusConfig::validate(std::size_t grid_length) const {
  if (!(distortion_fraction >= 0.0 && distortion_fraction <= 1.0)) {
    throw InvariantError("distortion_fraction must lie in [0, 1]");
  }
  if (!(attenuation_fraction >= 0.0 && attenuation_fraction <= 1.0)) {
    throw InvariantError("attenuation_fraction must lie in [0, 1]");
  }
  if (segment_length == 0 || segment_length > grid_length) {
    throw InvariantError("segment_length must lie in [1, grid length]");
  }
  if (spike_width == 0 || spike_width > grid_length) {
    throw InvariantError("spike_width must lie in [1, grid length]");
  }
  if (!std::isfinite(spike_magnitude) || !std::isfinite(distortion_db)) {
    throw InvariantError("spike magnitude and distortion SNR must be finite");
  }
  if (!(attenuation_min > 0.0 && attenuation_min <= attenuation_max && attenuation_max < 1.0)) {
    throw InvariantError("attenuation factors must satisfy 0 < min <= max < 1");
  }
}

double CorpusConfig::effective_attenuation_fraction() const noexcept {
  if (paper_faithful) {
    return 0.0;
  }
  return std::min(attenuation_fraction, 1.0 - distortion_fraction);
}

std::vector<LabeledPair> build_corpus(std::span<const Signature> bases, const CorpusConfig& config,
                                      std::uint64_t seed, std::size_t jobs) {
  if (bases.size() < 2) {
    throw InvariantError("corpus needs at least two base signatures");
  }
  config.validate(bases.front().length());
  const std::size_t total = config.n_changed + config.n_noisy;
  std::vector<std::optional<LabeledPair>> slots(total);
  detail::parallel_for(total, jobs, [&](std::size_t i) {
    const std::uint64_t pair_seed = derive_seed(seed, kCorpusStream, i);
    slots[i] = i < config.n_changed ? changed_pair(bases, config, pair_seed)
                                    : noisy_pair(bases, config, pair_seed);
  });
  std::vector<LabeledPair> out;
  out.reserve(total);
  for (auto& s : slots) {
    out.push_back(std::move(*s));
  }
  return out;
}

std::vector<LabeledPair> build_monitoring_corpus(std::span<const Signature> bases,
                                                 const CorpusConfig& config, std::size_t n_pairs,
                                                 std::uint64_t seed, std::size_t jobs) {
  if (bases.empty()) {
    throw InvariantError("monitoring corpus needs base signatures");
  }
  config.validate(bases.front().length());
  std::vector<std::optional<LabeledPair>> slots(n_pairs);
  detail::parallel_for(n_pairs, jobs, [&](std::size_t i) {
    slots[i] = noisy_pair(bases, config, derive_seed(seed, kMonitorStream, i));
  });
  std::vector<LabeledPair> out;
  out.reserve(n_pairs);
  for (auto& s : slots) {
    out.push_back(std::move(*s));
  }
  return out;
}

std::string pair_file_name(std::size_t index) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "pair_%05zu.csv", index);
  return buf;
}

std::string manifest_json(std::span<const LabeledPair> pairs, const CorpusConfig& config,
                          std::uint64_t seed, std::string_view signature_dir,
                          std::string_view pair_dir) {
  json list = json::array();
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    const auto& p = pairs[i];
    json entry{{"index", i},
               {"label", std::string(to_string(p.label))},
               {"seed", p.provenance.seed},
               {"base", p.provenance.base},
               {"existing", std::string(signature_dir) + "/" + p.provenance.base + ".csv"},
               {"recomputed", std::string(pair_dir) + "/" + pair_file_name(i)}};
    if (p.provenance.donor) {
      entry["donor"] = *p.provenance.donor;
      entry["segment_start"] = *p.provenance.segment_start;
      entry["segment_length"] = *p.provenance.segment_length;
    }
    if (p.provenance.noise) {
      entry["noise"] = spec_json(*p.provenance.noise);
    }
    list.push_back(std::move(entry));
  }
  json cfg{{"n_changed", config.n_changed},
           {"n_noisy", config.n_noisy},
           {"distortion_fraction", config.distortion_fraction},
           {"attenuation_fraction", config.effective_attenuation_fraction()},
           {"paper_faithful", config.paper_faithful},
           {"segment_length", config.segment_length},
           {"spike_width", config.spike_width},
           {"spike_magnitude", config.spike_magnitude},
           {"distortion_db", config.distortion_db},
           {"attenuation_min", config.attenuation_min},
           {"attenuation_max", config.attenuation_max}};
  return json{{"seed", seed}, {"config", cfg}, {"pairs", list}}.dump(2);
}

}  // namespace sigdrift

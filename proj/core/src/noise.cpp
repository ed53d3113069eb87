#include "sigdrift/noise.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include <json.hpp>

#include "sigdrift/error.hpp"
#include "sigdrift/random.hpp"

namespace sigdrift {

namespace {

using nlohmann::json;

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

json parse_json(std::string_view text, std::string_view what) {
  try {
    return json::parse(text);
  } catch (const json::exception& e) {
    throw ParseError(std::string(what) + ": " + e.what());
  }
}

template <class T>
T field(const json& j, const char* key, std::string_view what) {
  const auto it = j.find(key);
  if (it == j.end()) {
    throw ParseError(std::string(what) + ": missing field '" + key + "'");
  }
  try {
    return it->get<T>();
  } catch (const json::exception&) {
    throw ParseError(std::string(what) + ": field '" + key + "' has the wrong type");
  }
}

template <class T>
T field_or(const json& j, const char* key, T fallback, std::string_view what) {
  return j.contains(key) ? field<T>(j, key, what) : fallback;
}

double noise_power(SeriesView noise) {
  const double mu = mean(noise);
  if (std::abs(mu) <= 1e-12) {
    const double sd = population_std(noise);
    return sd * sd;
  }
  return mean_square(noise);
}

void require_same_shape(const Signature& a, const Signature& b) {
  if (a.length() != b.length()) {
    throw ShapeError("signatures have different grid lengths (" + std::to_string(a.length()) +
                     " vs " + std::to_string(b.length()) + ")");
  }
  if (a.row_count() != b.row_count()) {
    throw ShapeError("signatures have different QoS parameter sets");
  }
  for (std::size_t i = 0; i < a.row_count(); ++i) {
    if (a.row(i).parameter != b.row(i).parameter) {
      throw ShapeError("QoS parameter mismatch: '" + a.row(i).parameter + "' vs '" +
                       b.row(i).parameter + "'");
    }
  }
}

Snr pooled_snr(const Signature& existing, const std::vector<Series>& noise, std::size_t start,
               std::size_t length) {
  Series s;
  Series n;
  s.reserve(length * noise.size());
  n.reserve(length * noise.size());
  for (std::size_t r = 0; r < noise.size(); ++r) {
    const auto& sv = existing.row(r).values;
    s.insert(s.end(), sv.begin() + static_cast<std::ptrdiff_t>(start),
             sv.begin() + static_cast<std::ptrdiff_t>(start + length));
    n.insert(n.end(), noise[r].begin() + static_cast<std::ptrdiff_t>(start),
             noise[r].begin() + static_cast<std::ptrdiff_t>(start + length));
  }
  return snr(s, n);
}

}  // namespace

NoiseKind kind_of(const NoiseSpec& spec) noexcept {
  return static_cast<NoiseKind>(spec.index());
}

std::string_view to_string(NoiseKind kind) noexcept {
  switch (kind) {
    case NoiseKind::kSpike:
      return "spike";
    case NoiseKind::kAttenuation:
      return "attenuation";
    case NoiseKind::kDistortion:
      return "distortion";
  }
  return "unknown";
}

void validate(const NoiseSpec& spec, std::size_t grid_length) {
  std::visit(Overloaded{
                 [&](const Spike& s) {
                   if (s.width < 1) {
                     throw InvariantError("spike width must be >= 1");
                   }
                   if (s.position + s.width > grid_length) {
                     throw InvariantError("spike [" + std::to_string(s.position) + ", " +
                                          std::to_string(s.position + s.width) +
                                          ") exceeds grid length " +
                                          std::to_string(grid_length));
                   }
                   if (!std::isfinite(s.magnitude)) {
                     throw InvariantError("spike magnitude must be finite");
                   }
                 },
                 [](const Attenuation& a) {
                   if (!(a.factor > 0.0 && a.factor < 1.0)) {
                     throw InvariantError("attenuation factor must lie in (0, 1)");
                   }
                 },
                 [](const Distortion& d) {
                   if (!std::isfinite(d.target_snr_db)) {
                     throw InvariantError("distortion target SNR must be finite");
                   }
                 },
             },
             spec);
}

std::string to_json(const NoiseSpec& spec) {
  json j = std::visit(
      Overloaded{
          [](const Spike& s) {
            return json{{"kind", "spike"},
                        {"position", s.position},
                        {"width", s.width},
                        {"magnitude", s.magnitude}};
          },
          [](const Attenuation& a) { return json{{"kind", "attenuation"}, {"factor", a.factor}}; },
          [](const Distortion& d) {
            return json{{"kind", "distortion"}, {"target_snr_db", d.target_snr_db}};
          },
      },
      spec);
  return j.dump();
}

NoiseSpec noise_spec_from_json(std::string_view text) {
  constexpr std::string_view what = "noise spec";
  const json j = parse_json(text, what);
  if (!j.is_object()) {
    throw ParseError("noise spec must be a JSON object");
  }
  const auto kind = field<std::string>(j, "kind", what);
  if (kind == "spike") {
    return Spike{field<std::size_t>(j, "position", what),
                 field_or<std::size_t>(j, "width", 3, what),
                 field_or<double>(j, "magnitude", 5.0, what)};
  }
  if (kind == "attenuation") {
    return Attenuation{field<double>(j, "factor", what)};
  }
  if (kind == "distortion") {
    return Distortion{field_or<double>(j, "target_snr_db", 20.0, what)};
  }
  throw ParseError("unknown noise kind '" + kind + "'");
}

Signature inject(const Signature& sig, const NoiseSpec& spec, std::uint64_t seed) {
  validate(spec, sig.length());
  std::vector<Series> values;
  values.reserve(sig.row_count());
  for (std::size_t r = 0; r < sig.row_count(); ++r) {
    Series row = sig.row(r).values;
    std::visit(Overloaded{
                   [&](const Spike& s) {
                     const double bump = s.magnitude * population_std(row);
                     for (std::size_t t = s.position; t < s.position + s.width; ++t) {
                       row[t] += bump;
                     }
                   },
                   [&](const Attenuation& a) {
                     for (double& v : row) {
                       v *= a.factor;
                     }
                   },
                   [&](const Distortion& d) {
                     const double power = mean_square(row) / std::pow(10.0, d.target_snr_db / 10.0);
                     std::mt19937_64 rng(derive_seed(seed, 0x6e6f697365ULL, r));
                     std::normal_distribution<double> gauss(0.0, std::sqrt(power));
                     for (double& v : row) {
                       v += gauss(rng);
                     }
                   },
               },
               spec);
    values.push_back(std::move(row));
  }
  return sig.with_values(std::move(values), RowScaling::kRaw);
}

Snr Snr::finite(double ratio) {
  if (!(ratio >= 0.0) || !std::isfinite(ratio)) {
    throw InvariantError("SNR ratio must be a finite non-negative number");
  }
  return Snr(ratio, false);
}

double Snr::ratio() const {
  if (infinite_) {
    throw InvariantError("SNR is infinite");
  }
  return ratio_;
}

double Snr::db() const {
  return 10.0 * std::log10(ratio());
}

Snr snr(SeriesView signal, SeriesView noise) {
  if (signal.size() != noise.size()) {
    throw ShapeError("signal and noise lengths differ");
  }
  if (signal.empty()) {
    throw ShapeError("SNR of an empty series");
  }
  const double pn = noise_power(noise);
  if (!(pn > 0.0)) {
    return Snr::infinite();
  }
  const double ratio = mean_square(signal) / pn;
  if (!std::isfinite(ratio)) {
    return Snr::infinite();
  }
  return Snr::finite(ratio);
}

std::vector<Series> residual(const Signature& existing, const Signature& recomputed) {
  require_same_shape(existing, recomputed);
  std::vector<Series> out(existing.row_count());
  for (std::size_t r = 0; r < existing.row_count(); ++r) {
    const auto& s = existing.row(r).values;
    const auto& q = recomputed.row(r).values;
    out[r].resize(s.size());
    for (std::size_t t = 0; t < s.size(); ++t) {
      out[r][t] = s[t] - q[t];
    }
  }
  return out;
}

void NoiseProfile::validate(std::size_t grid_length) const {
  if (segment_snrs.empty()) {
    throw InvariantError("noise profile needs d >= 1 segments");
  }
  if (segment_length == 0) {
    throw InvariantError("noise profile segment length must be positive");
  }
  if (segment_snrs.size() * segment_length > grid_length) {
    throw InvariantError("noise profile covers " +
                         std::to_string(segment_snrs.size() * segment_length) +
                         " timestamps, grid has " + std::to_string(grid_length));
  }
}

std::vector<Snr> segment_snrs(const Signature& existing, const Signature& recomputed,
                              std::size_t d) {
  if (d == 0) {
    throw InvariantError("segment count d must be >= 1");
  }
  if (d > existing.length()) {
    throw InvariantError("segment count exceeds grid length");
  }
  const auto noise = residual(existing, recomputed);
  const std::size_t len = existing.length() / d;
  std::vector<Snr> out;
  out.reserve(d);
  for (std::size_t i = 0; i < d; ++i) {
    out.push_back(pooled_snr(existing, noise, i * len, len));
  }
  return out;
}

NoiseProfile learn_noise_profile(const Signature& existing,
                                 std::span<const Signature> recomputed_per_segment,
                                 std::size_t d) {
  if (d == 0) {
    throw InvariantError("segment count d must be >= 1");
  }
  if (recomputed_per_segment.size() != d) {
    throw ShapeError("expected " + std::to_string(d) + " recomputed slices, got " +
                     std::to_string(recomputed_per_segment.size()));
  }
  const std::size_t len = recomputed_per_segment.front().length();
  NoiseProfile profile{{}, len};
  profile.segment_snrs.reserve(d);
  if (d * len > existing.length()) {
    throw ShapeError("recomputed slices do not fit the existing grid");
  }
  for (std::size_t i = 0; i < d; ++i) {
    const auto& slice = recomputed_per_segment[i];
    if (slice.length() != len) {
      throw ShapeError("recomputed slice " + std::to_string(i) + " has length " +
                       std::to_string(slice.length()) + ", expected " + std::to_string(len));
    }
    const auto part = existing.slice(i * len, len);
    const auto noise = residual(part, slice);
    profile.segment_snrs.push_back(pooled_snr(part, noise, 0, len));
  }
  return profile;
}

NoiseProfile learn_monitoring_profile(const Signature& existing,
                                      std::span<const Signature> monitored, std::size_t d) {
  if (monitored.empty()) {
    throw InvariantError("monitoring profile needs at least one recomputation");
  }
  NoiseProfile profile{segment_snrs(existing, monitored.front(), d), existing.length() / d};
  for (std::size_t k = 1; k < monitored.size(); ++k) {
    const auto current = segment_snrs(existing, monitored[k], d);
    for (std::size_t i = 0; i < d; ++i) {
      profile.segment_snrs[i] = std::min(profile.segment_snrs[i], current[i]);
    }
  }
  return profile;
}

std::string to_json(const NoiseProfile& profile) {
  json snrs = json::array();
  for (const auto& s : profile.segment_snrs) {
    snrs.push_back(s.is_infinite() ? json(nullptr) : json(s.ratio()));
  }
  return json{{"segment_length", profile.segment_length}, {"segment_snrs", snrs}}.dump();
}

NoiseProfile noise_profile_from_json(std::string_view text) {
  constexpr std::string_view what = "noise profile";
  const json j = parse_json(text, what);
  if (!j.is_object()) {
    throw ParseError("noise profile must be a JSON object");
  }
  NoiseProfile profile;
  profile.segment_length = field<std::size_t>(j, "segment_length", what);
  const auto it = j.find("segment_snrs");
  if (it == j.end() || !it->is_array()) {
    throw ParseError("noise profile: 'segment_snrs' must be an array");
  }
  for (const auto& v : *it) {
    if (v.is_null()) {
      profile.segment_snrs.push_back(Snr::infinite());
    } else if (v.is_number()) {
      const double ratio = v.get<double>();
      if (!(ratio >= 0.0)) {
        throw ParseError("noise profile: negative SNR");
      }
      profile.segment_snrs.push_back(Snr::finite(ratio));
    } else {
      throw ParseError("noise profile: SNR entries must be numbers or null");
    }
  }
  if (profile.segment_length == 0 || profile.segment_snrs.empty()) {
    throw ParseError("noise profile: needs a positive segment length and >= 1 segment");
  }
  return profile;
}

}  // namespace sigdrift

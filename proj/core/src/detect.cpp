#include "sigdrift/detect.hpp"

#include <algorithm>
#include <cmath>

#include <json.hpp>

#include "sigdrift/error.hpp"
#include "sigdrift/similarity.hpp"

namespace sigdrift {

namespace {

using nlohmann::json;

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

std::optional<double> safe_pcc(SeriesView a, SeriesView b) {
  try {
    return pcc(a, b);
  } catch (const ConstantSeriesError&) {
    return std::nullopt;
  }
}

int severity(const RowOutcome& r) {
  switch (r.verdict) {
    case Verdict::kChange:
      return 3;
    case Verdict::kNoise:
      return r.noise_kind == NoiseKind::kSpike ? 2 : 1;
    case Verdict::kNoChange:
      return 0;
  }
  return 0;
}

json snr_json(const std::optional<Snr>& s) {
  if (!s) return nullptr;
  if (s->is_infinite()) return "inf";
  return s->ratio();
}

json diagnostics_json(const Diagnostics& d) {
  json j = json::object();
  if (d.pcc) j["pcc"] = *d.pcc;
  if (d.rmse) j["rmse"] = *d.rmse;
  if (d.best_window_pcc) j["best_window_pcc"] = *d.best_window_pcc;
  if (d.removed_window_start) j["removed_window_start"] = *d.removed_window_start;
  if (d.snr_current) j["snr_current"] = snr_json(d.snr_current);
  if (d.snr_baseline) j["snr_baseline"] = snr_json(d.snr_baseline);
  if (d.segment) j["segment"] = *d.segment;
  if (d.cusum_max) j["cusum_max"] = *d.cusum_max;
  return j;
}

json kind_json(const std::optional<NoiseKind>& kind) {
  return kind ? json(std::string(to_string(*kind))) : json(nullptr);
}

RowOutcome sliding_window_row(const QoSSeries& x, const QoSSeries& y,
                              const DetectorThresholds& th) {
  RowOutcome out{x.parameter, Verdict::kChange, std::nullopt, {}};
  const auto p = safe_pcc(x.values, y.values);
  const double r = rmse(x.values, y.values);
  out.diagnostics.pcc = p;
  out.diagnostics.rmse = r;
  if (p && *p >= th.s_p && r <= th.s_r) {
    out.verdict = Verdict::kNoChange;
    return out;
  }
  if (p && *p >= th.s_p && r <= th.t_d) {
    out.verdict = Verdict::kNoise;
    out.noise_kind = NoiseKind::kAttenuation;
    return out;
  }
  const auto scan = scan_window_deletions(x.values, y.values, th.window);
  if (scan.best_pcc) {
    out.diagnostics.best_window_pcc = scan.best_pcc;
    out.diagnostics.removed_window_start = scan.best_start;
    if (*scan.best_pcc >= th.s_p) {
      out.verdict = Verdict::kNoise;
      out.noise_kind = NoiseKind::kSpike;
    }
  }
  return out;
}

DetectionOutcome aggregate_rows(std::vector<RowOutcome> rows) {
  const auto worst = std::max_element(rows.begin(), rows.end(), [](const auto& a, const auto& b) {
    return severity(a) < severity(b);
  });
  DetectionOutcome out;
  out.verdict = worst->verdict;
  out.noise_kind = worst->noise_kind;
  out.diagnostics = worst->diagnostics;
  out.rows = std::move(rows);
  return out;
}

Snr pooled_range_snr(const Signature& existing, const std::vector<Series>& noise,
                     std::size_t start, std::size_t length) {
  Series s;
  Series n;
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

void DetectorThresholds::validate() const {
  if (!(s_p > -1.0 && s_p <= 1.0)) {
    throw InvariantError("s_p must lie in (-1, 1]");
  }
  if (!(s_r >= 0.0)) {
    throw InvariantError("s_r must be >= 0");
  }
  if (!(t_d >= s_r)) {
    throw InvariantError("t_d must be >= s_r");
  }
  if (window < 1) {
    throw InvariantError("window must be >= 1");
  }
}

void CusumParams::validate() const {
  if (!(k >= 0.0) || !std::isfinite(k)) {
    throw InvariantError("CUSUM slack k must be finite and >= 0");
  }
  if (!(h > 0.0) || !std::isfinite(h)) {
    throw InvariantError("CUSUM decision interval h must be finite and > 0");
  }
}

std::string_view to_string(Verdict verdict) noexcept {
  switch (verdict) {
    case Verdict::kNoChange:
      return "no_change";
    case Verdict::kNoise:
      return "noise";
    case Verdict::kChange:
      return "change";
  }
  return "unknown";
}

std::string to_json(const DetectionOutcome& outcome) {
  json j{{"verdict", std::string(to_string(outcome.verdict))},
         {"noise_kind", kind_json(outcome.noise_kind)},
         {"diagnostics", diagnostics_json(outcome.diagnostics)}};
  if (!outcome.rows.empty()) {
    json rows = json::array();
    for (const auto& r : outcome.rows) {
      rows.push_back({{"parameter", r.parameter},
                      {"verdict", std::string(to_string(r.verdict))},
                      {"noise_kind", kind_json(r.noise_kind)},
                      {"diagnostics", diagnostics_json(r.diagnostics)}});
    }
    j["rows"] = std::move(rows);
  }
  return j.dump();
}

WindowScan scan_window_deletions(SeriesView existing, SeriesView recomputed, std::size_t window) {
  const std::size_t n = existing.size();
  if (recomputed.size() != n) {
    throw ShapeError("series lengths differ");
  }
  if (window < 1 || window >= n) {
    throw InvariantError("window length must be in [1, grid length)");
  }
  if (n - window < 2) {
    throw InvariantError("window leaves fewer than 2 points");
  }
  // Centre on the full means so the running sums stay well conditioned.
  const double mx = mean(existing);
  const double my = mean(recomputed);
  Series cx(n);
  Series cy(n);
  double sx = 0.0, sy = 0.0, sxx = 0.0, syy = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    cx[i] = existing[i] - mx;
    cy[i] = recomputed[i] - my;
    sx += cx[i];
    sy += cy[i];
    sxx += cx[i] * cx[i];
    syy += cy[i] * cy[i];
    sxy += cx[i] * cy[i];
  }
  const double kept = static_cast<double>(n - window);
  WindowScan best;
  for (std::size_t w = 0; w + window <= n; ++w) {
    double wx = 0.0, wy = 0.0, wxx = 0.0, wyy = 0.0, wxy = 0.0;
    for (std::size_t i = w; i < w + window; ++i) {
      wx += cx[i];
      wy += cy[i];
      wxx += cx[i] * cx[i];
      wyy += cy[i] * cy[i];
      wxy += cx[i] * cy[i];
    }
    const double ax = sx - wx;
    const double ay = sy - wy;
    const double vx = (sxx - wxx) - ax * ax / kept;
    const double vy = (syy - wyy) - ay * ay / kept;
    if (!(vx > 0.0) || !(vy > 0.0)) {
      continue;
    }
    const double c = std::clamp(((sxy - wxy) - ax * ay / kept) / std::sqrt(vx * vy), -1.0, 1.0);
    if (!best.best_pcc || c > *best.best_pcc) {
      best.best_pcc = c;
      best.best_start = w;
    }
  }
  return best;
}

DetectionOutcome sliding_window_detect(const Signature& existing, const Signature& recomputed,
                                       const DetectorThresholds& th) {
  th.validate();
  require_same_shape(existing, recomputed);
  if (th.window >= existing.length()) {
    throw InvariantError("window W must be shorter than the grid");
  }
  std::vector<RowOutcome> rows;
  rows.reserve(existing.row_count());
  for (std::size_t r = 0; r < existing.row_count(); ++r) {
    rows.push_back(sliding_window_row(existing.row(r), recomputed.row(r), th));
  }
  return aggregate_rows(std::move(rows));
}

DetectionOutcome snr_detect(const Signature& existing, const Signature& recomputed,
                            const NoiseProfile& profile, SnrMode mode) {
  require_same_shape(existing, recomputed);
  try {
    profile.validate(existing.length());
  } catch (const InvariantError& e) {
    throw ShapeError(std::string("noise profile does not fit the signature: ") + e.what());
  }
  const auto noise = residual(existing, recomputed);
  const std::size_t len = profile.segment_length;
  const std::size_t d = profile.segments();

  DetectionOutcome out;
  if (mode == SnrMode::kAggregate) {
    const Snr current = pooled_range_snr(existing, noise, 0, d * len);
    const Snr baseline = *std::min_element(profile.segment_snrs.begin(), profile.segment_snrs.end());
    out.diagnostics.snr_current = current;
    out.diagnostics.snr_baseline = baseline;
    out.verdict = current < baseline ? Verdict::kChange : Verdict::kNoChange;
    return out;
  }

  std::optional<std::size_t> weakest;
  std::optional<Snr> weakest_snr;
  for (std::size_t i = 0; i < d; ++i) {
    const Snr current = pooled_range_snr(existing, noise, i * len, len);
    if (current < profile.segment_snrs[i]) {
      out.verdict = Verdict::kChange;
      out.diagnostics.segment = i;
      out.diagnostics.snr_current = current;
      out.diagnostics.snr_baseline = profile.segment_snrs[i];
      return out;
    }
    if (!weakest_snr || current < *weakest_snr) {
      weakest = i;
      weakest_snr = current;
    }
  }
  out.verdict = Verdict::kNoChange;
  out.diagnostics.segment = weakest;
  out.diagnostics.snr_current = weakest_snr;
  out.diagnostics.snr_baseline = profile.segment_snrs[*weakest];
  return out;
}

DetectionOutcome cusum_detect(const Signature& existing, const Signature& recomputed,
                              const CusumParams& params) {
  params.validate();
  require_same_shape(existing, recomputed);
  std::vector<RowOutcome> rows;
  rows.reserve(existing.row_count());
  for (std::size_t r = 0; r < existing.row_count(); ++r) {
    const auto& x = existing.row(r).values;
    const auto& y = recomputed.row(r).values;
    const double sd = population_std(x);
    if (!(sd > 0.0)) {
      throw ConstantSeriesError("row '" + existing.row(r).parameter + "' is constant");
    }
    double up = 0.0;
    double down = 0.0;
    double peak = 0.0;
    for (std::size_t t = 0; t < x.size(); ++t) {
      const double z = (y[t] - x[t]) / sd;
      up = std::max(0.0, up + z - params.k);
      down = std::max(0.0, down - z - params.k);
      peak = std::max({peak, up, down});
    }
    RowOutcome row{existing.row(r).parameter, peak > params.h ? Verdict::kChange : Verdict::kNoChange,
                   std::nullopt, {}};
    row.diagnostics.cusum_max = peak;
    rows.push_back(std::move(row));
  }
  return aggregate_rows(std::move(rows));
}

}  // namespace sigdrift

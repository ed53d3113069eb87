#include "sigdrift/cpd.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <map>
#include <ostream>
#include <string>

#include "sigdrift/error.hpp"
#include "text_io.hpp"

namespace sigdrift {

namespace {

bool ties(double a, double b) {
  return std::abs(a - b) <= 1e-12 * std::max(1.0, std::abs(b));
}

}  // namespace

void EventConfig::validate() const {
  if (window_length < 1) {
    throw InvariantError("event window length must be >= 1");
  }
  if (frequency_threshold < 1) {
    throw InvariantError("frequency threshold must be >= 1");
  }
}

double trial_similarity(const TrialExperience& exp, const Signature& sig, SimilarityMethod method) {
  validate_trial(exp, sig.grid());
  const auto& row = sig.row(sig.row_index(exp.parameter)).values;
  const Series normalized = normalize(exp.values);
  const SeriesView window(row.data() + exp.trial_start, exp.trial_length);
  return similarity(normalized, window, method).value;
}

AnomalyThreshold calibrate_similarity_threshold(std::span<const TrialExperience> past,
                                                const Signature& sig, SimilarityMethod method) {
  if (past.empty()) {
    throw InvariantError("threshold calibration needs at least one past trial");
  }
  double boundary = trial_similarity(past.front(), sig, method);
  for (const auto& exp : past.subspan(1)) {
    const double s = trial_similarity(exp, sig, method);
    if (less_similar(s, boundary, method)) {
      boundary = s;
    }
  }
  return {method, boundary};
}

EventConfig calibrate_frequency_threshold(std::span<const TrialExperience> past,
                                          const Signature& sig, const AnomalyThreshold& t_s,
                                          std::size_t window_length) {
  if (window_length == 0) {
    throw InvariantError("event window length must be >= 1");
  }
  std::map<std::size_t, std::size_t> per_window;
  for (const auto& exp : past) {
    if (ties(trial_similarity(exp, sig, t_s.method), t_s.value)) {
      ++per_window[exp.trial_start / window_length];
    }
  }
  std::size_t most = 1;
  for (const auto& [window, count] : per_window) {
    most = std::max(most, count);
  }
  return {window_length, most};
}

AnomalyCheck is_anomalous(const TrialExperience& exp, const Signature& sig,
                          const AnomalyThreshold& threshold) {
  const double s = trial_similarity(exp, sig, threshold.method);
  return {less_similar(s, threshold.value, threshold.method), s};
}

std::vector<ChangePoint> detect_events(std::span<const AnomalyFlag> flags,
                                       const EventConfig& config) {
  config.validate();
  std::vector<ChangePoint> events;
  const std::size_t w = config.window_length;
  std::size_t current = 0;
  std::size_t count = 0;
  bool open = false;
  const auto close = [&] {
    if (open && count > config.frequency_threshold) {
      events.push_back({current * w + w - 1, count, current * w, w});
    }
  };
  std::size_t previous = 0;
  for (const auto& flag : flags) {
    if (open && flag.index < previous) {
      throw ShapeError("anomaly flags must be sorted by grid index");
    }
    previous = flag.index;
    const std::size_t window = flag.index / w;
    if (!open || window != current) {
      close();
      current = window;
      count = 0;
      open = true;
    }
    if (flag.anomalous) {
      ++count;
    }
  }
  close();
  return events;
}

std::vector<AnomalyFlag> read_anomaly_flags(std::istream& in) {
  std::string line;
  if (!detail::next_line(in, line)) {
    throw ParseError("anomaly flag file is empty");
  }
  if (detail::trim(line) != "index,flag,similarity") {
    throw ParseError("anomaly flag header must be 'index,flag,similarity'");
  }
  std::vector<AnomalyFlag> flags;
  std::size_t line_no = 1;
  while (detail::next_line(in, line)) {
    ++line_no;
    if (detail::trim(line).empty()) {
      continue;
    }
    const auto fields = detail::split(line);
    const std::string where = "anomaly flag line " + std::to_string(line_no);
    if (fields.size() != 3) {
      throw ParseError(where + ": expected 3 fields");
    }
    const auto index = detail::parse_integer(fields[0], where);
    const auto flag = detail::parse_integer(fields[1], where);
    if (index < 0 || (flag != 0 && flag != 1)) {
      throw ParseError(where + ": index must be >= 0 and flag 0 or 1");
    }
    flags.push_back({static_cast<std::size_t>(index), flag == 1,
                     detail::parse_double(fields[2], where)});
  }
  return flags;
}

std::vector<AnomalyFlag> read_anomaly_flags(const std::filesystem::path& path) {
  auto in = detail::open_input(path);
  return read_anomaly_flags(in);
}

void write_anomaly_flags(std::span<const AnomalyFlag> flags, std::ostream& out) {
  out << "index,flag,similarity\n";
  for (const auto& f : flags) {
    out << f.index << ',' << (f.anomalous ? 1 : 0) << ',' << detail::format_double(f.similarity)
        << '\n';
  }
}

}  // namespace sigdrift

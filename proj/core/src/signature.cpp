#include "sigdrift/signature.hpp"

#include <algorithm>
#include <istream>
#include <map>
#include <ostream>
#include <utility>

#include "sigdrift/error.hpp"
#include "text_io.hpp"

namespace sigdrift {

TrialCohort::TrialCohort(std::vector<TrialExperience> experiences)
    : experiences_(std::move(experiences)) {
  if (experiences_.empty()) {
    throw ShapeError("trial cohort needs at least one experience");
  }
  const auto& first = experiences_.front();
  if (first.trial_length == 0) {
    throw InvariantError("trial cohort window must be non-empty");
  }
  for (const auto& exp : experiences_) {
    if (exp.parameter != first.parameter || exp.trial_start != first.trial_start ||
        exp.trial_length != first.trial_length) {
      throw ShapeError("experiences of user '" + exp.user_id +
                       "' are not aligned with the cohort window");
    }
    if (exp.values.size() != exp.trial_length) {
      throw ShapeError("experience of user '" + exp.user_id + "' does not match its length");
    }
    if (!all_finite(exp.values)) {
      throw InvariantError("experience of user '" + exp.user_id + "' contains NaN or infinity");
    }
  }
}

Signature generate_signature(std::span<const TrialCohort> cohorts, const TimeGrid& grid,
                             std::string provider_id) {
  if (cohorts.empty()) {
    throw ShapeError("alignment error: no trial cohorts");
  }
  std::vector<QoSSeries> rows;
  rows.reserve(cohorts.size());
  for (const auto& cohort : cohorts) {
    if (cohort.window_start() != 0 || cohort.window_length() != grid.length()) {
      throw ShapeError("alignment error: cohort for '" + cohort.parameter() +
                       "' does not span the grid");
    }
    const bool duplicate = std::any_of(rows.begin(), rows.end(), [&](const QoSSeries& r) {
      return r.parameter == cohort.parameter();
    });
    if (duplicate) {
      throw ShapeError("alignment error: parameter '" + cohort.parameter() +
                       "' appears in more than one cohort");
    }
    Series avg(grid.length(), 0.0);
    for (const auto& exp : cohort.experiences()) {
      for (std::size_t t = 0; t < avg.size(); ++t) {
        avg[t] += exp.values[t];
      }
    }
    const auto k = static_cast<double>(cohort.experiences().size());
    for (double& v : avg) {
      v /= k;
    }
    rows.push_back({cohort.parameter(), std::move(avg), {}});
  }
  return Signature::from_raw_rows(std::move(provider_id), grid, std::move(rows));
}

Signature recompute_signature(std::span<const TrialCohort> current_cohorts, const TimeGrid& grid,
                              std::string provider_id) {
  return generate_signature(current_cohorts, grid, std::move(provider_id));
}

Series paa(SeriesView values, std::size_t target_length) {
  if (target_length == 0) {
    throw InvariantError("PAA target length must be positive");
  }
  const std::size_t n = values.size();
  if (target_length > n) {
    throw ShapeError("PAA target length exceeds the input length");
  }
  const auto boundary = [&](std::size_t j) { return paa_frame_start(n, target_length, j); };
  Series out(target_length);
  for (std::size_t j = 0; j < target_length; ++j) {
    const std::size_t lo = boundary(j);
    const std::size_t hi = boundary(j + 1);
    double acc = 0.0;
    for (std::size_t i = lo; i < hi; ++i) {
      acc += values[i];
    }
    out[j] = acc / static_cast<double>(hi - lo);
  }
  return out;
}

std::vector<TrialCohort> read_cohorts(std::istream& in) {
  std::string line;
  if (!detail::next_line(in, line)) {
    throw ParseError("cohort file is empty");
  }
  const auto header = detail::split(line);
  if (header.size() < 4 || detail::trim(header[0]) != "user_id" ||
      detail::trim(header[1]) != "parameter" || detail::trim(header[2]) != "start") {
    throw ParseError("cohort header must be 'user_id,parameter,start,v0,...'");
  }

  std::vector<std::pair<std::string, std::size_t>> order;
  std::map<std::pair<std::string, std::size_t>, std::vector<TrialExperience>> groups;
  std::size_t line_no = 1;
  while (detail::next_line(in, line)) {
    ++line_no;
    if (detail::trim(line).empty()) {
      continue;
    }
    const auto fields = detail::split(line);
    if (fields.size() < 4) {
      throw ParseError("cohort line " + std::to_string(line_no) + " has no values");
    }
    const std::string where = "cohort line " + std::to_string(line_no);
    TrialExperience exp;
    exp.user_id = std::string(detail::trim(fields[0]));
    exp.parameter = std::string(detail::trim(fields[1]));
    const auto start = detail::parse_integer(fields[2], where);
    if (start < 0) {
      throw ParseError(where + ": negative start");
    }
    exp.trial_start = static_cast<std::size_t>(start);
    for (std::size_t i = 3; i < fields.size(); ++i) {
      exp.values.push_back(detail::parse_double(fields[i], where));
    }
    exp.trial_length = exp.values.size();
    auto key = std::make_pair(exp.parameter, exp.trial_start);
    auto [it, inserted] = groups.try_emplace(key);
    if (inserted) {
      order.push_back(key);
    }
    it->second.push_back(std::move(exp));
  }

  std::vector<TrialCohort> cohorts;
  cohorts.reserve(order.size());
  for (const auto& key : order) {
    cohorts.emplace_back(std::move(groups[key]));
  }
  return cohorts;
}

std::vector<TrialCohort> read_cohorts(const std::filesystem::path& path) {
  auto in = detail::open_input(path);
  return read_cohorts(in);
}

void write_cohorts(std::span<const TrialCohort> cohorts, std::ostream& out) {
  std::size_t width = 0;
  for (const auto& c : cohorts) {
    width = std::max(width, c.window_length());
  }
  out << "user_id,parameter,start";
  for (std::size_t i = 0; i < width; ++i) {
    out << ",v" << i;
  }
  out << '\n';
  for (const auto& c : cohorts) {
    for (const auto& exp : c.experiences()) {
      out << exp.user_id << ',' << exp.parameter << ',' << exp.trial_start;
      for (const double v : exp.values) {
        out << ',' << detail::format_double(v);
      }
      out << '\n';
    }
  }
}

}  // namespace sigdrift

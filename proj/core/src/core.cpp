#include "sigdrift/core.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <numeric>
#include <ostream>

#include "sigdrift/error.hpp"
#include "text_io.hpp"

namespace sigdrift {

double mean(SeriesView values) {
  if (values.empty()) {
    throw ShapeError("mean of an empty series");
  }
  return std::accumulate(values.begin(), values.end(), 0.0) / static_cast<double>(values.size());
}

double population_std(SeriesView values) {
  const double mu = mean(values);
  double acc = 0.0;
  for (const double v : values) {
    acc += (v - mu) * (v - mu);
  }
  return std::sqrt(acc / static_cast<double>(values.size()));
}

double mean_square(SeriesView values) {
  if (values.empty()) {
    throw ShapeError("mean square of an empty series");
  }
  double acc = 0.0;
  for (const double v : values) {
    acc += v * v;
  }
  return acc / static_cast<double>(values.size());
}

bool all_finite(SeriesView values) {
  return std::all_of(values.begin(), values.end(), [](double v) { return std::isfinite(v); });
}

TimeGrid::TimeGrid(std::size_t length, std::string resolution)
    : length_(length), resolution_(std::move(resolution)) {
  if (length_ < 2) {
    throw InvariantError("time grid needs at least 2 timestamps");
  }
}

namespace {

void validate_rows(const TimeGrid& grid, const std::vector<QoSSeries>& rows, RowScaling scaling) {
  if (rows.empty()) {
    throw InvariantError("signature must contain >=1 QoS parameter");
  }
  for (const auto& row : rows) {
    if (row.parameter.empty()) {
      throw InvariantError("QoS parameter name must not be empty");
    }
    if (row.values.size() != grid.length()) {
      throw ShapeError("row '" + row.parameter + "' has " + std::to_string(row.values.size()) +
                       " values, grid has " + std::to_string(grid.length()));
    }
    if (!all_finite(row.values)) {
      throw InvariantError("row '" + row.parameter + "' contains NaN or infinity");
    }
    if (scaling == RowScaling::kUnitStd) {
      const double sd = population_std(row.values);
      if (std::abs(sd - 1.0) > kUnitStdTolerance) {
        throw InvariantError("row '" + row.parameter + "' is not normalized (std " +
                             detail::format_double(sd) + ")");
      }
    }
  }
  for (std::size_t i = 0; i < rows.size(); ++i) {
    for (std::size_t j = i + 1; j < rows.size(); ++j) {
      if (rows[i].parameter == rows[j].parameter) {
        throw InvariantError("duplicate QoS parameter '" + rows[i].parameter + "'");
      }
    }
  }
}

Series divide_by_std(const QoSSeries& row) {
  const double sd = population_std(row.values);
  if (!(sd > 0.0)) {
    throw ConstantSeriesError("row '" + row.parameter + "' is constant");
  }
  Series out(row.values.size());
  std::transform(row.values.begin(), row.values.end(), out.begin(),
                 [sd](double v) { return v / sd; });
  return out;
}

}  // namespace

Signature::Signature(std::string provider_id, TimeGrid grid, std::vector<QoSSeries> rows,
                     RowScaling scaling)
    : provider_id_(std::move(provider_id)),
      grid_(std::move(grid)),
      rows_(std::move(rows)),
      scaling_(scaling) {
  validate_rows(grid_, rows_, scaling_);
}

Signature Signature::from_raw_rows(std::string provider_id, TimeGrid grid,
                                   std::vector<QoSSeries> rows) {
  if (rows.empty()) {
    throw InvariantError("signature must contain >=1 QoS parameter");
  }
  for (auto& row : rows) {
    if (row.values.size() != grid.length()) {
      throw ShapeError("row '" + row.parameter + "' does not match the grid");
    }
    if (!all_finite(row.values)) {
      throw InvariantError("row '" + row.parameter + "' contains NaN or infinity");
    }
    row.values = divide_by_std(row);
  }
  return Signature(std::move(provider_id), std::move(grid), std::move(rows), RowScaling::kUnitStd);
}

std::size_t Signature::row_index(const std::string& parameter) const {
  for (std::size_t i = 0; i < rows_.size(); ++i) {
    if (rows_[i].parameter == parameter) {
      return i;
    }
  }
  throw ShapeError("signature has no QoS parameter '" + parameter + "'");
}

Signature Signature::slice(std::size_t start, std::size_t length) const {
  if (start + length > grid_.length()) {
    throw ShapeError("slice [" + std::to_string(start) + ", " + std::to_string(start + length) +
                     ") exceeds grid length " + std::to_string(grid_.length()));
  }
  std::vector<QoSSeries> rows;
  rows.reserve(rows_.size());
  for (const auto& row : rows_) {
    const auto first = row.values.begin() + static_cast<std::ptrdiff_t>(start);
    rows.push_back({row.parameter, Series(first, first + static_cast<std::ptrdiff_t>(length)),
                    row.unit});
  }
  return Signature(provider_id_, TimeGrid(length, grid_.resolution()), std::move(rows),
                   RowScaling::kRaw);
}

Signature Signature::with_values(std::vector<Series> values, RowScaling scaling) const {
  if (values.size() != rows_.size()) {
    throw ShapeError("expected " + std::to_string(rows_.size()) + " rows of values");
  }
  std::vector<QoSSeries> rows;
  rows.reserve(rows_.size());
  for (std::size_t i = 0; i < rows_.size(); ++i) {
    rows.push_back({rows_[i].parameter, std::move(values[i]), rows_[i].unit});
  }
  return Signature(provider_id_, grid_, std::move(rows), scaling);
}

void validate_trial(const TrialExperience& exp, const TimeGrid& grid) {
  if (exp.trial_length == 0) {
    throw InvariantError("trial length must be positive");
  }
  if (exp.values.size() != exp.trial_length) {
    throw ShapeError("trial of user '" + exp.user_id + "' has " +
                     std::to_string(exp.values.size()) + " values, expected " +
                     std::to_string(exp.trial_length));
  }
  if (exp.trial_length >= grid.length()) {
    throw InvariantError("trial period must be shorter than the signature period");
  }
  if (exp.trial_start + exp.trial_length > grid.length()) {
    throw ShapeError("trial window of user '" + exp.user_id + "' lies outside the grid");
  }
  if (!all_finite(exp.values)) {
    throw InvariantError("trial of user '" + exp.user_id + "' contains NaN or infinity");
  }
}

LoadedSignature read_signature(std::istream& in, std::string provider_id, RowPolicy policy) {
  std::string line;
  if (!detail::next_line(in, line)) {
    throw ParseError("signature file is empty");
  }
  const auto header = detail::split(line);
  if (header.empty() || detail::trim(header.front()) != "parameter") {
    throw ParseError("signature header must start with 'parameter'");
  }
  const std::size_t length = header.size() - 1;
  for (std::size_t t = 0; t < length; ++t) {
    if (detail::trim(header[t + 1]) != "t" + std::to_string(t)) {
      throw ParseError("signature header column " + std::to_string(t + 1) + " must be 't" +
                       std::to_string(t) + "'");
    }
  }

  std::vector<QoSSeries> rows;
  std::size_t line_no = 1;
  while (detail::next_line(in, line)) {
    ++line_no;
    if (detail::trim(line).empty()) {
      continue;
    }
    const auto fields = detail::split(line);
    if (fields.size() != length + 1) {
      throw ParseError("line " + std::to_string(line_no) + ": expected " +
                       std::to_string(length + 1) + " fields, got " +
                       std::to_string(fields.size()));
    }
    QoSSeries row{std::string(detail::trim(fields[0])), {}, {}};
    row.values.reserve(length);
    const std::string where = "signature line " + std::to_string(line_no);
    for (std::size_t t = 0; t < length; ++t) {
      row.values.push_back(detail::parse_double(fields[t + 1], where));
    }
    rows.push_back(std::move(row));
  }

  TimeGrid grid(length);
  if (policy == RowPolicy::kKeepRaw) {
    return {Signature(std::move(provider_id), std::move(grid), std::move(rows), RowScaling::kRaw),
            {}};
  }

  std::vector<std::string> renormalized;
  for (auto& row : rows) {
    if (row.values.size() != length) {
      continue;  // reported by the constructor
    }
    const double sd = population_std(row.values);
    if (!(sd > 0.0)) {
      throw ConstantSeriesError("row '" + row.parameter + "' is constant");
    }
    if (std::abs(sd - 1.0) > kUnitStdTolerance) {
      row.values = divide_by_std(row);
      renormalized.push_back(row.parameter);
    }
  }
  return {Signature(std::move(provider_id), std::move(grid), std::move(rows)),
          std::move(renormalized)};
}

LoadedSignature read_signature(const std::filesystem::path& path, RowPolicy policy) {
  auto in = detail::open_input(path);
  return read_signature(in, path.stem().string(), policy);
}

void write_signature(const Signature& sig, std::ostream& out) {
  out << "parameter";
  for (std::size_t t = 0; t < sig.length(); ++t) {
    out << ",t" << t;
  }
  out << '\n';
  for (const auto& row : sig.rows()) {
    out << row.parameter;
    for (const double v : row.values) {
      out << ',' << detail::format_double(v);
    }
    out << '\n';
  }
}

void write_signature(const Signature& sig, const std::filesystem::path& path) {
  auto out = detail::open_output(path);
  write_signature(sig, out);
  if (!out) {
    throw IoError("failed writing '" + path.string() + "'");
  }
}

}  // namespace sigdrift

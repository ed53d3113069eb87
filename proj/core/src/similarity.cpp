#include "sigdrift/similarity.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "sigdrift/error.hpp"

namespace sigdrift {

namespace {

void require_same_length(SeriesView a, SeriesView b, std::size_t min_length) {
  if (a.size() != b.size()) {
    throw ShapeError("series lengths differ (" + std::to_string(a.size()) + " vs " +
                     std::to_string(b.size()) + ")");
  }
  if (a.size() < min_length) {
    throw ShapeError("series needs at least " + std::to_string(min_length) + " values");
  }
}

}  // namespace

Polarity polarity(SimilarityMethod method) noexcept {
  switch (method) {
    case SimilarityMethod::kPcc:
    case SimilarityMethod::kCosine:
      return Polarity::kHigherIsSimilar;
    case SimilarityMethod::kEuclidean:
    case SimilarityMethod::kRmse:
      return Polarity::kLowerIsSimilar;
  }
  return Polarity::kHigherIsSimilar;
}

std::string_view to_string(SimilarityMethod method) noexcept {
  switch (method) {
    case SimilarityMethod::kPcc:
      return "pcc";
    case SimilarityMethod::kEuclidean:
      return "ed";
    case SimilarityMethod::kCosine:
      return "cs";
    case SimilarityMethod::kRmse:
      return "rmse";
  }
  return "?";
}

SimilarityMethod parse_similarity_method(std::string_view name) {
  if (name == "pcc" || name == "pearson") return SimilarityMethod::kPcc;
  if (name == "ed" || name == "euclidean") return SimilarityMethod::kEuclidean;
  if (name == "cs" || name == "cosine") return SimilarityMethod::kCosine;
  if (name == "rmse") return SimilarityMethod::kRmse;
  throw ParseError("unknown similarity method '" + std::string(name) + "'");
}

Series normalize(SeriesView values) {
  if (values.size() < 2) {
    throw ShapeError("normalization needs at least 2 values");
  }
  const double sd = population_std(values);
  if (!(sd > 0.0)) {
    throw ConstantSeriesError("cannot normalize a constant series");
  }
  Series out(values.size());
  std::transform(values.begin(), values.end(), out.begin(), [sd](double v) { return v / sd; });
  return out;
}

double euclidean(SeriesView a, SeriesView b) {
  require_same_length(a, b, 1);
  double acc = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = a[i] - b[i];
    acc += d * d;
  }
  return std::sqrt(acc);
}

double pcc(SeriesView a, SeriesView b) {
  require_same_length(a, b, 2);
  const double ma = mean(a);
  const double mb = mean(b);
  double sab = 0.0;
  double saa = 0.0;
  double sbb = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double da = a[i] - ma;
    const double db = b[i] - mb;
    sab += da * db;
    saa += da * da;
    sbb += db * db;
  }
  if (!(saa > 0.0) || !(sbb > 0.0)) {
    throw ConstantSeriesError("correlation is undefined for a constant series");
  }
  return std::clamp(sab / (std::sqrt(saa) * std::sqrt(sbb)), -1.0, 1.0);
}

double cosine(SeriesView a, SeriesView b) {
  require_same_length(a, b, 1);
  double sab = 0.0;
  double saa = 0.0;
  double sbb = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    sab += a[i] * b[i];
    saa += a[i] * a[i];
    sbb += b[i] * b[i];
  }
  if (!(saa > 0.0) || !(sbb > 0.0)) {
    throw ConstantSeriesError("angle is undefined for a zero vector");
  }
  return std::clamp(sab / (std::sqrt(saa) * std::sqrt(sbb)), -1.0, 1.0);
}

double rmse(SeriesView a, SeriesView b) {
  return euclidean(a, b) / std::sqrt(static_cast<double>(a.size()));
}

SimilarityScore similarity(SeriesView a, SeriesView b, SimilarityMethod method) {
  switch (method) {
    case SimilarityMethod::kPcc:
      return {pcc(a, b), Polarity::kHigherIsSimilar};
    case SimilarityMethod::kEuclidean:
      return {euclidean(a, b), Polarity::kLowerIsSimilar};
    case SimilarityMethod::kCosine:
      return {cosine(a, b), Polarity::kHigherIsSimilar};
    case SimilarityMethod::kRmse:
      return {rmse(a, b), Polarity::kLowerIsSimilar};
  }
  throw Error("unhandled similarity method");
}

bool less_similar(double lhs, double rhs, SimilarityMethod method) noexcept {
  return polarity(method) == Polarity::kHigherIsSimilar ? lhs < rhs : lhs > rhs;
}

}  // namespace sigdrift

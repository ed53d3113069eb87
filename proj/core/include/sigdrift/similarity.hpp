#pragma once

#include <string_view>

#include "sigdrift/series.hpp"

namespace sigdrift {

enum class SimilarityMethod { kPcc, kEuclidean, kCosine, kRmse };

enum class Polarity {
  kHigherIsSimilar,  // PCC, cosine
  kLowerIsSimilar,   // Euclidean, RMSE
};

Polarity polarity(SimilarityMethod method) noexcept;
std::string_view to_string(SimilarityMethod method) noexcept;
// Accepts "pcc", "ed", "cs", "rmse" (and the long names).
SimilarityMethod parse_similarity_method(std::string_view name);

// values / population-std(values). Throws ConstantSeriesError for zero
// variance and ShapeError for fewer than 2 values.
Series normalize(SeriesView values);

double euclidean(SeriesView a, SeriesView b);

// Pearson correlation, clamped to [-1, 1].
double pcc(SeriesView a, SeriesView b);

double cosine(SeriesView a, SeriesView b);

double rmse(SeriesView a, SeriesView b);

struct SimilarityScore {
  double value = 0.0;
  Polarity polarity = Polarity::kHigherIsSimilar;
};

SimilarityScore similarity(SeriesView a, SeriesView b, SimilarityMethod method);

// True when `lhs` is strictly less similar than `rhs` under `method`.
bool less_similar(double lhs, double rhs, SimilarityMethod method) noexcept;

}  // namespace sigdrift

#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace sigdrift {

using Series = std::vector<double>;
using SeriesView = std::span<const double>;

double mean(SeriesView values);

// Divide-by-N standard deviation.
double population_std(SeriesView values);

double mean_square(SeriesView values);

bool all_finite(SeriesView values);

}  // namespace sigdrift

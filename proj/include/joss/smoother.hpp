#pragma once

#include <utility>
#include <vector>

namespace joss {

// Penalized least-squares smoother: z minimizes
//   sum (z_i - y_i)^2 + lambda * sum (second difference of z)^2.
// Solved via banded Cholesky of the pentadiagonal normal matrix.
std::vector<double> whittaker_smooth(const std::vector<double>& y, double lambda);

struct TrendResult {
    std::vector<double> smoothed;
    double next_prediction = 0.0;  // linear extrapolation of the last two smoothed points
};

// Smooth a history and predict one step ahead. Histories of length 2 skip
// smoothing (raw last-difference extrapolation). Length < 2 is an error.
TrendResult smooth_trend(const std::vector<double>& history, double smooth_param);

}  // namespace joss

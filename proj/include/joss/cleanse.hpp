#pragma once

#include <Eigen/Dense>
#include <optional>
#include <utility>
#include <vector>

namespace joss {

// PPG power spectrum after motion-peak subtraction and thresholding.
// Every surviving (nonzero) coefficient is at least threshold = p_max / 4.
struct CleansedSpectrum {
    std::vector<double> s;
    double p_max = 0.0;
    double threshold = 0.0;
    bool all_zero = false;  // set when nothing survived subtraction

    int grid_size() const { return static_cast<int>(s.size()); }
};

// Per bin: C_i = max of the three accelerometer spectra, d_i = max(0, ppg_i - C_i),
// p_max = max d_i over the search bins, and coefficients below p_max / 4 are zeroed.
// S columns are PPG first, then the three accelerometer channels.
//
// p_max is taken over bins [0, N/2] by default; pmax_bins narrows that (for
// example to the passband) without changing which bins get subtracted.
CleansedSpectrum spectral_subtract(const Eigen::MatrixXd& S,
                                   std::optional<std::pair<int, int>> pmax_bins = std::nullopt);

}  // namespace joss

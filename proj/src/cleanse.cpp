#include "joss/cleanse.hpp"

#include <algorithm>
#include <stdexcept>

namespace joss {

CleansedSpectrum spectral_subtract(const Eigen::MatrixXd& S,
                                   std::optional<std::pair<int, int>> pmax_bins) {
    if (S.cols() != 4)
        throw std::invalid_argument("cleanse: expected 4 spectra (PPG + 3 accelerometer axes)");
    const auto n = static_cast<int>(S.rows());

    CleansedSpectrum out;
    out.s.resize(n);
    for (int i = 0; i < n; ++i) {
        const double c = std::max({S(i, 1), S(i, 2), S(i, 3)});
        out.s[i] = std::max(0.0, S(i, 0) - c);
    }

    int lo = 0, hi = n / 2;
    if (pmax_bins) {
        lo = std::max(0, pmax_bins->first);
        hi = std::min(n - 1, pmax_bins->second);
        if (lo > hi) throw std::invalid_argument("cleanse: empty p_max bin range");
    }
    out.p_max = 0.0;
    for (int i = lo; i <= hi; ++i) out.p_max = std::max(out.p_max, out.s[i]);
    out.threshold = out.p_max / 4.0;

    bool any = false;
    for (double& v : out.s) {
        if (v < out.threshold) v = 0.0;
        any = any || v > 0.0;
    }
    out.all_zero = !any;
    return out;
}

}  // namespace joss

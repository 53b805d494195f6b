#include "joss/smoother.hpp"

#include <cmath>
#include <stdexcept>

namespace joss {

std::vector<double> whittaker_smooth(const std::vector<double>& y, double lambda) {
    const auto n = static_cast<int>(y.size());
    if (n < 3) throw std::invalid_argument("smoother: need at least 3 points");
    if (lambda < 0.0) throw std::invalid_argument("smoother: lambda must be >= 0");

    // Bands of B = I + lambda * D2' D2 (pentadiagonal, SPD).
    std::vector<double> b0(n, 1.0), b1(n, 0.0), b2(n, 0.0);
    for (int r = 0; r + 2 < n; ++r) {
        const int idx[3] = {r, r + 1, r + 2};
        const double coef[3] = {1.0, -2.0, 1.0};
        for (int a = 0; a < 3; ++a) {
            for (int b = a; b < 3; ++b) {
                const double v = lambda * coef[a] * coef[b];
                const int i = idx[b], off = idx[b] - idx[a];
                if (off == 0)
                    b0[i] += v;
                else if (off == 1)
                    b1[i] += v;
                else
                    b2[i] += v;
            }
        }
    }

    // Banded Cholesky, bandwidth 2.
    std::vector<double> l0(n), l1(n, 0.0), l2(n, 0.0);
    for (int i = 0; i < n; ++i) {
        if (i >= 2) l2[i] = b2[i] / l0[i - 2];
        if (i >= 1) l1[i] = (b1[i] - (i >= 2 ? l2[i] * l1[i - 1] : 0.0)) / l0[i - 1];
        const double d = b0[i] - l1[i] * l1[i] - l2[i] * l2[i];
        if (!(d > 0.0)) throw std::runtime_error("smoother: factorization failed");
        l0[i] = std::sqrt(d);
    }

    std::vector<double> z(n);
    for (int i = 0; i < n; ++i) {
        double v = y[i];
        if (i >= 1) v -= l1[i] * z[i - 1];
        if (i >= 2) v -= l2[i] * z[i - 2];
        z[i] = v / l0[i];
    }
    for (int i = n - 1; i >= 0; --i) {
        double v = z[i];
        if (i + 1 < n) v -= l1[i + 1] * z[i + 1];
        if (i + 2 < n) v -= l2[i + 2] * z[i + 2];
        z[i] = v / l0[i];
    }
    return z;
}

TrendResult smooth_trend(const std::vector<double>& history, double smooth_param) {
    if (history.size() < 2) throw std::invalid_argument("smoother: history shorter than 2");
    TrendResult r;
    if (history.size() == 2) {
        r.smoothed = history;
    } else {
        r.smoothed = whittaker_smooth(history, smooth_param);
    }
    const auto n = r.smoothed.size();
    r.next_prediction = 2.0 * r.smoothed[n - 1] - r.smoothed[n - 2];
    return r;
}

}  // namespace joss

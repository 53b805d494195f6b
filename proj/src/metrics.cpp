#include "joss/metrics.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace joss {
namespace {

void check_lengths(const std::vector<double>& est, const std::vector<double>& truth) {
    if (est.size() != truth.size())
        throw std::invalid_argument("metrics: est and truth lengths differ");
    if (est.size() < 2) throw std::invalid_argument("metrics: need at least 2 windows");
}

double mean_of(const std::vector<double>& v) {
    double m = 0.0;
    for (double x : v) m += x;
    return m / v.size();
}

}  // namespace

BlandAltman bland_altman(const std::vector<double>& est, const std::vector<double>& truth,
                         bool sample_sigma) {
    check_lengths(est, truth);
    BlandAltman ba;
    ba.points.reserve(est.size());
    for (std::size_t i = 0; i < est.size(); ++i)
        ba.points.emplace_back((est[i] + truth[i]) / 2.0, est[i] - truth[i]);

    for (const auto& [m, d] : ba.points) ba.mu += d;
    ba.mu /= ba.points.size();
    for (const auto& [m, d] : ba.points) ba.sigma += (d - ba.mu) * (d - ba.mu);
    ba.sigma = std::sqrt(ba.sigma / (sample_sigma ? ba.points.size() - 1 : ba.points.size()));
    ba.loa_low = ba.mu - 1.96 * ba.sigma;
    ba.loa_high = ba.mu + 1.96 * ba.sigma;
    return ba;
}

EvaluationReport evaluate(const std::vector<double>& est, const std::vector<double>& truth,
                          bool sample_sigma) {
    check_lengths(est, truth);
    const auto w = est.size();

    EvaluationReport r;
    r.window_count = static_cast<int>(w);
    r.abs_errors.reserve(w);
    for (std::size_t i = 0; i < w; ++i) {
        const double e = std::abs(est[i] - truth[i]);
        r.abs_errors.push_back(e);
        r.error1_bpm += e;
        r.error2_fraction += e / truth[i];
    }
    r.error1_bpm /= w;
    r.error2_fraction /= w;

    const auto ba = bland_altman(est, truth, sample_sigma);
    r.mu = ba.mu;
    r.sigma = ba.sigma;
    r.loa_low = ba.loa_low;
    r.loa_high = ba.loa_high;

    const double me = mean_of(est), mt = mean_of(truth);
    double cov = 0.0, var_e = 0.0, var_t = 0.0;
    for (std::size_t i = 0; i < w; ++i) {
        cov += (est[i] - me) * (truth[i] - mt);
        var_e += (est[i] - me) * (est[i] - me);
        var_t += (truth[i] - mt) * (truth[i] - mt);
    }
    if (var_e <= 0.0 || var_t <= 0.0) {
        const double nan = std::numeric_limits<double>::quiet_NaN();
        r.degenerate_variance = true;
        r.pearson_r = r.r_squared = r.fit_slope = r.fit_intercept = nan;
        return r;
    }
    r.pearson_r = cov / std::sqrt(var_e * var_t);
    r.fit_slope = cov / var_t;
    r.fit_intercept = me - r.fit_slope * mt;
    r.r_squared = r.pearson_r * r.pearson_r;
    return r;
}

}  // namespace joss

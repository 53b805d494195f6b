#include "joss/preprocess.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <stdexcept>

namespace joss {
namespace {

using cd = std::complex<double>;

std::vector<double> lowpass_prototype_poles_angles(int order) {
    // Butterworth poles on the unit circle, left half plane.
    std::vector<double> angles;
    angles.reserve(order);
    for (int k = 1; k <= order; ++k) {
        angles.push_back(std::numbers::pi * (2.0 * k + order - 1.0) / (2.0 * order));
    }
    return angles;
}

}  // namespace

void PipelineConfig::validate() const {
    if (!(band_low_hz > 0.0 && band_low_hz < band_high_hz))
        throw std::invalid_argument("preprocess: need 0 < band_low_hz < band_high_hz");
    if (!(band_high_hz < target_rate_hz / 2.0))
        throw std::invalid_argument("preprocess: band_high_hz must be below target Nyquist");
    if (filter_order < 1) throw std::invalid_argument("preprocess: filter_order must be >= 1");
    if (!(window_s > step_s && step_s > 0.0))
        throw std::invalid_argument("preprocess: need window_s > step_s > 0");
}

std::vector<Biquad> design_butterworth_bandpass(int order, double low_hz, double high_hz,
                                                double fs) {
    if (!(low_hz > 0.0 && low_hz < high_hz && high_hz < fs / 2.0))
        throw std::invalid_argument("preprocess: band edges infeasible for fs");

    // Prewarped analog edges, center, and bandwidth.
    const double w1 = 2.0 * fs * std::tan(std::numbers::pi * low_hz / fs);
    const double w2 = 2.0 * fs * std::tan(std::numbers::pi * high_hz / fs);
    const double w0 = std::sqrt(w1 * w2);
    const double bw = w2 - w1;

    // Lowpass prototype -> bandpass poles (two per prototype pole).
    std::vector<cd> s_poles;
    for (double ang : lowpass_prototype_poles_angles(order)) {
        const cd p{std::cos(ang), std::sin(ang)};
        const cd bp = bw * p * 0.5;
        const cd disc = std::sqrt(bp * bp - w0 * w0);
        s_poles.push_back(bp + disc);
        s_poles.push_back(bp - disc);
    }

    // Bilinear transform.
    std::vector<cd> z_poles;
    z_poles.reserve(s_poles.size());
    for (const cd& s : s_poles) z_poles.push_back((2.0 * fs + s) / (2.0 * fs - s));

    // Group into real quadratic factors. The pole set is closed under
    // conjugation, so greedily matching each pole with its conjugate works.
    std::vector<Biquad> sections;
    std::vector<bool> used(z_poles.size(), false);
    for (std::size_t i = 0; i < z_poles.size(); ++i) {
        if (used[i]) continue;
        used[i] = true;
        std::size_t best = z_poles.size();
        double best_dist = 1e300;
        for (std::size_t j = i + 1; j < z_poles.size(); ++j) {
            if (used[j]) continue;
            double d = std::abs(z_poles[j] - std::conj(z_poles[i]));
            if (d < best_dist) {
                best_dist = d;
                best = j;
            }
        }
        if (best == z_poles.size())
            throw std::runtime_error("preprocess: unpaired filter pole");
        used[best] = true;
        const cd p1 = z_poles[i], p2 = z_poles[best];
        Biquad s;
        // Zeros at z = +1 and z = -1 per section: numerator z^2 - 1.
        s.b0 = 1.0;
        s.b1 = 0.0;
        s.b2 = -1.0;
        s.a1 = -(p1 + p2).real();
        s.a2 = (p1 * p2).real();
        sections.push_back(s);
    }

    // Unity gain at the (unwarped) center frequency.
    const double f_center = fs / std::numbers::pi * std::atan(w0 / (2.0 * fs));
    const double g = cascade_gain_at(sections, f_center, fs);
    if (!(g > 0.0) || !std::isfinite(g))
        throw std::runtime_error("preprocess: degenerate filter design");
    sections.front().b0 /= g;
    sections.front().b1 /= g;
    sections.front().b2 /= g;
    return sections;
}

double cascade_gain_at(const std::vector<Biquad>& sections, double freq_hz, double fs) {
    const double w = 2.0 * std::numbers::pi * freq_hz / fs;
    const cd z1 = std::polar(1.0, -w);   // z^-1
    const cd z2 = std::polar(1.0, -2 * w);
    double gain = 1.0;
    for (const auto& s : sections) {
        const cd num = s.b0 + s.b1 * z1 + s.b2 * z2;
        const cd den = 1.0 + s.a1 * z1 + s.a2 * z2;
        gain *= std::abs(num / den);
    }
    return gain;
}

std::vector<double> apply_cascade(const std::vector<Biquad>& sections,
                                  const std::vector<double>& signal, bool zero_phase) {
    auto run = [&sections](std::vector<double> x) {
        for (const auto& s : sections) {
            double s1 = 0.0, s2 = 0.0;
            for (double& v : x) {
                const double y = s.b0 * v + s1;
                s1 = s.b1 * v - s.a1 * y + s2;
                s2 = s.b2 * v - s.a2 * y;
                v = y;
            }
        }
        return x;
    };
    std::vector<double> y = run(signal);
    if (zero_phase) {
        std::reverse(y.begin(), y.end());
        y = run(std::move(y));
        std::reverse(y.begin(), y.end());
    }
    return y;
}

std::vector<double> bandpass(const std::vector<double>& signal, double fs,
                             const PipelineConfig& cfg) {
    if (signal.empty()) throw std::invalid_argument("preprocess: empty signal");
    auto sections = design_butterworth_bandpass(cfg.filter_order, cfg.band_low_hz,
                                                cfg.band_high_hz, fs);
    return apply_cascade(sections, signal, cfg.zero_phase);
}

std::vector<double> decimate(const std::vector<double>& signal, double fs_in, double fs_out) {
    if (!(fs_in > 0.0 && fs_out > 0.0))
        throw std::invalid_argument("preprocess: sample rates must be positive");
    const double ratio = fs_in / fs_out;
    const long d = std::lround(ratio);
    if (d < 1 || std::abs(ratio - static_cast<double>(d)) > 1e-9 * ratio)
        throw std::invalid_argument("preprocess: fs_in/fs_out is not a positive integer");
    const std::size_t count = signal.size() / d;
    std::vector<double> out;
    out.reserve(count);
    for (std::size_t k = 0; k < count; ++k) out.push_back(signal[k * d]);
    return out;
}

std::vector<WindowBatch> make_windows(const Recording& rec, const PipelineConfig& cfg) {
    rec.validate();
    cfg.validate();

    const std::vector<double>* channels[4] = {&rec.ppg, &rec.accel_x, &rec.accel_y, &rec.accel_z};
    std::vector<std::vector<double>> prepared(4);
    for (int c = 0; c < 4; ++c) {
        const auto& raw = *channels[c];
        const auto [mn, mx] = std::minmax_element(raw.begin(), raw.end());
        // A constant raw channel carries no information; zero it before
        // filtering so the per-window variance rule stays exact (the filter's
        // step response would otherwise leave a decaying transient).
        std::vector<double> zeros;
        const std::vector<double>* source = &raw;
        if (*mn == *mx) {
            zeros.assign(raw.size(), 0.0);
            source = &zeros;
        }
        auto filtered = bandpass(*source, rec.sample_rate_hz, cfg);
        prepared[c] = decimate(filtered, rec.sample_rate_hz, cfg.target_rate_hz);
    }

    const int m = static_cast<int>(std::lround(cfg.window_s * cfg.target_rate_hz));
    const int step = static_cast<int>(std::lround(cfg.step_s * cfg.target_rate_hz));
    const auto len = static_cast<long>(prepared[0].size());
    if (len < m) throw std::invalid_argument("preprocess: recording shorter than one window");

    const long count = (len - m) / step + 1;
    std::vector<WindowBatch> batches;
    batches.reserve(count);
    for (long i = 0; i < count; ++i) {
        WindowBatch batch;
        batch.window_index = static_cast<int>(i);
        batch.t_start_s = static_cast<double>(i) * cfg.step_s;
        batch.Y.resize(m, 4);
        for (int c = 0; c < 4; ++c) {
            const double* src = prepared[c].data() + i * step;
            double mean = 0.0;
            for (int r = 0; r < m; ++r) mean += src[r];
            mean /= m;
            double var = 0.0;
            for (int r = 0; r < m; ++r) var += (src[r] - mean) * (src[r] - mean);
            var /= (m - 1);
            if (var <= 0.0) {
                batch.Y.col(c).setZero();  // constant channel rule
            } else {
                const double scale = 1.0 / std::sqrt(var);
                for (int r = 0; r < m; ++r) batch.Y(r, c) = (src[r] - mean) * scale;
            }
        }
        batches.push_back(std::move(batch));
    }
    return batches;
}

}  // namespace joss

#pragma once

#include <Eigen/Dense>
#include <vector>

#include "joss/ingest.hpp"

namespace joss {

struct PipelineConfig {
    double band_low_hz = 0.4;
    double band_high_hz = 4.0;
    int filter_order = 2;  // Butterworth prototype order (bandpass order is twice this)
    double target_rate_hz = 25.0;
    double window_s = 8.0;
    double step_s = 2.0;
    bool zero_phase = false;  // offline forward-backward filtering; default is causal

    void validate() const;
};

// One biquad section, direct form II transposed. b are numerator taps,
// a1/a2 the (monic) denominator taps.
struct Biquad {
    double b0 = 1.0, b1 = 0.0, b2 = 0.0;
    double a1 = 0.0, a2 = 0.0;
};

// Bilinear-transform Butterworth bandpass as second-order sections.
// Band edges sit at the usual -3 dB points.
std::vector<Biquad> design_butterworth_bandpass(int order, double low_hz, double high_hz,
                                                double fs);

// |H(e^{j 2 pi f / fs})| of a section cascade.
double cascade_gain_at(const std::vector<Biquad>& sections, double freq_hz, double fs);

// Causal cascade filtering (zero initial state); zero_phase = forward-backward.
std::vector<double> apply_cascade(const std::vector<Biquad>& sections,
                                  const std::vector<double>& signal, bool zero_phase = false);

// Bandpass a signal per cfg. Output has the input's length.
std::vector<double> bandpass(const std::vector<double>& signal, double fs,
                             const PipelineConfig& cfg);

// Keep every D-th sample, D = fs_in / fs_out (must be a positive integer).
std::vector<double> decimate(const std::vector<double>& signal, double fs_in, double fs_out);

// One 8-second analysis window: Y columns are PPG, accel x, y, z, each
// mean-removed and scaled to unit sample variance (constant columns become
// all zeros).
struct WindowBatch {
    Eigen::MatrixXd Y;  // M x 4
    int window_index = 0;
    double t_start_s = 0.0;
};

// Full front end: bandpass each channel at the recording rate, decimate to
// cfg.target_rate_hz, slice sliding windows, normalize per column.
std::vector<WindowBatch> make_windows(const Recording& rec, const PipelineConfig& cfg);

}  // namespace joss

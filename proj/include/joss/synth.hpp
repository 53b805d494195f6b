#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "joss/ingest.hpp"

namespace joss {

// Piecewise-linear function of time, given as (t_s, value) knots.
// Constant before the first knot and after the last.
struct PiecewiseLinear {
    std::vector<std::pair<double, double>> knots;

    double at(double t) const;
    double mean_over(double t0, double t1) const;  // exact integral / length
};

struct MaTone {
    PiecewiseLinear freq_hz;
    double amplitude = 0.0;
    bool present_in_accel = true;
    // Frequency offset of the PPG coupling relative to the accelerometer
    // (skin-gap modulation is not a rigid copy of wrist motion).
    double ppg_freq_offset_hz = 0.0;
};

struct SynthSpec {
    double duration_s = 60.0;
    double fs = 125.0;
    PiecewiseLinear hr_trace_bpm;
    std::vector<std::pair<double, double>> hr_harmonics = {{1.0, 1.0}};  // (multiple, amplitude)
    std::vector<MaTone> ma_tones;
    double noise_sigma = 0.0;
    std::uint64_t seed = 1;

    void validate() const;
};

// PPG = HR harmonics at the instantaneous heart frequency + all MA tones +
// Gaussian noise; accelerometer axes carry the accel-flagged tones plus
// independent noise. Ground truth is the exact windowed mean of the HR trace
// on the 8 s / 2 s analysis grid. Deterministic for a given seed.
std::pair<Recording, GroundTruthTrace> generate(const SynthSpec& spec);

// Ready-made scenarios used by tests and the CLI `synth` verb.
SynthSpec scenario_constant(double bpm, double duration_s = 60.0, double fs = 125.0);
SynthSpec scenario_ramp(double bpm_from, double bpm_to, double duration_s = 240.0,
                        double fs = 125.0);
// Five-minute profile shaped like a walk/run/walk treadmill session, with two
// motion tones shared with the accelerometer channels.
SynthSpec scenario_treadmill(std::uint64_t seed = 7);
// Heart tone a few grid bins below two stronger motion tones; the case where
// per-channel spectra mislead subtraction but joint estimation does not.
SynthSpec scenario_ma_collision(double duration_s = 32.0);

}  // namespace joss

#include "joss/synth.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <stdexcept>

namespace joss {

double PiecewiseLinear::at(double t) const {
    if (knots.empty()) throw std::invalid_argument("synth: piecewise function has no knots");
    if (t <= knots.front().first) return knots.front().second;
    if (t >= knots.back().first) return knots.back().second;
    for (std::size_t i = 1; i < knots.size(); ++i) {
        if (t <= knots[i].first) {
            const auto& [t0, v0] = knots[i - 1];
            const auto& [t1, v1] = knots[i];
            if (t1 <= t0) return v1;
            return v0 + (v1 - v0) * (t - t0) / (t1 - t0);
        }
    }
    return knots.back().second;
}

double PiecewiseLinear::mean_over(double t0, double t1) const {
    if (!(t1 > t0)) throw std::invalid_argument("synth: bad averaging interval");
    // Exact trapezoid integral: linear pieces between breakpoints.
    std::vector<double> ts{t0, t1};
    for (const auto& [t, v] : knots)
        if (t > t0 && t < t1) ts.push_back(t);
    std::sort(ts.begin(), ts.end());
    double integral = 0.0;
    for (std::size_t i = 1; i < ts.size(); ++i)
        integral += (at(ts[i - 1]) + at(ts[i])) / 2.0 * (ts[i] - ts[i - 1]);
    return integral / (t1 - t0);
}

void SynthSpec::validate() const {
    if (!(duration_s > 0.0) || !(fs > 0.0)) throw std::invalid_argument("synth: bad duration/fs");
    if (hr_trace_bpm.knots.empty()) throw std::invalid_argument("synth: empty HR trace");
    for (const auto& [t, bpm] : hr_trace_bpm.knots)
        if (!(bpm > 40.0 && bpm < 220.0))
            throw std::invalid_argument("synth: HR trace outside (40, 220) BPM");
    for (const auto& [mult, amp] : hr_harmonics)
        if (amp < 0.0 || mult <= 0.0) throw std::invalid_argument("synth: bad harmonic");
    for (const auto& tone : ma_tones)
        if (tone.amplitude < 0.0 || tone.freq_hz.knots.empty())
            throw std::invalid_argument("synth: bad MA tone");
    if (noise_sigma < 0.0) throw std::invalid_argument("synth: negative noise sigma");
}

std::pair<Recording, GroundTruthTrace> generate(const SynthSpec& spec) {
    spec.validate();
    const auto n = static_cast<std::size_t>(std::llround(spec.duration_s * spec.fs));
    const double dt = 1.0 / spec.fs;

    Recording rec;
    rec.id = "synthetic";
    rec.sample_rate_hz = spec.fs;
    rec.ppg.assign(n, 0.0);
    rec.accel_x.assign(n, 0.0);
    rec.accel_y.assign(n, 0.0);
    rec.accel_z.assign(n, 0.0);

    // Heart component: each harmonic integrates its own phase (trapezoid,
    // exact for the piecewise-linear frequency trace).
    for (const auto& [mult, amp] : spec.hr_harmonics) {
        double phase = 0.0;
        double f_prev = mult * spec.hr_trace_bpm.at(0.0) / 60.0;
        for (std::size_t i = 0; i < n; ++i) {
            rec.ppg[i] += amp * std::sin(phase);
            const double f_next = mult * spec.hr_trace_bpm.at((i + 1) * dt) / 60.0;
            phase += std::numbers::pi * (f_prev + f_next) * dt;
            f_prev = f_next;
        }
    }

    // Motion tones. Each channel couples with its own phase shift, different
    // per tone, so no two channels see the same blend of tones; the PPG copy
    // may additionally sit at a slightly shifted frequency.
    int tone_index = 0;
    for (const auto& tone : spec.ma_tones) {
        const double k = tone_index++;
        const double ppg_shift = 0.7 + 0.8 * k;
        const double axis_shift[3] = {0.5 * k, 1.1 + 1.3 * k, 2.3 + 2.1 * k};
        const double axis_gain[3] = {1.0, 0.8, 0.6};
        double phase = 0.0, ppg_phase = 0.0;
        double f_prev = tone.freq_hz.at(0.0);
        for (std::size_t i = 0; i < n; ++i) {
            rec.ppg[i] += tone.amplitude * std::sin(ppg_phase + ppg_shift);
            if (tone.present_in_accel) {
                rec.accel_x[i] += axis_gain[0] * tone.amplitude * std::sin(phase + axis_shift[0]);
                rec.accel_y[i] += axis_gain[1] * tone.amplitude * std::sin(phase + axis_shift[1]);
                rec.accel_z[i] += axis_gain[2] * tone.amplitude * std::sin(phase + axis_shift[2]);
            }
            const double f_next = tone.freq_hz.at((i + 1) * dt);
            phase += std::numbers::pi * (f_prev + f_next) * dt;
            ppg_phase += std::numbers::pi * (f_prev + f_next + 2.0 * tone.ppg_freq_offset_hz) * dt;
            f_prev = f_next;
        }
    }

    if (spec.noise_sigma > 0.0) {
        std::mt19937_64 rng(spec.seed);
        std::normal_distribution<double> gauss(0.0, spec.noise_sigma);
        for (std::size_t i = 0; i < n; ++i) rec.ppg[i] += gauss(rng);
        for (std::size_t i = 0; i < n; ++i) rec.accel_x[i] += gauss(rng);
        for (std::size_t i = 0; i < n; ++i) rec.accel_y[i] += gauss(rng);
        for (std::size_t i = 0; i < n; ++i) rec.accel_z[i] += gauss(rng);
    }

    // Ground truth: exact mean of the HR trace over each 8 s window, 2 s step.
    GroundTruthTrace truth;
    const double window_s = 8.0, step_s = 2.0;
    for (double t0 = 0.0; t0 + window_s <= spec.duration_s + 1e-9; t0 += step_s)
        truth.bpm_true.push_back(spec.hr_trace_bpm.mean_over(t0, t0 + window_s));

    return {std::move(rec), std::move(truth)};
}

SynthSpec scenario_constant(double bpm, double duration_s, double fs) {
    SynthSpec spec;
    spec.duration_s = duration_s;
    spec.fs = fs;
    spec.hr_trace_bpm.knots = {{0.0, bpm}};
    spec.hr_harmonics = {{1.0, 1.0}, {2.0, 0.35}};
    spec.noise_sigma = 0.0;
    return spec;
}

SynthSpec scenario_ramp(double bpm_from, double bpm_to, double duration_s, double fs) {
    SynthSpec spec;
    spec.duration_s = duration_s;
    spec.fs = fs;
    spec.hr_trace_bpm.knots = {{0.0, bpm_from}, {duration_s, bpm_to}};
    spec.hr_harmonics = {{1.0, 1.0}, {2.0, 0.35}};
    spec.noise_sigma = 0.0;
    return spec;
}

SynthSpec scenario_treadmill(std::uint64_t seed) {
    SynthSpec spec;
    spec.duration_s = 300.0;
    spec.fs = 125.0;
    // Walk / run / walk profile: slow half-minute, two fast minutes separated
    // by a moderate one, slow tail.
    spec.hr_trace_bpm.knots = {{0.0, 84.0},   {30.0, 96.0},  {60.0, 122.0}, {90.0, 132.0},
                               {120.0, 152.0}, {150.0, 164.0}, {180.0, 148.0}, {210.0, 142.0},
                               {240.0, 158.0}, {270.0, 166.0}, {285.0, 152.0}, {300.0, 140.0}};
    spec.hr_harmonics = {{1.0, 1.0}, {2.0, 0.4}};

    MaTone swing;  // arm swing, loosely tied to pace
    swing.freq_hz.knots = {{0.0, 0.9},  {30.0, 0.9},  {60.0, 1.7},  {150.0, 1.9},
                           {180.0, 1.5}, {240.0, 2.3}, {285.0, 1.2}, {300.0, 1.0}};
    swing.amplitude = 1.6;
    MaTone bounce;  // vertical bounce at roughly twice the swing rate
    bounce.freq_hz.knots = {{0.0, 1.8},  {30.0, 1.8},  {60.0, 3.4},  {150.0, 3.8},
                            {180.0, 3.0}, {240.0, 3.9}, {285.0, 2.4}, {300.0, 2.0}};
    bounce.amplitude = 1.1;
    spec.ma_tones = {swing, bounce};
    spec.noise_sigma = 0.1;
    spec.seed = seed;
    return spec;
}

SynthSpec scenario_ma_collision(double duration_s) {
    SynthSpec spec;
    spec.duration_s = duration_s;
    spec.fs = 125.0;
    // Heart tone on grid bin 112 of the 1024-point 25 Hz grid, flanked by two
    // stronger motion tones five and eight bins up: separable on the fine
    // grid, but inside one 8 s periodogram mainlobe.
    spec.hr_trace_bpm.knots = {{0.0, 164.0625}};
    spec.hr_harmonics = {{1.0, 0.8}};
    MaTone swing;
    swing.freq_hz.knots = {{0.0, 117.0 * 25.0 / 1024.0}};
    swing.amplitude = 2.0;
    MaTone bounce;
    bounce.freq_hz.knots = {{0.0, 120.0 * 25.0 / 1024.0}};
    bounce.amplitude = 2.0;
    spec.ma_tones = {swing, bounce};
    spec.noise_sigma = 0.0;
    return spec;
}

}  // namespace joss

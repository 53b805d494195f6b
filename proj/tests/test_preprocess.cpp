#include <cmath>
#include <numbers>
#include <random>

#include "doctest.h"

#include "joss/preprocess.hpp"

using namespace joss;

namespace {

std::vector<double> sinusoid(double freq_hz, double fs, std::size_t n, double amp = 1.0) {
    std::vector<double> s(n);
    for (std::size_t i = 0; i < n; ++i)
        s[i] = amp * std::sin(2.0 * std::numbers::pi * freq_hz * i / fs);
    return s;
}

// Steady-state amplitude of a filtered tone, measured over the tail.
double tail_amplitude(const std::vector<double>& y) {
    double peak = 0.0;
    for (std::size_t i = y.size() / 2; i < y.size(); ++i) peak = std::max(peak, std::abs(y[i]));
    return peak;
}

}  // namespace

TEST_SUITE("preprocess") {

TEST_CASE("designed response matches independently computed gains") {
    const auto sos = design_butterworth_bandpass(2, 0.4, 4.0, 125.0);
    REQUIRE(sos.size() == 2);
    // Reference magnitudes computed with an independent filter-design tool
    // for the same bilinear Butterworth bandpass.
    CHECK(cascade_gain_at(sos, 2.0, 125.0) == doctest::Approx(0.993981290892171).epsilon(1e-9));
    CHECK(cascade_gain_at(sos, 0.05, 125.0) == doctest::Approx(0.012703308486497).epsilon(1e-7));
    // Band edges sit at -3 dB.
    CHECK(cascade_gain_at(sos, 0.4, 125.0) ==
          doctest::Approx(1.0 / std::sqrt(2.0)).epsilon(1e-9));
    CHECK(cascade_gain_at(sos, 4.0, 125.0) ==
          doctest::Approx(1.0 / std::sqrt(2.0)).epsilon(1e-9));
}

TEST_CASE("coefficients are locked against regressions") {
    const auto sos = design_butterworth_bandpass(2, 0.4, 4.0, 125.0);
    REQUIRE(sos.size() == 2);
    // Frozen from the initial design run: each section keeps zeros at +1 and
    // -1; the cascade gain is normalized in the first section.
    const double expected[2][5] = {
        {0.0072422922506355262, 0.0, -0.0072422922506355262, -1.9727986083150388,
         0.9732704835223559},
        {1.0, 0.0, -1.0, -1.7648607581318281, 0.79547974171890934},
    };
    for (int i = 0; i < 2; ++i) {
        CAPTURE(i);
        CHECK(sos[i].b0 == doctest::Approx(expected[i][0]).epsilon(1e-12));
        CHECK(sos[i].b1 == expected[i][1]);
        CHECK(sos[i].b2 == doctest::Approx(expected[i][2]).epsilon(1e-12));
        CHECK(sos[i].a1 == doctest::Approx(expected[i][3]).epsilon(1e-12));
        CHECK(sos[i].a2 == doctest::Approx(expected[i][4]).epsilon(1e-12));
    }
}

TEST_CASE("2 Hz tone passes with the analytic gain") {
    PipelineConfig cfg;
    const double fs = 125.0;
    const auto sos = design_butterworth_bandpass(cfg.filter_order, cfg.band_low_hz,
                                                 cfg.band_high_hz, fs);
    const double analytic = cascade_gain_at(sos, 2.0, fs);
    CHECK(analytic >= 0.9);
    CHECK(analytic <= 1.0);

    const auto y = bandpass(sinusoid(2.0, fs, 4000), fs, cfg);
    const double measured = tail_amplitude(y);
    CHECK(measured == doctest::Approx(analytic).epsilon(0.02));
}

TEST_CASE("0.05 Hz drift is rejected") {
    PipelineConfig cfg;
    const double fs = 125.0;
    const auto sos = design_butterworth_bandpass(cfg.filter_order, cfg.band_low_hz,
                                                 cfg.band_high_hz, fs);
    const double analytic = cascade_gain_at(sos, 0.05, fs);
    CHECK(analytic < 0.2);
    // Long tone so the tail is past the transient.
    const auto y = bandpass(sinusoid(0.05, fs, 30000), fs, cfg);
    CHECK(tail_amplitude(y) < 0.2);
}

TEST_CASE("zero input stays zero and filtering is linear") {
    PipelineConfig cfg;
    const double fs = 125.0;
    const auto zero = bandpass(std::vector<double>(500, 0.0), fs, cfg);
    for (double v : zero) CHECK(v == 0.0);

    std::mt19937_64 rng(3);
    std::normal_distribution<double> gauss;
    std::vector<double> x(600), y(600), combo(600);
    const double a = 1.7, b = -0.4;
    for (std::size_t i = 0; i < x.size(); ++i) {
        x[i] = gauss(rng);
        y[i] = gauss(rng);
        combo[i] = a * x[i] + b * y[i];
    }
    const auto fx = bandpass(x, fs, cfg);
    const auto fy = bandpass(y, fs, cfg);
    const auto fc = bandpass(combo, fs, cfg);
    for (std::size_t i = 0; i < x.size(); ++i)
        CHECK(fc[i] == doctest::Approx(a * fx[i] + b * fy[i]).epsilon(1e-9).scale(1.0));
}

TEST_CASE("zero-phase option squares the gain and keeps alignment") {
    PipelineConfig cfg;
    cfg.zero_phase = true;
    const double fs = 125.0;
    const auto sos = design_butterworth_bandpass(cfg.filter_order, cfg.band_low_hz,
                                                 cfg.band_high_hz, fs);
    const double gain = cascade_gain_at(sos, 2.0, fs);
    const auto y = bandpass(sinusoid(2.0, fs, 8000), fs, cfg);
    CHECK(tail_amplitude(std::vector<double>(y.begin() + 2000, y.end() - 2000)) ==
          doctest::Approx(gain * gain).epsilon(0.02));
}

TEST_CASE("band edges infeasible for fs are rejected") {
    PipelineConfig cfg;
    CHECK_THROWS_AS(bandpass(sinusoid(1.0, 6.0, 100), 6.0, cfg), std::invalid_argument);
    CHECK_THROWS_AS(design_butterworth_bandpass(2, 4.0, 0.4, 125.0), std::invalid_argument);
}

TEST_CASE("decimate keeps every D-th sample") {
    const std::vector<double> ramp{0, 1, 2, 3, 4, 5, 6, 7, 8, 9};
    CHECK(decimate(ramp, 125.0, 25.0) == std::vector<double>{0, 5});

    std::vector<double> sig(125, 1.0);
    CHECK(decimate(sig, 125.0, 25.0).size() == 25);
    CHECK_THROWS_AS(decimate(sig, 125.0, 30.0), std::invalid_argument);
}

TEST_CASE("window slicing matches the arithmetic and normalizes per column") {
    std::mt19937_64 rng(11);
    std::normal_distribution<double> gauss;
    Recording rec;
    rec.id = "w";
    rec.sample_rate_hz = 25.0;
    const std::size_t len = 1500;  // 60 s at 25 Hz
    for (std::size_t i = 0; i < len; ++i) {
        rec.ppg.push_back(gauss(rng) + std::sin(2 * std::numbers::pi * 2.0 * i / 25.0));
        rec.accel_x.push_back(gauss(rng));
        rec.accel_y.push_back(gauss(rng));
        rec.accel_z.push_back(gauss(rng));
    }
    PipelineConfig cfg;
    const auto batches = make_windows(rec, cfg);
    CHECK(batches.size() == 27);  // (1500 - 200) / 50 + 1
    for (const auto& b : batches) {
        REQUIRE(b.Y.rows() == 200);
        REQUIRE(b.Y.cols() == 4);
        for (int c = 0; c < 4; ++c) {
            const double mean = b.Y.col(c).mean();
            const double var = (b.Y.col(c).array() - mean).square().sum() / (200 - 1);
            CHECK(std::abs(mean) < 1e-12);
            CHECK(var == doctest::Approx(1.0).epsilon(1e-9));
        }
    }

    // Slicing covers [i*step, i*step + M): rebuild one window by hand.
    const auto prepared = decimate(bandpass(rec.ppg, 25.0, cfg), 25.0, 25.0);
    const int i = 5, step = 50, m = 200;
    double mean = 0.0;
    for (int r = 0; r < m; ++r) mean += prepared[i * step + r];
    mean /= m;
    double var = 0.0;
    for (int r = 0; r < m; ++r)
        var += (prepared[i * step + r] - mean) * (prepared[i * step + r] - mean);
    var /= (m - 1);
    for (int r = 0; r < m; ++r) {
        CHECK(batches[i].Y(r, 0) ==
              doctest::Approx((prepared[i * step + r] - mean) / std::sqrt(var)).epsilon(1e-12));
    }
    CHECK(batches[i].t_start_s == doctest::Approx(10.0));
}

TEST_CASE("constant channel becomes all zeros in every batch") {
    Recording rec;
    rec.id = "c";
    rec.sample_rate_hz = 25.0;
    std::mt19937_64 rng(5);
    std::normal_distribution<double> gauss;
    for (int i = 0; i < 400; ++i) {
        rec.ppg.push_back(7.25);
        rec.accel_x.push_back(gauss(rng));
        rec.accel_y.push_back(gauss(rng));
        rec.accel_z.push_back(gauss(rng));
    }
    const auto batches = make_windows(rec, PipelineConfig{});
    REQUIRE_FALSE(batches.empty());
    for (const auto& b : batches) {
        CHECK(b.Y.col(0).cwiseAbs().maxCoeff() == 0.0);
        // Other channels still normalize as usual.
        const double var1 = (b.Y.col(1).array() - b.Y.col(1).mean()).square().sum() / 199;
        CHECK(var1 == doctest::Approx(1.0).epsilon(1e-9));
    }
}

TEST_CASE("channel scaling does not change the batches") {
    std::mt19937_64 rng(13);
    std::normal_distribution<double> gauss;
    Recording rec;
    rec.id = "s";
    rec.sample_rate_hz = 25.0;
    for (int i = 0; i < 600; ++i) {
        rec.ppg.push_back(gauss(rng));
        rec.accel_x.push_back(gauss(rng));
        rec.accel_y.push_back(gauss(rng));
        rec.accel_z.push_back(gauss(rng));
    }
    Recording scaled = rec;
    for (auto& v : scaled.ppg) v *= 3.7;
    for (auto& v : scaled.accel_y) v *= 0.002;

    const auto a = make_windows(rec, PipelineConfig{});
    const auto b = make_windows(scaled, PipelineConfig{});
    REQUIRE(a.size() == b.size());
    for (std::size_t i = 0; i < a.size(); ++i)
        CHECK((a[i].Y - b[i].Y).cwiseAbs().maxCoeff() < 1e-9);
}

TEST_CASE("recording shorter than one window is an error") {
    Recording rec;
    rec.id = "short";
    rec.sample_rate_hz = 25.0;
    rec.ppg.assign(150, 1.0);
    rec.accel_x.assign(150, 0.5);
    rec.accel_y.assign(150, 0.5);
    rec.accel_z.assign(150, 0.5);
    for (int i = 0; i < 150; ++i) rec.ppg[i] = std::sin(0.3 * i);
    CHECK_THROWS_AS(make_windows(rec, PipelineConfig{}), std::invalid_argument);
}

}  // TEST_SUITE

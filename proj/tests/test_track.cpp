#include <cmath>
#include <random>

#include "doctest.h"

#include "joss/spectrum.hpp"
#include "joss/track.hpp"

using namespace joss;

namespace {

constexpr int kGridN = 1024;
constexpr double kFs = 25.0;

CleansedSpectrum spectrum_with(std::initializer_list<std::pair<int, double>> spikes,
                               int n = kGridN) {
    CleansedSpectrum s;
    s.s.assign(n, 0.0);
    for (const auto& [bin, value] : spikes) {
        s.s[bin] = value;
        s.p_max = std::max(s.p_max, value);
    }
    s.threshold = s.p_max / 4.0;
    s.all_zero = spikes.size() == 0;
    return s;
}

// Non-excess kurtosis written out directly, as the checking formula.
double kurtosis_oracle(const std::vector<double>& v) {
    double mean = 0.0;
    for (double x : v) mean += x;
    mean /= v.size();
    double m2 = 0.0, m4 = 0.0;
    for (double x : v) {
        const double d = x - mean;
        m2 += d * d;
        m4 += d * d * d * d;
    }
    m2 /= v.size();
    m4 /= v.size();
    return m2 < 1e-15 ? 0.0 : m4 / (m2 * m2);
}

// Drives a tracker out of Init with a lone spike at the given bin.
Tracker primed_tracker(int init_bin, const TrackerConfig& cfg = TrackerConfig{}) {
    Tracker tracker(cfg, kFs, kGridN);
    const auto d = tracker.step(spectrum_with({{init_bin, 1.0}}));
    REQUIRE(d.bpm.has_value());
    REQUIRE(*d.selected_bin == init_bin);
    return tracker;
}

}  // namespace

TEST_SUITE("track") {

TEST_CASE("peaks are one per nonzero run, by value, at most three") {
    CleansedSpectrum s;
    s.s.assign(kGridN, 0.0);
    for (int b = 110; b <= 114; ++b) s.s[b] = 1.0;
    s.s[112] = 3.0;
    for (int b = 95; b <= 97; ++b) s.s[b] = 0.5;
    s.s[96] = 2.0;
    const auto peaks = find_peaks(s, 90, 120);
    REQUIRE(peaks.size() == 2);
    CHECK(peaks[0].first == 112);
    CHECK(peaks[0].second == 3.0);
    CHECK(peaks[1].first == 96);

    SUBCASE("all-zero range gives no peaks") {
        CHECK(find_peaks(s, 200, 300).empty());
    }
    SUBCASE("five runs are truncated to the three largest") {
        CleansedSpectrum crowded;
        crowded.s.assign(kGridN, 0.0);
        const int bins[5] = {10, 20, 30, 40, 50};
        const double values[5] = {1.0, 5.0, 3.0, 4.0, 2.0};
        for (int i = 0; i < 5; ++i) crowded.s[bins[i]] = values[i];
        const auto top = find_peaks(crowded, 0, 60);
        REQUIRE(top.size() == 3);
        CHECK(top[0].first == 20);
        CHECK(top[1].first == 40);
        CHECK(top[2].first == 30);
    }
    SUBCASE("tied maxima inside a run resolve to the lowest bin") {
        CleansedSpectrum tied;
        tied.s.assign(kGridN, 0.0);
        tied.s[100] = tied.s[101] = 2.0;
        const auto p = find_peaks(tied, 90, 110);
        REQUIRE(p.size() == 1);
        CHECK(p[0].first == 100);
    }
    SUBCASE("empty or out-of-range intervals are errors") {
        CHECK_THROWS_AS(find_peaks(s, 50, 40), std::invalid_argument);
        CHECK_THROWS_AS(find_peaks(s, 0, kGridN), std::invalid_argument);
    }
}

TEST_CASE("kurtosis gate values") {
    // Band [0.8, 2.5] Hz on the 25 Hz / 1024-bin grid covers bins 33..102.
    CleansedSpectrum s;
    s.s.assign(kGridN, 0.0);

    SUBCASE("one spike among zeros is sharply peaked") {
        s.s[60] = 1.0;
        std::vector<double> band(s.s.begin() + 33, s.s.begin() + 103);
        const double expected = kurtosis_oracle(band);
        CHECK(expected > 10.0);
        CHECK(spectral_kurtosis(s, 0.8, 2.5, kFs) == doctest::Approx(expected).epsilon(1e-12));
    }
    SUBCASE("flat band degenerates to zero") {
        for (int b = 33; b <= 102; ++b) s.s[b] = 2.0;
        CHECK(spectral_kurtosis(s, 0.8, 2.5, kFs) == 0.0);
    }
    SUBCASE("two equal spikes match the direct formula") {
        s.s[50] = s.s[80] = 1.0;
        std::vector<double> band(s.s.begin() + 33, s.s.begin() + 103);
        CHECK(spectral_kurtosis(s, 0.8, 2.5, kFs) ==
              doctest::Approx(kurtosis_oracle(band)).epsilon(1e-12));
    }
    SUBCASE("bad bands are errors") {
        CHECK_THROWS_AS(spectral_kurtosis(s, 20.0, 24.0, kFs), std::invalid_argument);
        CHECK_THROWS_AS(spectral_kurtosis(s, 1.0, 1.02, kFs), std::invalid_argument);
    }
}

TEST_CASE("initialization outputs nothing until the band is clean") {
    Tracker tracker(TrackerConfig{}, kFs, kGridN);
    // Busy band: kurtosis stays low.
    CleansedSpectrum noisy;
    noisy.s.assign(kGridN, 0.0);
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> val(0.5, 1.5);
    for (int b = 33; b <= 102; ++b) noisy.s[b] = val(rng);
    const auto d = tracker.step(noisy);
    CHECK(d.no_output);
    CHECK_FALSE(d.bpm.has_value());
    CHECK(d.stage_used == Stage::Init);

    // Still in Init: a clean spike now initializes at the highest band bin.
    const auto d2 = tracker.step(spectrum_with({{70, 1.0}, {60, 0.6}}));
    CHECK(d2.stage_used == Stage::Init);
    REQUIRE(d2.bpm.has_value());
    CHECK(*d2.selected_bin == 70);
    CHECK(*d2.bpm == doctest::Approx(bin_to_bpm(70, kFs, kGridN)));
}

TEST_CASE("selection picks the peak closest to the previous location") {
    auto tracker = primed_tracker(100);
    // Peaks at 95 (dist 5) and 112 (dist 12), both inside R1 = [85, 115].
    const auto d = tracker.step(spectrum_with({{95, 1.0}, {112, 5.0}}));
    CHECK(d.stage_used == Stage::Tracking);
    CHECK(*d.selected_bin == 95);
    CHECK_FALSE(d.reset_by_verification);
}

TEST_CASE("equidistant peaks follow the trend") {
    SUBCASE("rising history selects the higher bin") {
        auto tracker = primed_tracker(100);
        for (int bin : {104, 108, 112})
            REQUIRE(*tracker.step(spectrum_with({{bin, 1.0}})).selected_bin == bin);
        const auto d = tracker.step(spectrum_with({{105, 1.0}, {119, 1.0}}));
        CHECK(*d.selected_bin == 119);
    }
    SUBCASE("falling history selects the lower bin") {
        auto tracker = primed_tracker(100);
        for (int bin : {96, 92, 88})
            REQUIRE(*tracker.step(spectrum_with({{bin, 1.0}})).selected_bin == bin);
        const auto d = tracker.step(spectrum_with({{81, 1.0}, {95, 1.0}}));
        CHECK(*d.selected_bin == 81);
    }
    SUBCASE("flat history defaults to the lower bin") {
        auto tracker = primed_tracker(70);
        REQUIRE(*tracker.step(spectrum_with({{70, 1.0}})).selected_bin == 70);
        const auto d = tracker.step(spectrum_with({{63, 1.0}, {77, 1.0}}));
        CHECK(*d.selected_bin == 63);
    }
}

TEST_CASE("verification resets jumps beyond 12 BPM") {
    auto tracker = primed_tracker(102);  // about 149.4 BPM
    // Lone peak at bin 116 (about 169.9 BPM): inside R1 but a 20 BPM jump.
    const auto d = tracker.step(spectrum_with({{116, 4.0}}));
    CHECK(d.reset_by_verification);
    CHECK(*d.selected_bin == 102);
    CHECK(*d.bpm == doctest::Approx(bin_to_bpm(102, kFs, kGridN)));
}

TEST_CASE("empty narrow range falls back to wide range, then to the previous value") {
    auto tracker = primed_tracker(100);
    SUBCASE("peak outside R1 but inside R2 is taken by value") {
        // R1 = [85, 115] empty; R2 = [75, 125]; highest peak wins.
        const auto d = tracker.step(spectrum_with({{120, 1.0}, {122, 3.0}}));
        // Verification may still reset: bin 120 is 175.8, prev 146.5 -> reset.
        CHECK(d.reset_by_verification);
        CHECK(*d.selected_bin == 100);
    }
    SUBCASE("nothing anywhere keeps the previous estimate") {
        const auto d = tracker.step(spectrum_with({{400, 2.0}}));
        CHECK(*d.selected_bin == 100);
        CHECK_FALSE(d.reset_by_verification);
    }
}

TEST_CASE("repeated stalls trigger discovery and recovery resumes tracking") {
    TrackerConfig cfg;
    auto tracker = primed_tracker(100, cfg);
    // Three windows with nothing near the track: output stays at 100.
    for (int i = 0; i < cfg.stall_limit; ++i) {
        const auto d = tracker.step(spectrum_with({{400, 2.0}}));
        CHECK(*d.selected_bin == 100);
        CHECK(d.stage_used == Stage::Tracking);
    }
    CHECK(tracker.state().stage == Stage::Discovery);

    // Discovery searches around the trend prediction (flat at 100) and takes
    // the highest peak there even when the step exceeds 12 BPM.
    const auto d = tracker.step(spectrum_with({{125, 2.0}, {80, 1.0}}));
    CHECK(d.stage_used == Stage::Discovery);
    CHECK(d.discovery_triggered);
    CHECK(*d.selected_bin == 125);
    CHECK(tracker.state().stage == Stage::Tracking);
    CHECK(tracker.state().stall_count == 0);
}

TEST_CASE("discovery with an empty search range outputs the prediction") {
    TrackerConfig cfg;
    auto tracker = primed_tracker(100, cfg);
    for (int i = 0; i < cfg.stall_limit; ++i) tracker.step(spectrum_with({{400, 2.0}}));
    const auto d = tracker.step(spectrum_with({{400, 2.0}}));
    CHECK(d.stage_used == Stage::Discovery);
    CHECK(*d.selected_bin == 100);  // flat history predicts no movement
}

TEST_CASE("history is bounded and consistent") {
    TrackerConfig cfg;
    auto tracker = primed_tracker(100, cfg);
    for (int i = 0; i < 2 * cfg.history_long; ++i) {
        const int bin = 100 + (i % 2);
        tracker.step(spectrum_with({{bin, 1.0}}));
        const auto& st = tracker.state();
        REQUIRE(st.loc_history.size() == st.bpm_history.size());
        CHECK(st.loc_history.size() <= static_cast<std::size_t>(cfg.history_long));
        for (std::size_t k = 0; k < st.loc_history.size(); ++k)
            CHECK(st.bpm_history[k] ==
                  doctest::Approx(bin_to_bpm(st.loc_history[k], kFs, kGridN)).epsilon(1e-9));
    }
}

TEST_CASE("all-zero spectra never initialize") {
    std::vector<CleansedSpectrum> stream(10);
    for (auto& s : stream) {
        s.s.assign(kGridN, 0.0);
        s.all_zero = true;
    }
    const auto decisions = run_tracker(stream, TrackerConfig{}, kFs, kGridN);
    CHECK(decisions.size() == 10);
    for (const auto& d : decisions) {
        CHECK(d.no_output);
        CHECK_FALSE(d.bpm.has_value());
        CHECK(d.stage_used == Stage::Init);
    }
}

TEST_CASE("identical streams give identical traces") {
    std::mt19937_64 rng(31);
    std::uniform_int_distribution<int> bin(40, 200);
    std::uniform_real_distribution<double> val(0.2, 4.0);
    std::vector<CleansedSpectrum> stream;
    for (int i = 0; i < 60; ++i) {
        CleansedSpectrum s;
        s.s.assign(kGridN, 0.0);
        for (int k = 0; k < 4; ++k) s.s[bin(rng)] = val(rng);
        stream.push_back(std::move(s));
    }
    const auto a = run_tracker(stream, TrackerConfig{}, kFs, kGridN);
    const auto b = run_tracker(stream, TrackerConfig{}, kFs, kGridN);
    REQUIRE(a.size() == b.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
        CHECK(a[i].bpm == b[i].bpm);
        CHECK(a[i].selected_bin == b[i].selected_bin);
        CHECK(a[i].stage_used == b[i].stage_used);
    }
}

}  // TEST_SUITE

#include "joss/track.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "joss/smoother.hpp"
#include "joss/spectrum.hpp"

namespace joss {
namespace {

// [lo, hi] bin interval covered by a frequency band, inclusive.
std::pair<int, int> band_to_bins(double lo_hz, double hi_hz, double fs, int n) {
    const int lo = static_cast<int>(std::ceil(lo_hz * n / fs - 1e-9));
    const int hi = static_cast<int>(std::floor(hi_hz * n / fs + 1e-9));
    return {lo, hi};
}

}  // namespace

void TrackerConfig::validate() const {
    if (!(delta1 > 0 && delta2 > delta1 && delta3 > 0))
        throw std::invalid_argument("track: need 0 < delta1 < delta2 and delta3 > 0");
    if (!(history_short > 0 && history_long > history_short))
        throw std::invalid_argument("track: need 0 < H < K");
    if (!(max_step_bpm > 0.0) || !(kurtosis_threshold > 0.0) || stall_limit < 1)
        throw std::invalid_argument("track: thresholds must be positive");
    if (!(init_band_low_hz > 0.0 && init_band_low_hz < init_band_high_hz))
        throw std::invalid_argument("track: invalid initialization band");
}

const char* stage_name(Stage s) {
    switch (s) {
        case Stage::Init: return "init";
        case Stage::Tracking: return "tracking";
        case Stage::Discovery: return "discovery";
    }
    return "?";
}

std::string WindowDecision::flags_string() const {
    std::string out;
    auto add = [&out](const char* f) {
        if (!out.empty()) out += ';';
        out += f;
    };
    if (reset_by_verification) add("reset_by_verification");
    if (discovery_triggered) add("discovery_triggered");
    if (no_output) add("no_output");
    return out;
}

std::vector<std::pair<int, double>> find_peaks(const CleansedSpectrum& s, int lo_bin,
                                               int hi_bin) {
    const int half = s.grid_size() / 2;
    if (lo_bin > hi_bin) throw std::invalid_argument("track: empty peak search range");
    if (lo_bin < 0 || hi_bin >= half)
        throw std::invalid_argument("track: peak search range outside half spectrum");

    std::vector<std::pair<int, double>> peaks;
    int i = lo_bin;
    while (i <= hi_bin) {
        if (s.s[i] <= 0.0) {
            ++i;
            continue;
        }
        int best = i;
        while (i <= hi_bin && s.s[i] > 0.0) {
            if (s.s[i] > s.s[best]) best = i;  // strict: ties keep the lowest bin
            ++i;
        }
        peaks.emplace_back(best, s.s[best]);
    }
    std::sort(peaks.begin(), peaks.end(), [](const auto& a, const auto& b) {
        if (a.second != b.second) return a.second > b.second;
        return a.first < b.first;
    });
    if (peaks.size() > 3) peaks.resize(3);
    return peaks;
}

double spectral_kurtosis(const CleansedSpectrum& s, double band_low_hz, double band_high_hz,
                         double fs) {
    const auto [lo, hi] = band_to_bins(band_low_hz, band_high_hz, fs, s.grid_size());
    if (lo < 0 || hi >= s.grid_size() / 2 || lo > hi)
        throw std::invalid_argument("track: kurtosis band outside spectrum");
    const int count = hi - lo + 1;
    if (count < 4) throw std::invalid_argument("track: kurtosis band maps to fewer than 4 bins");

    double mean = 0.0;
    for (int i = lo; i <= hi; ++i) mean += s.s[i];
    mean /= count;
    double m2 = 0.0, m4 = 0.0;
    for (int i = lo; i <= hi; ++i) {
        const double d = s.s[i] - mean;
        m2 += d * d;
        m4 += d * d * d * d;
    }
    m2 /= count;
    m4 /= count;
    if (m2 < 1e-15) return 0.0;
    return m4 / (m2 * m2);
}

Tracker::Tracker(TrackerConfig cfg, double fs, int grid_n)
    : cfg_(cfg), fs_(fs), grid_n_(grid_n) {
    cfg_.validate();
    if (!(fs > 0.0) || grid_n < 4) throw std::invalid_argument("track: bad fs or grid size");
}

void Tracker::emit(WindowDecision& d, int bin) {
    d.selected_bin = bin;
    d.bpm = bin_to_bpm(bin, fs_, grid_n_);
    state_.loc_history.push_back(bin);
    state_.bpm_history.push_back(*d.bpm);
    while (state_.loc_history.size() > static_cast<std::size_t>(cfg_.history_long)) {
        state_.loc_history.erase(state_.loc_history.begin());
        state_.bpm_history.erase(state_.bpm_history.begin());
    }
}

double Tracker::trend_slope(int points, double smooth_param) const {
    const auto& h = state_.loc_history;
    const int n = std::min<int>(points, static_cast<int>(h.size()));
    if (n < 2) return 0.0;
    std::vector<double> tail(h.end() - n, h.end());
    if (n < 3) return tail[1] - tail[0];
    const auto trend = smooth_trend(tail, smooth_param);
    return trend.next_prediction - trend.smoothed.back();
}

WindowDecision Tracker::step_init(const CleansedSpectrum& s) {
    WindowDecision d;
    d.stage_used = Stage::Init;
    const double kurt = spectral_kurtosis(s, cfg_.init_band_low_hz, cfg_.init_band_high_hz, fs_);
    if (kurt <= cfg_.kurtosis_threshold) {
        d.no_output = true;
        return d;
    }
    const auto [lo, hi] = band_to_bins(cfg_.init_band_low_hz, cfg_.init_band_high_hz, fs_, grid_n_);
    int best = lo;
    for (int i = lo; i <= hi; ++i)
        if (s.s[i] > s.s[best]) best = i;
    emit(d, best);
    state_.stage = Stage::Tracking;
    state_.stall_count = 0;
    return d;
}

WindowDecision Tracker::step_tracking(const CleansedSpectrum& s) {
    WindowDecision d;
    d.stage_used = Stage::Tracking;
    const int half = grid_n_ / 2;
    const int prev_loc = state_.loc_history.back();
    const double prev_bpm = state_.bpm_history.back();

    auto peaks_in = [&](int delta) {
        const int lo = std::max(0, prev_loc - delta);
        const int hi = std::min(half - 1, prev_loc + delta);
        return lo <= hi ? find_peaks(s, lo, hi) : std::vector<std::pair<int, double>>{};
    };

    int cur_loc = prev_loc;
    const auto r1 = peaks_in(cfg_.delta1);
    if (!r1.empty()) {
        // Closest to prevLoc; on a distance tie, follow the local trend.
        int best = r1.front().first;
        int best_dist = std::abs(best - prev_loc);
        for (std::size_t k = 1; k < r1.size(); ++k) {
            const int dist = std::abs(r1[k].first - prev_loc);
            if (dist < best_dist) {
                best = r1[k].first;
                best_dist = dist;
            } else if (dist == best_dist && r1[k].first != best) {
                const double slope = trend_slope(cfg_.history_short, cfg_.smooth_small);
                const int lower = std::min(best, r1[k].first);
                const int higher = std::max(best, r1[k].first);
                best = slope > 0.0 ? higher : lower;
            }
        }
        cur_loc = best;
    } else {
        const auto r2 = peaks_in(cfg_.delta2);
        if (!r2.empty()) {
            cur_loc = r2.front().first;  // highest value
        }
        // else keep prevLoc
    }

    double cur_bpm = bin_to_bpm(cur_loc, fs_, grid_n_);
    if (std::abs(cur_bpm - prev_bpm) > cfg_.max_step_bpm) {
        cur_loc = prev_loc;
        cur_bpm = prev_bpm;
        d.reset_by_verification = true;
    }

    if (cur_loc == prev_loc) {
        ++state_.stall_count;
    } else {
        state_.stall_count = 0;
    }
    emit(d, cur_loc);
    if (state_.stall_count >= cfg_.stall_limit) state_.stage = Stage::Discovery;
    return d;
}

WindowDecision Tracker::step_discovery(const CleansedSpectrum& s) {
    WindowDecision d;
    d.stage_used = Stage::Discovery;
    d.discovery_triggered = true;
    const int half = grid_n_ / 2;

    const auto& h = state_.loc_history;
    int predict_loc = h.back();
    const int n = std::min<int>(cfg_.history_long, static_cast<int>(h.size()));
    if (n >= 2) {
        std::vector<double> tail(h.end() - n, h.end());
        predict_loc = static_cast<int>(std::lround(smooth_trend(tail, cfg_.smooth_large).next_prediction));
    }
    predict_loc = std::clamp(predict_loc, 0, half - 1);

    const int lo = std::max(0, predict_loc - cfg_.delta3);
    const int hi = std::min(half - 1, predict_loc + cfg_.delta3);
    const auto peaks = lo <= hi ? find_peaks(s, lo, hi) : std::vector<std::pair<int, double>>{};

    emit(d, peaks.empty() ? predict_loc : peaks.front().first);
    state_.stage = Stage::Tracking;
    state_.stall_count = 0;
    return d;
}

WindowDecision Tracker::step(const CleansedSpectrum& s) {
    switch (state_.stage) {
        case Stage::Init: return step_init(s);
        case Stage::Tracking: return step_tracking(s);
        case Stage::Discovery: return step_discovery(s);
    }
    throw std::logic_error("track: unreachable stage");
}

std::vector<WindowDecision> run_tracker(const std::vector<CleansedSpectrum>& spectra,
                                        const TrackerConfig& cfg, double fs, int grid_n) {
    Tracker tracker(cfg, fs, grid_n);
    std::vector<WindowDecision> out;
    out.reserve(spectra.size());
    for (const auto& s : spectra) out.push_back(tracker.step(s));
    return out;
}

}  // namespace joss

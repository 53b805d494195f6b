#pragma once

#include <optional>
#include <string>
#include <vector>

#include "joss/cleanse.hpp"

namespace joss {

struct TrackerConfig {
    int delta1 = 15;  // selection search half-width (bins)
    int delta2 = 25;  // fallback search half-width
    int delta3 = 30;  // discovery search half-width
    double kurtosis_threshold = 10.0;
    double init_band_low_hz = 0.8;
    double init_band_high_hz = 2.5;
    double max_step_bpm = 12.0;   // verification bound between successive windows
    int history_short = 10;       // H, points fed to the local trend
    int history_long = 30;        // K, points fed to the discovery trend
    double smooth_small = 5.0;    // trend smoothing in selection
    double smooth_large = 20.0;   // trend smoothing in discovery
    int stall_limit = 3;          // unchanged-output windows before discovery

    void validate() const;
};

enum class Stage { Init, Tracking, Discovery };

const char* stage_name(Stage s);

struct TrackerState {
    Stage stage = Stage::Init;
    std::vector<int> loc_history;     // chronological; back() is prevLoc
    std::vector<double> bpm_history;  // bin_to_bpm of loc_history
    int stall_count = 0;
};

struct WindowDecision {
    std::optional<double> bpm;
    std::optional<int> selected_bin;
    Stage stage_used = Stage::Init;
    bool reset_by_verification = false;
    bool discovery_triggered = false;
    bool no_output = false;

    std::string flags_string() const;
};

// Spectral peaks inside [lo_bin, hi_bin]: one per maximal contiguous nonzero
// run (the run's highest bin; ties take the lowest bin), sorted by value
// descending, at most 3.
std::vector<std::pair<int, double>> find_peaks(const CleansedSpectrum& s, int lo_bin, int hi_bin);

// Non-excess sample kurtosis of the coefficients in [band_low_hz, band_high_hz];
// 0 when the band variance is below 1e-15.
double spectral_kurtosis(const CleansedSpectrum& s, double band_low_hz, double band_high_hz,
                         double fs);

// Four-stage tracker over a stream of cleansed spectra. Sequential per
// recording; construct one per run.
class Tracker {
  public:
    Tracker(TrackerConfig cfg, double fs, int grid_n);

    WindowDecision step(const CleansedSpectrum& s);

    const TrackerState& state() const { return state_; }

  private:
    WindowDecision step_init(const CleansedSpectrum& s);
    WindowDecision step_tracking(const CleansedSpectrum& s);
    WindowDecision step_discovery(const CleansedSpectrum& s);
    void emit(WindowDecision& d, int bin);
    double trend_slope(int points, double smooth_param) const;

    TrackerConfig cfg_;
    double fs_;
    int grid_n_;
    TrackerState state_;
};

// Fold a tracker over a spectra sequence.
std::vector<WindowDecision> run_tracker(const std::vector<CleansedSpectrum>& spectra,
                                        const TrackerConfig& cfg, double fs, int grid_n);

}  // namespace joss

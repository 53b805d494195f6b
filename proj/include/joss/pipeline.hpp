#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "joss/cleanse.hpp"
#include "joss/ingest.hpp"
#include "joss/metrics.hpp"
#include "joss/preprocess.hpp"
#include "joss/spectrum.hpp"
#include "joss/track.hpp"

namespace joss {

struct RunConfig {
    PipelineConfig pipeline;
    SolverConfig solver;
    TrackerConfig tracker;
    int grid_n = 1024;
    double skip_seconds = 0.0;       // drop windows starting before this time
    bool pmax_passband_only = false; // restrict the cleansing p_max to the passband
    int threads = 0;                 // per-window solver parallelism; 0 = hardware

    void validate() const;
};

// Stable 16-hex-digit hash of the serialized config, stamped into reports.
std::string config_hash(const RunConfig& cfg);

struct WindowOutput {
    int window_index = 0;
    double t_start_s = 0.0;
    WindowDecision decision;
};

struct EvaluatedWindow {
    int window_index = 0;
    double bpm_est = 0.0;
    double bpm_true = 0.0;
};

struct RunResult {
    std::vector<WindowOutput> trace;
    std::vector<EvaluatedWindow> evaluated;  // windows that entered the report
    std::optional<EvaluationReport> report;  // present when ground truth was given
    std::string dataset_id;
};

// Full pipeline on one recording: windows -> joint spectra -> subtraction ->
// tracker; evaluated against truth entries aligned by absolute window index.
RunResult run_recording(const Recording& rec, const GroundTruthTrace* truth,
                        const RunConfig& cfg);

void write_trace_csv(const RunResult& result, const std::filesystem::path& path);
void write_report_json(const RunResult& result, const RunConfig& cfg,
                       const std::filesystem::path& path);
// Per-window errors of the evaluated windows, for plotting.
void write_errors_csv(const RunResult& result, const std::filesystem::path& path);

// Per-window comparison of the joint-recovery path against the per-channel
// periodogram path, both cleansed the same way. Channel spectra are kept so
// the dump can reproduce the per-channel versus cleansed spectrum figures.
struct BaselineWindow {
    int window_index = 0;
    double t_start_s = 0.0;
    int mmv_bin = -1;    // argmax of the cleansed joint spectrum, -1 if empty
    int pgram_bin = -1;
    std::vector<double> mmv_spectrum;    // cleansed, half grid
    std::vector<double> pgram_spectrum;  // cleansed, half grid
    Eigen::MatrixXd mmv_channels;        // half grid x 4, PPG first
    Eigen::MatrixXd pgram_channels;      // half grid x 4
};

std::vector<BaselineWindow> run_baseline(const Recording& rec, const RunConfig& cfg);

void write_baseline_csv(const std::vector<BaselineWindow>& rows, double fs, int grid_n,
                        const std::filesystem::path& peaks_path,
                        const std::filesystem::path* spectra_path);

struct ManifestEntry {
    std::filesystem::path recording;
    std::optional<std::filesystem::path> sidecar;  // default: recording with .json extension
    std::optional<std::filesystem::path> truth;
    double skip_seconds = 0.0;
};

std::vector<ManifestEntry> load_manifest(const std::filesystem::path& path);

struct BatchReport {
    std::vector<RunResult> datasets;
    EvaluationReport pooled;          // over all evaluated windows of all datasets
    double pooled_abs_error_sd = 0.0; // SD of pooled per-window absolute errors
    double dataset_mean_sd = 0.0;     // SD of per-dataset Error1 means
};

BatchReport run_batch(const std::vector<ManifestEntry>& entries, const RunConfig& cfg);

void write_batch_json(const BatchReport& report, const RunConfig& cfg,
                      const std::filesystem::path& path);

}  // namespace joss

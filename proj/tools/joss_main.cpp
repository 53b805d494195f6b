#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "json.hpp"

#include "joss/config_json.hpp"
#include "joss/pipeline.hpp"
#include "joss/synth.hpp"

namespace fs = std::filesystem;

namespace {

// Flag values land here at parse time; values the user actually set are then
// copied over the config-file values, so precedence is defaults < file < flags.
struct ConfigFlags {
    joss::RunConfig values;

    void attach(CLI::App* cmd) {
        cmd->add_option("--skip-seconds", values.skip_seconds,
                        "Drop windows starting before this time");
        cmd->add_option("--grid-n", values.grid_n, "Spectrum grid size");
        cmd->add_option("--threads", values.threads, "Solver threads (0 = hardware)");
        cmd->add_flag("--pmax-passband-only", values.pmax_passband_only,
                      "Restrict the cleansing p_max to the passband");
        cmd->add_option("--band-low", values.pipeline.band_low_hz, "Bandpass low edge (Hz)");
        cmd->add_option("--band-high", values.pipeline.band_high_hz, "Bandpass high edge (Hz)");
        cmd->add_option("--target-rate", values.pipeline.target_rate_hz, "Analysis rate (Hz)");
        cmd->add_option("--window-s", values.pipeline.window_s, "Window length (s)");
        cmd->add_option("--step-s", values.pipeline.step_s, "Window step (s)");
        cmd->add_flag("--zero-phase", values.pipeline.zero_phase, "Forward-backward filtering");
        cmd->add_option("--solver-p", values.solver.p, "Diversity norm p");
        cmd->add_option("--solver-lambda", values.solver.lambda, "Ridge regularization");
        cmd->add_option("--solver-max-iters", values.solver.max_iters,
                        "Reweighting iterations");
    }

    joss::RunConfig resolve(CLI::App* cmd, const std::optional<fs::path>& config_path) const {
        joss::RunConfig cfg;
        if (config_path) {
            std::ifstream in(*config_path);
            if (!in) throw std::runtime_error("cannot open config " + config_path->string());
            nlohmann::json j;
            in >> j;
            j.get_to(cfg);
        }
        auto set = [cmd](const char* name) { return cmd->count(name) > 0; };
        if (set("--skip-seconds")) cfg.skip_seconds = values.skip_seconds;
        if (set("--grid-n")) cfg.grid_n = values.grid_n;
        if (set("--threads")) cfg.threads = values.threads;
        if (set("--pmax-passband-only")) cfg.pmax_passband_only = values.pmax_passband_only;
        if (set("--band-low")) cfg.pipeline.band_low_hz = values.pipeline.band_low_hz;
        if (set("--band-high")) cfg.pipeline.band_high_hz = values.pipeline.band_high_hz;
        if (set("--target-rate")) cfg.pipeline.target_rate_hz = values.pipeline.target_rate_hz;
        if (set("--window-s")) cfg.pipeline.window_s = values.pipeline.window_s;
        if (set("--step-s")) cfg.pipeline.step_s = values.pipeline.step_s;
        if (set("--zero-phase")) cfg.pipeline.zero_phase = values.pipeline.zero_phase;
        if (set("--solver-p")) cfg.solver.p = values.solver.p;
        if (set("--solver-lambda")) cfg.solver.lambda = values.solver.lambda;
        if (set("--solver-max-iters")) cfg.solver.max_iters = values.solver.max_iters;
        return cfg;
    }
};

joss::Recording load_rec(const fs::path& recording, const std::optional<fs::path>& sidecar) {
    return joss::load_recording(recording,
                                sidecar ? *sidecar : joss::sidecar_path_for(recording));
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Heart-rate estimation from wrist PPG via joint sparse spectra"};
    app.require_subcommand(1);

    std::optional<fs::path> config_path;
    fs::path recording, trace_out, peaks_out, manifest, out_path;
    std::optional<fs::path> sidecar, truth, report_out, spectra_out, trace_dir;

    auto* run = app.add_subcommand("run", "Analyze one recording and write its BPM trace");
    run->add_option("--recording", recording, "Recording CSV")->required();
    run->add_option("--sidecar", sidecar, "Metadata JSON (default: recording with .json)");
    run->add_option("--truth", truth, "Ground-truth BPM CSV");
    run->add_option("--trace", trace_out, "Output trace CSV")->required();
    run->add_option("--report", report_out, "Output report JSON (needs --truth)");
    std::optional<fs::path> errors_out;
    run->add_option("--errors", errors_out, "Output per-window errors CSV (needs --truth)");
    run->add_option("--config", config_path, "Config JSON overriding defaults");
    ConfigFlags run_flags;
    run_flags.attach(run);

    auto* baseline = app.add_subcommand(
        "baseline", "Compare joint-recovery and periodogram spectra per window");
    baseline->add_option("--recording", recording, "Recording CSV")->required();
    baseline->add_option("--sidecar", sidecar, "Metadata JSON");
    baseline->add_option("--peaks", peaks_out, "Output peaks CSV")->required();
    baseline->add_option("--spectra", spectra_out, "Optional full spectra CSV");
    baseline->add_option("--config", config_path, "Config JSON overriding defaults");
    ConfigFlags baseline_flags;
    baseline_flags.attach(baseline);

    auto* batch = app.add_subcommand("batch", "Run a manifest of datasets and pool the metrics");
    batch->add_option("--manifest", manifest, "Manifest JSON")->required();
    batch->add_option("--out", out_path, "Aggregate report JSON")->required();
    batch->add_option("--trace-dir", trace_dir, "Directory for per-dataset trace CSVs");
    batch->add_option("--config", config_path, "Config JSON overriding defaults");
    ConfigFlags batch_flags;
    batch_flags.attach(batch);

    auto* synth = app.add_subcommand("synth", "Generate a synthetic recording with ground truth");
    std::string scenario = "treadmill";
    double bpm = 150.0, bpm_to = 180.0, duration = 0.0, noise = -1.0;
    std::uint64_t seed = 7;
    synth->add_option("--scenario", scenario, "constant | ramp | treadmill | ma-collision");
    synth->add_option("--bpm", bpm, "Heart rate (constant scenario, ramp start)");
    synth->add_option("--bpm-to", bpm_to, "Ramp end heart rate");
    synth->add_option("--duration", duration, "Override duration (s)");
    synth->add_option("--noise", noise, "Override noise sigma");
    synth->add_option("--seed", seed, "Noise seed");
    synth->add_option("--out", out_path, "Output recording CSV")->required();
    synth->add_option("--truth-out", truth, "Output ground-truth CSV");

    CLI11_PARSE(app, argc, argv);

    try {
        if (run->parsed()) {
            const auto cfg = run_flags.resolve(run, config_path);
            std::optional<joss::GroundTruthTrace> gt;
            if (truth) gt = joss::load_truth(*truth);
            const auto rec = load_rec(recording, sidecar);
            const auto result = joss::run_recording(rec, gt ? &*gt : nullptr, cfg);
            joss::write_trace_csv(result, trace_out);
            if (report_out) {
                if (!gt) throw std::runtime_error("--report needs --truth");
                joss::write_report_json(result, cfg, *report_out);
            }
            if (errors_out) {
                if (!gt) throw std::runtime_error("--errors needs --truth");
                joss::write_errors_csv(result, *errors_out);
            }
            if (result.report) {
                std::printf("%s: Error1 %.3f BPM, Error2 %.3f%%, %d windows\n",
                            result.dataset_id.c_str(), result.report->error1_bpm,
                            100.0 * result.report->error2_fraction,
                            result.report->window_count);
            }
        } else if (baseline->parsed()) {
            const auto cfg = baseline_flags.resolve(baseline, config_path);
            const auto rec = load_rec(recording, sidecar);
            const auto rows = joss::run_baseline(rec, cfg);
            joss::write_baseline_csv(rows, cfg.pipeline.target_rate_hz, cfg.grid_n, peaks_out,
                                     spectra_out ? &*spectra_out : nullptr);
        } else if (batch->parsed()) {
            const auto cfg = batch_flags.resolve(batch, config_path);
            const auto entries = joss::load_manifest(manifest);
            const auto report = joss::run_batch(entries, cfg);
            joss::write_batch_json(report, cfg, out_path);
            if (trace_dir) {
                fs::create_directories(*trace_dir);
                for (const auto& ds : report.datasets)
                    joss::write_trace_csv(ds, *trace_dir / (ds.dataset_id + "_trace.csv"));
            }
            for (const auto& ds : report.datasets) {
                if (ds.report)
                    std::printf("%s: Error1 %.3f BPM, Error2 %.3f%%\n", ds.dataset_id.c_str(),
                                ds.report->error1_bpm, 100.0 * ds.report->error2_fraction);
            }
            if (report.pooled.window_count > 0) {
                std::printf("pooled: Error1 %.3f BPM (SD %.3f), Error2 %.3f%%, r %.4f, "
                            "LOA [%.3f, %.3f]\n",
                            report.pooled.error1_bpm, report.pooled_abs_error_sd,
                            100.0 * report.pooled.error2_fraction, report.pooled.pearson_r,
                            report.pooled.loa_low, report.pooled.loa_high);
            }
        } else if (synth->parsed()) {
            joss::SynthSpec spec;
            if (scenario == "constant") {
                spec = joss::scenario_constant(bpm, duration > 0 ? duration : 60.0);
            } else if (scenario == "ramp") {
                spec = joss::scenario_ramp(bpm, bpm_to, duration > 0 ? duration : 240.0);
            } else if (scenario == "treadmill") {
                spec = joss::scenario_treadmill(seed);
                if (duration > 0) spec.duration_s = duration;
            } else if (scenario == "ma-collision") {
                spec = joss::scenario_ma_collision(duration > 0 ? duration : 64.0);
            } else {
                throw std::runtime_error("unknown scenario '" + scenario + "'");
            }
            if (noise >= 0.0) spec.noise_sigma = noise;
            spec.seed = seed;
            auto [rec, gt] = joss::generate(spec);
            rec.id = scenario;
            joss::save_recording(rec, out_path, joss::sidecar_path_for(out_path));
            if (truth) joss::save_truth(gt, *truth);
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}

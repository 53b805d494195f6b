#include "joss/pipeline.hpp"

#include <atomic>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <mutex>
#include <stdexcept>
#include <thread>

#include "joss/config_json.hpp"

namespace joss {
namespace {

std::pair<int, int> passband_bins(const PipelineConfig& p, double fs, int n) {
    return {static_cast<int>(std::ceil(p.band_low_hz * n / fs - 1e-9)),
            static_cast<int>(std::floor(p.band_high_hz * n / fs + 1e-9))};
}

// Solve + cleanse every window, optionally across threads; results land in
// window order regardless of scheduling.
std::vector<CleansedSpectrum> cleanse_windows(const std::vector<WindowBatch>& batches,
                                              const Dictionary& dict, const RunConfig& cfg) {
    std::optional<std::pair<int, int>> pmax_range;
    if (cfg.pmax_passband_only)
        pmax_range = passband_bins(cfg.pipeline, cfg.pipeline.target_rate_hz, cfg.grid_n);

    std::vector<CleansedSpectrum> cleansed(batches.size());
    unsigned workers = cfg.threads > 0 ? static_cast<unsigned>(cfg.threads)
                                       : std::max(1u, std::thread::hardware_concurrency());
    workers = std::min<unsigned>(workers, batches.size() ? batches.size() : 1);

    std::atomic<std::size_t> next{0};
    std::exception_ptr first_error;
    std::mutex error_mutex;
    auto work = [&] {
        for (;;) {
            const std::size_t i = next.fetch_add(1);
            if (i >= batches.size()) return;
            try {
                const auto spectra = solve_mmv(batches[i].Y, dict, cfg.solver);
                cleansed[i] = spectral_subtract(spectra.S, pmax_range);
            } catch (...) {
                std::lock_guard lock(error_mutex);
                if (!first_error) first_error = std::current_exception();
                return;
            }
        }
    };
    if (workers <= 1) {
        work();
    } else {
        std::vector<std::thread> pool;
        for (unsigned w = 0; w < workers; ++w) pool.emplace_back(work);
        for (auto& t : pool) t.join();
    }
    if (first_error) std::rethrow_exception(first_error);
    return cleansed;
}

std::vector<WindowBatch> windows_after_skip(const Recording& rec, const RunConfig& cfg) {
    auto batches = make_windows(rec, cfg.pipeline);
    if (cfg.skip_seconds > 0.0) {
        std::erase_if(batches, [&](const WindowBatch& b) {
            return b.t_start_s < cfg.skip_seconds - 1e-9;
        });
    }
    if (batches.empty()) throw std::runtime_error("pipeline: no windows left to analyze");
    return batches;
}

void format_double(std::string& out, double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.10g", v);
    out += buf;
}

std::uint64_t fnv1a(const std::string& s) {
    std::uint64_t h = 1469598103934665603ull;
    for (unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h;
}

nlohmann::json report_json(const EvaluationReport& r) {
    auto num = [](double v) {
        return std::isfinite(v) ? nlohmann::json(v) : nlohmann::json(nullptr);
    };
    return {{"error1_bpm", r.error1_bpm},
            {"error2_fraction", r.error2_fraction},
            {"loa", {r.loa_low, r.loa_high}},
            {"mu", r.mu},
            {"sigma", r.sigma},
            {"pearson_r", num(r.pearson_r)},
            {"fit_slope", num(r.fit_slope)},
            {"fit_intercept", num(r.fit_intercept)},
            {"r_squared", num(r.r_squared)},
            {"window_count", r.window_count},
            {"degenerate_variance", r.degenerate_variance}};
}

double population_sd(const std::vector<double>& v) {
    if (v.size() < 2) return 0.0;
    double m = 0.0;
    for (double x : v) m += x;
    m /= v.size();
    double s = 0.0;
    for (double x : v) s += (x - m) * (x - m);
    return std::sqrt(s / v.size());
}

}  // namespace

void RunConfig::validate() const {
    pipeline.validate();
    solver.validate();
    tracker.validate();
    if (grid_n < 8) throw std::invalid_argument("pipeline: grid_n too small");
    if (skip_seconds < 0.0) throw std::invalid_argument("pipeline: skip_seconds must be >= 0");
}

std::string config_hash(const RunConfig& cfg) {
    const nlohmann::json j = cfg;
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx",
                  static_cast<unsigned long long>(fnv1a(j.dump())));
    return buf;
}

RunResult run_recording(const Recording& rec, const GroundTruthTrace* truth,
                        const RunConfig& cfg) {
    cfg.validate();
    const auto batches = windows_after_skip(rec, cfg);
    const int m = static_cast<int>(batches.front().Y.rows());
    const auto dict = build_dictionary(m, cfg.grid_n);
    const auto cleansed = cleanse_windows(batches, dict, cfg);

    RunResult result;
    result.dataset_id = rec.id;
    Tracker tracker(cfg.tracker, cfg.pipeline.target_rate_hz, cfg.grid_n);
    for (std::size_t i = 0; i < batches.size(); ++i) {
        WindowOutput out;
        out.window_index = batches[i].window_index;
        out.t_start_s = batches[i].t_start_s;
        out.decision = tracker.step(cleansed[i]);
        result.trace.push_back(std::move(out));
    }

    if (truth) {
        std::vector<double> est, ref;
        for (const auto& w : result.trace) {
            if (!w.decision.bpm) continue;
            if (w.window_index >= static_cast<int>(truth->bpm_true.size())) {
                throw std::runtime_error("pipeline: ground truth has only " +
                                         std::to_string(truth->bpm_true.size()) +
                                         " windows, need index " +
                                         std::to_string(w.window_index));
            }
            est.push_back(*w.decision.bpm);
            ref.push_back(truth->bpm_true[w.window_index]);
            result.evaluated.push_back({w.window_index, est.back(), ref.back()});
        }
        result.report = evaluate(est, ref);
    }
    return result;
}

void write_trace_csv(const RunResult& result, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("pipeline: cannot write " + path.string());
    out << "window_index,t_start_s,bpm,stage,selected_bin,flags\n";
    for (const auto& w : result.trace) {
        std::string line = std::to_string(w.window_index);
        line += ',';
        format_double(line, w.t_start_s);
        line += ',';
        if (w.decision.bpm) format_double(line, *w.decision.bpm);
        line += ',';
        line += stage_name(w.decision.stage_used);
        line += ',';
        if (w.decision.selected_bin) line += std::to_string(*w.decision.selected_bin);
        line += ',';
        line += w.decision.flags_string();
        out << line << '\n';
    }
}

void write_report_json(const RunResult& result, const RunConfig& cfg,
                       const std::filesystem::path& path) {
    if (!result.report) throw std::runtime_error("pipeline: no report to write");
    nlohmann::json j = report_json(*result.report);
    j["abs_errors"] = result.report->abs_errors;
    j["dataset_id"] = result.dataset_id;
    j["config_hash"] = config_hash(cfg);
    std::ofstream out(path);
    if (!out) throw std::runtime_error("pipeline: cannot write " + path.string());
    out << j.dump(2) << "\n";
}

void write_errors_csv(const RunResult& result, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("pipeline: cannot write " + path.string());
    out << "window_index,bpm_est,bpm_true,abs_error\n";
    for (const auto& w : result.evaluated) {
        std::string line = std::to_string(w.window_index);
        line += ',';
        format_double(line, w.bpm_est);
        line += ',';
        format_double(line, w.bpm_true);
        line += ',';
        format_double(line, std::abs(w.bpm_est - w.bpm_true));
        out << line << '\n';
    }
}

std::vector<BaselineWindow> run_baseline(const Recording& rec, const RunConfig& cfg) {
    cfg.validate();
    const auto batches = windows_after_skip(rec, cfg);
    const int m = static_cast<int>(batches.front().Y.rows());
    const int n = cfg.grid_n;
    const int half = n / 2;
    const auto dict = build_dictionary(m, n);

    std::optional<std::pair<int, int>> pmax_range;
    if (cfg.pmax_passband_only)
        pmax_range = passband_bins(cfg.pipeline, cfg.pipeline.target_rate_hz, n);

    auto argmax_half = [half](const std::vector<double>& s) {
        int best = -1;
        double best_v = 0.0;
        for (int i = 0; i < half; ++i) {
            if (s[i] > best_v) {
                best_v = s[i];
                best = i;
            }
        }
        return best;
    };

    std::vector<BaselineWindow> rows;
    rows.reserve(batches.size());
    for (const auto& batch : batches) {
        BaselineWindow row;
        row.window_index = batch.window_index;
        row.t_start_s = batch.t_start_s;

        const auto mmv = solve_mmv(batch.Y, dict, cfg.solver);
        const auto mmv_cleansed = spectral_subtract(mmv.S, pmax_range);
        Eigen::MatrixXd pgram(n, 4);
        for (int c = 0; c < 4; ++c) {
            std::vector<double> col(batch.Y.col(c).data(), batch.Y.col(c).data() + m);
            const auto psd = periodogram(col, n);
            for (int k = 0; k < n; ++k) pgram(k, c) = psd[k];
        }
        const auto pgram_cleansed = spectral_subtract(pgram, pmax_range);

        row.mmv_bin = argmax_half(mmv_cleansed.s);
        row.pgram_bin = argmax_half(pgram_cleansed.s);
        row.mmv_spectrum.assign(mmv_cleansed.s.begin(), mmv_cleansed.s.begin() + half);
        row.pgram_spectrum.assign(pgram_cleansed.s.begin(), pgram_cleansed.s.begin() + half);
        row.mmv_channels = mmv.S.topRows(half);
        row.pgram_channels = pgram.topRows(half);
        rows.push_back(std::move(row));
    }
    return rows;
}

void write_baseline_csv(const std::vector<BaselineWindow>& rows, double fs, int grid_n,
                        const std::filesystem::path& peaks_path,
                        const std::filesystem::path* spectra_path) {
    std::ofstream out(peaks_path);
    if (!out) throw std::runtime_error("pipeline: cannot write " + peaks_path.string());
    out << "window_index,t_start_s,mmv_bin,mmv_bpm,pgram_bin,pgram_bpm\n";
    for (const auto& r : rows) {
        std::string line = std::to_string(r.window_index);
        line += ',';
        format_double(line, r.t_start_s);
        line += ',';
        line += std::to_string(r.mmv_bin);
        line += ',';
        if (r.mmv_bin >= 0) format_double(line, bin_to_bpm(r.mmv_bin, fs, grid_n));
        line += ',';
        line += std::to_string(r.pgram_bin);
        line += ',';
        if (r.pgram_bin >= 0) format_double(line, bin_to_bpm(r.pgram_bin, fs, grid_n));
        out << line << '\n';
    }
    if (spectra_path) {
        std::ofstream sp(*spectra_path);
        if (!sp) throw std::runtime_error("pipeline: cannot write " + spectra_path->string());
        sp << "window_index,bin,mmv_ppg,mmv_ax,mmv_ay,mmv_az,mmv_cleansed,"
              "pgram_ppg,pgram_ax,pgram_ay,pgram_az,pgram_cleansed\n";
        for (const auto& r : rows) {
            for (std::size_t k = 0; k < r.mmv_spectrum.size(); ++k) {
                std::string line = std::to_string(r.window_index);
                line += ',';
                line += std::to_string(k);
                for (int c = 0; c < 4; ++c) {
                    line += ',';
                    format_double(line, r.mmv_channels(k, c));
                }
                line += ',';
                format_double(line, r.mmv_spectrum[k]);
                for (int c = 0; c < 4; ++c) {
                    line += ',';
                    format_double(line, r.pgram_channels(k, c));
                }
                line += ',';
                format_double(line, r.pgram_spectrum[k]);
                sp << line << '\n';
            }
        }
    }
}

std::vector<ManifestEntry> load_manifest(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("pipeline: cannot open manifest " + path.string());
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw std::runtime_error("pipeline: manifest " + path.string() + ": " + e.what());
    }
    const nlohmann::json& list = j.is_array() ? j : j.at("datasets");
    if (!list.is_array() || list.empty())
        throw std::runtime_error("pipeline: manifest needs a nonempty dataset list");

    const auto base = path.parent_path();
    auto resolve = [&base](const std::string& p) {
        std::filesystem::path fp(p);
        return fp.is_absolute() ? fp : base / fp;
    };

    std::vector<ManifestEntry> entries;
    for (const auto& item : list) {
        ManifestEntry e;
        e.recording = resolve(item.at("recording").get<std::string>());
        if (item.contains("sidecar")) e.sidecar = resolve(item.at("sidecar").get<std::string>());
        if (item.contains("truth")) e.truth = resolve(item.at("truth").get<std::string>());
        e.skip_seconds = item.value("skip_seconds", 0.0);
        entries.push_back(std::move(e));
    }
    return entries;
}

BatchReport run_batch(const std::vector<ManifestEntry>& entries, const RunConfig& cfg) {
    if (entries.empty()) throw std::invalid_argument("pipeline: empty batch");
    BatchReport report;
    std::vector<double> pooled_est, pooled_truth, dataset_means;

    for (const auto& entry : entries) {
        try {
            RunConfig per_run = cfg;
            per_run.skip_seconds = entry.skip_seconds;

            const auto sidecar =
                entry.sidecar ? *entry.sidecar : sidecar_path_for(entry.recording);
            Recording rec = load_recording(entry.recording, sidecar);
            std::optional<GroundTruthTrace> truth;
            if (entry.truth) truth = load_truth(*entry.truth);

            auto result = run_recording(rec, truth ? &*truth : nullptr, per_run);
            if (result.report) {
                dataset_means.push_back(result.report->error1_bpm);
                for (const auto& w : result.evaluated) {
                    pooled_est.push_back(w.bpm_est);
                    pooled_truth.push_back(w.bpm_true);
                }
            }
            report.datasets.push_back(std::move(result));
        } catch (const std::exception& e) {
            throw std::runtime_error("pipeline: dataset '" + entry.recording.string() +
                                     "': " + e.what());
        }
    }

    if (pooled_est.size() >= 2) {
        report.pooled = evaluate(pooled_est, pooled_truth);
        report.pooled_abs_error_sd = population_sd(report.pooled.abs_errors);
        report.dataset_mean_sd = population_sd(dataset_means);
    }
    return report;
}

void write_batch_json(const BatchReport& report, const RunConfig& cfg,
                      const std::filesystem::path& path) {
    nlohmann::json j;
    j["config_hash"] = config_hash(cfg);
    j["datasets"] = nlohmann::json::array();
    for (const auto& ds : report.datasets) {
        nlohmann::json d;
        d["dataset_id"] = ds.dataset_id;
        if (ds.report) d["report"] = report_json(*ds.report);
        j["datasets"].push_back(std::move(d));
    }
    if (report.pooled.window_count > 0) {
        j["pooled"] = report_json(report.pooled);
        j["pooled"]["abs_error_sd_per_window"] = report.pooled_abs_error_sd;
        j["pooled"]["error1_sd_across_datasets"] = report.dataset_mean_sd;
    }
    std::ofstream out(path);
    if (!out) throw std::runtime_error("pipeline: cannot write " + path.string());
    out << j.dump(2) << "\n";
}

}  // namespace joss

#include "joss/config_json.hpp"

namespace joss {

void to_json(nlohmann::json& j, const PipelineConfig& c) {
    j = {{"band_low_hz", c.band_low_hz},   {"band_high_hz", c.band_high_hz},
         {"filter_order", c.filter_order}, {"target_rate_hz", c.target_rate_hz},
         {"window_s", c.window_s},         {"step_s", c.step_s},
         {"zero_phase", c.zero_phase}};
}

void from_json(const nlohmann::json& j, PipelineConfig& c) {
    c.band_low_hz = j.value("band_low_hz", c.band_low_hz);
    c.band_high_hz = j.value("band_high_hz", c.band_high_hz);
    c.filter_order = j.value("filter_order", c.filter_order);
    c.target_rate_hz = j.value("target_rate_hz", c.target_rate_hz);
    c.window_s = j.value("window_s", c.window_s);
    c.step_s = j.value("step_s", c.step_s);
    c.zero_phase = j.value("zero_phase", c.zero_phase);
}

void to_json(nlohmann::json& j, const SolverConfig& c) {
    j = {{"p", c.p},
         {"lambda", c.lambda},
         {"max_iters", c.max_iters},
         {"prune_tol", c.prune_tol},
         {"conv_tol", c.conv_tol}};
}

void from_json(const nlohmann::json& j, SolverConfig& c) {
    c.p = j.value("p", c.p);
    c.lambda = j.value("lambda", c.lambda);
    c.max_iters = j.value("max_iters", c.max_iters);
    c.prune_tol = j.value("prune_tol", c.prune_tol);
    c.conv_tol = j.value("conv_tol", c.conv_tol);
}

void to_json(nlohmann::json& j, const TrackerConfig& c) {
    j = {{"delta1", c.delta1},
         {"delta2", c.delta2},
         {"delta3", c.delta3},
         {"kurtosis_threshold", c.kurtosis_threshold},
         {"init_band_low_hz", c.init_band_low_hz},
         {"init_band_high_hz", c.init_band_high_hz},
         {"max_step_bpm", c.max_step_bpm},
         {"history_short", c.history_short},
         {"history_long", c.history_long},
         {"smooth_small", c.smooth_small},
         {"smooth_large", c.smooth_large},
         {"stall_limit", c.stall_limit}};
}

void from_json(const nlohmann::json& j, TrackerConfig& c) {
    c.delta1 = j.value("delta1", c.delta1);
    c.delta2 = j.value("delta2", c.delta2);
    c.delta3 = j.value("delta3", c.delta3);
    c.kurtosis_threshold = j.value("kurtosis_threshold", c.kurtosis_threshold);
    c.init_band_low_hz = j.value("init_band_low_hz", c.init_band_low_hz);
    c.init_band_high_hz = j.value("init_band_high_hz", c.init_band_high_hz);
    c.max_step_bpm = j.value("max_step_bpm", c.max_step_bpm);
    c.history_short = j.value("history_short", c.history_short);
    c.history_long = j.value("history_long", c.history_long);
    c.smooth_small = j.value("smooth_small", c.smooth_small);
    c.smooth_large = j.value("smooth_large", c.smooth_large);
    c.stall_limit = j.value("stall_limit", c.stall_limit);
}

void to_json(nlohmann::json& j, const RunConfig& c) {
    j = {{"pipeline", c.pipeline},
         {"solver", c.solver},
         {"tracker", c.tracker},
         {"grid_n", c.grid_n},
         {"skip_seconds", c.skip_seconds},
         {"pmax_passband_only", c.pmax_passband_only},
         {"threads", c.threads}};
}

void from_json(const nlohmann::json& j, RunConfig& c) {
    if (j.contains("pipeline")) j.at("pipeline").get_to(c.pipeline);
    if (j.contains("solver")) j.at("solver").get_to(c.solver);
    if (j.contains("tracker")) j.at("tracker").get_to(c.tracker);
    c.grid_n = j.value("grid_n", c.grid_n);
    c.skip_seconds = j.value("skip_seconds", c.skip_seconds);
    c.pmax_passband_only = j.value("pmax_passband_only", c.pmax_passband_only);
    c.threads = j.value("threads", c.threads);
}

}  // namespace joss

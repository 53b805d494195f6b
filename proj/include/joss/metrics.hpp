#pragma once

#include <utility>
#include <vector>

namespace joss {

struct BlandAltman {
    std::vector<std::pair<double, double>> points;  // (pairwise mean, est - truth)
    double mu = 0.0;
    double sigma = 0.0;  // population convention
    double loa_low = 0.0;
    double loa_high = 0.0;
};

// sigma follows the population (divide-by-W) convention by default;
// sample_sigma switches to the divide-by-(W-1) convention.
BlandAltman bland_altman(const std::vector<double>& est, const std::vector<double>& truth,
                         bool sample_sigma = false);

struct EvaluationReport {
    double error1_bpm = 0.0;       // mean absolute error
    double error2_fraction = 0.0;  // mean |est - truth| / truth
    std::vector<double> abs_errors;
    double loa_low = 0.0;
    double loa_high = 0.0;
    double mu = 0.0;
    double sigma = 0.0;
    double pearson_r = 0.0;
    double fit_slope = 0.0;      // least-squares est on truth
    double fit_intercept = 0.0;
    double r_squared = 0.0;
    int window_count = 0;
    // Pearson/fit need variance in both inputs; when either is constant those
    // fields are NaN and this flag is set instead of failing the whole report.
    bool degenerate_variance = false;
};

// est and truth must be the same length, at least 2 windows; windows without
// an estimate are expected to be dropped pairwise by the caller.
EvaluationReport evaluate(const std::vector<double>& est, const std::vector<double>& truth,
                          bool sample_sigma = false);

}  // namespace joss

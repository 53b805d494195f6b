#pragma once

#include <Eigen/Dense>
#include <vector>

namespace joss {

// Redundant DFT dictionary, Phi[m][n] = exp(j 2 pi m n / N), M < N.
// The Gram matrix Phi Phi^H is cached so repeated solves against the same
// dictionary pay the initial-solution cost once.
struct Dictionary {
    Eigen::MatrixXcd Phi;   // M x N
    Eigen::MatrixXcd gram;  // M x M, Phi * Phi^H
    int M = 0;
    int N = 0;
};

Dictionary build_dictionary(int M, int N);

struct SolverConfig {
    double p = 0.8;           // diversity norm in (0, 1]
    double lambda = 1e-10;    // ridge regularization
    int max_iters = 4;        // reweighting iterations after the minimum-norm start
    double prune_tol = 1e-4;  // rows below prune_tol * max row norm are dropped
    double conv_tol = 1e-6;   // relative solution change that stops early

    void validate() const;
};

// Jointly estimated spectra: X is the row-sparse solution matrix, S = |X|^2
// elementwise.
struct SpectrumSet {
    Eigen::MatrixXd S;   // N x L, nonnegative
    Eigen::MatrixXcd X;  // N x L
};

// Regularized M-FOCUSS. Row norms c_i of the previous solution give weights
// w_i = c_i^(1 - p/2); each pass solves the weighted ridge system
// X = W Phi^H (Phi W^2 Phi^H + lambda I)^{-1} Y restricted to the unpruned
// rows. L = 1 degenerates to the single-measurement-vector model.
SpectrumSet solve_mmv(const Eigen::MatrixXcd& Y, const Dictionary& dict,
                      const SolverConfig& cfg);
SpectrumSet solve_mmv(const Eigen::MatrixXd& Y, const Dictionary& dict, const SolverConfig& cfg);

// Squared magnitude of the N-point DFT of the zero-padded sequence, over M.
std::vector<double> periodogram(const std::vector<double>& y, int N);

// 60 * k * fs / N; k must lie in [0, N/2).
double bin_to_bpm(int k, double fs, int N);

// Nearest grid bin for a BPM value (test and tooling helper).
int bpm_to_nearest_bin(double bpm, double fs, int N);

}  // namespace joss

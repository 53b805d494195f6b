#include "joss/spectrum.hpp"

#include <cmath>
#include <complex>
#include <numbers>
#include <stdexcept>

namespace joss {
namespace {

using cd = std::complex<double>;

// exp(j 2 pi r / N) with the integer phase reduced mod N first, keeping the
// argument small for every m*n product.
cd unit_root(long r, int N) {
    const long q = ((r % N) + N) % N;
    const double ang = 2.0 * std::numbers::pi * static_cast<double>(q) / static_cast<double>(N);
    return {std::cos(ang), std::sin(ang)};
}

}  // namespace

Dictionary build_dictionary(int M, int N) {
    if (!(M > 0 && M < N)) throw std::invalid_argument("spectrum: need 0 < M < N");
    Dictionary dict;
    dict.M = M;
    dict.N = N;
    dict.Phi.resize(M, N);
    for (int m = 0; m < M; ++m)
        for (int n = 0; n < N; ++n)
            dict.Phi(m, n) = unit_root(static_cast<long>(m) * n, N);
    dict.gram = dict.Phi * dict.Phi.adjoint();
    return dict;
}

void SolverConfig::validate() const {
    if (!(p > 0.0 && p <= 1.0)) throw std::invalid_argument("spectrum: p must be in (0, 1]");
    if (lambda < 0.0) throw std::invalid_argument("spectrum: lambda must be >= 0");
    if (max_iters < 1) throw std::invalid_argument("spectrum: max_iters must be >= 1");
    if (prune_tol < 0.0 || conv_tol < 0.0)
        throw std::invalid_argument("spectrum: tolerances must be >= 0");
}

SpectrumSet solve_mmv(const Eigen::MatrixXcd& Y, const Dictionary& dict,
                      const SolverConfig& cfg) {
    cfg.validate();
    const int M = dict.M, N = dict.N;
    const auto L = static_cast<int>(Y.cols());
    if (Y.rows() != M) throw std::invalid_argument("spectrum: Y row count != dictionary M");
    if (L < 1) throw std::invalid_argument("spectrum: Y needs at least one column");

    SpectrumSet out;
    out.X = Eigen::MatrixXcd::Zero(N, L);
    out.S = Eigen::MatrixXd::Zero(N, L);
    if (Y.norm() == 0.0) return out;  // zero fixed point

    auto check_finite = [](const Eigen::MatrixXcd& A) {
        if (!A.allFinite())
            throw std::runtime_error("spectrum: inner system numerically singular");
    };

    // Minimum-norm start over the full grid, via the cached Gram matrix.
    Eigen::MatrixXcd reg = dict.gram;
    reg.diagonal().array() += cfg.lambda;
    Eigen::LDLT<Eigen::MatrixXcd> ldlt(reg);
    if (ldlt.info() != Eigen::Success)
        throw std::runtime_error("spectrum: inner system numerically singular");
    Eigen::MatrixXcd X = dict.Phi.adjoint() * ldlt.solve(Y);
    check_finite(X);

    // Active rows and their indices into the full grid.
    std::vector<int> active(N);
    for (int n = 0; n < N; ++n) active[n] = n;
    Eigen::MatrixXcd phi_active = dict.Phi;

    const double initial_max_norm = X.rowwise().norm().maxCoeff();
    Eigen::MatrixXcd last_good;
    std::vector<int> last_good_active;

    for (int iter = 0; iter < cfg.max_iters; ++iter) {
        Eigen::VectorXd row_norms = X.rowwise().norm();
        const double max_norm = row_norms.maxCoeff();
        if (max_norm == 0.0) break;
        // Reweighted ridge steps can run away on very coherent dictionaries
        // once the active set loses rank (the weights feed back on
        // themselves). Stop at the last well-scaled iterate.
        if (iter > 0 && max_norm > 1e6 * initial_max_norm) {
            X = std::move(last_good);
            active = std::move(last_good_active);
            break;
        }
        last_good = X;
        last_good_active = active;

        // Prune rows below the relative floor, shrinking the working set.
        const double floor = cfg.prune_tol * max_norm;
        std::vector<int> keep;
        keep.reserve(active.size());
        for (int i = 0; i < row_norms.size(); ++i)
            if (row_norms[i] >= floor) keep.push_back(i);
        if (keep.empty()) break;
        if (keep.size() != active.size()) {
            Eigen::MatrixXcd phi_next(M, keep.size());
            Eigen::MatrixXcd x_next(keep.size(), L);
            Eigen::VectorXd norms_next(keep.size());
            std::vector<int> active_next(keep.size());
            for (std::size_t k = 0; k < keep.size(); ++k) {
                phi_next.col(k) = phi_active.col(keep[k]);
                x_next.row(k) = X.row(keep[k]);
                norms_next[k] = row_norms[keep[k]];
                active_next[k] = active[keep[k]];
            }
            phi_active = std::move(phi_next);
            X = std::move(x_next);
            row_norms = std::move(norms_next);
            active = std::move(active_next);
        }

        // FOCUSS reweighting: w_i = c_i^(1 - p/2).
        Eigen::VectorXd w = row_norms.array().pow(1.0 - cfg.p / 2.0);
        Eigen::MatrixXcd A = phi_active * w.asDiagonal();
        const auto k = static_cast<int>(A.cols());
        Eigen::MatrixXcd X_new;
        bool solved = false;
        if (k <= M) {
            // Few active rows: the K x K normal system is the well-conditioned
            // form of the same regularized solution.
            Eigen::MatrixXcd B = A.adjoint() * A;
            B.diagonal().array() += cfg.lambda;
            Eigen::LDLT<Eigen::MatrixXcd> inner(B);
            if (inner.info() == Eigen::Success) {
                X_new = w.asDiagonal() * inner.solve(A.adjoint() * Y);
                solved = X_new.allFinite();
            }
        } else {
            Eigen::MatrixXcd G = A * A.adjoint();
            G.diagonal().array() += cfg.lambda;
            Eigen::LDLT<Eigen::MatrixXcd> inner(G);
            if (inner.info() == Eigen::Success) {
                X_new = w.asDiagonal() * (A.adjoint() * inner.solve(Y));
                solved = X_new.allFinite();
            }
        }
        if (!solved) {
            // A valid earlier iterate exists (saved above); stop there rather
            // than fabricating extra regularization.
            X = std::move(last_good);
            active = std::move(last_good_active);
            break;
        }

        const double change = (X_new - X).norm();
        const double scale = X.norm();
        X = std::move(X_new);
        if (scale > 0.0 && change / scale < cfg.conv_tol) break;
    }

    // Final relative prune, then scatter back onto the full grid.
    Eigen::VectorXd row_norms = X.rowwise().norm();
    const double max_norm = row_norms.maxCoeff();
    for (std::size_t k = 0; k < active.size(); ++k) {
        if (max_norm > 0.0 && row_norms[k] < cfg.prune_tol * max_norm) continue;
        out.X.row(active[k]) = X.row(k);
    }
    out.S = out.X.cwiseAbs2();
    return out;
}

SpectrumSet solve_mmv(const Eigen::MatrixXd& Y, const Dictionary& dict, const SolverConfig& cfg) {
    return solve_mmv(Eigen::MatrixXcd(Y.cast<cd>()), dict, cfg);
}

std::vector<double> periodogram(const std::vector<double>& y, int N) {
    const auto M = static_cast<int>(y.size());
    if (M == 0) throw std::invalid_argument("spectrum: empty periodogram input");
    if (M > N) throw std::invalid_argument("spectrum: periodogram needs M <= N");

    // Table of e^{-j 2 pi r / N}; the DFT sum indexes it by (m k) mod N.
    std::vector<cd> roots(N);
    for (int r = 0; r < N; ++r) roots[r] = std::conj(unit_root(r, N));

    std::vector<double> psd(N);
    for (int k = 0; k < N; ++k) {
        cd acc = 0.0;
        int idx = 0;
        for (int m = 0; m < M; ++m) {
            acc += y[m] * roots[idx];
            idx += k;
            if (idx >= N) idx -= N;
        }
        psd[k] = std::norm(acc) / M;
    }
    return psd;
}

double bin_to_bpm(int k, double fs, int N) {
    if (k < 0 || 2 * k >= N) throw std::invalid_argument("spectrum: bin outside half spectrum");
    return 60.0 * k * fs / N;
}

int bpm_to_nearest_bin(double bpm, double fs, int N) {
    return static_cast<int>(std::lround(bpm / 60.0 * N / fs));
}

}  // namespace joss

#pragma once

#include <array>
#include <cmath>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "dlmvar/covariance.hpp"
#include "dlmvar/errors.hpp"
#include "dlmvar/model.hpp"
#include "dlmvar/moment_oracle.hpp"

namespace dlmvar {

inline constexpr double kDefaultRelTol = 1e-10;

struct PseudoInverse {
    Eigen::MatrixXd inverse;
    int rank = 0;
    double min_eigenvalue = 0.0;
    double max_abs_eigenvalue = 0.0;
};

/// Moore-Penrose inverse of a symmetric matrix via its spectral decomposition
/// (for symmetric input the singular values are the absolute eigenvalues).
/// Eigenvalues with |lambda| below rel_tol * max|lambda| are treated as zero.
inline PseudoInverse pseudo_inverse(const Eigen::MatrixXd& m, double rel_tol = kDefaultRelTol) {
    if (m.rows() != m.cols()) throw numeric_error("pseudo_inverse: matrix must be square");
    const double scale = m.cwiseAbs().maxCoeff();
    if (scale > 0.0) {
        const double asym = (m - m.transpose()).cwiseAbs().maxCoeff();
        if (asym > 1e-10 * scale)
            throw numeric_error("pseudo_inverse: matrix is not symmetric (max asymmetry " +
                                std::to_string(asym / scale) + " relative)");
    }

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(0.5 * (m + m.transpose()));
    if (solver.info() != Eigen::Success)
        throw numeric_error("pseudo_inverse: eigendecomposition failed");
    const Eigen::VectorXd& lambda = solver.eigenvalues();
    const Eigen::MatrixXd& q = solver.eigenvectors();

    PseudoInverse out;
    out.min_eigenvalue = lambda.minCoeff();
    out.max_abs_eigenvalue = lambda.cwiseAbs().maxCoeff();
    const double cutoff = rel_tol * out.max_abs_eigenvalue;

    Eigen::VectorXd inv_lambda = Eigen::VectorXd::Zero(lambda.size());
    for (Eigen::Index i = 0; i < lambda.size(); ++i) {
        if (std::abs(lambda(i)) > cutoff && lambda(i) != 0.0) {
            inv_lambda(i) = 1.0 / lambda(i);
            ++out.rank;
        }
    }
    out.inverse = q * inv_lambda.asDiagonal() * q.transpose();
    return out;
}

/// Relative residuals of the four Penrose conditions for a candidate
/// pseudo-inverse X of A: AXA=A, XAX=X, (AX)'=AX, (XA)'=XA.
inline std::array<double, 4> penrose_residuals(const Eigen::MatrixXd& a,
                                               const Eigen::MatrixXd& x) {
    const Eigen::MatrixXd ax = a * x;
    const Eigen::MatrixXd xa = x * a;
    auto rel = [](double num, double den) { return den > 0.0 ? num / den : num; };
    return {rel((ax * a - a).norm(), a.norm()), rel((xa * x - x).norm(), x.norm()),
            rel((ax.transpose() - ax).norm(), ax.norm()),
            rel((xa.transpose() - xa).norm(), xa.norm())};
}

struct AdjustmentResult {
    int N = 0;
    Eigen::Vector3d adjusted_mean;
    Eigen::Matrix3d adjusted_var;
    Eigen::Vector3d resolution;
    Eigen::Vector3d diagnostics;
    int rank_used = 0;
    double min_var_D_eigenvalue = 0.0;
    bool negative_mean_warning = false;
};

namespace detail {

struct AdjustCore {
    Eigen::VectorXd adjusted_mean;
    Eigen::MatrixXd adjusted_var;
    int rank = 0;
    double min_eigenvalue = 0.0;
};

/// adjusted mean  = E[X] + Cov(X,D) Var(D)^+ (d - E[D])
/// adjusted var   = Var(X) - Cov(X,D) Var(D)^+ Cov(D,X)
inline AdjustCore adjust_core(const Eigen::VectorXd& mean_x, const Eigen::MatrixXd& var_x,
                              const Eigen::MatrixXd& cov_x_d, const Eigen::VectorXd& mean_d,
                              const Eigen::MatrixXd& var_d, const Eigen::VectorXd& d,
                              double rel_tol) {
    if (cov_x_d.rows() != mean_x.size() || cov_x_d.cols() != mean_d.size() ||
        var_d.rows() != mean_d.size() || d.size() != mean_d.size() ||
        var_x.rows() != mean_x.size() || var_x.cols() != mean_x.size())
        throw numeric_error("adjustment: dimension mismatch");
    const PseudoInverse pinv = pseudo_inverse(var_d, rel_tol);
    const Eigen::MatrixXd projector = cov_x_d * pinv.inverse;
    AdjustCore out;
    out.adjusted_mean = mean_x + projector * (d - mean_d);
    Eigen::MatrixXd v = var_x - projector * cov_x_d.transpose();
    out.adjusted_var = 0.5 * (v + v.transpose());
    out.rank = pinv.rank;
    out.min_eigenvalue = pinv.min_eigenvalue;
    return out;
}

}  // namespace detail

/// Bayes linear adjustment of the variance vector V by the stacked quadratic
/// observables. Negative adjusted expectations are reported as-is (flagged,
/// never truncated).
inline AdjustmentResult adjust_variances(const PriorStructure& prior, const QuadraticVector& d_obs,
                                         double rel_tol = kDefaultRelTol) {
    if (d_obs.N != prior.N || static_cast<int>(d_obs.d.size()) != prior.mean_D.size())
        throw numeric_error("adjust_variances: prior structure is for N=" +
                            std::to_string(prior.N) + " but observed vector has N=" +
                            std::to_string(d_obs.N));
    const Eigen::Map<const Eigen::VectorXd> d(d_obs.d.data(),
                                              static_cast<Eigen::Index>(d_obs.d.size()));
    const auto core = detail::adjust_core(prior.mean_V, prior.var_V, prior.cov_V_D, prior.mean_D,
                                          prior.var_D, d, rel_tol);
    AdjustmentResult out;
    out.N = prior.N;
    out.adjusted_mean = core.adjusted_mean;
    out.adjusted_var = core.adjusted_var;
    out.rank_used = core.rank;
    out.min_var_D_eigenvalue = core.min_eigenvalue;
    for (int i = 0; i < 3; ++i) {
        const double prior_var = prior.var_V(i, i);
        const double resolved = prior_var - out.adjusted_var(i, i);
        out.resolution(i) = prior_var > 0.0 ? 1.0 - out.adjusted_var(i, i) / prior_var : 0.0;
        // Standardized revision; |.| > 2 is the conventional warning level.
        out.diagnostics(i) = resolved > 0.0
                                 ? (out.adjusted_mean(i) - prior.mean_V(i)) / std::sqrt(resolved)
                                 : 0.0;
        if (out.adjusted_mean(i) <= 0.0) out.negative_mean_warning = true;
    }
    return out;
}

/// One full adjustment per N in the grid, each using observations 1..N only.
inline std::vector<AdjustmentResult> sequential_adjustments(const PriorSpec& spec,
                                                            const ObservedSeries& series,
                                                            const std::vector<int>& n_grid,
                                                            double rel_tol = kDefaultRelTol) {
    if (n_grid.empty()) throw config_error("N grid must not be empty");
    int prev = 0;
    for (int n : n_grid) {
        if (n < kMinSeriesLength || n > series.length())
            throw config_error("N grid entries must satisfy 5 <= N <= T");
        if (n <= prev) throw config_error("N grid must be strictly increasing");
        prev = n;
    }
    const DifferencedSeries diff = difference_series(series);
    std::vector<AdjustmentResult> out;
    out.reserve(n_grid.size());
    for (int n : n_grid) {
        const PriorStructure prior = build_prior_structure(spec, n);
        const QuadraticVector d = build_quadratic_vector(diff, n);
        out.push_back(adjust_variances(prior, d, rel_tol));
    }
    return out;
}

struct UnbiasedEstimates {
    Eigen::Vector3d estimates;                  // running means at t = N
    std::vector<std::array<double, 4>> running; // rows (t, v1_hat, v2_hat, v3_hat)
};

/// Frequentist unbiased estimators: for each t >= 5, apply the inverse
/// identification combinations to (x1_t^2, x2_t^2, x3_t^2) and average.
inline UnbiasedEstimates unbiased_estimates(const DifferencedSeries& diff, int N) {
    if (N < kMinSeriesLength || N > diff.T)
        throw data_error("unbiased_estimates: N must satisfy 5 <= N <= T");
    double w[3][3];
    const auto inv = inverse_identification_matrix();
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) w[i][j] = to_double(inv[i][j]);

    UnbiasedEstimates out;
    Eigen::Vector3d sum = Eigen::Vector3d::Zero();
    out.running.reserve(static_cast<std::size_t>(N - 4));
    for (int t = 5; t <= N; ++t) {
        const double q1 = diff.x1_at(t) * diff.x1_at(t);
        const double q2 = diff.x2_at(t) * diff.x2_at(t);
        const double q3 = diff.x3_at(t) * diff.x3_at(t);
        for (int i = 0; i < 3; ++i) sum(i) += w[i][0] * q1 + w[i][1] * q2 + w[i][2] * q3;
        const double count = static_cast<double>(t - 4);
        out.running.push_back({static_cast<double>(t), sum(0) / count, sum(1) / count,
                               sum(2) / count});
    }
    out.estimates = sum / static_cast<double>(N - 4);
    return out;
}

}  // namespace dlmvar

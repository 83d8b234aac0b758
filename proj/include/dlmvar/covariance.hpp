#pragma once

#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "dlmvar/cov_table.hpp"
#include "dlmvar/errors.hpp"
#include "dlmvar/model.hpp"
#include "dlmvar/moment_oracle.hpp"

namespace dlmvar {

/// Prior first- and second-order structure over (V, D) for a series of
/// length N: E[D], Var(D), Cov(V, D) and the prior moments of V.
struct PriorStructure {
    int N = 0;
    Eigen::VectorXd mean_D;
    Eigen::MatrixXd var_D;
    Eigen::MatrixXd cov_V_D;  // 3 x (3N-9)
    Eigen::Vector3d mean_V;
    Eigen::Matrix3d var_V;    // diagonal by assumption
};

/// Assembles the prior structure from the covariance case table. Each matrix
/// entry is keyed by (series pair, signed lag); the numeric value of each
/// case is evaluated once and reused.
inline PriorStructure build_prior_structure(const PriorSpec& spec, int N) {
    spec.validate(false);
    if (N < kMinSeriesLength)
        throw data_error("N must be >= " + std::to_string(kMinSeriesLength));

    const int M = quad_size(N);
    PriorStructure out;
    out.N = N;
    out.mean_D.resize(M);
    out.var_D.resize(M, M);
    out.cov_V_D.resize(3, M);
    out.mean_V = Eigen::Vector3d(spec.mean_V[0], spec.mean_V[1], spec.mean_V[2]);
    out.var_V = Eigen::Vector3d(spec.var_V[0], spec.var_V[1], spec.var_V[2]).asDiagonal();

    // Identification coefficients: mean_D and Cov(V, D) share the same rows.
    double id[3][3];
    const auto id_rational = identification_matrix();
    for (int a = 0; a < 3; ++a)
        for (int j = 0; j < 3; ++j) id[a][j] = to_double(id_rational[a][j]);

    std::vector<std::pair<int, int>> coord(static_cast<std::size_t>(M));
    for (int k = 0; k < M; ++k) coord[static_cast<std::size_t>(k)] = quad_decode(N, k);

    for (int k = 0; k < M; ++k) {
        const int a = coord[static_cast<std::size_t>(k)].first;
        out.mean_D(k) = id[a - 1][0] * spec.mean_V[0] + id[a - 1][1] * spec.mean_V[1] +
                        id[a - 1][2] * spec.mean_V[2];
        for (int i = 0; i < 3; ++i) out.cov_V_D(i, k) = id[a - 1][i] * spec.var_V[i];
    }

    const auto& table = covariance_table();
    std::vector<double> case_value(table.size(), 0.0);
    std::vector<bool> case_known(table.size(), false);
    for (int k = 0; k < M; ++k) {
        const auto [a, t] = coord[static_cast<std::size_t>(k)];
        for (int l = k; l < M; ++l) {
            const auto [b, u] = coord[static_cast<std::size_t>(l)];
            const CovCase& c = find_cov_case(table, a, t, b, u);
            const auto idx = static_cast<std::size_t>(&c - table.data());
            if (!case_known[idx]) {
                case_value[idx] = evaluate(c.value, spec);
                case_known[idx] = true;
            }
            out.var_D(k, l) = case_value[idx];
            out.var_D(l, k) = case_value[idx];
        }
    }
    return out;
}

/// Smallest eigenvalue of Var(D); negative values beyond rounding noise
/// indicate an incoherent prior specification.
inline double min_var_d_eigenvalue(const PriorStructure& prior) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(prior.var_D,
                                                          Eigen::EigenvaluesOnly);
    return solver.eigenvalues().minCoeff();
}

}  // namespace dlmvar

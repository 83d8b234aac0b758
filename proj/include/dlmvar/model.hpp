#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <string>
#include <utility>
#include <vector>

#include "dlmvar/errors.hpp"

namespace dlmvar {

// Smallest series length for which all three differenced series are non-empty
// (the three-step difference first exists at t = 5).
inline constexpr int kMinSeriesLength = 5;

// First time index of each differenced series, by component (1-based series id).
inline constexpr std::array<int, 3> kFirstTime{3, 4, 5};

/// Full second-order prior specification: state moments, variance-component
/// moments E(V_j)/Var(V_j) and the residual variances Var(S_jt) (time-constant).
struct PriorSpec {
    double mean_M1 = 0.0;
    double var_M1 = 0.0;
    double mean_N1 = 0.0;
    double var_N1 = 0.0;
    std::array<double, 3> mean_V{};  // E(V_1), E(V_2), E(V_3); doubles as (v_1, v_2, v_3)
    std::array<double, 3> var_V{};   // Var(V_1), Var(V_2), Var(V_3)
    std::array<double, 3> var_S{};   // Var(S_1t), Var(S_2t), Var(S_3t)

    /// Analyses require strictly positive innovation variances; the simulator
    /// and moment assembly also accept the degenerate boundary mean_V = 0.
    void validate(bool require_positive_mean_v = true) const {
        auto finite = [](double x) { return std::isfinite(x); };
        if (!finite(mean_M1) || !finite(mean_N1))
            throw config_error("prior: state means must be finite");
        if (!finite(var_M1) || var_M1 < 0.0 || !finite(var_N1) || var_N1 < 0.0)
            throw config_error("prior: state variances must be finite and >= 0");
        for (int j = 0; j < 3; ++j) {
            if (!finite(mean_V[j]) || mean_V[j] < 0.0 ||
                (require_positive_mean_v && mean_V[j] == 0.0))
                throw config_error("prior: mean_V[" + std::to_string(j + 1) +
                                   "] must be strictly positive");
            if (!finite(var_V[j]) || var_V[j] < 0.0)
                throw config_error("prior: var_V[" + std::to_string(j + 1) +
                                   "] must be finite and >= 0");
            if (!finite(var_S[j]) || var_S[j] < 0.0)
                throw config_error("prior: var_S[" + std::to_string(j + 1) +
                                   "] must be finite and >= 0");
        }
    }
};

/// Raw observations X_1..X_T, 1-based time.
struct ObservedSeries {
    std::vector<double> values;

    int length() const { return static_cast<int>(values.size()); }

    /// X_t for t in [1, T].
    double at(int t) const { return values.at(static_cast<std::size_t>(t - 1)); }

    void require_min_length() const {
        if (length() < kMinSeriesLength)
            throw data_error("series has " + std::to_string(length()) +
                             " observations; minimum " + std::to_string(kMinSeriesLength) +
                             " required");
    }
};

/// The one-, two- and three-step differences of the one-step-differenced
/// series. x1 runs over t = 3..T, x2 over t = 4..T, x3 over t = 5..T.
struct DifferencedSeries {
    int T = 0;
    std::vector<double> x1;
    std::vector<double> x2;
    std::vector<double> x3;

    double x1_at(int t) const { return x1.at(static_cast<std::size_t>(t - kFirstTime[0])); }
    double x2_at(int t) const { return x2.at(static_cast<std::size_t>(t - kFirstTime[1])); }
    double x3_at(int t) const { return x3.at(static_cast<std::size_t>(t - kFirstTime[2])); }

    /// Entry of series `series` (1..3) at 1-based time t.
    double at(int series, int t) const {
        switch (series) {
            case 1: return x1_at(t);
            case 2: return x2_at(t);
            case 3: return x3_at(t);
            default: throw numeric_error("differenced series id must be 1, 2 or 3");
        }
    }
};

/// Fixed coefficient stencils over the raw series (lag 0 first):
///   x1_t = X_t - 2X_{t-1} + X_{t-2}
///   x2_t = X_t - X_{t-1} - X_{t-2} + X_{t-3}
///   x3_t = X_t - X_{t-1} - X_{t-3} + X_{t-4}
inline DifferencedSeries difference_series(const ObservedSeries& series) {
    series.require_min_length();
    const int T = series.length();
    DifferencedSeries d;
    d.T = T;
    d.x1.reserve(static_cast<std::size_t>(T - 2));
    d.x2.reserve(static_cast<std::size_t>(T - 3));
    d.x3.reserve(static_cast<std::size_t>(T - 4));
    for (int t = 3; t <= T; ++t)
        d.x1.push_back(series.at(t) - 2.0 * series.at(t - 1) + series.at(t - 2));
    for (int t = 4; t <= T; ++t)
        d.x2.push_back(series.at(t) - series.at(t - 1) - series.at(t - 2) + series.at(t - 3));
    for (int t = 5; t <= T; ++t)
        d.x3.push_back(series.at(t) - series.at(t - 1) - series.at(t - 3) + series.at(t - 4));
    return d;
}

// --- layout of the stacked quadratic-observable vector ---------------------
//
// d = (x1_3^2,...,x1_N^2, x2_4^2,...,x2_N^2, x3_5^2,...,x3_N^2), length 3N-9.
// These three functions are the single authority on that layout.

inline int quad_size(int N) { return 3 * N - 9; }

/// Flat position -> (series id 1..3, 1-based time t).
inline std::pair<int, int> quad_decode(int N, int k) {
    const int n1 = N - 2, n2 = N - 3, n3 = N - 4;
    if (k < 0 || k >= n1 + n2 + n3)
        throw numeric_error("quadratic-vector index out of range");
    if (k < n1) return {1, kFirstTime[0] + k};
    k -= n1;
    if (k < n2) return {2, kFirstTime[1] + k};
    k -= n2;
    return {3, kFirstTime[2] + k};
}

/// (series id, 1-based time) -> flat position; inverse of quad_decode.
inline int quad_encode(int N, int series, int t) {
    const int n1 = N - 2, n2 = N - 3;
    if (series < 1 || series > 3 || t < kFirstTime[series - 1] || t > N)
        throw numeric_error("quadratic-vector coordinate out of range");
    switch (series) {
        case 1: return t - kFirstTime[0];
        case 2: return n1 + (t - kFirstTime[1]);
        default: return n1 + n2 + (t - kFirstTime[2]);
    }
}

/// Squared differenced observations, stacked in the documented layout.
struct QuadraticVector {
    int N = 0;
    std::vector<double> d;
};

inline QuadraticVector build_quadratic_vector(const DifferencedSeries& diff, int N) {
    if (N < kMinSeriesLength || N > diff.T)
        throw data_error("N must satisfy 5 <= N <= T (got N=" + std::to_string(N) +
                         ", T=" + std::to_string(diff.T) + ")");
    QuadraticVector q;
    q.N = N;
    q.d.resize(static_cast<std::size_t>(quad_size(N)));
    for (int k = 0; k < quad_size(N); ++k) {
        auto [series, t] = quad_decode(N, k);
        const double x = diff.at(series, t);
        q.d[static_cast<std::size_t>(k)] = x * x;
    }
    return q;
}

}  // namespace dlmvar

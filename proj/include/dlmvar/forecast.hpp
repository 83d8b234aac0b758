#pragma once

#include <array>
#include <cmath>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "dlmvar/errors.hpp"
#include "dlmvar/model.hpp"

namespace dlmvar {

/// Second-order belief about the state (M_t, N_t).
struct StateBelief {
    Eigen::Vector2d mean;
    Eigen::Matrix2d cov;
};

struct ForecastStep {
    int t = 0;
    double forecast_mean = 0.0;
    double forecast_var = 0.0;
    double lower = 0.0;
    double upper = 0.0;
    double observed = 0.0;
    bool inside = false;
};

struct ForecastResult {
    std::vector<ForecastStep> steps;
    int burn_in = 0;
    int covered = 0;   // steps inside the interval after burn-in
    int counted = 0;   // steps after burn-in
    double coverage = 0.0;
};

inline constexpr int kDefaultBurnIn = 10;

namespace detail {

// Evolution M_t = M_{t-1} + N_t + Y_2t with N_t = N_{t-1} + Y_3t already
// evolved, so Y_3t feeds M within the same step:
//   G = [1 1; 0 1],  state noise cov W = [v2+v3, v3; v3, v3].
inline StateBelief evolve_state(const StateBelief& s, double v2, double v3) {
    Eigen::Matrix2d g;
    g << 1.0, 1.0, 0.0, 1.0;
    Eigen::Matrix2d w;
    w << v2 + v3, v3, v3, v3;
    StateBelief out;
    out.mean = g * s.mean;
    out.cov = g * s.cov * g.transpose() + w;
    return out;
}

inline void observe_joseph(StateBelief& s, double x, double v1) {
    const double q = s.cov(0, 0) + v1;
    const Eigen::Vector2d k = s.cov.col(0) / q;
    Eigen::Matrix2d a = Eigen::Matrix2d::Identity();
    a(0, 0) -= k(0);
    a(1, 0) -= k(1);
    s.mean += k * (x - s.mean(0));
    const Eigen::Matrix2d c = a * s.cov * a.transpose() + v1 * k * k.transpose();
    s.cov = 0.5 * (c + c.transpose());
}

inline void observe_standard(StateBelief& s, double x, double v1) {
    const double q = s.cov(0, 0) + v1;
    const Eigen::Vector2d k = s.cov.col(0) / q;
    s.mean += k * (x - s.mean(0));
    const Eigen::Matrix2d c = s.cov - q * k * k.transpose();
    s.cov = 0.5 * (c + c.transpose());
}

inline void require_psd(const StateBelief& s, int t) {
    const double scale = std::max(1.0, s.cov.cwiseAbs().maxCoeff());
    const double det = s.cov(0, 0) * s.cov(1, 1) - s.cov(0, 1) * s.cov(1, 0);
    if (s.cov(0, 0) < -1e-10 * scale || s.cov(1, 1) < -1e-10 * scale ||
        det < -1e-10 * scale * scale)
        throw numeric_error("state covariance lost positive semi-definiteness at t=" +
                            std::to_string(t));
}

}  // namespace detail

/// Sequential one-step-ahead forecasting with two-standard-deviation
/// credibility intervals. `variances` supplies (v1, v2, v3); the state prior
/// comes from `spec`. At t = 1 the a-priori (M_1, N_1) belief is used directly
/// (no evolution step); evolution applies from t = 2 on.
inline ForecastResult forecast_series(const PriorSpec& spec,
                                      const std::array<double, 3>& variances,
                                      const ObservedSeries& series,
                                      int burn_in = kDefaultBurnIn, bool joseph_form = true) {
    spec.validate();
    for (double v : variances)
        if (!(v > 0.0) || !std::isfinite(v))
            throw config_error("forecast variances must be strictly positive");
    if (burn_in < 0) throw config_error("burn-in must be >= 0");
    const double v1 = variances[0], v2 = variances[1], v3 = variances[2];

    ForecastResult out;
    out.burn_in = burn_in;
    out.steps.reserve(static_cast<std::size_t>(series.length()));

    StateBelief state;
    state.mean << spec.mean_M1, spec.mean_N1;
    state.cov << spec.var_M1, 0.0, 0.0, spec.var_N1;

    for (int t = 1; t <= series.length(); ++t) {
        if (t >= 2) state = detail::evolve_state(state, v2, v3);
        ForecastStep step;
        step.t = t;
        step.forecast_mean = state.mean(0);
        step.forecast_var = state.cov(0, 0) + v1;
        const double half_width = 2.0 * std::sqrt(step.forecast_var);
        step.lower = step.forecast_mean - half_width;
        step.upper = step.forecast_mean + half_width;
        step.observed = series.at(t);
        step.inside = step.observed >= step.lower && step.observed <= step.upper;
        out.steps.push_back(step);
        if (t > burn_in) {
            ++out.counted;
            if (step.inside) ++out.covered;
        }
        if (joseph_form)
            detail::observe_joseph(state, step.observed, v1);
        else
            detail::observe_standard(state, step.observed, v1);
        detail::require_psd(state, t);
    }
    out.coverage = out.counted > 0 ? static_cast<double>(out.covered) / out.counted : 0.0;
    return out;
}

}  // namespace dlmvar

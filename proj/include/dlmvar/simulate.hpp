#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <string>
#include <vector>

#include "dlmvar/covariance.hpp"
#include "dlmvar/errors.hpp"
#include "dlmvar/model.hpp"
#include "dlmvar/rng.hpp"

namespace dlmvar {

/// Innovation law, conditional on the realized variance components.
///
/// gaussian: Y_jt ~ N(0, V_j); the implied Var(S_jt) is 2 E[V_j^2].
/// scaled_chi_square_consistent: symmetric three-point law with conditional
/// fourth moment V_j^2 + var_S[j], so the implied Var(S_jt) equals the
/// specified var_S[j] exactly for any draw of V_j.
enum class InnovationFamily { gaussian, scaled_chi_square_consistent };

struct SimConfig {
    PriorSpec spec;
    int T = 0;
    std::uint64_t seed = 0;
    std::uint64_t stream = 0;  // replicate substream; (seed, stream) pins the output
    InnovationFamily family = InnovationFamily::gaussian;

    void validate() const {
        spec.validate(false);
        if (T < kMinSeriesLength)
            throw config_error("simulation length T must be >= " +
                               std::to_string(kMinSeriesLength));
    }
};

namespace detail {

/// V_j for the replicate: gamma with matched mean/variance when Var(V_j) > 0
/// (a variance must be nonnegative), degenerate at the mean otherwise.
inline double draw_component_variance(RandomStream& rs, double mean, double var) {
    if (mean <= 0.0) {
        if (var > 0.0)
            throw config_error("a variance component with zero mean cannot have Var(V) > 0");
        return 0.0;
    }
    if (var <= 0.0) return mean;
    const double shape = mean * mean / var;
    const double scale = var / mean;
    return rs.gamma(shape, scale);
}

class InnovationSampler {
public:
    InnovationSampler(RandomStream& rs, const PriorSpec& spec, InnovationFamily family,
                      const std::array<double, 3>& v)
        : rs_(rs), family_(family) {
        for (int j = 0; j < 3; ++j) {
            sd_[j] = std::sqrt(v[j]);
            if (family == InnovationFamily::scaled_chi_square_consistent) {
                // E[W^2] = 1, E[W^4] = m4: W = 0 w.p. 1 - 1/m4, else +/- sqrt(m4).
                const double m4 = v[j] > 0.0 ? 1.0 + spec.var_S[j] / (v[j] * v[j]) : 1.0;
                zero_prob_[j] = 1.0 - 1.0 / m4;
                magnitude_[j] = std::sqrt(m4);
            }
        }
    }

    double draw(int j) {
        const auto idx = static_cast<std::size_t>(j - 1);
        if (sd_[idx] == 0.0) return 0.0;
        if (family_ == InnovationFamily::gaussian) return sd_[idx] * rs_.gaussian();
        const double u = rs_.uniform();
        if (u < zero_prob_[idx]) return 0.0;
        const double sign = (u - zero_prob_[idx]) < 0.5 * (1.0 - zero_prob_[idx]) ? 1.0 : -1.0;
        return sign * magnitude_[idx] * sd_[idx];
    }

private:
    RandomStream& rs_;
    InnovationFamily family_;
    std::array<double, 3> sd_{};
    std::array<double, 3> zero_prob_{};
    std::array<double, 3> magnitude_{};
};

}  // namespace detail

/// Draws one series from the locally linear model. Draw order is fixed:
/// V_1..V_3, M_1, N_1, then per step t >= 2 the innovations (Y_1t, Y_2t, Y_3t);
/// t = 1 consumes only Y_11.
inline ObservedSeries simulate_series(const SimConfig& cfg) {
    cfg.validate();
    RandomStream rs(cfg.seed, cfg.stream);

    std::array<double, 3> v{};
    for (int j = 0; j < 3; ++j)
        v[static_cast<std::size_t>(j)] =
            detail::draw_component_variance(rs, cfg.spec.mean_V[static_cast<std::size_t>(j)],
                                            cfg.spec.var_V[static_cast<std::size_t>(j)]);

    double m = cfg.spec.mean_M1 + std::sqrt(cfg.spec.var_M1) * rs.gaussian();
    double n = cfg.spec.mean_N1 + std::sqrt(cfg.spec.var_N1) * rs.gaussian();
    detail::InnovationSampler innovations(rs, cfg.spec, cfg.family, v);

    ObservedSeries series;
    series.values.reserve(static_cast<std::size_t>(cfg.T));
    series.values.push_back(m + innovations.draw(1));
    for (int t = 2; t <= cfg.T; ++t) {
        const double y1 = innovations.draw(1);
        const double y2 = innovations.draw(2);
        const double y3 = innovations.draw(3);
        n += y3;
        m += n + y2;
        series.values.push_back(m + y1);
    }
    return series;
}

struct McCheckResult {
    double max_cov_discrepancy = 0.0;   // worst |sample - model| / MC standard error
    double max_mean_discrepancy = 0.0;
    int worst_row = -1;
    int worst_col = -1;
    int replicates = 0;
};

/// Simulates D `replicates` times (independent substreams) and standardizes
/// the entrywise gap between the sample mean/covariance of D and the
/// assembled model moments by the Monte Carlo standard error of each entry.
inline McCheckResult mc_check_var_D(const PriorSpec& spec, int N, int replicates,
                                    std::uint64_t seed,
                                    InnovationFamily family = InnovationFamily::gaussian) {
    if (replicates < 2) throw config_error("mc_check_var_D needs at least 2 replicates");
    const PriorStructure prior = build_prior_structure(spec, N);
    const int M = quad_size(N);

    std::vector<std::vector<double>> draws;
    draws.reserve(static_cast<std::size_t>(replicates));
    SimConfig cfg{spec, N, seed, 0, family};
    for (int r = 0; r < replicates; ++r) {
        cfg.stream = static_cast<std::uint64_t>(r);
        const ObservedSeries series = simulate_series(cfg);
        draws.push_back(build_quadratic_vector(difference_series(series), N).d);
    }

    const double n = static_cast<double>(replicates);
    std::vector<double> mean(static_cast<std::size_t>(M), 0.0);
    for (const auto& d : draws)
        for (int i = 0; i < M; ++i) mean[static_cast<std::size_t>(i)] += d[static_cast<std::size_t>(i)];
    for (auto& x : mean) x /= n;

    McCheckResult out;
    out.replicates = replicates;

    auto standardized = [](double diff, double se) {
        if (se > 0.0) return std::abs(diff) / se;
        return diff == 0.0 ? 0.0 : std::numeric_limits<double>::infinity();
    };

    // Sample covariance and its per-entry standard error from fourth moments:
    // Var(c_hat_ij) ~ (E[(d_i-mu_i)^2 (d_j-mu_j)^2] - c_ij^2) / n.
    for (int i = 0; i < M; ++i) {
        for (int j = i; j < M; ++j) {
            double c = 0.0, m22 = 0.0;
            for (const auto& d : draws) {
                const double a = d[static_cast<std::size_t>(i)] - mean[static_cast<std::size_t>(i)];
                const double b = d[static_cast<std::size_t>(j)] - mean[static_cast<std::size_t>(j)];
                c += a * b;
                m22 += a * a * b * b;
            }
            c /= (n - 1.0);
            m22 /= n;
            const double se = std::sqrt(std::max(0.0, m22 - c * c) / n);
            const double disc = standardized(c - prior.var_D(i, j), se);
            if (disc > out.max_cov_discrepancy) {
                out.max_cov_discrepancy = disc;
                out.worst_row = i;
                out.worst_col = j;
            }
        }
        double var_i = 0.0;
        for (const auto& d : draws) {
            const double a = d[static_cast<std::size_t>(i)] - mean[static_cast<std::size_t>(i)];
            var_i += a * a;
        }
        var_i /= (n - 1.0);
        const double se_mean = std::sqrt(var_i / n);
        out.max_mean_discrepancy =
            std::max(out.max_mean_discrepancy,
                     standardized(mean[static_cast<std::size_t>(i)] - prior.mean_D(i), se_mean));
    }
    return out;
}

}  // namespace dlmvar

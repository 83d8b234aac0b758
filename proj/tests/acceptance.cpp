// Acceptance suite: runs every acceptance criterion at its stated tolerance
// and prints one PASS/FAIL line per criterion. Exits nonzero if any fail.

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <numeric>
#include <sstream>
#include <string>
#include <vector>

#include "dlmvar/adjust.hpp"
#include "dlmvar/cov_table.hpp"
#include "dlmvar/covariance.hpp"
#include "dlmvar/csv.hpp"
#include "dlmvar/forecast.hpp"
#include "dlmvar/model.hpp"
#include "dlmvar/moment_oracle.hpp"
#include "dlmvar/simulate.hpp"

#include "example_prior.hpp"

namespace fs = std::filesystem;
using namespace dlmvar;

namespace {

int g_failures = 0;

class Criterion {
public:
    explicit Criterion(std::string name) : name_(std::move(name)) {
        start_ = std::chrono::steady_clock::now();
    }

    void finish(bool pass, const std::string& detail) {
        const auto elapsed = std::chrono::duration<double>(
                                 std::chrono::steady_clock::now() - start_)
                                 .count();
        std::ostringstream line;
        line << (pass ? "PASS" : "FAIL") << "  " << name_ << "  [" << detail << "; "
             << elapsed << " s]";
        std::cout << line.str() << std::endl;
        if (!pass) ++g_failures;
    }

    double seconds() const {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
    }

private:
    std::string name_;
    std::chrono::steady_clock::time_point start_;
};

// 1. Every transcribed covariance equation regenerated with exact coefficients.
void criterion_cov_table() {
    Criterion c("1 covariance-table reproduction (exact rational match)");
    const auto report = verify_covariance_table();
    const double elapsed = c.seconds();
    const bool pass = report.all_pass && report.cases.size() >= 42 && elapsed < 1.0;
    c.finish(pass, std::to_string(report.cases.size() - static_cast<std::size_t>(report.failures)) +
                       "/" + std::to_string(report.cases.size()) + " cases exact");
    for (const auto& vc : report.cases)
        if (!vc.pass)
            std::cout << "      mismatch " << vc.name << ": expected " << vc.expected
                      << ", derived " << vc.actual << "\n";
}

// 2. Identification coefficients emerge from the oracle; exact inverse; n-step.
void criterion_identification() {
    Criterion c("2 identification algebra");
    const auto id = identification_matrix();
    bool ok = true;
    for (int a = 1; a <= 3; ++a) {
        MomentPolynomial expected;
        for (int j = 0; j < 3; ++j) expected.add(MomentAtom::ev(j + 1), id[a - 1][j]);
        ok = ok && (quadratic_mean(xn_form(a, 25)) == expected);
    }
    const auto inv = inverse_identification_matrix();
    for (int i = 0; i < 3 && ok; ++i)
        for (int j = 0; j < 3; ++j) {
            Rational sum(0);
            for (int k = 0; k < 3; ++k) sum += inv[i][k] * id[k][j];
            ok = ok && (sum == Rational(i == j ? 1 : 0));
        }
    bool ok_n = true;
    for (int n = 2; n <= 6; ++n) {
        MomentPolynomial expected{{MomentAtom::ev(1), 4},
                                  {MomentAtom::ev(2), 2},
                                  {MomentAtom::ev(3), Rational(n)}};
        ok_n = ok_n && (quadratic_mean(xn_form(n, 25)) == expected);
    }
    c.finish(ok && ok_n, "matrix rows, exact inverse product, n-step means for n=2..6");
}

// 3. Sample covariance of simulated D matches the assembled Var(D).
void criterion_monte_carlo_cov() {
    Criterion c("3 monte carlo covariance of D (N=8, 1e5 replicates)");
    const auto spec = dlmvar_tests::example_prior();
    const auto result = mc_check_var_D(spec, 8, 100000, 20250401,
                                       InnovationFamily::scaled_chi_square_consistent);
    const double worst = std::max(result.max_cov_discrepancy, result.max_mean_discrepancy);
    const double elapsed = c.seconds();
    c.finish(worst < 5.0 && elapsed < 120.0,
             "max standardized discrepancy " + format_double(worst) + " (< 5)");
}

// 4. The unbiased estimator combinations recover the true variances and stabilize.
void criterion_unbiased_consistency() {
    Criterion c("4 consistency of the unbiased estimators (T=2e5)");
    PriorSpec spec = dlmvar_tests::example_prior();
    spec.var_V = {0.0, 0.0, 0.0};  // fixed true v = (25, 0.04, 0.01)
    const int T = 200000;
    const auto series = simulate_series({spec, T, 31415, 0, InnovationFamily::gaussian});
    const auto diff = difference_series(series);
    const auto est = unbiased_estimates(diff, T);

    // Per-t combination values, for batch-means standard errors (the terms are
    // serially dependent up to lag 5; batches of 1000 are effectively independent).
    const auto inv = inverse_identification_matrix();
    double w[3][3];
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) w[i][j] = to_double(inv[i][j]);
    const int n_terms = T - 4;
    const int batch = 1000;
    const int n_batches = n_terms / batch;
    bool ok_se = true;
    std::array<double, 3> truth{25.0, 0.04, 0.01};
    std::ostringstream detail;
    for (int i = 0; i < 3; ++i) {
        std::vector<double> batch_means;
        batch_means.reserve(static_cast<std::size_t>(n_batches));
        for (int bidx = 0; bidx < n_batches; ++bidx) {
            double s = 0.0;
            for (int k = 0; k < batch; ++k) {
                const int t = 5 + bidx * batch + k;
                const double q1 = diff.x1_at(t) * diff.x1_at(t);
                const double q2 = diff.x2_at(t) * diff.x2_at(t);
                const double q3 = diff.x3_at(t) * diff.x3_at(t);
                s += w[i][0] * q1 + w[i][1] * q2 + w[i][2] * q3;
            }
            batch_means.push_back(s / batch);
        }
        const double mean =
            std::accumulate(batch_means.begin(), batch_means.end(), 0.0) / n_batches;
        double var = 0.0;
        for (double m : batch_means) var += (m - mean) * (m - mean);
        var /= (n_batches - 1.0);
        const double se = std::sqrt(var / n_batches);
        const double z = std::abs(est.estimates(i) - truth[static_cast<std::size_t>(i)]) / se;
        detail << (i ? ", " : "") << "z" << (i + 1) << "=" << format_double(z);
        ok_se = ok_se && z < 3.0;
    }

    // Stabilization: the running mean varies less over the last decile of t
    // than over the first decile.
    bool ok_stable = true;
    const std::size_t n_run = est.running.size();
    const std::size_t decile = n_run / 10;
    for (int i = 1; i <= 3; ++i) {
        auto variance_over = [&](std::size_t lo, std::size_t hi) {
            double m = 0.0;
            for (std::size_t k = lo; k < hi; ++k) m += est.running[k][static_cast<std::size_t>(i)];
            m /= static_cast<double>(hi - lo);
            double v = 0.0;
            for (std::size_t k = lo; k < hi; ++k) {
                const double dlt = est.running[k][static_cast<std::size_t>(i)] - m;
                v += dlt * dlt;
            }
            return v / static_cast<double>(hi - lo);
        };
        ok_stable =
            ok_stable && variance_over(n_run - decile, n_run) < variance_over(0, decile);
    }
    const double elapsed = c.seconds();
    c.finish(ok_se && ok_stable && elapsed < 60.0,
             detail.str() + " (all < 3); running means stabilize");
}

// 5. Penrose conditions on Var(D) at N in {5, 50, 200}.
void criterion_penrose() {
    Criterion c("5 pseudo-inverse Penrose conditions (N=5,50,200)");
    const auto spec = dlmvar_tests::example_prior();
    double worst = 0.0;
    for (int n : {5, 50, 200}) {
        const auto prior = build_prior_structure(spec, n);
        const auto pinv = pseudo_inverse(prior.var_D);
        const auto res = penrose_residuals(prior.var_D, pinv.inverse);
        worst = std::max({worst, res[0], res[1], res[2], res[3]});
    }
    c.finish(worst <= 1e-8, "max relative residual " + format_double(worst) + " (<= 1e-8)");
}

// 6. Calibration of the adjusted intervals and monotone resolutions.
void criterion_calibration() {
    Criterion c("6 adjustment calibration (100 replicates, T=200)");
    const auto prior_spec = dlmvar_tests::example_prior();
    PriorSpec sim_spec = prior_spec;
    sim_spec.var_V = {0.0, 0.0, 0.0};  // data generated at the prior's mean variances
    const std::vector<int> grid{50, 100, 150, 200};
    const std::array<double, 3> truth{25.0, 0.04, 0.01};

    std::array<int, 3> covered{0, 0, 0};
    bool monotone = true;
    for (int r = 0; r < 100; ++r) {
        const auto series = simulate_series(
            {sim_spec, 200, 777, static_cast<std::uint64_t>(r), InnovationFamily::gaussian});
        const auto trajectory = sequential_adjustments(prior_spec, series, grid);
        for (std::size_t g = 1; g < trajectory.size(); ++g)
            for (int i = 0; i < 3; ++i)
                monotone = monotone && trajectory[g].resolution(i) >=
                                           trajectory[g - 1].resolution(i) - 1e-8;
        const auto& last = trajectory.back();
        for (int i = 0; i < 3; ++i) {
            const double hw = 2.0 * std::sqrt(std::max(0.0, last.adjusted_var(i, i)));
            if (truth[static_cast<std::size_t>(i)] >= last.adjusted_mean(i) - hw &&
                truth[static_cast<std::size_t>(i)] <= last.adjusted_mean(i) + hw)
                ++covered[static_cast<std::size_t>(i)];
        }
    }
    const double elapsed = c.seconds();
    const bool pass = covered[0] >= 90 && covered[1] >= 90 && covered[2] >= 90 && monotone &&
                      elapsed < 600.0;
    c.finish(pass, "coverage " + std::to_string(covered[0]) + "/" + std::to_string(covered[1]) +
                       "/" + std::to_string(covered[2]) + " of 100 (>= 90); resolutions monotone: " +
                       (monotone ? "yes" : "NO"));
}

// 7. One-step interval coverage, and widening under inflated v1.
void criterion_forecast_coverage() {
    Criterion c("7 forecast coverage (T=1e4)");
    PriorSpec spec = dlmvar_tests::example_prior();
    spec.var_V = {0.0, 0.0, 0.0};
    const auto series = simulate_series({spec, 10000, 2718, 0, InnovationFamily::gaussian});
    const auto nominal = forecast_series(spec, spec.mean_V, series);
    const std::array<double, 3> inflated{4.0 * spec.mean_V[0], spec.mean_V[1], spec.mean_V[2]};
    const auto wide = forecast_series(spec, inflated, series);
    const bool pass = nominal.coverage >= 0.93 && nominal.coverage <= 0.97 &&
                      wide.coverage > 0.99;
    c.finish(pass, "coverage " + format_double(nominal.coverage) + " in [0.93, 0.97]; 4x v1 -> " +
                       format_double(wide.coverage) + " (> 0.99)");
}

// 8. Observing exactly E[D] returns the prior, exactly.
void criterion_fixed_point() {
    Criterion c("8 zero-innovation fixed point (exact)");
    const auto spec = dlmvar_tests::example_prior();
    const auto prior = build_prior_structure(spec, 40);
    QuadraticVector d;
    d.N = 40;
    d.d.assign(prior.mean_D.data(), prior.mean_D.data() + prior.mean_D.size());
    const auto result = adjust_variances(prior, d);
    bool exact = true;
    for (int i = 0; i < 3; ++i)
        exact = exact && result.adjusted_mean(i) == prior.mean_V(i) &&
                result.diagnostics(i) == 0.0;
    c.finish(exact, "adjusted mean equals the prior mean bitwise, diagnostics all zero");
}

// 9. The analyze pipeline is byte-deterministic for a fixed seed and config.
void criterion_determinism(const std::string& cli) {
    Criterion c("9 end-to-end determinism of analyze");
    const fs::path dir = fs::temp_directory_path() / "dlmvar_acceptance";
    fs::remove_all(dir);
    fs::create_directories(dir);
    {
        std::ofstream cfg(dir / "config.json");
        cfg << R"({"mean_M1": 20.0, "var_M1": 400.0, "mean_N1": 0.0, "var_N1": 9.0,
                   "mean_V": [25.0, 0.04, 0.01], "var_V": [25.0, 1.0, 0.04],
                   "var_S": [1250.0, 0.0032, 0.0002]})";
    }
    auto shell = [&cli](const std::string& args) {
        const std::string cmd = cli + " " + args + " >/dev/null 2>&1";
        return WEXITSTATUS(std::system(cmd.c_str()));
    };
    bool pass = shell("--config " + (dir / "config.json").string() + " --out " + dir.string() +
                      " simulate --T 200 --seed 3") == 0;
    const std::string analyze = "--config " + (dir / "config.json").string() +
                                " analyze --data " + (dir / "series.csv").string() +
                                " --grid 50,100,150,200 --out ";
    pass = pass && shell(analyze + (dir / "run1").string()) == 0;
    pass = pass && shell(analyze + (dir / "run2").string()) == 0;

    auto slurp = [](const fs::path& p) {
        std::ifstream in(p, std::ios::binary);
        std::ostringstream ss;
        ss << in.rdbuf();
        return ss.str();
    };
    int identical = 0, total = 0;
    for (const char* name :
         {"adjustment_report.json", "trajectory.csv", "unbiased.csv", "forecast_original.csv",
          "forecast_revised.csv", "linear_combinations.csv", "quadratic_observables.csv"}) {
        ++total;
        if (fs::exists(dir / "run1" / name) && fs::exists(dir / "run2" / name) &&
            slurp(dir / "run1" / name) == slurp(dir / "run2" / name))
            ++identical;
    }
    c.finish(pass && identical == total,
             std::to_string(identical) + "/" + std::to_string(total) + " artifacts byte-identical");
}

}  // namespace

int main(int argc, char** argv) {
    std::string cli = DLMVAR_CLI_PATH;
    if (argc > 1) cli = argv[1];

    criterion_cov_table();
    criterion_identification();
    criterion_monte_carlo_cov();
    criterion_unbiased_consistency();
    criterion_penrose();
    criterion_calibration();
    criterion_forecast_coverage();
    criterion_fixed_point();
    criterion_determinism(cli);

    if (g_failures == 0) {
        std::cout << "acceptance: all 9 criteria passed" << std::endl;
        return 0;
    }
    std::cout << "acceptance: " << g_failures << " criterion(s) failed" << std::endl;
    return 1;
}

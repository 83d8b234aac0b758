// Command-line pipeline: ingest a series and a prior, run differencing ->
// adjustment -> forecasting, and emit report/plot files; `verify` runs the
// symbolic and numerical self-checks, `simulate` draws synthetic series.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "dlmvar/adjust.hpp"
#include "dlmvar/cov_table.hpp"
#include "dlmvar/covariance.hpp"
#include "dlmvar/csv.hpp"
#include "dlmvar/forecast.hpp"
#include "dlmvar/model.hpp"
#include "dlmvar/moment_oracle.hpp"
#include "dlmvar/report.hpp"
#include "dlmvar/simulate.hpp"

namespace {

using json = nlohmann::ordered_json;
namespace fs = std::filesystem;

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitData = 3;
constexpr int kExitNumeric = 4;
constexpr int kExitVerification = 5;

struct RunConfig {
    dlmvar::PriorSpec spec;
    std::optional<int> N;
    std::vector<int> grid;
    double rel_tol = dlmvar::kDefaultRelTol;
    int burn_in = dlmvar::kDefaultBurnIn;
    int T = 200;
    std::uint64_t seed = 0;
    std::uint64_t stream = 0;
    dlmvar::InnovationFamily family = dlmvar::InnovationFamily::gaussian;
};

dlmvar::InnovationFamily parse_family(const std::string& name) {
    if (name == "gaussian") return dlmvar::InnovationFamily::gaussian;
    if (name == "chi2" || name == "scaled_chi_square_consistent")
        return dlmvar::InnovationFamily::scaled_chi_square_consistent;
    throw dlmvar::config_error("unknown innovation family '" + name +
                               "' (expected gaussian or chi2)");
}

void read_array3(const json& j, const char* key, std::array<double, 3>& out) {
    if (!j.contains(key)) throw dlmvar::config_error(std::string("config: missing key '") + key + "'");
    const auto& v = j.at(key);
    if (!v.is_array() || v.size() != 3)
        throw dlmvar::config_error(std::string("config: '") + key + "' must be a 3-element array");
    for (int i = 0; i < 3; ++i) out[static_cast<std::size_t>(i)] = v.at(i).get<double>();
}

RunConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw dlmvar::config_error("cannot open config file: " + path);
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw dlmvar::config_error("config parse error in " + path + ": " + e.what());
    }
    RunConfig cfg;
    try {
        cfg.spec.mean_M1 = j.at("mean_M1").get<double>();
        cfg.spec.var_M1 = j.at("var_M1").get<double>();
        cfg.spec.mean_N1 = j.at("mean_N1").get<double>();
        cfg.spec.var_N1 = j.at("var_N1").get<double>();
        read_array3(j, "mean_V", cfg.spec.mean_V);
        read_array3(j, "var_V", cfg.spec.var_V);
        read_array3(j, "var_S", cfg.spec.var_S);
        if (j.contains("N")) cfg.N = j.at("N").get<int>();
        if (j.contains("grid")) cfg.grid = j.at("grid").get<std::vector<int>>();
        if (j.contains("rel_tol")) cfg.rel_tol = j.at("rel_tol").get<double>();
        if (j.contains("burn_in")) cfg.burn_in = j.at("burn_in").get<int>();
        if (j.contains("T")) cfg.T = j.at("T").get<int>();
        if (j.contains("seed")) cfg.seed = j.at("seed").get<std::uint64_t>();
        if (j.contains("stream")) cfg.stream = j.at("stream").get<std::uint64_t>();
        if (j.contains("family")) cfg.family = parse_family(j.at("family").get<std::string>());
    } catch (const json::exception& e) {
        throw dlmvar::config_error("config error in " + path + ": " + e.what());
    }
    cfg.spec.validate();
    return cfg;
}

std::vector<int> parse_grid(const std::string& text) {
    std::vector<int> grid;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        try {
            grid.push_back(std::stoi(item));
        } catch (const std::exception&) {
            throw dlmvar::config_error("bad grid entry '" + item + "'");
        }
    }
    if (grid.empty()) throw dlmvar::config_error("empty N grid");
    return grid;
}

std::vector<int> default_grid(int n_final) {
    std::vector<int> grid;
    for (int q = 1; q <= 4; ++q) {
        const int n = std::max(dlmvar::kMinSeriesLength, n_final * q / 4);
        if (grid.empty() || n > grid.back()) grid.push_back(n);
    }
    return grid;
}

fs::path resolve_out_dir(const std::string& flag_value) {
    if (!flag_value.empty()) return flag_value;
    if (const char* env = std::getenv("DLMVAR_OUT_DIR"); env && *env) return env;
    return ".";
}

int cmd_analyze(const RunConfig& cfg, const std::string& data_path, const fs::path& out_dir,
                bool dump_matrices) {
    const dlmvar::ObservedSeries series = dlmvar::read_series_csv(data_path);
    series.require_min_length();
    const int n_final = cfg.N.value_or(series.length());
    if (n_final < dlmvar::kMinSeriesLength || n_final > series.length())
        throw dlmvar::config_error("N must satisfy 5 <= N <= T");
    std::vector<int> grid = cfg.grid.empty() ? default_grid(n_final) : cfg.grid;

    fs::create_directories(out_dir);
    const dlmvar::DifferencedSeries diff = dlmvar::difference_series(series);
    dlmvar::write_linear_combinations_csv((out_dir / "linear_combinations.csv").string(), diff,
                                          false);
    dlmvar::write_linear_combinations_csv((out_dir / "quadratic_observables.csv").string(), diff,
                                          true);

    const dlmvar::PriorStructure prior = dlmvar::build_prior_structure(cfg.spec, n_final);
    const dlmvar::QuadraticVector d_obs = dlmvar::build_quadratic_vector(diff, n_final);
    const dlmvar::AdjustmentResult final_adjustment =
        dlmvar::adjust_variances(prior, d_obs, cfg.rel_tol);
    if (dump_matrices) {
        dlmvar::write_matrix_csv((out_dir / "mean_D.csv").string(), prior.mean_D);
        dlmvar::write_matrix_csv((out_dir / "var_D.csv").string(), prior.var_D);
        dlmvar::write_matrix_csv((out_dir / "cov_V_D.csv").string(), prior.cov_V_D);
    }

    const auto trajectory = dlmvar::sequential_adjustments(cfg.spec, series, grid, cfg.rel_tol);
    dlmvar::write_trajectory_csv((out_dir / "trajectory.csv").string(), trajectory);

    dlmvar::write_unbiased_csv((out_dir / "unbiased.csv").string(),
                               dlmvar::unbiased_estimates(diff, n_final));

    dlmvar::write_forecast_csv(
        (out_dir / "forecast_original.csv").string(),
        dlmvar::forecast_series(cfg.spec, cfg.spec.mean_V, series, cfg.burn_in));

    json report = dlmvar::adjustment_to_json(final_adjustment, cfg.spec);
    const bool revised_ok = final_adjustment.adjusted_mean.minCoeff() > 0.0;
    report["revised_forecast_skipped"] = !revised_ok;
    if (revised_ok) {
        const std::array<double, 3> revised{final_adjustment.adjusted_mean(0),
                                            final_adjustment.adjusted_mean(1),
                                            final_adjustment.adjusted_mean(2)};
        dlmvar::write_forecast_csv((out_dir / "forecast_revised.csv").string(),
                                   dlmvar::forecast_series(cfg.spec, revised, series, cfg.burn_in));
    } else {
        std::cerr << "warning: adjusted variances are not all positive; "
                     "skipping revised-variance forecast\n";
    }

    std::ofstream report_out(out_dir / "adjustment_report.json", std::ios::binary);
    if (!report_out) throw dlmvar::data_error("cannot write adjustment report");
    report_out << report.dump(2) << "\n";

    std::cout << "analyze: N=" << n_final << ", adjusted E_D[V] = ["
              << dlmvar::format_double(final_adjustment.adjusted_mean(0)) << ", "
              << dlmvar::format_double(final_adjustment.adjusted_mean(1)) << ", "
              << dlmvar::format_double(final_adjustment.adjusted_mean(2)) << "]\n"
              << "outputs written to " << out_dir.string() << "\n";
    return kExitOk;
}

struct CheckRecord {
    std::string name;
    bool pass = false;
    std::string detail;
};

int cmd_verify(const RunConfig& cfg, const fs::path& out_dir, bool run_mc, int replicates,
               bool tamper_table) {
    std::vector<CheckRecord> checks;
    auto add = [&checks](std::string name, bool pass, std::string detail = "") {
        checks.push_back({std::move(name), pass, std::move(detail)});
    };

    std::vector<dlmvar::CovCase> table = dlmvar::covariance_table();
    if (tamper_table && !table.empty()) {
        // Negative-control hook used by the test suite.
        table.front().value.add(dlmvar::MomentAtom::var_v(1), dlmvar::Rational(1));
    }
    const dlmvar::VerifyReport report = dlmvar::verify_covariance_table(table);
    for (const auto& c : report.cases)
        add("table: " + c.name + " [lag " + std::to_string(c.lag) + "]", c.pass,
            c.pass ? "" : "expected " + c.expected + "; derived " + c.actual);

    // Identification combinations and their exact inverse.
    {
        const auto id = dlmvar::identification_matrix();
        bool ok = true;
        for (int a = 1; a <= 3; ++a) {
            dlmvar::MomentPolynomial expected;
            for (int j = 0; j < 3; ++j)
                expected.add(dlmvar::MomentAtom::ev(j + 1),
                             id[static_cast<std::size_t>(a - 1)][static_cast<std::size_t>(j)]);
            ok = ok && (dlmvar::quadratic_mean(dlmvar::xn_form(a, 20)) == expected);
        }
        add("identification: squared-series means", ok);

        bool ok_n = true;
        for (int n = 2; n <= 6; ++n) {
            dlmvar::MomentPolynomial expected;
            expected.add(dlmvar::MomentAtom::ev(1), dlmvar::Rational(4));
            expected.add(dlmvar::MomentAtom::ev(2), dlmvar::Rational(2));
            expected.add(dlmvar::MomentAtom::ev(3), dlmvar::Rational(n));
            ok_n = ok_n && (dlmvar::quadratic_mean(dlmvar::xn_form(n, 20)) == expected);
        }
        add("identification: n-step means (n=2..6)", ok_n);

        const auto inv = dlmvar::inverse_identification_matrix();
        bool ok_inv = true;
        for (int i = 0; i < 3; ++i) {
            for (int j = 0; j < 3; ++j) {
                dlmvar::Rational sum(0);
                for (int k = 0; k < 3; ++k)
                    sum += inv[static_cast<std::size_t>(i)][static_cast<std::size_t>(k)] *
                           id[static_cast<std::size_t>(k)][static_cast<std::size_t>(j)];
                ok_inv = ok_inv && (sum == dlmvar::Rational(i == j ? 1 : 0));
            }
        }
        add("identification: inverse matrix identity (exact)", ok_inv);
    }

    // Cross-covariances Cov(V_i, x^(a)_t^2) = c * Var(V_i).
    {
        const auto id = dlmvar::identification_matrix();
        bool ok = true;
        for (int a = 1; a <= 3; ++a) {
            for (int i = 1; i <= 3; ++i) {
                dlmvar::MomentPolynomial expected;
                expected.add(dlmvar::MomentAtom::var_v(i),
                             id[static_cast<std::size_t>(a - 1)][static_cast<std::size_t>(i - 1)]);
                ok = ok &&
                     (dlmvar::component_covariance(i, dlmvar::xn_form(a, 20)) == expected);
            }
        }
        add("cross-covariance: Cov(V_i, squared series)", ok);
    }

    // Far-away covariances equal the products of identification coefficients.
    {
        const auto id = dlmvar::identification_matrix();
        bool ok = true;
        for (int a = 1; a <= 3; ++a) {
            for (int b = a; b <= 3; ++b) {
                dlmvar::MomentPolynomial expected;
                for (int i = 1; i <= 3; ++i)
                    expected.add(dlmvar::MomentAtom::var_v(i),
                                 id[static_cast<std::size_t>(a - 1)][static_cast<std::size_t>(i - 1)] *
                                     id[static_cast<std::size_t>(b - 1)][static_cast<std::size_t>(i - 1)]);
                const auto far = dlmvar::quadratic_covariance(dlmvar::xn_form(a, 20),
                                                              dlmvar::xn_form(b, 40));
                ok = ok && (far == expected);
            }
        }
        add("far-away covariances match identification products", ok);
    }

    // Penrose conditions on Var(D) for the example prior.
    for (int n : {5, 50, 200}) {
        const auto prior = dlmvar::build_prior_structure(cfg.spec, n);
        const auto pinv = dlmvar::pseudo_inverse(prior.var_D, cfg.rel_tol);
        const auto res = dlmvar::penrose_residuals(prior.var_D, pinv.inverse);
        const double worst = std::max({res[0], res[1], res[2], res[3]});
        add("pseudo-inverse: Penrose conditions at N=" + std::to_string(n), worst <= 1e-8,
            "max relative residual " + dlmvar::format_double(worst) + ", rank " +
                std::to_string(pinv.rank));
    }

    if (run_mc) {
        const auto mc = dlmvar::mc_check_var_D(
            cfg.spec, 8, replicates, cfg.seed,
            dlmvar::InnovationFamily::scaled_chi_square_consistent);
        const double worst = std::max(mc.max_cov_discrepancy, mc.max_mean_discrepancy);
        add("monte carlo: Var(D) vs sample covariance (N=8)", worst < 5.0,
            "max standardized discrepancy " + dlmvar::format_double(worst) + " over " +
                std::to_string(replicates) + " replicates");
    }

    int failures = 0;
    for (const auto& c : checks) {
        std::cout << (c.pass ? "PASS" : "FAIL") << "  " << c.name;
        if (!c.detail.empty()) std::cout << "  (" << c.detail << ")";
        std::cout << "\n";
        if (!c.pass) ++failures;
    }
    std::cout << (failures == 0 ? "all checks passed" : std::to_string(failures) + " check(s) failed")
              << " (" << checks.size() << " total)\n";

    fs::create_directories(out_dir);
    json summary;
    summary["schema_version"] = 1;
    summary["total"] = checks.size();
    summary["failures"] = failures;
    json records = json::array();
    for (const auto& c : checks)
        records.push_back({{"name", c.name}, {"pass", c.pass}, {"detail", c.detail}});
    summary["checks"] = records;
    std::ofstream out(out_dir / "verification_report.json", std::ios::binary);
    if (!out) throw dlmvar::data_error("cannot write verification report");
    out << summary.dump(2) << "\n";

    return failures == 0 ? kExitOk : kExitVerification;
}

int cmd_simulate(const RunConfig& cfg, const fs::path& out_dir) {
    dlmvar::SimConfig sim{cfg.spec, cfg.T, cfg.seed, cfg.stream, cfg.family};
    const dlmvar::ObservedSeries series = dlmvar::simulate_series(sim);
    fs::create_directories(out_dir);
    const fs::path path = out_dir / "series.csv";
    dlmvar::write_series_csv(path.string(), series);
    std::cout << "simulate: wrote " << series.length() << " observations to " << path.string()
              << "\n";
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Bayes linear variance-component learning for locally linear "
                 "dynamic linear models"};
    app.require_subcommand(1);

    std::string config_path, data_path, out_flag, grid_flag, family_flag;
    std::optional<int> n_flag;
    std::optional<double> rel_tol_flag;
    std::optional<int> burn_in_flag;
    std::optional<std::uint64_t> seed_flag;
    std::optional<int> t_flag;
    bool dump_matrices = false, run_mc = false, tamper_table = false;
    int replicates = 100000;

    app.add_option("--config", config_path, "JSON config with the prior specification");
    app.add_option("--out", out_flag,
                   "Output directory (default: $DLMVAR_OUT_DIR or current directory)");

    auto* analyze = app.add_subcommand("analyze", "Run the full adjustment pipeline on a series");
    analyze->fallthrough();
    analyze->add_option("--data", data_path, "Series CSV (header 'value' or 't,value')")
        ->required();
    analyze->add_option("--N", n_flag, "Use observations 1..N (default: full series)");
    analyze->add_option("--grid", grid_flag, "Comma-separated N grid for the trajectory");
    analyze->add_option("--rel-tol", rel_tol_flag,
                        "Relative eigenvalue cutoff for the generalized inverse (default 1e-10)");
    analyze->add_option("--burn-in", burn_in_flag,
                        "Forecast steps excluded from the coverage summary (default 10)");
    analyze->add_flag("--dump-matrices", dump_matrices, "Also write mean_D/var_D/cov_V_D CSVs");

    auto* verify = app.add_subcommand("verify", "Re-derive the covariance formulae and run "
                                                "numerical self-checks");
    verify->fallthrough();
    verify->add_flag("--mc", run_mc, "Also run the Monte Carlo covariance check");
    verify->add_option("--replicates", replicates, "Monte Carlo replicates (default 100000)");
    verify->add_option("--seed", seed_flag, "Monte Carlo seed");
    verify->add_option("--rel-tol", rel_tol_flag, "Pseudo-inverse cutoff (default 1e-10)");
    verify->add_flag("--tamper-table", tamper_table)->group("");  // test hook, hidden

    auto* simulate = app.add_subcommand("simulate", "Draw a synthetic series from the model");
    simulate->fallthrough();
    simulate->add_option("--T", t_flag, "Series length (default 200)");
    simulate->add_option("--seed", seed_flag, "Stream seed (default 0)");
    simulate->add_option("--family", family_flag,
                         "Innovation family: gaussian | chi2 (default gaussian)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitConfig;
    }

    try {
        RunConfig cfg;
        if (!config_path.empty()) cfg = load_config(config_path);
        else if (!verify->parsed())
            throw dlmvar::config_error("--config is required for this subcommand");
        if (n_flag) cfg.N = *n_flag;
        if (!grid_flag.empty()) cfg.grid = parse_grid(grid_flag);
        if (rel_tol_flag) cfg.rel_tol = *rel_tol_flag;
        if (burn_in_flag) cfg.burn_in = *burn_in_flag;
        if (seed_flag) cfg.seed = *seed_flag;
        if (t_flag) cfg.T = *t_flag;
        if (!family_flag.empty()) cfg.family = parse_family(family_flag);
        if (cfg.rel_tol <= 0.0 || cfg.rel_tol >= 1.0)
            throw dlmvar::config_error("rel_tol must be in (0, 1)");

        const fs::path out_dir = resolve_out_dir(out_flag);
        if (analyze->parsed()) return cmd_analyze(cfg, data_path, out_dir, dump_matrices);
        if (verify->parsed()) {
            if (config_path.empty()) {
                // Self-checks default to the worked-example prior.
                cfg.spec.mean_M1 = 20.0;
                cfg.spec.var_M1 = 400.0;
                cfg.spec.mean_N1 = 0.0;
                cfg.spec.var_N1 = 9.0;
                cfg.spec.mean_V = {25.0, 0.04, 0.01};
                cfg.spec.var_V = {25.0, 1.0, 0.04};
                cfg.spec.var_S = {1250.0, 0.0032, 0.0002};
            }
            return cmd_verify(cfg, out_dir, run_mc, replicates, tamper_table);
        }
        return cmd_simulate(cfg, out_dir);
    } catch (const dlmvar::config_error& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const dlmvar::data_error& e) {
        std::cerr << "data error: " << e.what() << "\n";
        return kExitData;
    } catch (const dlmvar::numeric_error& e) {
        std::cerr << "numerical error: " << e.what() << "\n";
        return kExitNumeric;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitNumeric;
    }
}

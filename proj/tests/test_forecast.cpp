#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "dlmvar/forecast.hpp"
#include "dlmvar/simulate.hpp"

#include "example_prior.hpp"

using namespace dlmvar;

TEST_CASE("first step forecasts from the a-priori state, no evolution") {
    const auto spec = dlmvar_tests::example_prior();
    ObservedSeries series{{30, 29, 31, 30, 28}};
    const auto result = forecast_series(spec, {25.0, 0.04, 0.01}, series);
    REQUIRE(result.steps.size() == 5);
    CHECK(result.steps[0].t == 1);
    CHECK(result.steps[0].forecast_mean == 20.0);
    // Var(M_1) + v1; the evolution noise enters from t = 2 only.
    CHECK(result.steps[0].forecast_var == Catch::Approx(425.0).epsilon(1e-14));
    CHECK(result.steps[0].lower < result.steps[0].upper);
    CHECK(result.steps[0].observed == 30.0);
}

TEST_CASE("evolve-and-forecast arithmetic on a hand-checked state") {
    // State (20, 0) with cov diag(400, 9) and v = (25, 0.04, 0.01):
    // evolved variance = 400 + 9 + 0.04 + 0.01, forecast var adds v1.
    StateBelief s;
    s.mean << 20.0, 0.0;
    s.cov << 400.0, 0.0, 0.0, 9.0;
    const auto evolved = detail::evolve_state(s, 0.04, 0.01);
    CHECK(evolved.mean(0) == 20.0);
    CHECK(evolved.cov(0, 0) + 25.0 == Catch::Approx(434.05).epsilon(1e-14));
    CHECK(evolved.cov(0, 1) == Catch::Approx(9.0 + 0.01).epsilon(1e-14));
    CHECK(evolved.cov(1, 1) == Catch::Approx(9.0 + 0.01).epsilon(1e-14));
}

TEST_CASE("noiseless linear data is forecast exactly") {
    const double a = 4.0, b = 1.5;
    PriorSpec spec;
    spec.mean_M1 = a + b;  // truth at t = 1
    spec.var_M1 = 0.0;
    spec.mean_N1 = b;
    spec.var_N1 = 0.0;
    spec.mean_V = {1e-12, 1e-12, 1e-12};
    ObservedSeries series;
    for (int t = 1; t <= 50; ++t) series.values.push_back(a + b * t);
    const auto result = forecast_series(spec, {1e-12, 1e-12, 1e-12}, series);
    for (const auto& step : result.steps)
        CHECK(std::abs(step.forecast_mean - step.observed) < 1e-6);
}

TEST_CASE("coverage under the true model is near the two-sigma level") {
    auto spec = dlmvar_tests::example_prior();
    spec.var_V = {0.0, 0.0, 0.0};
    const auto series = simulate_series({spec, 10000, 99, 0, InnovationFamily::gaussian});
    const auto result = forecast_series(spec, spec.mean_V, series);
    CHECK(result.counted == 10000 - result.burn_in);
    CHECK(result.coverage > 0.93);
    CHECK(result.coverage < 0.97);
}

TEST_CASE("forecast variance never drops below the observation variance") {
    const auto spec = dlmvar_tests::example_prior();
    const auto series = simulate_series({spec, 500, 3, 0, InnovationFamily::gaussian});
    const auto result = forecast_series(spec, {25.0, 0.04, 0.01}, series);
    for (const auto& step : result.steps) CHECK(step.forecast_var >= 25.0);
}

TEST_CASE("larger observation variance widens every interval") {
    auto spec = dlmvar_tests::example_prior();
    spec.var_V = {0.0, 0.0, 0.0};
    const auto series = simulate_series({spec, 300, 8, 0, InnovationFamily::gaussian});
    const auto narrow = forecast_series(spec, {25.0, 0.04, 0.01}, series);
    const auto wide = forecast_series(spec, {100.0, 0.04, 0.01}, series);
    REQUIRE(narrow.steps.size() == wide.steps.size());
    for (std::size_t i = 0; i < narrow.steps.size(); ++i)
        CHECK(wide.steps[i].upper - wide.steps[i].lower >
              narrow.steps[i].upper - narrow.steps[i].lower);
}

TEST_CASE("Joseph-form and standard-form updates agree") {
    const auto spec = dlmvar_tests::example_prior();
    const auto series = simulate_series({spec, 400, 31, 0, InnovationFamily::gaussian});
    const auto joseph = forecast_series(spec, spec.mean_V, series, 10, true);
    const auto standard = forecast_series(spec, spec.mean_V, series, 10, false);
    REQUIRE(joseph.steps.size() == standard.steps.size());
    for (std::size_t i = 0; i < joseph.steps.size(); ++i) {
        const double scale = std::max(1.0, std::abs(joseph.steps[i].forecast_var));
        CHECK(std::abs(joseph.steps[i].forecast_mean - standard.steps[i].forecast_mean) <=
              1e-8 * scale);
        CHECK(std::abs(joseph.steps[i].forecast_var - standard.steps[i].forecast_var) <=
              1e-8 * scale);
    }
}

TEST_CASE("interval bookkeeping is consistent") {
    const auto spec = dlmvar_tests::example_prior();
    const auto series = simulate_series({spec, 120, 55, 0, InnovationFamily::gaussian});
    const auto result = forecast_series(spec, spec.mean_V, series, 10);
    int covered = 0;
    for (const auto& step : result.steps) {
        CHECK(step.lower < step.upper);
        CHECK(step.inside == (step.observed >= step.lower && step.observed <= step.upper));
        if (step.t > 10 && step.inside) ++covered;
    }
    CHECK(covered == result.covered);
}

TEST_CASE("invalid forecast configuration is rejected") {
    const auto spec = dlmvar_tests::example_prior();
    ObservedSeries series{{1, 2, 3, 4, 5}};
    CHECK_THROWS_AS(forecast_series(spec, {0.0, 1.0, 1.0}, series), config_error);
    CHECK_THROWS_AS(forecast_series(spec, {1.0, -1.0, 1.0}, series), config_error);
    CHECK_THROWS_AS(forecast_series(spec, {1.0, 1.0, 1.0}, series, -1), config_error);
}

#include <catch2/catch_amalgamated.hpp>

#include <Eigen/Dense>

#include "dlmvar/cov_table.hpp"
#include "dlmvar/covariance.hpp"
#include "dlmvar/moment_oracle.hpp"

#include "example_prior.hpp"

using namespace dlmvar;

TEST_CASE("mean_D follows the identification coefficients") {
    const auto spec = dlmvar_tests::example_prior();
    const auto prior = build_prior_structure(spec, 12);
    for (int k = 0; k < quad_size(12); ++k) {
        const auto [series, t] = quad_decode(12, k);
        double expected = 0.0;
        switch (series) {
            case 1: expected = 6 * 25.0 + 2 * 0.04 + 0.01; break;
            case 2: expected = 4 * 25.0 + 2 * 0.04 + 2 * 0.01; break;
            case 3: expected = 4 * 25.0 + 2 * 0.04 + 3 * 0.01; break;
        }
        CHECK(prior.mean_D(k) == Catch::Approx(expected).epsilon(1e-15));
        CHECK(prior.mean_D(k) > 0.0);
    }
    CHECK(prior.mean_D(0) == Catch::Approx(150.09).epsilon(1e-12));
}

TEST_CASE("Cov(V, D) rows follow the published pattern") {
    const auto spec = dlmvar_tests::example_prior();
    const auto prior = build_prior_structure(spec, 10);
    const double c1[3] = {6, 4, 4};
    const double c2[3] = {2, 2, 2};
    const double c3[3] = {1, 2, 3};
    for (int k = 0; k < quad_size(10); ++k) {
        const auto [series, t] = quad_decode(10, k);
        CHECK(prior.cov_V_D(0, k) == c1[series - 1] * spec.var_V[0]);
        CHECK(prior.cov_V_D(1, k) == c2[series - 1] * spec.var_V[1]);
        CHECK(prior.cov_V_D(2, k) == c3[series - 1] * spec.var_V[2]);
    }
}

TEST_CASE("pure-mean prior gives the expected block-1 diagonal") {
    PriorSpec spec;
    spec.mean_V = {1.0, 1.0, 1.0};  // Var(V) = Var(S) = 0: only E-product terms survive
    const auto prior = build_prior_structure(spec, 8);
    for (int t = 3; t <= 8; ++t) {
        const int k = quad_encode(8, 1, t);
        CHECK(prior.var_D(k, k) == Catch::Approx(120.0).epsilon(1e-14));
    }
    // Independent route: evaluate the symbolic variance at the same prior.
    const auto poly = quadratic_covariance(xn_form(1, 6), xn_form(1, 6));
    CHECK(evaluate(poly, spec) == Catch::Approx(120.0).epsilon(1e-14));
}

TEST_CASE("far-apart block-1 entries are constant") {
    const auto spec = dlmvar_tests::example_prior();
    const auto prior = build_prior_structure(spec, 14);
    const double expected = spec.var_V[2] + 4 * spec.var_V[1] + 36 * spec.var_V[0];
    for (int t = 3; t <= 14; ++t) {
        for (int u = t + 3; u <= 14; ++u) {
            const int k = quad_encode(14, 1, t);
            const int l = quad_encode(14, 1, u);
            CHECK(prior.var_D(k, l) == expected);
        }
    }
}

TEST_CASE("Var(D) is symmetric by construction") {
    const auto prior = build_prior_structure(dlmvar_tests::example_prior(), 20);
    CHECK((prior.var_D - prior.var_D.transpose()).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("table-filled Var(D) equals the symbolically derived matrix at N=12") {
    const auto spec = dlmvar_tests::example_prior();
    const int N = 12;
    const auto prior = build_prior_structure(spec, N);
    const auto& table = covariance_table();
    for (int k = 0; k < quad_size(N); ++k) {
        const auto [a, t] = quad_decode(N, k);
        for (int l = k; l < quad_size(N); ++l) {
            const auto [b, u] = quad_decode(N, l);
            const auto derived = quadratic_covariance(xn_form(a, t), xn_form(b, u));
            const auto& transcribed = find_cov_case(table, a, t, b, u).value;
            INFO("entry (" << a << "," << t << ") x (" << b << "," << u << ")");
            CHECK(derived == transcribed);
            // Same canonical polynomial, same evaluation: bitwise equality.
            CHECK(prior.var_D(k, l) == evaluate(derived, spec));
        }
    }
}

TEST_CASE("worked-example Var(D) is positive semi-definite to tolerance") {
    const auto prior = build_prior_structure(dlmvar_tests::example_prior(), 12);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(prior.var_D);
    const double min_eig = solver.eigenvalues().minCoeff();
    const double norm = solver.eigenvalues().cwiseAbs().maxCoeff();
    CHECK(min_eig >= -1e-8 * norm);
    CHECK(min_var_d_eigenvalue(prior) == Catch::Approx(min_eig).margin(1e-12 * norm));
}

TEST_CASE("build rejects invalid inputs") {
    CHECK_THROWS_AS(build_prior_structure(dlmvar_tests::example_prior(), 4), data_error);
    PriorSpec bad;
    bad.mean_V = {1.0, -1.0, 1.0};
    CHECK_THROWS_AS(build_prior_structure(bad, 8), config_error);
}

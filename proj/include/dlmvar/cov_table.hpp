#pragma once

#include <algorithm>
#include <climits>
#include <string>
#include <vector>

#include "dlmvar/errors.hpp"
#include "dlmvar/moment_oracle.hpp"

namespace dlmvar {

/// One covariance case Cov(x^(a)_t^2, x^(b)_u^2) for the signed lag range
/// s = u - t in [lag_min, lag_max] (a <= b; same-series cases use s = |u - t|).
///
/// Validity floor: for fixed-lag cases, floor_abs bounds the reference time
/// (the later member for same-series cases, the a-series member for cross
/// cases). Far-regime cases with open-ended lag bound it through floor_rel:
/// reference time >= |s| + floor_rel.
struct CovCase {
    int series_a = 0;
    int series_b = 0;
    int lag_min = 0;
    int lag_max = 0;
    int floor_abs = INT_MIN;
    int floor_rel = INT_MIN;
    MomentPolynomial value;
    std::string name;
};

namespace detail {
inline MomentAtom VV(int i) { return MomentAtom::var_v(i); }
inline MomentAtom VS(int i) { return MomentAtom::var_s(i); }
inline MomentAtom EE(int i, int j) { return MomentAtom::ev_ev(i, j); }
}  // namespace detail

/// Reference table of the covariance relations over the squared differenced
/// series, one record per (series pair, lag regime). The table is data: the
/// symbolic engine re-derives every entry independently
/// (verify_covariance_table), and the matrix assembly only ever reads it.
inline const std::vector<CovCase>& covariance_table() {
    using detail::EE;
    using detail::VS;
    using detail::VV;
    static const std::vector<CovCase> table = [] {
        std::vector<CovCase> t;
        auto fixed = [&t](int a, int b, int s, int floor_abs, MomentPolynomial p,
                          std::string name) {
            t.push_back({a, b, s, s, floor_abs, INT_MIN, std::move(p), std::move(name)});
        };
        auto far = [&t](int a, int b, int lag_min, int lag_max, int floor_abs, int floor_rel,
                        MomentPolynomial p, std::string name) {
            t.push_back({a, b, lag_min, lag_max, floor_abs, floor_rel, std::move(p),
                         std::move(name)});
        };

        // cov(x1_t^2, x1_{t-s}^2)
        fixed(1, 1, 0, 3,
              {{VS(3), 1}, {VS(2), 2}, {VS(1), 18}, {VV(3), 1}, {VV(2), 8}, {VV(1), 72},
               {EE(2, 3), 8}, {EE(1, 3), 24}, {EE(2, 2), 4}, {EE(1, 2), 48}, {EE(1, 1), 36}},
              "cov(x1_t^2, x1_t^2)");
        fixed(1, 1, 1, 4,
              {{VS(2), 1}, {VS(1), 8}, {VV(3), 1}, {VV(2), 4}, {VV(1), 52},
               {EE(1, 2), 16}, {EE(1, 1), 16}},
              "cov(x1_t^2, x1_{t-1}^2)");
        fixed(1, 1, 2, 5,
              {{VS(1), 1}, {VV(3), 1}, {VV(2), 4}, {VV(1), 36}},
              "cov(x1_t^2, x1_{t-2}^2)");
        far(1, 1, 3, INT_MAX, INT_MIN, 3,
            {{VV(3), 1}, {VV(2), 4}, {VV(1), 36}},
            "cov(x1_t^2, x1_{t-s}^2), s>=3");

        // cov(x2_t^2, x2_{t-s}^2)
        fixed(2, 2, 0, 4,
              {{VS(3), 2}, {VS(2), 2}, {VS(1), 4}, {VV(3), 8}, {VV(2), 8}, {VV(1), 40},
               {EE(3, 3), 4}, {EE(2, 3), 16}, {EE(1, 3), 32}, {EE(2, 2), 4},
               {EE(1, 2), 32}, {EE(1, 1), 24}},
              "cov(x2_t^2, x2_t^2)");
        fixed(2, 2, 1, 5,
              {{VS(3), 1}, {VS(1), 3}, {VV(3), 4}, {VV(2), 4}, {VV(1), 12},
               {EE(1, 3), -4}, {EE(1, 1), -4}},
              "cov(x2_t^2, x2_{t-1}^2)");
        fixed(2, 2, 2, 6,
              {{VS(2), 1}, {VS(1), 2}, {VV(3), 4}, {VV(2), 4}, {VV(1), 20},
               {EE(1, 2), 8}, {EE(1, 1), 4}},
              "cov(x2_t^2, x2_{t-2}^2)");
        fixed(2, 2, 3, 7,
              {{VS(1), 1}, {VV(3), 4}, {VV(2), 4}, {VV(1), 16}},
              "cov(x2_t^2, x2_{t-3}^2)");
        far(2, 2, 4, INT_MAX, INT_MIN, 4,
            {{VV(3), 4}, {VV(2), 4}, {VV(1), 16}},
            "cov(x2_t^2, x2_{t-s}^2), s>=4");

        // cov(x3_t^2, x3_{t-s}^2)
        fixed(3, 3, 0, 5,
              {{VS(3), 3}, {VS(2), 2}, {VS(1), 4}, {VV(3), 21}, {VV(2), 8}, {VV(1), 40},
               {EE(3, 3), 12}, {EE(2, 3), 24}, {EE(1, 3), 48}, {EE(2, 2), 4},
               {EE(1, 2), 32}, {EE(1, 1), 24}},
              "cov(x3_t^2, x3_t^2)");
        fixed(3, 3, 1, 6,
              {{VS(3), 2}, {VS(1), 2}, {VV(3), 13}, {VV(2), 4}, {VV(1), 20},
               {EE(3, 3), 4}, {EE(1, 3), -16}, {EE(1, 1), 4}},
              "cov(x3_t^2, x3_{t-1}^2)");
        fixed(3, 3, 2, 7,
              {{VS(3), 1}, {VS(1), 1}, {VV(3), 9}, {VV(2), 4}, {VV(1), 16}, {EE(1, 3), 4}},
              "cov(x3_t^2, x3_{t-2}^2)");
        fixed(3, 3, 3, 8,
              {{VS(2), 1}, {VS(1), 2}, {VV(3), 9}, {VV(2), 4}, {VV(1), 20},
               {EE(1, 2), 8}, {EE(1, 1), 4}},
              "cov(x3_t^2, x3_{t-3}^2)");
        fixed(3, 3, 4, 9,
              {{VS(1), 1}, {VV(3), 9}, {VV(2), 4}, {VV(1), 16}},
              "cov(x3_t^2, x3_{t-4}^2)");
        far(3, 3, 5, INT_MAX, INT_MIN, 5,
            {{VV(3), 9}, {VV(2), 4}, {VV(1), 16}},
            "cov(x3_t^2, x3_{t-s}^2), s>=5");

        // cov(x1_t^2, x2_{t+s}^2), signed lag s
        far(1, 2, 4, INT_MAX, 3, INT_MIN,
            {{VV(3), 2}, {VV(2), 4}, {VV(1), 24}},
            "cov(x1_t^2, x2_{t+s}^2), s>=4");
        fixed(1, 2, 3, 3,
              {{VS(1), 1}, {VV(3), 2}, {VV(2), 4}, {VV(1), 24}},
              "cov(x1_t^2, x2_{t+3}^2)");
        fixed(1, 2, 2, 3,
              {{VS(2), 1}, {VS(1), 5}, {VV(3), 2}, {VV(2), 4}, {VV(1), 32},
               {EE(1, 2), 12}, {EE(1, 1), 8}},
              "cov(x1_t^2, x2_{t+2}^2)");
        fixed(1, 2, 1, 3,
              {{VS(3), 1}, {VS(2), 1}, {VS(1), 6}, {VV(3), 2}, {VV(2), 4}, {VV(1), 20},
               {EE(2, 3), 4}, {EE(1, 3), 8}, {EE(1, 2), 8}, {EE(1, 1), -4}},
              "cov(x1_t^2, x2_{t+1}^2)");
        fixed(1, 2, 0, 4,
              {{VS(3), 1}, {VS(2), 1}, {VS(1), 6}, {VV(3), 2}, {VV(2), 4}, {VV(1), 20},
               {EE(2, 3), 4}, {EE(1, 3), 8}, {EE(1, 2), 8}, {EE(1, 1), -4}},
              "cov(x1_t^2, x2_t^2)");
        fixed(1, 2, -1, 5,
              {{VS(2), 1}, {VS(1), 5}, {VV(3), 2}, {VV(2), 4}, {VV(1), 32},
               {EE(1, 2), 12}, {EE(1, 1), 8}},
              "cov(x1_t^2, x2_{t-1}^2)");
        fixed(1, 2, -2, 6,
              {{VS(1), 1}, {VV(3), 2}, {VV(2), 4}, {VV(1), 24}},
              "cov(x1_t^2, x2_{t-2}^2)");
        far(1, 2, INT_MIN, -3, INT_MIN, 4,
            {{VV(3), 2}, {VV(2), 4}, {VV(1), 24}},
            "cov(x1_t^2, x2_{t-s}^2), s>=3");

        // cov(x1_t^2, x3_{t+s}^2), signed lag s
        far(1, 3, 5, INT_MAX, 3, INT_MIN,
            {{VV(3), 3}, {VV(2), 4}, {VV(1), 24}},
            "cov(x1_t^2, x3_{t+s}^2), s>=5");
        fixed(1, 3, 4, 3,
              {{VS(1), 1}, {VV(3), 3}, {VV(2), 4}, {VV(1), 24}},
              "cov(x1_t^2, x3_{t+4}^2)");
        fixed(1, 3, 3, 3,
              {{VS(2), 1}, {VS(1), 5}, {VV(3), 3}, {VV(2), 4}, {VV(1), 32},
               {EE(1, 2), 12}, {EE(1, 1), 8}},
              "cov(x1_t^2, x3_{t+3}^2)");
        fixed(1, 3, 2, 3,
              {{VS(3), 1}, {VS(2), 1}, {VS(1), 5}, {VV(3), 3}, {VV(2), 4}, {VV(1), 32},
               {EE(2, 3), 4}, {EE(1, 3), 12}, {EE(1, 2), 12}, {EE(1, 1), 8}},
              "cov(x1_t^2, x3_{t+2}^2)");
        fixed(1, 3, 1, 4,
              {{VS(3), 1}, {VS(1), 2}, {VV(3), 3}, {VV(2), 4}, {VV(1), 28},
               {EE(1, 3), -8}, {EE(1, 1), 4}},
              "cov(x1_t^2, x3_{t+1}^2)");
        fixed(1, 3, 0, 5,
              {{VS(3), 1}, {VS(2), 1}, {VS(1), 5}, {VV(3), 3}, {VV(2), 4}, {VV(1), 32},
               {EE(2, 3), 4}, {EE(1, 3), 12}, {EE(1, 2), 12}, {EE(1, 1), 8}},
              "cov(x1_t^2, x3_t^2)");
        fixed(1, 3, -1, 6,
              {{VS(2), 1}, {VS(1), 5}, {VV(3), 3}, {VV(2), 4}, {VV(1), 32},
               {EE(1, 2), 12}, {EE(1, 1), 8}},
              "cov(x1_t^2, x3_{t-1}^2)");
        fixed(1, 3, -2, 7,
              {{VS(1), 1}, {VV(3), 3}, {VV(2), 4}, {VV(1), 24}},
              "cov(x1_t^2, x3_{t-2}^2)");
        far(1, 3, INT_MIN, -3, INT_MIN, 4,
            {{VV(3), 3}, {VV(2), 4}, {VV(1), 24}},
            "cov(x1_t^2, x3_{t-s}^2), s>=3");

        // cov(x2_t^2, x3_{t+s}^2), signed lag s
        far(2, 3, 5, INT_MAX, 4, INT_MIN,
            {{VV(3), 6}, {VV(2), 4}, {VV(1), 16}},
            "cov(x2_t^2, x3_{t+s}^2), s>=5");
        fixed(2, 3, 4, 4,
              {{VS(1), 1}, {VV(3), 6}, {VV(2), 4}, {VV(1), 16}},
              "cov(x2_t^2, x3_{t+4}^2)");
        fixed(2, 3, 3, 4,
              {{VS(2), 1}, {VS(1), 2}, {VV(3), 6}, {VV(2), 4}, {VV(1), 20},
               {EE(1, 2), 8}, {EE(1, 1), 4}},
              "cov(x2_t^2, x3_{t+3}^2)");
        fixed(2, 3, 2, 4,
              {{VS(3), 1}, {VS(1), 2}, {VV(3), 6}, {VV(2), 4}, {VV(1), 12}, {EE(1, 1), -4}},
              "cov(x2_t^2, x3_{t+2}^2)");
        fixed(2, 3, 1, 4,
              {{VS(3), 2}, {VS(2), 1}, {VS(1), 3}, {VV(3), 10}, {VV(2), 4}, {VV(1), 12},
               {EE(3, 3), 4}, {EE(2, 3), 8}, {EE(1, 3), 8}, {EE(1, 2), 4}, {EE(1, 1), -4}},
              "cov(x2_t^2, x3_{t+1}^2)");
        fixed(2, 3, 0, 5,
              {{VS(3), 2}, {VS(2), 1}, {VS(1), 3}, {VV(3), 10}, {VV(2), 4}, {VV(1), 12},
               {EE(3, 3), 4}, {EE(2, 3), 8}, {EE(1, 3), 8}, {EE(1, 2), 4}, {EE(1, 1), -4}},
              "cov(x2_t^2, x3_t^2)");
        fixed(2, 3, -1, 6,
              {{VS(3), 1}, {VS(1), 2}, {VV(3), 6}, {VV(2), 4}, {VV(1), 12}, {EE(1, 1), -4}},
              "cov(x2_t^2, x3_{t-1}^2)");
        fixed(2, 3, -2, 7,
              {{VS(2), 1}, {VS(1), 2}, {VV(3), 6}, {VV(2), 4}, {VV(1), 20},
               {EE(1, 2), 8}, {EE(1, 1), 4}},
              "cov(x2_t^2, x3_{t-2}^2)");
        fixed(2, 3, -3, 8,
              {{VS(1), 1}, {VV(3), 6}, {VV(2), 4}, {VV(1), 16}},
              "cov(x2_t^2, x3_{t-3}^2)");
        far(2, 3, INT_MIN, -4, INT_MIN, 5,
            {{VV(3), 6}, {VV(2), 4}, {VV(1), 16}},
            "cov(x2_t^2, x3_{t-s}^2), s>=4");

        return t;
    }();
    return table;
}

/// Case lookup for Cov(x^(a)_t^2, x^(b)_u^2). Orientation is normalized to
/// a <= b; the stored validity floor is asserted before the case is returned.
/// An entry matched by no case is a hard error.
inline const CovCase& find_cov_case(const std::vector<CovCase>& table, int a, int t, int b,
                                    int u) {
    if (a > b) {
        std::swap(a, b);
        std::swap(t, u);
    }
    const bool same = (a == b);
    const int s = same ? std::abs(u - t) : u - t;
    const int ref = same ? std::max(t, u) : t;
    for (const auto& c : table) {
        if (c.series_a != a || c.series_b != b) continue;
        if (s < c.lag_min || s > c.lag_max) continue;
        const int floor =
            (c.floor_rel != INT_MIN) ? std::abs(s) + c.floor_rel : c.floor_abs;
        if (ref < floor)
            throw numeric_error("covariance case " + c.name + " used below its validity floor (t=" +
                                std::to_string(ref) + ", floor=" + std::to_string(floor) + ")");
        return c;
    }
    throw numeric_error("no covariance case for series pair (" + std::to_string(a) + "," +
                        std::to_string(b) + ") at lag " + std::to_string(s));
}

inline const CovCase& find_cov_case(int a, int t, int b, int u) {
    return find_cov_case(covariance_table(), a, t, b, u);
}

// --- verification ------------------------------------------------------------

struct VerifyCase {
    std::string name;
    int lag = 0;
    int t = 0;
    bool pass = false;
    std::string expected;
    std::string actual;
};

struct VerifyReport {
    std::vector<VerifyCase> cases;
    bool all_pass = true;
    int failures = 0;
};

/// Re-derives every table entry with the symbolic engine and compares
/// structurally. Far-regime cases are evaluated at two representative lags.
/// Mismatches are reported, never thrown.
inline VerifyReport verify_covariance_table(const std::vector<CovCase>& table = covariance_table()) {
    VerifyReport report;
    auto check = [&report](const CovCase& c, int s_signed_b_minus_a) {
        // Representative times: place the a-member as early as the floor allows.
        const bool same = (c.series_a == c.series_b);
        const int s_abs = std::abs(s_signed_b_minus_a);
        int t = 0, u = 0;
        if (same) {
            const int floor = (c.floor_rel != INT_MIN) ? s_abs + c.floor_rel : c.floor_abs;
            t = floor;       // later member
            u = floor - s_abs;
        } else {
            const int floor = (c.floor_rel != INT_MIN) ? s_abs + c.floor_rel : c.floor_abs;
            t = floor;
            u = t + s_signed_b_minus_a;
        }
        const MomentPolynomial actual =
            quadratic_covariance(xn_form(c.series_a, t), xn_form(c.series_b, u));
        VerifyCase vc;
        vc.name = c.name;
        vc.lag = s_signed_b_minus_a;
        vc.t = t;
        vc.pass = (actual == c.value);
        vc.expected = c.value.str();
        vc.actual = actual.str();
        if (!vc.pass) {
            report.all_pass = false;
            ++report.failures;
        }
        report.cases.push_back(std::move(vc));
    };

    for (const auto& c : table) {
        if (c.lag_min == c.lag_max) {
            // Fixed lag; for same-series cases the table stores |s| and the
            // oracle is applied to (t, t - s).
            check(c, (c.series_a == c.series_b) ? -c.lag_min : c.lag_min);
        } else if (c.lag_max == INT_MAX) {
            check(c, (c.series_a == c.series_b) ? -c.lag_min : c.lag_min);
            check(c, (c.series_a == c.series_b) ? -(c.lag_min + 2) : c.lag_min + 2);
        } else {
            check(c, c.lag_max);
            check(c, c.lag_max - 2);
        }
    }
    return report;
}

}  // namespace dlmvar

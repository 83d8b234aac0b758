#pragma once

#include <array>
#include <compare>
#include <cstdint>
#include <map>
#include <sstream>
#include <string>
#include <utility>

#include <boost/rational.hpp>

#include "dlmvar/errors.hpp"
#include "dlmvar/model.hpp"

namespace dlmvar {

using Rational = boost::rational<std::int64_t>;

inline double to_double(const Rational& r) {
    return static_cast<double>(r.numerator()) / static_cast<double>(r.denominator());
}

/// One innovation Y_{jt}: component j in {1,2,3}, integer time t (any sign;
/// only relative offsets matter).
struct InnovationKey {
    int component = 0;
    int time = 0;
    auto operator<=>(const InnovationKey&) const = default;
};

/// Exact-rational linear combination of innovations, sum_p a_p Y_p.
class LinearForm {
public:
    void add(int component, int time, const Rational& coeff) {
        if (component < 1 || component > 3)
            throw numeric_error("innovation component must be 1, 2 or 3");
        if (coeff == Rational(0)) return;
        InnovationKey key{component, time};
        auto [it, inserted] = terms_.try_emplace(key, coeff);
        if (!inserted) {
            it->second += coeff;
            if (it->second == Rational(0)) terms_.erase(it);
        }
    }

    const std::map<InnovationKey, Rational>& terms() const { return terms_; }
    bool empty() const { return terms_.empty(); }

    LinearForm scaled(const Rational& c) const {
        LinearForm out;
        if (c == Rational(0)) return out;
        for (const auto& [k, v] : terms_) out.terms_.emplace(k, v * c);
        return out;
    }

    LinearForm shifted(int dt) const {
        LinearForm out;
        for (const auto& [k, v] : terms_)
            out.terms_.emplace(InnovationKey{k.component, k.time + dt}, v);
        return out;
    }

private:
    std::map<InnovationKey, Rational> terms_;
};

/// The n-step difference of the one-step-differenced series, expanded over
/// innovations:
///   sum_{i=0}^{n-1} Y_{3,t-i} + Y_{2t} - Y_{2,t-n}
///   + Y_{1t} - Y_{1,t-1} - Y_{1,t-n} + Y_{1,t-n-1}
/// For n = 1 the two Y_{1,t-1} terms merge into coefficient -2, recovering the
/// one-step stencil.
inline LinearForm xn_form(int n, int t) {
    if (n < 1) throw numeric_error("difference order n must be >= 1");
    LinearForm f;
    for (int i = 0; i < n; ++i) f.add(3, t - i, 1);
    f.add(2, t, 1);
    f.add(2, t - n, -1);
    f.add(1, t, 1);
    f.add(1, t - 1, -1);
    f.add(1, t - n, -1);
    f.add(1, t - n - 1, 1);
    return f;
}

// --- moment atoms -----------------------------------------------------------

enum class AtomKind : std::uint8_t { VarV, VarS, EV, EVEV };

/// One moment atom: Var(V_i), Var(S_it), E(V_i), or E(V_i)E(V_j) with i <= j.
struct MomentAtom {
    AtomKind kind{};
    int i = 0;
    int j = 0;  // second index for EVEV, 0 otherwise

    static MomentAtom var_v(int i) { return {AtomKind::VarV, i, 0}; }
    static MomentAtom var_s(int i) { return {AtomKind::VarS, i, 0}; }
    static MomentAtom ev(int i) { return {AtomKind::EV, i, 0}; }
    static MomentAtom ev_ev(int i, int j) {
        if (i > j) std::swap(i, j);
        return {AtomKind::EVEV, i, j};
    }

    auto operator<=>(const MomentAtom&) const = default;

    std::string str() const {
        switch (kind) {
            case AtomKind::VarV: return "Var(V" + std::to_string(i) + ")";
            case AtomKind::VarS: return "Var(S" + std::to_string(i) + ")";
            case AtomKind::EV: return "E(V" + std::to_string(i) + ")";
            case AtomKind::EVEV:
                return i == j ? "E(V" + std::to_string(i) + ")^2"
                              : "E(V" + std::to_string(i) + ")E(V" + std::to_string(j) + ")";
        }
        return "?";
    }
};

/// Canonical exact-rational linear combination of moment atoms. Equality is
/// structural: atoms sorted, zero coefficients dropped.
class MomentPolynomial {
public:
    MomentPolynomial() = default;
    MomentPolynomial(std::initializer_list<std::pair<MomentAtom, Rational>> items) {
        for (const auto& [a, c] : items) add(a, c);
    }

    void add(const MomentAtom& atom, const Rational& coeff) {
        if (coeff == Rational(0)) return;
        auto [it, inserted] = coeffs_.try_emplace(atom, coeff);
        if (!inserted) {
            it->second += coeff;
            if (it->second == Rational(0)) coeffs_.erase(it);
        }
    }

    const std::map<MomentAtom, Rational>& coeffs() const { return coeffs_; }
    bool operator==(const MomentPolynomial&) const = default;

    MomentPolynomial& operator+=(const MomentPolynomial& other) {
        for (const auto& [a, c] : other.coeffs_) add(a, c);
        return *this;
    }

    MomentPolynomial& operator*=(const Rational& c) {
        if (c == Rational(0)) {
            coeffs_.clear();
            return *this;
        }
        for (auto& [a, v] : coeffs_) v *= c;
        return *this;
    }

    std::string str() const {
        if (coeffs_.empty()) return "0";
        std::ostringstream os;
        bool first = true;
        for (const auto& [a, c] : coeffs_) {
            if (!first) os << (c > Rational(0) ? " + " : " - ");
            else if (c < Rational(0)) os << "-";
            Rational mag = c > Rational(0) ? c : -c;
            if (mag != Rational(1)) {
                os << mag.numerator();
                if (mag.denominator() != 1) os << "/" << mag.denominator();
                os << "*";
            }
            os << a.str();
            first = false;
        }
        return os.str();
    }

private:
    std::map<MomentAtom, Rational> coeffs_;
};

// --- moment rules -----------------------------------------------------------
//
// The innovations have E[Y_p] = 0, are mutually uncorrelated, and satisfy
// Y_{jt}^2 = V_j + S_{jt} with E[S] = 0, Cov(V, S) = 0, Cov(S_s, S_t) = 0 for
// s != t, Cov(V_i, V_j) = 0 and Cov(S_it, S_jt) = 0 for i != j. Fourth
// moments: E[Y_p Y_q Y_r Y_s] vanishes unless indices pair up exactly, and
// E[(Y_p Y_q)^2] = E[Y_p^2]E[Y_q^2] + Var(V_j)*[p, q share component j].
// Mixed pairings E[Y_p^2 Y_q Y_r] with q != r vanish.

/// E[A^2] over first-moment atoms: sum of squared coefficients per component.
inline MomentPolynomial quadratic_mean(const LinearForm& a) {
    MomentPolynomial out;
    for (const auto& [key, coeff] : a.terms())
        out.add(MomentAtom::ev(key.component), coeff * coeff);
    return out;
}

/// Cov(A^2, B^2) for linear forms A, B, in canonical form.
///
/// The diagonal-times-diagonal part contributes Var(V)/Var(S) atoms (its
/// E(V)E(V) part cancels exactly against E[A^2]E[B^2]); matching cross pairs
/// contribute the remaining E(V)E(V) and Var(V) terms.
inline MomentPolynomial quadratic_covariance(const LinearForm& a, const LinearForm& b) {
    MomentPolynomial out;
    for (const auto& [p, ap] : a.terms()) {
        for (const auto& [r, br] : b.terms()) {
            const Rational c = ap * ap * br * br;
            if (p == r) {
                out.add(MomentAtom::var_v(p.component), c);
                out.add(MomentAtom::var_s(p.component), c);
            } else if (p.component == r.component) {
                out.add(MomentAtom::var_v(p.component), c);
            }
        }
    }
    // Off-diagonal monomials Y_p Y_q (p < q) present in both expansions.
    const auto& bt = b.terms();
    for (auto itp = a.terms().begin(); itp != a.terms().end(); ++itp) {
        auto bp = bt.find(itp->first);
        if (bp == bt.end()) continue;
        auto itq = itp;
        for (++itq; itq != a.terms().end(); ++itq) {
            auto bq = bt.find(itq->first);
            if (bq == bt.end()) continue;
            const Rational c = Rational(4) * itp->second * itq->second * bp->second * bq->second;
            const int ci = itp->first.component, cj = itq->first.component;
            out.add(MomentAtom::ev_ev(ci, cj), c);
            if (ci == cj) out.add(MomentAtom::var_v(ci), c);
        }
    }
    return out;
}

/// Cov(V_i, A^2) = Var(V_i) * (sum of squared component-i coefficients).
inline MomentPolynomial component_covariance(int i, const LinearForm& a) {
    if (i < 1 || i > 3) throw numeric_error("component must be 1, 2 or 3");
    MomentPolynomial out;
    Rational sum(0);
    for (const auto& [key, coeff] : a.terms())
        if (key.component == i) sum += coeff * coeff;
    out.add(MomentAtom::var_v(i), sum);
    return out;
}

/// Numeric value of a moment polynomial at a prior specification.
inline double evaluate(const MomentPolynomial& poly, const PriorSpec& spec) {
    double total = 0.0;
    for (const auto& [atom, coeff] : poly.coeffs()) {
        double value = 0.0;
        switch (atom.kind) {
            case AtomKind::VarV: value = spec.var_V[static_cast<std::size_t>(atom.i - 1)]; break;
            case AtomKind::VarS: value = spec.var_S[static_cast<std::size_t>(atom.i - 1)]; break;
            case AtomKind::EV: value = spec.mean_V[static_cast<std::size_t>(atom.i - 1)]; break;
            case AtomKind::EVEV:
                value = spec.mean_V[static_cast<std::size_t>(atom.i - 1)] *
                        spec.mean_V[static_cast<std::size_t>(atom.j - 1)];
                break;
        }
        total += to_double(coeff) * value;
    }
    return total;
}

// --- identification algebra -------------------------------------------------

/// Per-series identification coefficients: row a gives the combination
/// c1 V_1 + c2 V_2 + c3 V_3 identified by the running mean of the squared
/// a-step-differenced series.
inline std::array<std::array<Rational, 3>, 3> identification_matrix() {
    return {{{Rational(6), Rational(2), Rational(1)},
             {Rational(4), Rational(2), Rational(2)},
             {Rational(4), Rational(2), Rational(3)}}};
}

/// Inverse of identification_matrix(): rows give the squared-series
/// combinations that identify V_1, V_2, V_3 individually.
inline std::array<std::array<Rational, 3>, 3> inverse_identification_matrix() {
    return {{{Rational(1, 2), Rational(-1), Rational(1, 2)},
             {Rational(-1), Rational(7, 2), Rational(-2)},
             {Rational(0), Rational(-1), Rational(1)}}};
}

}  // namespace dlmvar

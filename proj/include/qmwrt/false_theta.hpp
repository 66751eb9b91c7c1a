#pragma once

#include "cyclotomic.hpp"
#include "seifert.hpp"

#include <cmath>
#include <complex>
#include <map>
#include <numbers>
#include <stdexcept>
#include <utility>
#include <vector>

namespace qmwrt {

// Integer-valued 2P-periodic function, odd and mean-zero.
class PeriodicFunction {
public:
    PeriodicFunction() = default;
    PeriodicFunction(Int P, std::vector<Int> values) : P_(P), v_(std::move(values)) {
        if (P < 1 || static_cast<Int>(v_.size()) != 2 * P) throw std::invalid_argument("PeriodicFunction: table must have length 2P");
        Int sum = 0;
        for (Int l = 0; l < 2 * P; ++l) {
            if (v_[l] != -v_[mod(-l, 2 * P)]) throw std::invalid_argument("PeriodicFunction: table is not odd");
            sum += v_[l];
        }
        if (sum != 0) throw std::invalid_argument("PeriodicFunction: table is not mean-zero");
    }

    Int P() const { return P_; }
    Int period() const { return 2 * P_; }
    Int operator()(Int l) const { return v_[mod(l, 2 * P_)]; }
    const std::vector<Int>& values() const { return v_; }

    // (residue, value) pairs with nonzero value
    std::vector<std::pair<Int, Int>> support() const {
        std::vector<std::pair<Int, Int>> out;
        for (Int l = 0; l < 2 * P_; ++l)
            if (v_[l] != 0) out.emplace_back(l, v_[l]);
        return out;
    }

    bool is_zero() const {
        for (Int x : v_)
            if (x != 0) return false;
        return true;
    }

    PeriodicFunction operator+(const PeriodicFunction& o) const {
        check(o);
        auto w = v_;
        for (size_t i = 0; i < w.size(); ++i) w[i] += o.v_[i];
        return {P_, std::move(w)};
    }
    PeriodicFunction operator-(const PeriodicFunction& o) const { return *this + o * Int{-1}; }
    PeriodicFunction operator*(Int c) const {
        auto w = v_;
        for (auto& x : w) x *= c;
        return {P_, std::move(w)};
    }
    bool operator==(const PeriodicFunction& o) const { return P_ == o.P_ && v_ == o.v_; }

    static PeriodicFunction zero(Int P) { return {P, std::vector<Int>(2 * P, 0)}; }

private:
    void check(const PeriodicFunction& o) const {
        if (o.P_ != P_) throw std::invalid_argument("PeriodicFunction: period mismatch");
    }
    Int P_ = 1;
    std::vector<Int> v_{0, 0};
};

inline PeriodicFunction phi_basis(const std::array<Int, 3>& p, const std::array<Int, 3>& a) {
    for (int j = 0; j < 3; ++j)
        if (a[j] <= 0 || a[j] >= p[j]) throw std::invalid_argument("phi_basis: need 0 < a_j < p_j");
    Int P = p[0] * p[1] * p[2];
    std::vector<Int> t(2 * P, 0);
    for (int mask = 0; mask < 8; ++mask) {
        Int l = P, sign = -1;
        for (int j = 0; j < 3; ++j) {
            Int e = (mask >> j) & 1 ? -1 : 1;
            l += e * a[j] * (P / p[j]);
            sign *= e;
        }
        t[mod(l, 2 * P)] += sign;
    }
    return {P, std::move(t)};
}

inline PeriodicFunction psi_basis(Int P, Int a) {
    if (a < 1 || a >= P) throw std::invalid_argument("psi_basis: need 1 <= a < P");
    std::vector<Int> t(2 * P, 0);
    t[a] += 1;
    t[2 * P - a] -= 1;
    return {P, std::move(t)};
}

// Integer combination sum_a n_a psi^{(a)}, written (a) -> n_a.
inline PeriodicFunction psi_combination(Int P, const std::map<Int, Int>& coeffs) {
    auto f = PeriodicFunction::zero(P);
    for (auto& [a, n] : coeffs) f = f + psi_basis(P, a) * n;
    return f;
}

// Lowest-terms numerator/denominator with positive denominator.
inline std::pair<Int, Int> lowest_terms(const Rational& alpha) {
    return {to_int(alpha.get_num()), to_int(alpha.get_den())};
}

// (1/2) sum_{l=0}^{2Pc} f(l) e^{2 pi i alpha l^2 / 4P} (1 - l/(Pc)), alpha = a/c, exact in conductor 4Pc.
inline CycloNumber eichler_limit(const PeriodicFunction& f, const Rational& alpha) {
    auto [a, c] = lowest_terms(alpha);
    Int P = f.P(), D = 4 * P * c;
    CycloBuilder b(D);
    for (auto& [l0, v] : f.support())
        for (Int l = l0; l <= 2 * P * c; l += 2 * P) {
            Int k = static_cast<Int>((static_cast<__int128>(mod(a, D)) * (l * l % D)) % D);
            b.add(k, rat(v * (P * c - l), 2 * P * c));
        }
    return b.build();
}

inline std::complex<double> eichler_limit_numeric(const PeriodicFunction& f, const Rational& alpha) {
    auto [a, c] = lowest_terms(alpha);
    Int P = f.P(), D = 4 * P * c;
    long double re = 0, im = 0;
    for (auto& [l0, v] : f.support())
        for (Int l = l0; l <= 2 * P * c; l += 2 * P) {
            Int k = static_cast<Int>((static_cast<__int128>(mod(a, D)) * (l * l % D)) % D);
            long double t = 2 * std::numbers::pi_v<long double> * k / D;
            long double w = static_cast<long double>(v) * (P * c - l) / (2.0L * P * c);
            re += w * std::cos(t);
            im += w * std::sin(t);
        }
    return {static_cast<double>(re), static_cast<double>(im)};
}

// T^a = e^{pi i x} with x = (P/2)(1 + sum a_j/p_j)^2.
inline Rational t_phase(const std::array<Int, 3>& p, const std::array<Int, 3>& a) {
    Int P = p[0] * p[1] * p[2];
    Rational x = 1;
    for (int j = 0; j < 3; ++j) x += rat(a[j], p[j]);
    return rat(P, 2) * x * x;
}

inline Rational t_phase_psi(Int P, Int a) { return rat(a * a, 2 * P); }

using RealMatrix = std::vector<std::vector<double>>;

// Rows and columns follow rotation_numbers(p) of the relabeled triple.
inline RealMatrix s_matrix_phi(const std::array<Int, 3>& triple) {
    auto p = canonical_triple(triple);
    auto A = rotation_numbers(p);
    Int P = p[0] * p[1] * p[2];
    RealMatrix S(A.size(), std::vector<double>(A.size()));
    for (size_t i = 0; i < A.size(); ++i)
        for (size_t j = 0; j < A.size(); ++j) {
            auto& a = A[i];
            auto& b = A[j];
            Rational ex = 1;
            for (int k = 0; k < 3; ++k) ex += rat(a[k] + b[k], p[k]);
            ex *= P;
            for (int k = 0; k < 3; ++k)
                for (int l = 0; l < 3; ++l)
                    if (k != l) ex += rat(P * a[k] * b[l], p[k] * p[l]);
            if (!is_integer(ex)) throw std::logic_error("s_matrix_phi: sign exponent not integral");
            double sign = mpz_odd_p(ex.get_num_mpz_t()) ? -1.0 : 1.0;
            double prod = 1;
            for (int k = 0; k < 3; ++k) {
                // sin(P a b pi / p^2), argument reduced mod 2 pi first
                Rational arg = frac_part(rat(P * a[k] * b[k], 2 * p[k] * p[k])) * 2;
                prod *= std::sin(std::numbers::pi * arg.get_d());
            }
            S[i][j] = -8.0 / std::sqrt(2.0 * P) * sign * prod;
        }
    return S;
}

inline RealMatrix s_matrix_psi(Int P) {
    if (P < 2) throw std::invalid_argument("s_matrix_psi: P must be at least 2");
    RealMatrix M(P - 1, std::vector<double>(P - 1));
    for (Int a = 1; a < P; ++a)
        for (Int b = 1; b < P; ++b) M[a - 1][b - 1] = std::sqrt(2.0 / P) * std::sin(std::numbers::pi * (a * b % (2 * P)) / P);
    return M;
}

// L(-2k, f) = -(2P)^{2k}/(2k+1) sum_{l=1}^{2P} f(l) B_{2k+1}(l/2P)
inline Rational l_value(const PeriodicFunction& f, int k) {
    Int P = f.P();
    Rational acc = 0;
    for (auto& [l, v] : f.support()) {
        Int ll = l == 0 ? 2 * P : l;
        acc += v * bernoulli_poly(2 * k + 1, rat(ll, 2 * P));
    }
    mpz_class pw;
    mpz_pow_ui(pw.get_mpz_t(), zint(2 * P).get_mpz_t(), 2 * k);
    return -Rational(pw) / (2 * k + 1) * acc;
}

struct AsymptoticSeries {
    Rational delta = 0;  // power of s/r in front
    std::vector<Rational> coefficients;
    int order() const { return static_cast<int>(coefficients.size()) - 1; }
};

inline AsymptoticSeries trivial_series_coefficients(const PeriodicFunction& f, int K) {
    AsymptoticSeries a;
    mpz_class fact = 1;
    for (int k = 0; k <= K; ++k) {
        if (k > 0) fact *= k;
        a.coefficients.push_back(l_value(f, k) / Rational(fact));
    }
    return a;
}

// sum_{k<=K} L(-2k, f)/k! (pi i s / 2 P r)^k
inline std::complex<double> trivial_series(const PeriodicFunction& f, int K, const RootContext& ctx) {
    auto a = trivial_series_coefficients(f, K);
    std::complex<double> x(0, std::numbers::pi * static_cast<double>(ctx.s) / (2.0 * f.P() * ctx.r));
    std::complex<double> acc = 0, pw = 1;
    for (int k = 0; k <= K; ++k) {
        acc += a.coefficients[k].get_d() * pw;
        pw *= x;
    }
    return acc;
}

// sqrt(r/(i s)) on the principal branch
inline std::complex<double> sqrt_r_over_is(const RootContext& ctx) {
    return std::sqrt(std::complex<double>(static_cast<double>(ctx.r), 0) / std::complex<double>(0, static_cast<double>(ctx.s)));
}

// Phi(s/r) + sqrt(r/is) sum_b S^a_b Phi^b(-r/s) - trivial series to order K.
inline std::complex<double> s_transform_residual(const std::array<Int, 3>& triple, const std::array<Int, 3>& a, const RootContext& ctx, int K) {
    auto p = canonical_triple(triple);
    auto A = rotation_numbers(p);
    auto S = s_matrix_phi(p);
    size_t row = A.size();
    for (size_t i = 0; i < A.size(); ++i)
        if (A[i] == a) row = i;
    if (row == A.size()) throw std::invalid_argument("s_transform_residual: unknown rotation number");
    auto fa = phi_basis(p, a);
    std::complex<double> dual = 0;
    for (size_t j = 0; j < A.size(); ++j) dual += S[row][j] * eichler_limit_numeric(phi_basis(p, A[j]), -rat(ctx.r, ctx.s));
    return eichler_limit_numeric(fa, rat(ctx.s, ctx.r)) + sqrt_r_over_is(ctx) * dual - trivial_series(fa, K, ctx);
}

// sum_{0<=l<=cutoff} l f(l) e^{2 pi i tau l^2/4P}, halved when `half` (Phi normalization).
inline std::complex<double> theta_truncated(const PeriodicFunction& f, std::complex<double> tau, Int cutoff, bool half) {
    if (tau.imag() <= 0) throw std::invalid_argument("theta_truncated: need Im tau > 0");
    if (cutoff < f.period()) throw std::invalid_argument("theta_truncated: cutoff below one period");
    Int P = f.P();
    std::complex<double> acc = 0;
    const std::complex<double> twopii(0, 2 * std::numbers::pi);
    for (auto& [l0, v] : f.support())
        for (Int l = l0; l <= cutoff; l += 2 * P)
            acc += static_cast<double>(l * v) * std::exp(twopii * tau * static_cast<double>(l) * static_cast<double>(l) / (4.0 * P));
    return half ? acc / 2.0 : acc;
}

}  // namespace qmwrt

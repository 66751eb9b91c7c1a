#pragma once

#include "cyclotomic.hpp"
#include "linalg.hpp"

#include <cmath>
#include <complex>
#include <functional>
#include <numbers>
#include <stdexcept>
#include <vector>

namespace qmwrt {

// G(s, r) = sum_{n mod r} e^{2 pi i s n^2 / r}
inline CycloNumber gauss_brute(Int s, Int r) {
    if (r < 1) throw std::invalid_argument("gauss_brute: r must be positive");
    CycloBuilder b(r);
    for (Int n = 0; n < r; ++n) b.add(mod(s * mod(n * n, r), r), Int{1});
    return b.build();
}

inline std::complex<double> cis_pi(const Rational& x) {
    // e^{pi i x} with x reduced mod 2 before going to floating point
    Rational y = x / 2;
    y = frac_part(y) * 2;
    double t = std::numbers::pi * y.get_d();
    return {std::cos(t), std::sin(t)};
}

// Closed form of G(s, r): multiplicity * jacobi * unit * sqrt(sqrt_arg).
struct GaussClosed {
    enum class Unit { One, I, OnePlusIPowS, Zero };
    Unit unit = Unit::One;
    Int s = 1;              // the (reduced) s entering i^s
    int jacobi = 1;
    Int multiplicity = 1;   // gcd factor g
    Int sqrt_arg = 1;       // r / g
    bool conjugated = false;  // computed for -s and conjugated

    CycloNumber unit_exact() const {
        CycloNumber u;
        switch (unit) {
            case Unit::One: u = CycloNumber(1); break;
            case Unit::I: u = CycloNumber::root_power(4, 1); break;
            case Unit::OnePlusIPowS: u = CycloNumber(1) + CycloNumber::root_power(4, s); break;
            case Unit::Zero: u = CycloNumber(); break;
        }
        if (conjugated) u = u.conj();
        return u * rat(jacobi * multiplicity);
    }
    std::complex<double> value() const {
        return unit_exact().eval() * std::sqrt(static_cast<double>(sqrt_arg));
    }
    // exact square: unit^2 * jacobi^2 * g^2 * r1
    CycloNumber square_exact() const {
        auto u = unit_exact();
        return u * u * rat(sqrt_arg);
    }
};

inline GaussClosed gauss_closed(Int s, Int r) {
    if (r < 1) throw std::invalid_argument("gauss_closed: r must be positive");
    GaussClosed g;
    Int d = gcd(mod(s, r), r);
    if (d == 0) d = r;
    g.multiplicity = d;
    Int s1 = s / d, r1 = r / d;
    if (r1 == 1) {
        g.sqrt_arg = 1;
        return g;
    }
    g.sqrt_arg = r1;
    switch (r1 % 4) {
        case 2:
            g.unit = GaussClosed::Unit::Zero;
            g.jacobi = 0;
            break;
        case 1:
            g.jacobi = jacobi(s1, r1);
            break;
        case 3:
            g.unit = GaussClosed::Unit::I;
            g.jacobi = jacobi(s1, r1);
            break;
        case 0: {
            Int sa = s1;
            if (sa < 0) {
                g.conjugated = true;
                sa = -sa;
            }
            g.unit = GaussClosed::Unit::OnePlusIPowS;
            g.s = mod(sa, 4);
            g.jacobi = jacobi(r1, sa);
            break;
        }
    }
    return g;
}

// sum_{n mod r} xi^{P n^2 + m n}, xi = e^{2 pi i s / r}, r odd, via square completion.
inline CycloNumber gauss_linear_m(Int P, Int m, Int s, Int r) {
    if (r < 1 || r % 2 == 0) throw std::invalid_argument("gauss_linear: r must be odd");
    if (gcd(s, r) != 1) throw std::invalid_argument("gauss_linear: gcd(s, r) != 1");
    if (r == 1) return CycloNumber(1);
    Int g = gcd(mod(P, r), r);
    if (g == 0) g = r;
    if (g == 1) {
        // P n^2 + m n = P (n + m (2P)^*)^2 - m^2 (4P)^*  mod r
        Int c = mod(-mod(m * m, r) * modinv(4 * P, r), r);
        return CycloNumber::root_power(r, s * c) * gauss_brute(s * P, r);
    }
    if (mod(m, g) != 0) return CycloNumber().embedded(r);
    if (g == r) return CycloNumber(r);
    return gauss_linear_m(P / g, m / g, s, r / g) * rat(g);
}

inline CycloNumber gauss_linear(Int P, const Rational& A, Int s, Int r) {
    Rational m = 2 * A;
    if (!is_integer(m)) throw std::invalid_argument("gauss_linear: 2A must be an integer");
    return gauss_linear_m(P, to_int(m.get_num()), s, r);
}

// [n]_xi = sum_{j<n} xi^{j - (n-1)/2}
inline CycloNumber qinteger(const RootContext& ctx, Int n) {
    if (n == 0) return CycloNumber();
    Int sg = n < 0 ? -1 : 1;
    n = n < 0 ? -n : n;
    CycloBuilder b(4 * ctx.r);
    for (Int j = 0; j < n; ++j) b.add(2 * ctx.s * (2 * j - (n - 1)), Int{1});
    return b.build() * rat(sg);
}

struct UnknotNormalization {
    CycloNumber exact;               // sum_{n=1}^{r-1} xi^{sigma (n^2-1)/4} [n]^2
    std::complex<double> closed;     // -+ (r/s) ((1 +- i^s)/sqrt 2) sqrt(2r) q^{-+3/4}/(q^{1/2} - q^{-1/2})
    int jacobi = 1;
    int sign = 1;
};

inline UnknotNormalization f_unknot(int sign, const RootContext& ctx) {
    if (sign != 1 && sign != -1) throw std::invalid_argument("f_unknot: sign must be +-1");
    UnknotNormalization u;
    u.sign = sign;
    CycloNumber acc = CycloNumber().embedded(4 * ctx.r);
    for (Int n = 1; n < ctx.r; ++n) {
        auto q = qinteger(ctx, n);
        acc += xi_pow(ctx, rat(sign * (n * n - 1), 4)) * q * q;
    }
    u.exact = acc;
    u.jacobi = jacobi(ctx.r, ctx.s > 0 ? ctx.s : -ctx.s);
    std::complex<double> is = xi_pow(RootContext{4, 1}, rat(ctx.s)).eval();
    std::complex<double> unit = (1.0 + static_cast<double>(sign) * is) / std::sqrt(2.0);
    std::complex<double> q34 = xi_pow(ctx, rat(-3 * sign, 4)).eval();
    std::complex<double> den = (xi_pow(ctx, rat(1, 2)) - xi_pow(ctx, rat(-1, 2))).eval();
    u.closed = -static_cast<double>(sign) * u.jacobi * unit * std::sqrt(2.0 * ctx.r) * q34 / den;
    return u;
}

struct QuadraticFormZ {
    IntMatrix B;
    std::vector<Rational> psi;
    size_t N() const { return B.size(); }
};

struct ReciprocityResult {
    std::complex<double> lhs;
    std::complex<double> rhs;
};

inline void for_each_box(const std::vector<Int>& dims, const std::function<void(const std::vector<Int>&)>& f) {
    std::vector<Int> x(dims.size(), 0);
    for (;;) {
        f(x);
        size_t i = 0;
        while (i < dims.size()) {
            if (++x[i] < dims[i]) break;
            x[i] = 0;
            ++i;
        }
        if (i == dims.size()) return;
    }
}

// Both sides of the Deloup-Turaev reciprocity formula (standard inner product on R^N).
inline ReciprocityResult reciprocity(const QuadraticFormZ& form, Int r) {
    const auto& B = form.B;
    size_t N = form.N();
    if (r < 1) throw std::invalid_argument("reciprocity: r must be positive");
    if (form.psi.size() != N) throw std::invalid_argument("reciprocity: psi has wrong length");
    if (!is_symmetric(B)) throw std::invalid_argument("reciprocity: B must be symmetric");
    mpz_class det = determinant(B);
    if (det == 0) throw std::invalid_argument("reciprocity: B must be nondegenerate");
    for (size_t i = 0; i < N; ++i)
        if (r % 2 != 0 && B[i][i] % 2 != 0)
            throw std::invalid_argument("reciprocity: hypothesis (r/2)<x,Bx> in Z fails");
    for (size_t i = 0; i < N; ++i)
        if (!is_integer(form.psi[i] * r)) throw std::invalid_argument("reciprocity: hypothesis r<x,psi> in Z fails");

    ReciprocityResult res{0, 0};
    for_each_box(std::vector<Int>(N, r), [&](const std::vector<Int>& x) {
        Rational e = 0;
        for (size_t i = 0; i < N; ++i)
            for (size_t j = 0; j < N; ++j) e += rat(x[i] * B[i][j] * x[j], r);
        for (size_t i = 0; i < N; ++i) e += 2 * x[i] * form.psi[i];
        res.lhs += cis_pi(e);
    });
    RatMatrix Binv = inverse(B);
    IntMatrix H = column_hnf(B);
    std::vector<Int> dims(N);
    for (size_t i = 0; i < N; ++i) dims[i] = H[i][i];
    std::complex<double> sum = 0;
    for_each_box(dims, [&](const std::vector<Int>& y) {
        std::vector<Rational> v(N);
        for (size_t i = 0; i < N; ++i) v[i] = y[i] + form.psi[i];
        Rational e = 0;
        for (size_t i = 0; i < N; ++i)
            for (size_t j = 0; j < N; ++j) e += v[i] * Binv[i][j] * v[j];
        sum += cis_pi(-r * e);
    });
    Inertia in = inertia(B);
    double absdet = std::abs(det.get_d());
    res.rhs = cis_pi(rat(in.signature(), 4)) * std::pow(static_cast<double>(r), N / 2.0) / std::sqrt(absdet) * sum;
    return res;
}

struct HighRankGauss {
    int jacobi = 1;
    size_t N = 0;
    Int r = 1;
    int i_power = 0;           // power of i in the closed form
    std::complex<double> closed;
    CycloNumber brute;         // exact, conductor r
};

inline HighRankGauss gauss_high_rank(const IntMatrix& B, Int r) {
    if (r < 1 || r % 2 == 0) throw std::invalid_argument("gauss_high_rank: r must be odd");
    if (!is_symmetric(B)) throw std::invalid_argument("gauss_high_rank: B must be symmetric");
    mpz_class det = determinant(B);
    if (det == 0) throw std::invalid_argument("gauss_high_rank: B must be nondegenerate");
    mpz_class dr = det % r;
    if (gcd(to_int(dr), r) != 1) throw std::invalid_argument("gauss_high_rank: gcd(det B, r) != 1");
    HighRankGauss h;
    h.N = B.size();
    h.r = r;
    h.jacobi = jacobi(to_int(dr), r);
    h.i_power = r % 4 == 3 ? static_cast<int>(h.N % 4) : 0;
    std::complex<double> ip = std::pow(std::complex<double>(0, 1), h.i_power);
    h.closed = static_cast<double>(h.jacobi) * ip * std::pow(static_cast<double>(r), h.N / 2.0);
    CycloBuilder b(r);
    for_each_box(std::vector<Int>(h.N, r), [&](const std::vector<Int>& x) {
        Int e = 0;
        for (size_t i = 0; i < h.N; ++i)
            for (size_t j = 0; j < h.N; ++j) e = mod(e + x[i] * mod(B[i][j], r) % r * x[j], r);
        b.add(e, Int{1});
    });
    h.brute = b.build();
    return h;
}

}  // namespace qmwrt

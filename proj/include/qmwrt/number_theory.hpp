#pragma once

#include <gmpxx.h>

#include <algorithm>
#include <cstdint>
#include <numeric>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace qmwrt {

using Int = std::int64_t;
using Rational = mpq_class;

inline Rational rat(Int num, Int den = 1) {
    if (den == 0) throw std::domain_error("rat: zero denominator");
    Rational q(mpz_class(static_cast<long>(num)), mpz_class(static_cast<long>(den)));
    q.canonicalize();
    return q;
}

inline mpz_class zint(Int n) { return mpz_class(static_cast<long>(n)); }

inline Int to_int(const mpz_class& z) {
    if (!z.fits_slong_p()) throw std::overflow_error("integer does not fit in 64 bits");
    return static_cast<Int>(z.get_si());
}

inline bool is_integer(const Rational& q) { return q.get_den() == 1; }

inline mpz_class floor_of(const Rational& q) {
    mpz_class f;
    mpz_fdiv_q(f.get_mpz_t(), q.get_num_mpz_t(), q.get_den_mpz_t());
    return f;
}

inline Rational frac_part(const Rational& q) { return q - Rational(floor_of(q)); }

inline int sign_of(const Rational& q) { return sgn(q); }

inline Int mod(Int a, Int m) {
    Int r = a % m;
    return r < 0 ? r + m : r;
}

inline Int gcd(Int a, Int b) { return std::gcd(a, b); }
inline Int lcm(Int a, Int b) { return (a == 0 || b == 0) ? 0 : std::lcm(a, b); }

// Value in [0, 1); arithmetic stays canonical.
class RationalMod1 {
public:
    RationalMod1() = default;
    explicit RationalMod1(const Rational& v) : v_(frac_part(v)) {}
    const Rational& value() const { return v_; }
    RationalMod1 operator+(const RationalMod1& o) const { return RationalMod1(v_ + o.v_); }
    RationalMod1 operator-(const RationalMod1& o) const { return RationalMod1(v_ - o.v_); }
    RationalMod1 operator-() const { return RationalMod1(-v_); }
    bool operator==(const RationalMod1& o) const { return v_ == o.v_; }
    std::string str() const { return v_.get_str(); }

private:
    Rational v_{0};
};

inline int jacobi(Int a, Int n) {
    if (n <= 0 || n % 2 == 0) throw std::invalid_argument("jacobi: n must be odd and positive");
    a = mod(a, n);
    int t = 1;
    while (a != 0) {
        while (a % 2 == 0) {
            a /= 2;
            Int r = n % 8;
            if (r == 3 || r == 5) t = -t;
        }
        std::swap(a, n);
        if (a % 4 == 3 && n % 4 == 3) t = -t;
        a %= n;
    }
    return n == 1 ? t : 0;
}

inline Int modinv(Int a, Int m) {
    if (m == 1) return 0;
    Int x = 0, x1 = 1;
    Int r0 = m, r1 = mod(a, m);
    while (r1 != 0) {
        Int q = r0 / r1;
        Int t = r0 - q * r1;
        r0 = r1;
        r1 = t;
        t = x - q * x1;
        x = x1;
        x1 = t;
    }
    if (r0 != 1) throw std::invalid_argument("modinv: not invertible");
    return mod(x, m);
}

// Smallest positive s' = s mod r with s' = 1 mod 4 and gcd(s', 4r) = 1.
inline Int normalize_s(Int s, Int r) {
    if (r <= 0 || r % 2 == 0) throw std::invalid_argument("normalize_s: r must be odd and positive");
    if (gcd(mod(s, r), r) != 1) throw std::invalid_argument("normalize_s: gcd(s, r) != 1");
    Int t = r == 1 ? 1 : mod(s, r);
    if (t == 0) t = r;
    for (Int c = t;; c += r) {
        if (c % 4 == 1 && gcd(c, 4 * r) == 1) return c;
    }
}

inline std::vector<std::pair<Int, int>> factorize(Int n) {
    std::vector<std::pair<Int, int>> f;
    if (n < 0) n = -n;
    for (Int p = 2; p * p <= n; ++p) {
        if (n % p) continue;
        int e = 0;
        while (n % p == 0) {
            n /= p;
            ++e;
        }
        f.emplace_back(p, e);
    }
    if (n > 1) f.emplace_back(n, 1);
    return f;
}

inline int moebius(Int n) {
    if (n < 1) throw std::invalid_argument("moebius: n must be positive");
    int mu = 1;
    for (auto [p, e] : factorize(n)) {
        if (e > 1) return 0;
        mu = -mu;
    }
    return mu;
}

inline Int euler_phi(Int n) {
    Int phi = n;
    for (auto [p, e] : factorize(n)) phi = phi / p * (p - 1);
    return phi;
}

inline std::vector<Int> divisors(Int n) {
    std::vector<Int> d;
    for (Int k = 1; k * k <= n; ++k) {
        if (n % k) continue;
        d.push_back(k);
        if (k * k != n) d.push_back(n / k);
    }
    std::sort(d.begin(), d.end());
    return d;
}

// Dedekind sum by the reciprocity recursion.
inline Rational dedekind_sum(Int q, Int p) {
    if (p <= 0) throw std::invalid_argument("dedekind_sum: p must be positive");
    if (gcd(q, p) != 1) throw std::invalid_argument("dedekind_sum: gcd(q, p) != 1");
    Rational acc = 0;
    int sgn = 1;
    Int h = q, k = p;
    h = mod(h, k);
    while (k > 1 && h != 0) {
        // s(h,k) = -s(k,h) + (h/k + k/h + 1/(hk))/12 - 1/4
        acc += sgn * ((rat(h, k) + rat(k, h) + rat(1, h * k)) / 12 - rat(1, 4));
        sgn = -sgn;
        Int nh = mod(k, h);
        k = h;
        h = nh;
    }
    return acc;
}

inline std::vector<Rational> bernoulli_numbers(int n) {
    // B_1 = -1/2 convention
    std::vector<Rational> a(n + 1), B(n + 1);
    for (int m = 0; m <= n; ++m) {
        a[m] = Rational(1, m + 1);
        for (int j = m; j >= 1; --j) a[j - 1] = j * (a[j - 1] - a[j]);
        B[m] = a[0];
    }
    if (n >= 1) B[1] = Rational(-1, 2);
    return B;
}

inline mpz_class binomial(int n, int k) {
    mpz_class c;
    mpz_bin_uiui(c.get_mpz_t(), static_cast<unsigned long>(n), static_cast<unsigned long>(k));
    return c;
}

inline Rational bernoulli_poly(int k, const Rational& x) {
    if (k < 0) throw std::invalid_argument("bernoulli_poly: k must be nonnegative");
    auto B = bernoulli_numbers(k);
    Rational acc = 0, xp = 1;
    for (int j = k; j >= 0; --j) {
        acc += Rational(binomial(k, j)) * B[j] * xp;
        xp *= x;
    }
    return acc;
}

// xi = e^{2 pi i s / r}; quarter root e^{pi i s / 2r}.
struct RootContext {
    Int r = 1;
    Int s = 1;

    static RootContext make(Int r, Int s) {
        if (r <= 0 || r % 2 == 0) throw std::invalid_argument("r must be odd");
        if (gcd(s, 4 * r) != 1) throw std::invalid_argument("gcd(s, 4r) != 1");
        if (mod(s, 4) != 1) throw std::invalid_argument("s must be 1 mod 4");
        return RootContext{r, s};
    }
    // Any primitive root e^{2 pi i s / r} with gcd(s, r) = 1, no normalization imposed.
    static RootContext raw(Int r, Int s) {
        if (r <= 0) throw std::invalid_argument("r must be positive");
        if (gcd(s, r) != 1) throw std::invalid_argument("gcd(s, r) != 1");
        return RootContext{r, s};
    }
    // The dual root e^{-2 pi i r / s}.
    RootContext tilde() const {
        if (s > 0) return RootContext{s, -r};
        return RootContext{-s, r};
    }
    bool normalized() const { return r % 2 == 1 && mod(s, 4) == 1 && gcd(s, 4 * r) == 1; }
};

}  // namespace qmwrt

#pragma once

#include "number_theory.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <map>
#include <numbers>
#include <optional>
#include <stdexcept>
#include <utility>
#include <vector>

namespace qmwrt {

struct IntPolynomial {
    std::vector<mpz_class> c;  // ascending degree

    int degree() const {
        for (int i = static_cast<int>(c.size()) - 1; i >= 0; --i)
            if (c[i] != 0) return i;
        return -1;
    }
    bool operator==(const IntPolynomial& o) const {
        int d = degree();
        if (d != o.degree()) return false;
        for (int i = 0; i <= d; ++i)
            if (c[i] != o.c[i]) return false;
        return true;
    }
};

namespace detail {

inline void mul_xd_minus_one(std::vector<mpz_class>& p, Int d) {
    std::vector<mpz_class> out(p.size() + d);
    for (size_t i = 0; i < p.size(); ++i) {
        out[i + d] += p[i];
        out[i] -= p[i];
    }
    p.swap(out);
}

// exact division by x^d - 1
inline void div_xd_minus_one(std::vector<mpz_class>& p, Int d) {
    if (static_cast<Int>(p.size()) <= d) throw std::logic_error("cyclotomic_poly: inexact division");
    Int n = static_cast<Int>(p.size()) - 1;
    std::vector<mpz_class> q(n - d + 1);
    std::vector<mpz_class> rem = p;
    for (Int k = n; k >= d; --k) {
        q[k - d] = rem[k];
        rem[k - d] += rem[k];
        rem[k] = 0;
    }
    for (Int k = 0; k < d; ++k)
        if (rem[k] != 0) throw std::logic_error("cyclotomic_poly: inexact division");
    p.swap(q);
}

inline std::complex<double> unit_root(Int D, Int k) {
    k = mod(k, D);
    long double a = 2.0L * std::numbers::pi_v<long double> * static_cast<long double>(k) /
                    static_cast<long double>(D);
    return {static_cast<double>(std::cos(a)), static_cast<double>(std::sin(a))};
}

using QPoly = std::vector<Rational>;

inline void trim(QPoly& p) {
    while (!p.empty() && p.back() == 0) p.pop_back();
}

inline void poly_divmod(const QPoly& a, const QPoly& b, QPoly& q, QPoly& r) {
    r = a;
    trim(r);
    q.assign(r.size() >= b.size() ? r.size() - b.size() + 1 : 0, Rational(0));
    const Rational& lead = b.back();
    while (!r.empty() && r.size() >= b.size()) {
        size_t shift = r.size() - b.size();
        Rational f = r.back() / lead;
        q[shift] = f;
        for (size_t i = 0; i < b.size(); ++i) r[shift + i] -= f * b[i];
        trim(r);
    }
}

inline QPoly poly_mul(const QPoly& a, const QPoly& b) {
    if (a.empty() || b.empty()) return {};
    QPoly out(a.size() + b.size() - 1, Rational(0));
    for (size_t i = 0; i < a.size(); ++i)
        for (size_t j = 0; j < b.size(); ++j) out[i + j] += a[i] * b[j];
    trim(out);
    return out;
}

inline QPoly poly_sub(const QPoly& a, const QPoly& b) {
    QPoly out(std::max(a.size(), b.size()), Rational(0));
    for (size_t i = 0; i < a.size(); ++i) out[i] += a[i];
    for (size_t i = 0; i < b.size(); ++i) out[i] -= b[i];
    trim(out);
    return out;
}

}  // namespace detail

// Phi_D from the Moebius product prod_{d | D} (x^d - 1)^{mu(D/d)}.
inline IntPolynomial cyclotomic_poly(Int D) {
    if (D < 1) throw std::invalid_argument("cyclotomic_poly: D must be positive");
    std::vector<mpz_class> p{1};
    std::vector<Int> den;
    for (Int d : divisors(D)) {
        int mu = moebius(D / d);
        if (mu == 1) detail::mul_xd_minus_one(p, d);
        if (mu == -1) den.push_back(d);
    }
    for (Int d : den) detail::div_xd_minus_one(p, d);
    IntPolynomial out{p};
    out.c.resize(out.degree() + 1);
    return out;
}

// Element of Q(zeta_D) stored in the group algebra Q[Z/D].
class CycloNumber {
public:
    using Term = std::pair<Int, Rational>;

    CycloNumber() = default;
    CycloNumber(const Rational& c) {  // NOLINT: constants convert implicitly
        if (c != 0) terms_.emplace_back(0, c);
    }
    CycloNumber(Int c) : CycloNumber(rat(c)) {}  // NOLINT

    static CycloNumber root_power(Int D, Int k) {
        if (D < 1) throw std::invalid_argument("root_power: D must be positive");
        CycloNumber x;
        x.D_ = D;
        x.terms_.emplace_back(mod(k, D), Rational(1));
        return x;
    }

    static CycloNumber from_terms(Int D, std::vector<Term> t) {
        CycloNumber x;
        x.D_ = D;
        for (auto& [k, c] : t) k = mod(k, D);
        std::sort(t.begin(), t.end(), [](const Term& a, const Term& b) { return a.first < b.first; });
        for (auto& [k, c] : t) {
            if (!x.terms_.empty() && x.terms_.back().first == k)
                x.terms_.back().second += c;
            else
                x.terms_.emplace_back(k, std::move(c));
        }
        x.drop_zeros();
        return x;
    }

    Int conductor() const { return D_; }
    const std::vector<Term>& terms() const { return terms_; }
    bool is_structurally_zero() const { return terms_.empty(); }

    CycloNumber embedded(Int D) const {
        if (D % D_ != 0) throw std::invalid_argument("embedded: conductor must be a multiple");
        CycloNumber x;
        x.D_ = D;
        Int f = D / D_;
        x.terms_ = terms_;
        for (auto& t : x.terms_) t.first *= f;
        return x;
    }

    // Smallest conductor in which all stored indices live.
    CycloNumber compacted() const {
        Int g = D_;
        for (auto& t : terms_) g = gcd(g, t.first);
        if (g <= 1) return *this;
        CycloNumber x;
        x.D_ = D_ / g;
        x.terms_ = terms_;
        for (auto& t : x.terms_) t.first /= g;
        return x;
    }

    CycloNumber operator-() const {
        CycloNumber x = *this;
        for (auto& t : x.terms_) t.second = -t.second;
        return x;
    }

    friend CycloNumber operator+(const CycloNumber& a, const CycloNumber& b) { return combine(a, b, 1); }
    friend CycloNumber operator-(const CycloNumber& a, const CycloNumber& b) { return combine(a, b, -1); }

    friend CycloNumber operator*(const CycloNumber& a, const Rational& c) {
        if (c == 0) return CycloNumber().with_conductor(a.D_);
        CycloNumber x = a;
        for (auto& t : x.terms_) t.second *= c;
        return x;
    }
    friend CycloNumber operator*(const Rational& c, const CycloNumber& a) { return a * c; }
    friend CycloNumber operator/(const CycloNumber& a, const Rational& c) {
        if (c == 0) throw std::domain_error("division by zero");
        return a * Rational(1 / c);
    }

    friend CycloNumber operator*(const CycloNumber& a, const CycloNumber& b) {
        Int D = lcm(a.D_, b.D_);
        Int fa = D / a.D_, fb = D / b.D_;
        if (a.terms_.empty() || b.terms_.empty()) return CycloNumber().with_conductor(D);
        if (b.terms_.size() == 1 && b.terms_[0].second == 1) return a.shifted(D, fa, b.terms_[0].first * fb);
        if (a.terms_.size() == 1 && a.terms_[0].second == 1) return b.shifted(D, fb, a.terms_[0].first * fa);
        if (a.terms_.size() * b.terms_.size() * 4 < static_cast<size_t>(D)) {
            std::vector<Term> t;
            t.reserve(a.terms_.size() * b.terms_.size());
            for (auto& [ka, ca] : a.terms_)
                for (auto& [kb, cb] : b.terms_) t.emplace_back(ka * fa + kb * fb, ca * cb);
            return from_terms(D, std::move(t));
        }
        if (auto fast = multiply_scaled(a, b, D, fa, fb)) return *fast;
        std::vector<Rational> acc(static_cast<size_t>(D));
        std::vector<char> used(static_cast<size_t>(D), 0);
        Rational tmp;
        for (auto& [ka, ca] : a.terms_) {
            Int ia = ka * fa;
            for (auto& [kb, cb] : b.terms_) {
                Int k = ia + kb * fb;
                if (k >= D) k -= D;
                mpq_mul(tmp.get_mpq_t(), ca.get_mpq_t(), cb.get_mpq_t());
                acc[k] += tmp;
                used[k] = 1;
            }
        }
        CycloNumber x;
        x.D_ = D;
        for (Int k = 0; k < D; ++k)
            if (used[k] && acc[k] != 0) x.terms_.emplace_back(k, std::move(acc[k]));
        return x;
    }

    CycloNumber& operator+=(const CycloNumber& o) { return *this = *this + o; }
    CycloNumber& operator-=(const CycloNumber& o) { return *this = *this - o; }
    CycloNumber& operator*=(const CycloNumber& o) { return *this = *this * o; }

    CycloNumber conj() const {
        CycloNumber x;
        x.D_ = D_;
        for (auto& [k, c] : terms_) x.terms_.emplace_back(mod(-k, D_), c);
        std::sort(x.terms_.begin(), x.terms_.end(),
                  [](const Term& a, const Term& b) { return a.first < b.first; });
        return x;
    }

    CycloNumber pow(Int e) const {
        if (e < 0) return invert().pow(-e);
        CycloNumber result = CycloNumber(Int{1}).with_conductor(D_), base = *this;
        while (e > 0) {
            if (e & 1) result = result * base;
            e >>= 1;
            if (e) base = base * base;
        }
        return result;
    }

    // Coordinates in the tensor product of prime-power power bases (an integral basis).
    std::vector<Rational> crt_coefficients() const {
        auto fac = factorize(D_);
        size_t w = fac.size();
        std::vector<Int> q(w), ph(w), p(w), stride(w), low(w);
        Int step = 1;
        for (size_t i = w; i-- > 0;) {
            p[i] = fac[i].first;
            q[i] = 1;
            for (int e = 0; e < fac[i].second; ++e) q[i] *= p[i];
            low[i] = q[i] / p[i];
            ph[i] = q[i] - low[i];
            stride[i] = step;
            step *= q[i];
        }
        std::vector<Rational> a(static_cast<size_t>(D_));
        for (auto& [k, c] : terms_) {
            Int L = 0;
            for (size_t i = 0; i < w; ++i) L += (k % q[i]) * stride[i];
            a[L] += c;
        }
        Rational v;
        for (size_t i = 0; i < w; ++i) {
            for (Int L = 0; L < D_; ++L) {
                Int ci = (L / stride[i]) % q[i];
                if (ci < ph[i] || a[L] == 0) continue;
                v = a[L];
                a[L] = 0;
                Int t = ci - ph[i];
                for (Int j = 0; j + 1 < p[i]; ++j) a[L + (t + j * low[i] - ci) * stride[i]] -= v;
            }
        }
        std::vector<Rational> out;
        out.reserve(static_cast<size_t>(euler_phi(D_)));
        for (Int L = 0; L < D_; ++L) {
            bool inside = true;
            for (size_t i = 0; i < w && inside; ++i) inside = (L / stride[i]) % q[i] < ph[i];
            if (inside) out.push_back(a[L]);
        }
        return out;
    }

    bool is_zero() const {
        if (terms_.empty()) return true;
        for (auto& c : crt_coefficients())
            if (c != 0) return false;
        return true;
    }

    bool is_integral() const {
        bool all_int = true;
        for (auto& t : terms_) all_int = all_int && is_integer(t.second);
        if (all_int) return true;
        for (auto& c : crt_coefficients())
            if (!is_integer(c)) return false;
        return true;
    }

    // Representative of degree < phi(D) modulo Phi_D.
    std::vector<Rational> to_power_basis() const {
        IntPolynomial phi = cyclotomic_poly(D_);
        Int n = phi.degree();
        std::vector<Rational> a(static_cast<size_t>(std::max<Int>(D_, n)));
        for (auto& [k, c] : terms_) a[k] += c;
        std::vector<std::pair<Int, Rational>> low;
        for (Int j = 0; j < n; ++j)
            if (phi.c[j] != 0) low.emplace_back(j, Rational(phi.c[j]));
        for (Int k = static_cast<Int>(a.size()) - 1; k >= n; --k) {
            if (a[k] == 0) continue;
            Rational c = a[k];
            a[k] = 0;
            for (auto& [j, pj] : low) a[k - n + j] -= c * pj;
        }
        a.resize(static_cast<size_t>(n));
        return a;
    }

    static CycloNumber from_power_basis(Int D, const std::vector<Rational>& coeffs) {
        std::vector<Term> t;
        for (size_t j = 0; j < coeffs.size(); ++j)
            if (coeffs[j] != 0) t.emplace_back(static_cast<Int>(j), coeffs[j]);
        return from_terms(D, std::move(t));
    }

    // Extended Euclid against Phi_D.
    CycloNumber invert() const {
        std::vector<Rational> a = to_power_basis();
        detail::trim(a);
        if (a.empty()) throw std::domain_error("invert: zero element");
        IntPolynomial phi = cyclotomic_poly(D_);
        detail::QPoly r0(phi.c.begin(), phi.c.end()), r1 = a, s0, s1{Rational(1)};
        detail::trim(r0);
        while (!r1.empty()) {
            detail::QPoly q, r;
            detail::poly_divmod(r0, r1, q, r);
            detail::QPoly s = detail::poly_sub(s0, detail::poly_mul(q, s1));
            if (!r.empty()) {
                Rational lead = r.back();
                for (auto& c : r) c /= lead;
                for (auto& c : s) c /= lead;
            }
            r0 = std::move(r1);
            r1 = std::move(r);
            s0 = std::move(s1);
            s1 = std::move(s);
        }
        if (r0.size() != 1) throw std::domain_error("invert: not invertible");
        for (auto& c : s0) c /= r0[0];
        return from_power_basis(D_, s0);
    }

    std::complex<double> eval() const {
        std::complex<double> sum = 0, comp = 0;
        for (auto& [k, c] : terms_) {
            std::complex<double> y = c.get_d() * detail::unit_root(D_, k) - comp;
            std::complex<double> t = sum + y;
            comp = (t - sum) - y;
            sum = t;
        }
        return sum;
    }

    friend bool operator==(const CycloNumber& a, const CycloNumber& b) { return (a - b).is_zero(); }

    CycloNumber with_conductor(Int D) const {
        if (D == D_) return *this;
        return embedded(lcm(D, D_));
    }

private:
    Int D_ = 1;
    std::vector<Term> terms_;

    // Common denominator and integer numerators, if all fit in 63 bits.
    bool scaled(Int& den, std::vector<std::pair<Int, Int>>& out, double& maxabs) const {
        mpz_class L = 1;
        for (auto& t : terms_) mpz_lcm(L.get_mpz_t(), L.get_mpz_t(), t.second.get_den_mpz_t());
        if (!L.fits_slong_p()) return false;
        den = L.get_si();
        out.clear();
        maxabs = 0;
        mpz_class n;
        for (auto& [k, c] : terms_) {
            n = c.get_num() * (L / c.get_den());
            if (!n.fits_slong_p()) return false;
            out.emplace_back(k, n.get_si());
            maxabs = std::max(maxabs, std::abs(static_cast<double>(out.back().second)));
        }
        return true;
    }

    // Dense product on 128-bit integer accumulators; nullopt when the bound is not safe.
    static std::optional<CycloNumber> multiply_scaled(const CycloNumber& a, const CycloNumber& b, Int D, Int fa, Int fb) {
        Int da, db;
        double ma, mb;
        std::vector<std::pair<Int, Int>> ia, ib;
        if (!a.scaled(da, ia, ma) || !b.scaled(db, ib, mb)) return std::nullopt;
        double bound = ma * mb * static_cast<double>(std::min(ia.size(), ib.size()));
        if (!(bound < 1e36)) return std::nullopt;
        std::vector<__int128> acc(static_cast<size_t>(D), 0);
        for (auto& [ka, ca] : ia) {
            Int i0 = ka * fa;
            for (auto& [kb, cb] : ib) {
                Int k = i0 + kb * fb;
                if (k >= D) k -= D;
                acc[k] += static_cast<__int128>(ca) * cb;
            }
        }
        mpz_class den = zint(da) * zint(db);
        CycloNumber x;
        x.D_ = D;
        for (Int k = 0; k < D; ++k) {
            if (acc[k] == 0) continue;
            __int128 v = acc[k];
            bool neg = v < 0;
            unsigned __int128 u = neg ? static_cast<unsigned __int128>(-v) : static_cast<unsigned __int128>(v);
            mpz_class num = mpz_class(static_cast<unsigned long>(u >> 64));
            num <<= 64;
            num += mpz_class(static_cast<unsigned long>(u & ~0UL));
            if (neg) num = -num;
            Rational c(num, den);
            c.canonicalize();
            x.terms_.emplace_back(k, std::move(c));
        }
        return x;
    }

    void drop_zeros() {
        terms_.erase(std::remove_if(terms_.begin(), terms_.end(), [](const Term& t) { return t.second == 0; }),
                     terms_.end());
    }

    CycloNumber shifted(Int D, Int f, Int by) const {
        CycloNumber x;
        x.D_ = D;
        x.terms_ = terms_;
        for (auto& t : x.terms_) t.first = mod(t.first * f + by, D);
        std::sort(x.terms_.begin(), x.terms_.end(),
                  [](const Term& a, const Term& b) { return a.first < b.first; });
        return x;
    }

    static CycloNumber combine(const CycloNumber& a, const CycloNumber& b, int sign) {
        Int D = lcm(a.D_, b.D_);
        Int fa = D / a.D_, fb = D / b.D_;
        CycloNumber x;
        x.D_ = D;
        x.terms_.reserve(a.terms_.size() + b.terms_.size());
        size_t i = 0, j = 0;
        while (i < a.terms_.size() || j < b.terms_.size()) {
            Int ka = i < a.terms_.size() ? a.terms_[i].first * fa : D;
            Int kb = j < b.terms_.size() ? b.terms_[j].first * fb : D;
            if (ka < kb) {
                x.terms_.emplace_back(ka, a.terms_[i++].second);
            } else if (kb < ka) {
                x.terms_.emplace_back(kb, sign > 0 ? b.terms_[j].second : Rational(-b.terms_[j].second));
                ++j;
            } else {
                Rational c = a.terms_[i].second;
                if (sign > 0)
                    c += b.terms_[j].second;
                else
                    c -= b.terms_[j].second;
                if (c != 0) x.terms_.emplace_back(ka, std::move(c));
                ++i;
                ++j;
            }
        }
        return x;
    }
};

// Dense accumulator for sums of many root powers in a fixed conductor.
class CycloBuilder {
public:
    explicit CycloBuilder(Int D) : D_(D), a_(static_cast<size_t>(D)) {}
    Int conductor() const { return D_; }
    void add(Int k, const Rational& c) { a_[mod(k, D_)] += c; }
    void add(Int k, Int c) { a_[mod(k, D_)] += zint(c); }
    void add(const CycloNumber& x) {
        if (D_ % x.conductor() != 0) throw std::invalid_argument("CycloBuilder: conductor mismatch");
        Int f = D_ / x.conductor();
        for (auto& [k, c] : x.terms()) a_[k * f] += c;
    }
    CycloNumber build() const {
        std::vector<CycloNumber::Term> t;
        for (Int k = 0; k < D_; ++k)
            if (a_[k] != 0) t.emplace_back(k, a_[k]);
        return CycloNumber::from_terms(D_, std::move(t));
    }

private:
    Int D_;
    std::vector<Rational> a_;
};

// 1/(w - 1) for w = zeta_D^k != 1: (1/o) sum_{j<o} j w^j with o the order of w.
inline CycloNumber inv_root_minus_one(Int D, Int k) {
    k = mod(k, D);
    if (k == 0) throw std::domain_error("inv_root_minus_one: root equals 1");
    Int o = D / gcd(D, k);
    std::vector<CycloNumber::Term> t;
    for (Int j = 1; j < o; ++j) t.emplace_back(k * j, rat(j, o));
    return CycloNumber::from_terms(D, std::move(t));
}

// xi^x = e^{2 pi i s x / r}
inline CycloNumber xi_pow(const RootContext& ctx, const Rational& x) {
    mpz_class num = ctx.s * x.get_num();
    mpz_class den = ctx.r * x.get_den();
    Int d = to_int(den);
    mpz_class k;
    mpz_fdiv_r(k.get_mpz_t(), num.get_mpz_t(), den.get_mpz_t());
    Int kk = to_int(k);
    Int g = gcd(kk, d);
    return CycloNumber::root_power(d / g, kk / g);
}

inline CycloNumber xi_pow(const RootContext& ctx, Int num, Int den = 1) { return xi_pow(ctx, rat(num, den)); }

// e^{2 pi i x}
inline CycloNumber exp2pii(const Rational& x) { return xi_pow(RootContext{1, 1}, x); }

}  // namespace qmwrt

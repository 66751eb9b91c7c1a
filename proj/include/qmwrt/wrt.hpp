#pragma once

#include "gauss_sums.hpp"
#include "linalg.hpp"
#include "seifert.hpp"

#include <complex>
#include <cstdlib>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace qmwrt {

// Tau: tau_M(xi).  W: sqrt(H) (H/s) (xi - 1) tau.  Prefactored: xi^delta (xi - 1) tau.
enum class WrtNormalization { Tau, W, Prefactored };

struct WrtValue {
    std::optional<CycloNumber> exact;
    std::complex<double> numeric;
    WrtNormalization tag = WrtNormalization::Tau;
    Rational delta = 0;

    static WrtValue from_exact(CycloNumber x, WrtNormalization tag, const Rational& delta = 0) {
        WrtValue v;
        v.numeric = x.eval();
        v.exact = std::move(x);
        v.tag = tag;
        v.delta = delta;
        return v;
    }
    bool consistent(double tol = 1e-9) const { return !exact || std::abs(exact->eval() - numeric) < tol; }
};

inline const char* normalization_name(WrtNormalization t) {
    switch (t) {
        case WrtNormalization::Tau: return "tau";
        case WrtNormalization::W: return "W";
        case WrtNormalization::Prefactored: return "prefactored";
    }
    return "?";
}

// Cap on the number of color tuples the surgery oracle may visit (QMWRT_MAX_COLORS, default 10^6).
inline long double max_colors() {
    if (const char* env = std::getenv("QMWRT_MAX_COLORS")) {
        char* end = nullptr;
        long double v = std::strtold(env, &end);
        if (end != env && v > 0) return v;
    }
    return 1e6L;
}

// 1/[n] = (xi^{1/2} - xi^{-1/2}) xi^{n/2} / (xi^n - 1)
inline CycloNumber inv_qinteger(const RootContext& ctx, Int n) {
    if (mod(n, ctx.r) == 0) throw std::domain_error("inv_qinteger: [n] vanishes for r | n");
    Int D = 4 * ctx.r;
    auto half = xi_pow(ctx, rat(1, 2)) - xi_pow(ctx, rat(-1, 2));
    return half * xi_pow(ctx, rat(n, 2)) * inv_root_minus_one(D, mod(4 * ctx.s * n, D));
}

namespace detail {

inline std::vector<Int> signed_framings(const SeifertData& d) {
    std::vector<Int> f;
    for (auto& fb : d.fibers) f.push_back(fb.p * fb.q);
    return f;
}

inline CycloNumber pow_nonneg(const CycloNumber& x, Int e) {
    CycloNumber r(1);
    for (Int i = 0; i < e; ++i) r = r * x;
    return r;
}

// (xi^{n/2} - xi^{-n/2})^{-k}, any integer k
inline CycloNumber sine_power(const RootContext& ctx, Int n, Int k) {
    auto w = xi_pow(ctx, rat(n, 2)) - xi_pow(ctx, rat(-n, 2));
    if (k <= 0) return pow_nonneg(w, -k);
    Int D = 4 * ctx.r;
    auto inv = xi_pow(ctx, rat(n, 2)) * inv_root_minus_one(D, mod(4 * ctx.s * n, D));
    return pow_nonneg(inv, k);
}

}  // namespace detail

// Colors (n_0, n_1, ..., n_m): center n_0, fiber j colored n_j.
inline CycloNumber colored_jones_seifert_link(const SeifertData& data, const std::vector<Int>& colors, const RootContext& ctx) {
    auto d = data.effective();
    if (!d.integral_framings()) throw std::invalid_argument("colored_jones: framings must be integral (q_j = +-1)");
    if (colors.size() != d.m() + 1) throw std::invalid_argument("colored_jones: need m + 1 colors");
    auto f = detail::signed_framings(d);
    Int n0 = colors[0];
    Int m = static_cast<Int>(d.m());
    CycloNumber J = xi_pow(ctx, rat(d.b * (n0 * n0 - 1), 4));
    for (Int j = 0; j < m; ++j) {
        Int nj = colors[j + 1];
        J = J * xi_pow(ctx, rat(f[j] * (nj * nj - 1), 4)) * qinteger(ctx, n0 * nj);
    }
    if (m >= 1) {
        J = J * detail::pow_nonneg(inv_qinteger(ctx, n0), m - 1);
    } else {
        J = J * qinteger(ctx, n0);
    }
    return J;
}

// tau_M(xi) from the colored Jones sum over {1..r-1}^{m+1}, normalized by F(U^{+-1})^{b_+-}.
inline WrtValue wrt_brute_surgery(const SeifertData& data, const RootContext& ctx) {
    auto d = data.effective();
    d.validate();
    if (!d.integral_framings()) throw std::invalid_argument("wrt_brute_surgery: framings must be integral (q_j = +-1)");
    if (ctx.r < 2) throw std::invalid_argument("wrt_brute_surgery: need r >= 2");
    long double tuples = 1;
    for (size_t j = 0; j <= d.m(); ++j) tuples *= static_cast<long double>(ctx.r - 1);
    if (tuples > max_colors())
        throw std::length_error("wrt_brute_surgery: color space " + std::to_string(static_cast<double>(tuples)) +
                                " exceeds QMWRT_MAX_COLORS");
    auto f = detail::signed_framings(d);
    Int m = static_cast<Int>(d.m());
    Int D = 4 * ctx.r;
    std::vector<CycloNumber> qn(static_cast<size_t>(ctx.r));
    for (Int n = 1; n < ctx.r; ++n) qn[n] = qinteger(ctx, n);
    // F = sum_{n0} xi^{b(n0^2-1)/4} [n0]^{2-m} prod_j sum_{nj} xi^{f_j(nj^2-1)/4} [n0 nj][nj]
    CycloBuilder F(D);
    for (Int n0 = 1; n0 < ctx.r; ++n0) {
        CycloNumber term = xi_pow(ctx, rat(d.b * (n0 * n0 - 1), 4));
        if (m <= 2)
            term = term * detail::pow_nonneg(qn[n0], 2 - m);
        else
            term = term * detail::pow_nonneg(inv_qinteger(ctx, n0), m - 2);
        for (Int j = 0; j < m; ++j) {
            CycloBuilder inner(D);
            for (Int nj = 1; nj < ctx.r; ++nj) inner.add(xi_pow(ctx, rat(f[j] * (nj * nj - 1), 4)) * qinteger(ctx, n0 * nj) * qn[nj]);
            term = term * inner.build();
        }
        F.add(term.with_conductor(D));
    }
    auto in = inertia(framing_matrix(d));
    CycloNumber norm(1);
    if (in.positive > 0) norm = norm * detail::pow_nonneg(f_unknot(1, ctx).exact, in.positive);
    if (in.negative > 0) norm = norm * detail::pow_nonneg(f_unknot(-1, ctx).exact, in.negative);
    if (in.zero > 0) throw std::invalid_argument("wrt_brute_surgery: linking matrix is degenerate");
    return WrtValue::from_exact(F.build() * norm.invert(), WrtNormalization::Tau);
}

namespace detail {

// G = sum_{n mod 2Pr} xi^{-n^2/4P}, conductor 4Pr
inline CycloNumber half_gauss(Int P, const RootContext& ctx) {
    Int D = 4 * P * ctx.r;
    std::vector<CycloNumber::Term> t;
    for (Int n = 0; n < 2 * P * ctx.r; ++n) t.emplace_back(mod(-ctx.s * mod(n * n, D), D), rat(1));
    return CycloNumber::from_terms(D, std::move(t));
}

// Integer homology sphere route: What / (2G) with 1/(2G) = conj(G) / (2 |G|^2), |G|^2 = 2Pr gcd(s, P).
inline CycloNumber wrt_zhs(const SeifertData& d, const SeifertInvariants& inv, const RootContext& ctx) {
    Int P = inv.P, r = ctx.r, s = ctx.s, H = inv.H;
    Int m = static_cast<Int>(d.m());
    Int D = 4 * P * r;
    if (r == 1) return CycloNumber().embedded(D);
    std::vector<std::vector<CycloNumber::Term>> byres(static_cast<size_t>(2 * r));
    for (Int n = 0; n < 2 * P * r; ++n) {
        if (n % r == 0) continue;
        // xi^{-H n^2/4P} prod_j (xi^{n/2p_j} - xi^{-n/2p_j}) as 2^m signed monomials
        Int base = mod(-s * H * mod(n * n, D), D);
        std::vector<std::pair<Int, Int>> mono{{base, 1}};
        for (auto& fb : d.fibers) {
            Int k = mod(s * n * (2 * P / fb.p), D);
            std::vector<std::pair<Int, Int>> next;
            next.reserve(mono.size() * 2);
            for (auto& [e, c] : mono) {
                next.emplace_back(mod(e + k, D), c);
                next.emplace_back(mod(e - k, D), -c);
            }
            mono.swap(next);
        }
        auto& bucket = byres[n % (2 * r)];
        for (auto& [e, c] : mono) bucket.emplace_back(e, rat(c));
    }
    RootContext c4{r, s};
    CycloBuilder acc(D);
    for (Int c = 0; c < 2 * r; ++c) {
        if (c % r == 0 || byres[c].empty()) continue;
        auto A = CycloNumber::from_terms(D, std::move(byres[c]));
        acc.add((sine_power(c4, c, m - 2) * A).with_conductor(D));
    }
    auto What = acc.build();
    Int N = 2 * P * r * gcd(s, P);
    return What * half_gauss(P, ctx).conj() / rat(2 * N);
}

// q_j = +-1 route: the n_0 Gauss sums are evaluated in closed form, leaving
// -(-1)^{b_+}/2 e^{pi i (sum sgn f_j - sigma(B) - 1)/4} conj(G)/(2|P|r) sum_{n0} ...
inline CycloNumber wrt_qhs(const SeifertData& d, const RootContext& ctx) {
    auto f = signed_framings(d);
    Int m = static_cast<Int>(f.size());
    Int P = 1, sgnsum = 0;
    for (Int x : f) {
        P *= x < 0 ? -x : x;
        sgnsum += x > 0 ? 1 : -1;
    }
    if (gcd(ctx.s, P) != 1) throw std::invalid_argument("wrt_seifert_closed: needs gcd(s, prod p_j) = 1 for q_j = +-1 data");
    Int r = ctx.r;
    Int D = 4 * P * r;
    if (r == 1) return CycloNumber().embedded(D);
    CycloBuilder tot(D);
    for (Int n0 = 1; n0 < 2 * r; ++n0) {
        if (n0 == r) continue;
        CycloNumber t = xi_pow(ctx, rat(d.b * n0 * n0, 4)) * sine_power(ctx, n0, m - 2);
        for (Int fj : f) {
            Int af = fj < 0 ? -fj : fj;
            CycloBuilder inner(D);
            for (Int nj = 0; nj < af; ++nj) {
                Int k = n0 + 2 * r * nj;
                auto g = xi_pow(ctx, rat(-k * k, 4 * fj));
                inner.add((g * (xi_pow(ctx, rat(k, 2 * fj)) - xi_pow(ctx, rat(-k, 2 * fj)))).with_conductor(D));
            }
            t = t * inner.build();
        }
        tot.add(t.with_conductor(D));
    }
    auto in = inertia(framing_matrix(d));
    Int phase = sgnsum - in.signature() - 1;
    Rational sign = in.positive % 2 == 0 ? rat(-1, 2) : rat(1, 2);
    auto pref = CycloNumber::root_power(8, phase) * half_gauss(P, ctx).conj() * (sign / rat(2 * P * r));
    return pref * tot.build();
}

}  // namespace detail

// xi^{phi/4 - 1/2} (xi - 1) tau_M(xi), exact. Orientation with e < 0 goes through the mirror:
// (xi - 1) tau_M = -xi conj((xi - 1) tau_{-M}).
inline WrtValue wrt_seifert_closed(const SeifertData& data, const RootContext& ctx) {
    if (!ctx.normalized()) throw std::invalid_argument("wrt_seifert_closed: need r odd, gcd(s, 4r) = 1, s = 1 mod 4");
    auto d = data.effective();
    d.validate();
    auto inv = invariants(d);
    if (inv.e == 0) throw std::invalid_argument("wrt_seifert_closed: e = 0 is not a rational homology sphere");
    Rational delta = inv.phi / 4 - rat(1, 2);
    if (inv.e < 0) {
        auto mir = wrt_seifert_closed(d.mirror(), ctx);
        auto w = *mir.exact * xi_pow(ctx, -mir.delta);
        auto here = -(xi_pow(ctx, 1) * w.conj()) * xi_pow(ctx, delta);
        return WrtValue::from_exact(here, WrtNormalization::Prefactored, delta);
    }
    CycloNumber v;
    if (inv.H == 1) {
        v = detail::wrt_zhs(d, inv, ctx);
    } else if (d.integral_framings()) {
        v = detail::wrt_qhs(d, ctx);
    } else {
        throw std::invalid_argument("wrt_seifert_closed: rational homology spheres need q_j = +-1");
    }
    return WrtValue::from_exact(v, WrtNormalization::Prefactored, delta);
}

// tau from any exact normalization
inline CycloNumber tau_of(const WrtValue& v, Int H, const RootContext& ctx);

// sqrt(H) inside a cyclotomic field, from G(1, H) or G(1, 4H).
inline CycloNumber sqrt_exact(Int H) {
    if (H < 1) throw std::invalid_argument("sqrt_exact: H must be positive");
    if (H == 1) return CycloNumber(1);
    if (H % 2 == 1) {
        auto g = gauss_brute(1, H);
        return H % 4 == 1 ? g : g * CycloNumber::root_power(4, 3);
    }
    // G(1, 4H) = 2 (1 + i) sqrt(H)
    return gauss_brute(1, 4 * H) * (CycloNumber(1) - CycloNumber::root_power(4, 1)) / rat(4);
}

inline int jacobi_hs(Int H, const RootContext& ctx) {
    Int s = ctx.s < 0 ? -ctx.s : ctx.s;
    if (gcd(H, s) != 1) throw std::invalid_argument("w_normalized: gcd(s, H) != 1");
    return jacobi(H, s);
}

// W = sqrt(H) (H/s) (xi - 1) tau
inline WrtValue w_normalized(const WrtValue& tau, Int H, const RootContext& ctx) {
    int j = jacobi_hs(H, ctx);
    auto xm1 = xi_pow(ctx, 1) - CycloNumber(1);
    if (tau.tag == WrtNormalization::W) return tau;
    if (tau.exact) {
        CycloNumber base = tau.tag == WrtNormalization::Tau ? *tau.exact * xm1 : *tau.exact * xi_pow(ctx, -tau.delta);
        return WrtValue::from_exact(sqrt_exact(H) * base * rat(j), WrtNormalization::W);
    }
    std::complex<double> base = tau.tag == WrtNormalization::Tau ? tau.numeric * xm1.eval() : tau.numeric * xi_pow(ctx, -tau.delta).eval();
    WrtValue w;
    w.numeric = std::sqrt(static_cast<double>(H)) * j * base;
    w.tag = WrtNormalization::W;
    return w;
}

inline CycloNumber tau_of(const WrtValue& v, Int H, const RootContext& ctx) {
    if (!v.exact) throw std::invalid_argument("tau_of: value has no exact form");
    Int D = 4 * ctx.r;
    auto inv_xm1 = inv_root_minus_one(D, mod(4 * ctx.s, D));
    switch (v.tag) {
        case WrtNormalization::Tau: return *v.exact;
        case WrtNormalization::Prefactored: return *v.exact * xi_pow(ctx, -v.delta) * inv_xm1;
        case WrtNormalization::W: return *v.exact * inv_xm1 * sqrt_exact(H).invert() * rat(jacobi_hs(H, ctx));
    }
    return *v.exact;
}

// W of a Seifert rational homology sphere from the closed form.
inline WrtValue wrt_w(const SeifertData& d, const RootContext& ctx) {
    auto inv = invariants(d);
    return w_normalized(wrt_seifert_closed(d, ctx), inv.H, ctx);
}

struct LensTerm {
    Int label = 0;
    Rational cs_lift;  // -(s s^*)^2 a^2 / p
    CycloNumber value;  // W^{(a)}(xi)
};

struct LensResult {
    WrtValue W;
    std::vector<LensTerm> terms;
};

// W_{L(p,1)} = -xi^{(5-p)/4} sum_{a mod p} e^{-2 pi i r s a^2/p} (xi^{-1/p} cos(4 pi s a/p) - 1).
// After a -> s^* a the label-a sector is W^{(a)} = -c_a xi^{(5-p)/4} (xi^{-1/p} cos(4 pi a/p) - 1)
// with c_0 = 1 and c_a = 2 otherwise.
inline LensResult wrt_lens(Int p, const RootContext& ctx) {
    if (p < 1 || p % 2 == 0) throw std::invalid_argument("wrt_lens: p must be odd and positive");
    Int s = ctx.s;
    if (gcd(s, p) != 1) throw std::invalid_argument("wrt_lens: gcd(s, p) != 1");
    auto cosine = [&](Int k) {  // cos(2 pi k / p)
        return (exp2pii(rat(k, p)) + exp2pii(rat(-k, p))) / rat(2);
    };
    auto pre = -xi_pow(ctx, rat(5 - p, 4));
    auto xp = xi_pow(ctx, rat(-1, p));
    CycloNumber sum;
    for (Int a = 0; a < p; ++a) sum += exp2pii(rat(-mod(ctx.r * s, p) * mod(a * a, p), p)) * (xp * cosine(2 * s * a) - CycloNumber(1));
    LensResult out;
    out.W = WrtValue::from_exact(pre * sum, WrtNormalization::W);
    Int sstar = p == 1 ? 1 : modinv(mod(s, p), p);
    Int ss = s * sstar;
    for (Int a = 0; a <= (p - 1) / 2; ++a) {
        LensTerm t;
        t.label = a;
        t.cs_lift = -rat(ss * ss * a * a, p);
        t.value = pre * (xp * cosine(2 * a) - CycloNumber(1)) * rat(a == 0 ? 1 : 2);
        out.terms.push_back(std::move(t));
    }
    return out;
}

// e^{2 pi i (r/s) x}
inline CycloNumber cs_phase(const RootContext& ctx, const Rational& x) { return exp2pii(x * ctx.r / ctx.s); }

}  // namespace qmwrt

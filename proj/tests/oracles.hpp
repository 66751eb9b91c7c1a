#pragma once

// Slow reference implementations used only by the tests.

#include <qmwrt/cyclotomic.hpp>

#include <complex>
#include <random>

namespace oracle {

using qmwrt::Int;
using qmwrt::Rational;

inline Rational sawtooth(const Rational& x) {
    if (qmwrt::is_integer(x)) return 0;
    return qmwrt::frac_part(x) - Rational(1, 2);
}

inline Rational dedekind_direct(Int q, Int p) {
    Rational acc = 0;
    for (Int k = 1; k < p; ++k) acc += sawtooth(qmwrt::rat(k, p)) * sawtooth(qmwrt::rat(k * q, p));
    return acc;
}

inline int legendre_by_squares(Int a, Int p) {
    a = qmwrt::mod(a, p);
    if (a == 0) return 0;
    for (Int x = 1; x < p; ++x)
        if (x * x % p == a) return 1;
    return -1;
}

inline std::complex<double> cis(double t) { return {std::cos(t), std::sin(t)}; }

inline std::complex<double> eval_terms(const qmwrt::CycloNumber& x) {
    std::complex<double> s = 0;
    for (auto& [k, c] : x.terms())
        s += c.get_d() * cis(2 * M_PI * static_cast<double>(k) / static_cast<double>(x.conductor()));
    return s;
}

inline qmwrt::CycloNumber random_element(std::mt19937_64& g, Int D, int nterms, int maxc, bool rational) {
    std::uniform_int_distribution<Int> idx(0, D - 1), co(-maxc, maxc), den(1, 4);
    std::vector<qmwrt::CycloNumber::Term> t;
    for (int i = 0; i < nterms; ++i) t.emplace_back(idx(g), rational ? qmwrt::rat(co(g), den(g)) : qmwrt::rat(co(g)));
    return qmwrt::CycloNumber::from_terms(D, std::move(t));
}

}  // namespace oracle

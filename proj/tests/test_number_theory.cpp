#include <qmwrt/number_theory.hpp>

#include <gtest/gtest.h>

#include <random>

#include "oracles.hpp"

using namespace qmwrt;

TEST(Jacobi, Examples) {
    EXPECT_EQ(jacobi(7, 1), 1);
    EXPECT_EQ(jacobi(3, 5), -1);
    EXPECT_EQ(jacobi(2, 15), 1);
    EXPECT_THROW(jacobi(3, 4), std::invalid_argument);
    EXPECT_THROW(jacobi(3, -5), std::invalid_argument);
}

TEST(Jacobi, PrimeModuliMatchSquares) {
    for (Int p : {3, 5, 7, 11, 13, 101})
        for (Int a = -20; a < 40; ++a) EXPECT_EQ(jacobi(a, p), oracle::legendre_by_squares(a, p)) << a << " " << p;
}

TEST(Jacobi, Multiplicative) {
    std::mt19937_64 g(7);
    std::uniform_int_distribution<Int> A(-500, 500), N(0, 200);
    for (int i = 0; i < 200; ++i) {
        Int a = A(g), b = A(g), n = 2 * N(g) + 1;
        EXPECT_EQ(jacobi(a, n) * jacobi(b, n), jacobi(a * b, n));
    }
}

TEST(NormalizeS, Examples) {
    for (Int r : {1, 3, 5, 7, 9, 99}) EXPECT_EQ(normalize_s(1, r), 1);
    EXPECT_EQ(normalize_s(3, 5), 13);
    EXPECT_EQ(normalize_s(5, 9), 5);
    EXPECT_THROW(normalize_s(3, 9), std::invalid_argument);
}

TEST(NormalizeS, Conditions) {
    for (Int r = 1; r < 60; r += 2)
        for (Int s = -30; s < 30; ++s) {
            if (gcd(mod(s, r), r) != 1) continue;
            Int t = normalize_s(s, r);
            EXPECT_GT(t, 0);
            EXPECT_EQ(mod(t - s, r), 0);
            EXPECT_EQ(gcd(t, 4 * r), 1);
            EXPECT_EQ(mod(t, 4), 1);
            for (Int c = 1; c < t; ++c)
                EXPECT_FALSE(mod(c - s, r) == 0 && mod(c, 4) == 1 && gcd(c, 4 * r) == 1);
        }
}

TEST(Dedekind, Examples) {
    EXPECT_EQ(dedekind_sum(5, 1), 0);
    EXPECT_EQ(dedekind_sum(1, 3), rat(1, 18));
    EXPECT_EQ(dedekind_sum(2, 3), rat(-1, 18));
    EXPECT_THROW(dedekind_sum(2, 4), std::invalid_argument);
}

TEST(Dedekind, MatchesDirectSum) {
    for (Int p = 1; p < 60; ++p)
        for (Int q = -p; q <= 2 * p; ++q)
            if (gcd(q, p) == 1) EXPECT_EQ(dedekind_sum(q, p), oracle::dedekind_direct(q, p)) << q << "/" << p;
}

TEST(Dedekind, Reciprocity) {
    std::mt19937_64 g(11);
    std::uniform_int_distribution<Int> U(1, 100000);
    int n = 0;
    while (n < 100) {
        Int p = U(g), q = U(g);
        if (gcd(p, q) != 1) continue;
        ++n;
        Rational rhs = rat(-1, 4) + (rat(p, q) + rat(q, p) + rat(1, p * q)) / 12;
        EXPECT_EQ(dedekind_sum(q, p) + dedekind_sum(p, q), rhs);
    }
}

TEST(Bernoulli, Examples) {
    EXPECT_EQ(bernoulli_poly(1, rat(1, 4)), rat(-1, 4));
    EXPECT_EQ(bernoulli_poly(0, rat(7, 3)), 1);
    EXPECT_EQ(bernoulli_poly(3, 0), 0);
    for (int i = -5; i < 10; ++i) {
        Rational x = rat(i, 7);
        EXPECT_EQ(bernoulli_poly(3, x), x * x * x - rat(3, 2) * x * x + x / 2);
        EXPECT_EQ(bernoulli_poly(2, x), x * x - x + rat(1, 6));
    }
}

TEST(Bernoulli, DifferenceEquation) {
    // B_k(x+1) - B_k(x) = k x^{k-1}
    for (int k = 1; k < 12; ++k)
        for (int i = -3; i < 4; ++i) {
            Rational x = rat(i, 5), xp = 1;
            for (int j = 0; j < k - 1; ++j) xp *= x;
            EXPECT_EQ(bernoulli_poly(k, x + 1) - bernoulli_poly(k, x), k * xp);
        }
}

TEST(Moebius, Examples) {
    EXPECT_EQ(moebius(1), 1);
    EXPECT_EQ(moebius(6), 1);
    EXPECT_EQ(moebius(12), 0);
    EXPECT_EQ(moebius(30), -1);
}

TEST(Moebius, DivisorSum) {
    for (Int n = 1; n <= 1000; ++n) {
        int s = 0;
        for (Int d : divisors(n)) s += moebius(d);
        EXPECT_EQ(s, n == 1 ? 1 : 0) << n;
    }
}

TEST(RationalMod1, Canonical) {
    RationalMod1 a(rat(-1, 120)), b(rat(-49, 120));
    EXPECT_EQ(a.value(), rat(119, 120));
    EXPECT_EQ((a + b).value(), rat(70, 120));
    EXPECT_EQ((-a).value(), rat(1, 120));
    EXPECT_EQ(RationalMod1(Rational(3)).value(), 0);
}

TEST(RootContext, Validation) {
    EXPECT_NO_THROW(RootContext::make(5, 1));
    EXPECT_THROW(RootContext::make(4, 1), std::invalid_argument);
    EXPECT_THROW(RootContext::make(5, 3), std::invalid_argument);
    EXPECT_THROW(RootContext::make(5, 5), std::invalid_argument);
    auto t = RootContext::make(7, 5).tilde();
    EXPECT_EQ(t.r, 5);
    EXPECT_EQ(t.s, -7);
}

#include <gtest/gtest.h>

#include <qmwrt/false_theta.hpp>

#include "oracles.hpp"

#include <numeric>
#include <set>

using namespace qmwrt;

namespace {

const std::vector<std::array<Int, 3>> kTriples{{2, 3, 5}, {2, 3, 7}, {2, 3, 11}, {2, 5, 7}, {3, 4, 5}};

// direct floating-point sum over the whole range, no support shortcut
std::complex<double> eichler_direct(const PeriodicFunction& f, Int a, Int c) {
    Int P = f.P();
    std::complex<double> acc = 0;
    for (Int l = 0; l <= 2 * P * c; ++l) {
        double ph = 2 * M_PI * std::fmod(static_cast<double>(a) * l * l / (4.0 * P * c), 1.0);
        acc += static_cast<double>(f(l)) * (1.0 - static_cast<double>(l) / (P * c)) * oracle::cis(ph);
    }
    return acc / 2.0;
}

// sum_l f(l) e^{-l^2 t}, compared with its small-t expansion sum_k L(-2k) (-t)^k / k!
long double heat_sum(const PeriodicFunction& f, long double t) {
    long double acc = 0;
    for (Int l = 1; static_cast<long double>(l) * l * t < 60; ++l) acc += f(l) * std::exp(-static_cast<long double>(l) * l * t);
    return acc;
}

double slope(const std::vector<double>& x, const std::vector<double>& y) {
    double mx = std::accumulate(x.begin(), x.end(), 0.0) / x.size(), my = std::accumulate(y.begin(), y.end(), 0.0) / y.size();
    double num = 0, den = 0;
    for (size_t i = 0; i < x.size(); ++i) {
        num += (x[i] - mx) * (y[i] - my);
        den += (x[i] - mx) * (x[i] - mx);
    }
    return num / den;
}

}  // namespace

TEST(PhiBasis, PoincareTable) {
    auto f = phi_basis({2, 3, 5}, {1, 1, 1});
    // l = 30 + 15 e1 + 10 e2 + 6 e3 with value -e1 e2 e3, enumerated by hand
    std::vector<std::pair<Int, Int>> want{{1, -1}, {11, -1}, {19, -1}, {29, -1}, {31, 1}, {41, 1}, {49, 1}, {59, 1}};
    EXPECT_EQ(f.support(), want);
    EXPECT_EQ(f.P(), 30);
}

TEST(PhiBasis, PairedReflectionsGiveSameTable) {
    for (auto& p : kTriples) {
        for (Int a1 = 1; a1 < p[0]; ++a1)
            for (Int a2 = 1; a2 < p[1]; ++a2)
                for (Int a3 = 1; a3 < p[2]; ++a3) {
                    auto f = phi_basis(p, {a1, a2, a3});
                    EXPECT_EQ(f, phi_basis(p, {p[0] - a1, p[1] - a2, a3}));
                    EXPECT_EQ(f, phi_basis(p, {p[0] - a1, a2, p[2] - a3}));
                    EXPECT_EQ(f, phi_basis(p, {a1, p[1] - a2, p[2] - a3}));
                }
    }
    EXPECT_THROW(phi_basis({2, 3, 5}, {0, 1, 1}), std::invalid_argument);
    EXPECT_THROW(phi_basis({2, 3, 5}, {1, 3, 1}), std::invalid_argument);
}

TEST(PhiBasis, DistinctTablesCountMatchesConnections) {
    for (Int a = 2; a * 3 * 4 <= 1000; ++a)
        for (Int b = a + 1; a * b * (b + 1) <= 1000; ++b)
            for (Int c = b + 1; a * b * c <= 1000; ++c) {
                if (std::gcd(a, b) != 1 || std::gcd(a, c) != 1 || std::gcd(b, c) != 1) continue;
                std::array<Int, 3> p{a, b, c};
                std::set<std::vector<std::pair<Int, Int>>> seen;
                for (Int x = 1; x < a; ++x)
                    for (Int y = 1; y < b; ++y)
                        for (Int z = 1; z < c; ++z) seen.insert(phi_basis(p, {x, y, z}).support());
                EXPECT_EQ(static_cast<Int>(seen.size()), nonabelian_count(canonical_triple(p))) << a << "," << b << "," << c;
            }
}

TEST(PeriodicFunction, RejectsNonOddOrBiased) {
    EXPECT_THROW(PeriodicFunction(2, {0, 1, 0, 0}), std::invalid_argument);
    EXPECT_THROW(PeriodicFunction(2, {1, 1, 0, -1}), std::invalid_argument);
    EXPECT_THROW(PeriodicFunction(2, {0, 1, 0}), std::invalid_argument);
    EXPECT_NO_THROW(PeriodicFunction(2, {0, 1, 0, -1}));
}

TEST(PsiBasis, Examples) {
    EXPECT_EQ(psi_basis(2, 1).values(), (std::vector<Int>{0, 1, 0, -1}));
    auto f = psi_basis(6, 3);
    EXPECT_EQ(f.support(), (std::vector<std::pair<Int, Int>>{{3, 1}, {9, -1}}));
    auto g = psi_combination(6, {{1, 1}, {3, 2}, {5, 1}});
    EXPECT_EQ(g(1), 1);
    EXPECT_EQ(g(3), 2);
    EXPECT_EQ(g(-5), -1);
    EXPECT_EQ(g(11), -1);
    EXPECT_THROW(psi_basis(6, 6), std::invalid_argument);
    EXPECT_THROW(psi_basis(6, 0), std::invalid_argument);
}

TEST(Eichler, Examples) {
    EXPECT_TRUE(eichler_limit(PeriodicFunction::zero(5), rat(3, 7)).is_zero());
    EXPECT_EQ(eichler_limit(psi_basis(2, 1), 0), CycloNumber(rat(1, 2)));
}

TEST(Eichler, ExactAgreesWithDirectSum) {
    std::vector<Rational> alphas{rat(1, 5), rat(13, 9), rat(-7, 5), rat(5, 11), rat(-11, 1), rat(2, 3)};
    for (auto& p : kTriples)
        for (auto& a : rotation_numbers(p))
            for (auto& al : alphas) {
                auto f = phi_basis(canonical_triple(p), a);
                auto [n, d] = lowest_terms(al);
                auto want = eichler_direct(f, n, d);
                EXPECT_NEAR(std::abs(eichler_limit(f, al).eval() - want), 0, 1e-9);
                EXPECT_NEAR(std::abs(eichler_limit_numeric(f, al) - want), 0, 1e-9);
            }
}

TEST(Eichler, AtZeroEqualsLValue) {
    for (auto& p : kTriples)
        for (auto& a : rotation_numbers(p)) {
            auto f = phi_basis(canonical_triple(p), a);
            EXPECT_EQ(eichler_limit(f, 0), CycloNumber(l_value(f, 0)));
        }
    for (Int P = 2; P <= 12; ++P)
        for (Int a = 1; a < P; ++a) EXPECT_EQ(eichler_limit(psi_basis(P, a), 0), CycloNumber(l_value(psi_basis(P, a), 0)));
}

TEST(LValue, Examples) {
    EXPECT_EQ(l_value(PeriodicFunction::zero(4), 2), 0);
    EXPECT_EQ(l_value(psi_basis(2, 1), 0), rat(1, 2));
}

TEST(LValue, MatchesHeatKernelExpansion) {
    for (auto& f : {phi_basis({2, 3, 5}, {1, 1, 1}), phi_basis({2, 3, 7}, {1, 1, 1}), psi_basis(6, 1), psi_basis(18, 5)}) {
        long double t = 1e-3L / (f.P() * f.P());
        long double series = 0, pw = 1, fact = 1;
        for (int k = 0; k <= 4; ++k) {
            if (k > 0) fact *= k;
            series += static_cast<long double>(l_value(f, k).get_d()) * pw / fact;
            pw *= -t;
        }
        long double h = heat_sum(f, t);
        EXPECT_NEAR(static_cast<double>(h), static_cast<double>(series), 1e-7 * std::max(1.0, std::abs(static_cast<double>(h))));
    }
}

TEST(TPhase, MatchesSupportAndChernSimons) {
    for (auto& tp : kTriples) {
        auto p = canonical_triple(tp);
        Int P = p[0] * p[1] * p[2];
        for (auto& c : nonabelian_connections(p)) {
            Rational x = t_phase(p, c.rotation);
            // T acts on q^{l^2/4P} as e^{2 pi i l^2/4P} for every l in the support
            for (auto& [l, v] : phi_basis(p, c.rotation).support()) EXPECT_TRUE(is_integer((x - rat(l * l, 2 * P)) / 2));
            EXPECT_TRUE(is_integer((x + 2 * c.cs_lift) / 2));
        }
    }
    EXPECT_TRUE(is_integer((t_phase({2, 3, 5}, {1, 1, 1}) - 2 * rat(1, 120)) / 2));
    for (Int P = 2; P < 10; ++P)
        for (Int a = 1; a < P; ++a) EXPECT_EQ(t_phase_psi(P, a), rat(a * a, 2 * P));
}

TEST(SMatrix, PsiInvolutionAndSymmetry) {
    EXPECT_EQ(s_matrix_psi(2).size(), 1u);
    EXPECT_NEAR(s_matrix_psi(2)[0][0], 1.0, 1e-15);
    for (Int P = 2; P <= 30; ++P) {
        auto M = s_matrix_psi(P);
        for (Int i = 0; i < P - 1; ++i)
            for (Int j = 0; j < P - 1; ++j) {
                EXPECT_EQ(M[i][j], M[j][i]);
                double acc = 0;
                for (Int k = 0; k < P - 1; ++k) acc += M[i][k] * M[k][j];
                EXPECT_NEAR(acc, i == j ? 1.0 : 0.0, 1e-12);
            }
    }
}

TEST(SMatrix, PhiShapes) {
    EXPECT_EQ(s_matrix_phi({2, 3, 5}).size(), 2u);
    EXPECT_EQ(s_matrix_phi({2, 3, 7}).size(), 3u);
    EXPECT_EQ(s_matrix_phi({3, 4, 5}).size(), 6u);
}

TEST(SMatrix, PhiSelfDualAtI) {
    const std::complex<double> i(0, 1);
    for (auto& tp : kTriples) {
        auto p = canonical_triple(tp);
        auto A = rotation_numbers(p);
        auto S = s_matrix_phi(p);
        Int P = p[0] * p[1] * p[2];
        std::vector<std::complex<double>> th;
        for (auto& a : A) th.push_back(theta_truncated(phi_basis(p, a), i, 40 * P, true));
        for (size_t r = 0; r < A.size(); ++r) {
            std::complex<double> acc = 0;
            for (size_t c = 0; c < A.size(); ++c) acc += S[r][c] * th[c];
            EXPECT_NEAR(std::abs(th[r] - acc), 0, 1e-8) << tp[0] << tp[1] << tp[2];
        }
    }
}

TEST(Theta, TruncationConverges) {
    auto f = phi_basis({2, 3, 7}, {1, 1, 1});
    std::complex<double> tau(0, 2);
    auto a = theta_truncated(f, tau, 4 * 84, true), b = theta_truncated(f, tau, 8 * 84, true);
    EXPECT_LT(std::abs(a - b), 1e-12);
    EXPECT_EQ(theta_truncated(PeriodicFunction::zero(3), tau, 12, false), std::complex<double>(0, 0));
    EXPECT_THROW(theta_truncated(f, {0, -1}, 200, true), std::invalid_argument);
    EXPECT_EQ(theta_truncated(psi_basis(2, 1), tau, 8, false), 2.0 * theta_truncated(psi_basis(2, 1), tau, 8, true));
}

TEST(TrivialSeries, OrderZeroIsLValue) {
    auto f = phi_basis({2, 3, 5}, {1, 1, 1});
    EXPECT_NEAR(std::abs(trivial_series(f, 0, {7, 1}) - l_value(f, 0).get_d()), 0, 1e-15);
}

TEST(Residual, ConsecutiveOrdersDifferByOneTerm) {
    RootContext ctx{51, 5};
    auto p = std::array<Int, 3>{2, 3, 7};
    auto f = phi_basis(p, {1, 1, 1});
    for (int K = 0; K < 4; ++K) {
        auto d = s_transform_residual(p, {1, 1, 1}, ctx, K) - s_transform_residual(p, {1, 1, 1}, ctx, K + 1);
        std::complex<double> x(0, M_PI * ctx.s / (2.0 * 42 * ctx.r));
        double fact = std::tgamma(K + 2.0);
        EXPECT_NEAR(std::abs(d - l_value(f, K + 1).get_d() / fact * std::pow(x, K + 1)), 0, 1e-12);
    }
}

TEST(Residual, DecaySlope) {
    auto p = std::array<Int, 3>{2, 3, 7};
    for (int K = 1; K <= 3; ++K) {
        std::vector<double> x, y;
        for (Int r = 101; r <= 501; r += 50) {
            x.push_back(std::log(static_cast<double>(r)));
            y.push_back(std::log(std::abs(s_transform_residual(p, {1, 1, 1}, {r, 1}, K))));
        }
        EXPECT_NEAR(slope(x, y), -(K + 1.0), 0.5) << "K=" << K;
    }
}

#pragma once

#include "number_theory.hpp"

#include <stdexcept>
#include <vector>

namespace qmwrt {

using IntMatrix = std::vector<std::vector<Int>>;
using RatMatrix = std::vector<std::vector<Rational>>;

inline bool is_symmetric(const IntMatrix& B) {
    for (size_t i = 0; i < B.size(); ++i) {
        if (B[i].size() != B.size()) return false;
        for (size_t j = 0; j < i; ++j)
            if (B[i][j] != B[j][i]) return false;
    }
    return true;
}

// Bareiss fraction-free elimination.
inline mpz_class determinant(const IntMatrix& B) {
    size_t n = B.size();
    if (n == 0) return 1;
    std::vector<std::vector<mpz_class>> a(n, std::vector<mpz_class>(n));
    for (size_t i = 0; i < n; ++i)
        for (size_t j = 0; j < n; ++j) a[i][j] = zint(B[i][j]);
    mpz_class prev = 1;
    int sign = 1;
    for (size_t k = 0; k + 1 < n; ++k) {
        if (a[k][k] == 0) {
            size_t p = k + 1;
            while (p < n && a[p][k] == 0) ++p;
            if (p == n) return 0;
            std::swap(a[k], a[p]);
            sign = -sign;
        }
        for (size_t i = k + 1; i < n; ++i)
            for (size_t j = k + 1; j < n; ++j) {
                a[i][j] = a[i][j] * a[k][k] - a[i][k] * a[k][j];
                mpz_divexact(a[i][j].get_mpz_t(), a[i][j].get_mpz_t(), prev.get_mpz_t());
            }
        prev = a[k][k];
    }
    return sign * a[n - 1][n - 1];
}

inline RatMatrix inverse(const IntMatrix& B) {
    size_t n = B.size();
    RatMatrix a(n, std::vector<Rational>(2 * n));
    for (size_t i = 0; i < n; ++i) {
        for (size_t j = 0; j < n; ++j) a[i][j] = zint(B[i][j]);
        a[i][n + i] = 1;
    }
    for (size_t c = 0; c < n; ++c) {
        size_t p = c;
        while (p < n && a[p][c] == 0) ++p;
        if (p == n) throw std::domain_error("inverse: singular matrix");
        std::swap(a[c], a[p]);
        Rational piv = a[c][c];
        for (auto& v : a[c]) v /= piv;
        for (size_t i = 0; i < n; ++i) {
            if (i == c || a[i][c] == 0) continue;
            Rational f = a[i][c];
            for (size_t j = 0; j < 2 * n; ++j) a[i][j] -= f * a[c][j];
        }
    }
    RatMatrix inv(n, std::vector<Rational>(n));
    for (size_t i = 0; i < n; ++i)
        for (size_t j = 0; j < n; ++j) inv[i][j] = a[i][n + j];
    return inv;
}

// det(xI - B), ascending coefficients, by Faddeev-LeVerrier.
inline std::vector<Rational> charpoly(const IntMatrix& B) {
    size_t n = B.size();
    std::vector<Rational> c(n + 1);
    c[n] = 1;
    RatMatrix M(n, std::vector<Rational>(n)), BM(n, std::vector<Rational>(n));
    for (size_t k = 1; k <= n; ++k) {
        // M_k = B M_{k-1} + c_{n-k+1} I
        RatMatrix next(n, std::vector<Rational>(n));
        for (size_t i = 0; i < n; ++i)
            for (size_t j = 0; j < n; ++j) {
                Rational acc = 0;
                for (size_t l = 0; l < n; ++l) acc += zint(B[i][l]) * M[l][j];
                next[i][j] = acc;
            }
        for (size_t i = 0; i < n; ++i) next[i][i] += c[n - k + 1];
        M = next;
        Rational tr = 0;
        for (size_t i = 0; i < n; ++i)
            for (size_t l = 0; l < n; ++l) tr += zint(B[i][l]) * M[l][i];
        c[n - k] = -tr / static_cast<long>(k);
    }
    return c;
}

struct Inertia {
    int positive = 0;
    int negative = 0;
    int zero = 0;
    int signature() const { return positive - negative; }
};

// Eigenvalue sign counts of a symmetric integer matrix from the sign changes of its
// characteristic polynomial (Descartes' rule is exact when all roots are real).
inline Inertia inertia(const IntMatrix& B) {
    if (!is_symmetric(B)) throw std::invalid_argument("inertia: matrix must be symmetric");
    auto c = charpoly(B);
    Inertia out;
    size_t low = 0;
    while (low < c.size() && c[low] == 0) ++low;
    out.zero = static_cast<int>(low);
    auto changes = [&](bool flip) {
        int cnt = 0, last = 0;
        for (size_t k = low; k < c.size(); ++k) {
            int sg = sgn(c[k]);
            if (flip && (k % 2 == 1)) sg = -sg;
            if (sg == 0) continue;
            if (last != 0 && sg != last) ++cnt;
            last = sg;
        }
        return cnt;
    };
    out.positive = changes(false);
    out.negative = changes(true);
    return out;
}

// Upper-triangular basis (columns) of the lattice spanned by the columns of B.
inline IntMatrix column_hnf(const IntMatrix& B) {
    size_t n = B.size();
    IntMatrix a = B;
    for (size_t row = n; row-- > 0;) {
        // clear entries left of column `row` in this row, using columns 0..row
        for (;;) {
            size_t piv = n;
            for (size_t c = 0; c <= row; ++c)
                if (a[row][c] != 0 && (piv == n || std::abs(a[row][c]) < std::abs(a[row][piv]))) piv = c;
            if (piv == n) throw std::domain_error("column_hnf: singular matrix");
            bool done = true;
            for (size_t c = 0; c <= row; ++c) {
                if (c == piv || a[row][c] == 0) continue;
                Int q = a[row][c] / a[row][piv];
                for (size_t i = 0; i < n; ++i) a[i][c] -= q * a[i][piv];
                if (a[row][c] != 0) done = false;
            }
            if (done) {
                for (size_t i = 0; i < n; ++i) std::swap(a[i][piv], a[i][row]);
                break;
            }
        }
        if (a[row][row] < 0)
            for (size_t i = 0; i < n; ++i) a[i][row] = -a[i][row];
    }
    return a;
}

}  // namespace qmwrt

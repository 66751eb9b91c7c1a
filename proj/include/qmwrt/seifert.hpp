#pragma once

#include "linalg.hpp"
#include "number_theory.hpp"

#include <array>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace qmwrt {

struct Fiber {
    Int p = 2;
    Int q = 1;
    bool operator==(const Fiber&) const = default;
};

// S^2(b; p_1/q_1, ..., p_m/q_m). `reversed` marks the orientation-reversed manifold.
struct SeifertData {
    Int b = 0;
    std::vector<Fiber> fibers;
    bool reversed = false;

    size_t m() const { return fibers.size(); }

    void validate() const {
        for (auto& f : fibers) {
            if (f.p < 2) throw std::invalid_argument("fiber order must be at least 2");
            if (gcd(f.p, f.q) != 1) throw std::invalid_argument("fiber (p, q) must be coprime");
        }
    }

    // The same manifold with the opposite orientation.
    SeifertData mirror() const {
        SeifertData d{-b, fibers, false};
        for (auto& f : d.fibers) f.q = -f.q;
        return d;
    }

    // Data presenting the manifold itself (reversal applied).
    SeifertData effective() const { return reversed ? SeifertData{b, fibers, false}.mirror() : *this; }

    // Move b into the first fiber: q_1 -> q_1 - b p_1.
    SeifertData b_normalized() const {
        auto d = effective();
        if (d.fibers.empty() || d.b == 0) return d;
        d.fibers[0].q -= d.b * d.fibers[0].p;
        d.b = 0;
        return d;
    }

    bool integral_framings() const {
        for (auto& f : effective().fibers)
            if (f.q != 1 && f.q != -1) return false;
        return true;
    }

    std::string format() const {
        std::ostringstream os;
        if (reversed) os << "-";
        os << "S2(" << b;
        for (size_t j = 0; j < fibers.size(); ++j) os << (j ? ", " : "; ") << fibers[j].p << "/" << fibers[j].q;
        os << ")";
        return os.str();
    }

    bool operator==(const SeifertData&) const = default;
};

namespace detail {

inline std::string trim(const std::string& s) {
    size_t a = s.find_first_not_of(" \t"), b = s.find_last_not_of(" \t");
    return a == std::string::npos ? std::string() : s.substr(a, b - a + 1);
}

inline Int parse_int(const std::string& s) {
    auto t = trim(s);
    size_t pos = 0;
    long long v = 0;
    try {
        v = std::stoll(t, &pos);
    } catch (const std::exception&) {
        throw std::invalid_argument("bad integer '" + t + "'");
    }
    if (pos != t.size()) throw std::invalid_argument("bad integer '" + t + "'");
    return v;
}

inline std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : s) {
        if (c == sep) {
            out.push_back(cur);
            cur.clear();
        } else {
            cur += c;
        }
    }
    out.push_back(cur);
    return out;
}

inline std::vector<Fiber> parse_fibers(const std::string& s) {
    std::vector<Fiber> out;
    if (trim(s).empty()) return out;
    for (auto& tok : split(s, ',')) {
        auto pq = split(tok, '/');
        if (pq.size() <= 2) {
            Int p = parse_int(pq[0]), q = pq.size() == 2 ? parse_int(pq[1]) : 1;
            if (p < 0) {
                p = -p;
                q = -q;
            }
            out.push_back({p, q});
        } else {
            throw std::invalid_argument("bad fiber '" + tok + "'");
        }
    }
    return out;
}

}  // namespace detail

struct SeifertInvariants {
    Rational e;
    Rational chi;
    Int P = 1;
    Int H = 0;  // |H_1|, 0 when infinite
    Rational phi;
};

inline Int fiber_product(const SeifertData& d) {
    Int P = 1;
    for (auto& f : d.fibers) P *= f.p;
    return P;
}

inline SeifertInvariants invariants(const SeifertData& data) {
    data.validate();
    auto d = data.effective();
    SeifertInvariants inv;
    inv.P = fiber_product(d);
    inv.e = rat(-d.b);
    inv.chi = 2;
    for (auto& f : d.fibers) {
        inv.e += rat(f.q, f.p);
        inv.chi -= 1 - rat(1, f.p);
    }
    Rational eP = inv.e * inv.P;
    if (!is_integer(eP)) throw std::logic_error("e P must be an integer");
    inv.H = to_int(Rational(abs(eP)).get_num());
    // phi with b moved into the first fiber; sigma(H) read as sign(e)
    inv.phi = 3 * sgn(inv.e) + d.b;
    for (auto& f : d.fibers) inv.phi += 12 * dedekind_sum(f.q, f.p) - rat(f.q, f.p);
    return inv;
}

enum class Geometry { S2xR, E3, H2xR, S3, Nil, SL2R, Sol, H3 };

inline const char* geometry_name(Geometry g) {
    switch (g) {
        case Geometry::S2xR: return "S2xR";
        case Geometry::E3: return "R3";
        case Geometry::H2xR: return "H2xR";
        case Geometry::S3: return "S3";
        case Geometry::Nil: return "Nil";
        case Geometry::SL2R: return "SL2R";
        case Geometry::Sol: return "Sol";
        case Geometry::H3: return "H3";
    }
    return "?";
}

// Seifert fibrations never give Sol or H3.
inline Geometry classify_geometry(const Rational& e, const Rational& chi) {
    int c = sgn(chi);
    if (e == 0) return c > 0 ? Geometry::S2xR : c == 0 ? Geometry::E3 : Geometry::H2xR;
    return c > 0 ? Geometry::S3 : c == 0 ? Geometry::Nil : Geometry::SL2R;
}

inline Geometry classify_geometry(const SeifertData& d) {
    auto inv = invariants(d);
    return classify_geometry(inv.e, inv.chi);
}

inline void require_coprime(const std::vector<Int>& p) {
    for (size_t i = 0; i < p.size(); ++i) {
        if (p[i] < 2) throw std::invalid_argument("brieskorn: p_j must be at least 2");
        for (size_t j = i + 1; j < p.size(); ++j)
            if (gcd(p[i], p[j]) != 1) throw std::invalid_argument("brieskorn: p_j must be mutually coprime");
    }
}

// The integer homology sphere with fibers p and e = 1/P.
inline SeifertData brieskorn(const std::vector<Int>& p) {
    if (p.empty()) throw std::invalid_argument("brieskorn: need at least one fiber");
    require_coprime(p);
    Int P = 1;
    for (Int x : p) P *= x;
    SeifertData d;
    Int sum = 0;
    for (Int pj : p) {
        Int q = modinv(mod(P / pj, pj), pj);
        if (2 * q > pj) q -= pj;
        d.fibers.push_back({pj, q});
        sum += q * (P / pj);
    }
    // sum = 1 mod P; shift q_1 by a multiple of p_1
    d.fibers[0].q -= (sum - 1) / P * p[0];
    return d;
}

inline SeifertData lens_data(Int p) {
    if (p < 1) throw std::invalid_argument("lens: p must be positive");
    return SeifertData{p, {}, false};
}

// Rows (b, 1, ..., 1) and (q_j, 0, .., p_j, .., 0); coker is H_1.
inline IntMatrix linking_matrix(const SeifertData& data) {
    auto d = data.effective();
    size_t m = d.m();
    IntMatrix B(m + 1, std::vector<Int>(m + 1, 0));
    B[0][0] = d.b;
    for (size_t j = 0; j < m; ++j) {
        B[0][j + 1] = 1;
        B[j + 1][0] = d.fibers[j].q;
        B[j + 1][j + 1] = d.fibers[j].p;
    }
    return B;
}

// Symmetric linking matrix of the surgery link (star with framings b and p_j/q_j); needs q_j = +-1.
inline IntMatrix framing_matrix(const SeifertData& data) {
    auto d = data.effective();
    if (!d.integral_framings()) throw std::invalid_argument("framing_matrix: needs q_j = +-1");
    size_t m = d.m();
    IntMatrix B(m + 1, std::vector<Int>(m + 1, 0));
    B[0][0] = d.b;
    for (size_t j = 0; j < m; ++j) {
        B[0][j + 1] = B[j + 1][0] = 1;
        B[j + 1][j + 1] = d.fibers[j].p * d.fibers[j].q;
    }
    return B;
}

struct FlatConnection {
    enum class Kind { Trivial, Abelian, Nonabelian };
    Kind kind = Kind::Trivial;
    Int label = 0;
    std::array<Int, 3> rotation{0, 0, 0};
    RationalMod1 cs;
    Rational cs_lift;
};

// Triple with the even entry (if any) moved to the front; order of the rest kept.
inline std::array<Int, 3> canonical_triple(const std::array<Int, 3>& p) {
    std::vector<Int> v(p.begin(), p.end());
    require_coprime(v);
    for (size_t j = 0; j < 3; ++j)
        if (p[j] % 2 == 0) {
            std::array<Int, 3> out{p[j], 0, 0};
            size_t k = 1;
            for (size_t i = 0; i < 3; ++i)
                if (i != j) out[k++] = p[i];
            return out;
        }
    return p;
}

inline Rational nonabelian_cs_lift(const std::array<Int, 3>& p, const std::array<Int, 3>& a) {
    Int P = p[0] * p[1] * p[2];
    Rational x = 1;
    for (size_t j = 0; j < 3; ++j) x += rat(a[j], p[j]);
    return -rat(P, 4) * x * x;
}

// Rotation numbers in canonical order for the relabeled triple.
inline std::vector<std::array<Int, 3>> rotation_numbers(const std::array<Int, 3>& triple) {
    auto p = canonical_triple(triple);
    std::vector<std::array<Int, 3>> out;
    for (Int a1 = 1; a1 < p[0]; ++a1)
        for (Int a2 = 1; a2 <= (p[1] - 1) / 2; ++a2)
            for (Int a3 = 1; a3 <= (p[2] - 1) / 2; ++a3) out.push_back({a1, a2, a3});
    return out;
}

inline std::vector<FlatConnection> nonabelian_connections(const std::array<Int, 3>& triple) {
    auto p = canonical_triple(triple);
    std::vector<FlatConnection> out;
    for (auto& a : rotation_numbers(p)) {
        FlatConnection c;
        c.kind = FlatConnection::Kind::Nonabelian;
        c.rotation = a;
        c.cs_lift = nonabelian_cs_lift(p, a);
        c.cs = RationalMod1(c.cs_lift);
        out.push_back(c);
    }
    return out;
}

inline Int nonabelian_count(const std::array<Int, 3>& p) { return (p[0] - 1) * (p[1] - 1) * (p[2] - 1) / 4; }

struct GeometricConnection {
    FlatConnection connection;
    Geometry geometry = Geometry::S3;
    // rotation numbers of Brieskorn data whose CS agrees mod 1
    std::vector<std::array<Int, 3>> matching_rotations;
};

inline std::optional<std::array<Int, 3>> brieskorn_triple(const SeifertData& data) {
    auto d = data.effective();
    if (d.m() != 3) return std::nullopt;
    std::vector<Int> p;
    for (auto& f : d.fibers) p.push_back(f.p);
    try {
        require_coprime(p);
    } catch (const std::invalid_argument&) {
        return std::nullopt;
    }
    if (invariants(d).H != 1) return std::nullopt;
    return std::array<Int, 3>{p[0], p[1], p[2]};
}

inline GeometricConnection geometric_connection(const SeifertData& d) {
    auto inv = invariants(d);
    GeometricConnection g;
    g.geometry = classify_geometry(inv.e, inv.chi);
    if (g.geometry != Geometry::S3 && g.geometry != Geometry::SL2R)
        throw std::invalid_argument(std::string("geometric_connection: unsupported geometry ") + geometry_name(g.geometry));
    g.connection.kind = FlatConnection::Kind::Nonabelian;
    g.connection.cs_lift = -inv.chi * inv.chi / (4 * inv.e);
    g.connection.cs = RationalMod1(g.connection.cs_lift);
    if (auto t = brieskorn_triple(d)) {
        for (auto& c : nonabelian_connections(*t))
            if (c.cs == g.connection.cs) g.matching_rotations.push_back(c.rotation);
        // CS alone can be ambiguous (e.g. (2,3,35)); the geometric one is (1,1,1)
        std::array<Int, 3> one{1, 1, 1};
        for (auto& a : g.matching_rotations)
            if (a == one) g.connection.rotation = one;
    }
    return g;
}

enum class ExampleFamily { Lens, Ex233, ExNeg239, Family };

// CS lift of label a is coefficient * a^2 (before the s-dependent relabeling).
inline Rational abelian_coefficient(ExampleFamily fam, Int param) {
    switch (fam) {
        case ExampleFamily::Lens: return -rat(1, param);
        case ExampleFamily::Ex233:
        case ExampleFamily::ExNeg239: return rat(1, 3);
        case ExampleFamily::Family: return rat(param + 1, 2 * param + 1);
    }
    throw std::invalid_argument("abelian_coefficient: unknown family");
}

inline std::vector<FlatConnection> abelian_connections(ExampleFamily fam, Int param = 0) {
    Int top = 0;
    switch (fam) {
        case ExampleFamily::Lens:
            if (param < 1 || param % 2 == 0) throw std::invalid_argument("abelian_connections: lens needs odd p");
            top = (param - 1) / 2;
            break;
        case ExampleFamily::Ex233:
        case ExampleFamily::ExNeg239: top = 1; break;
        case ExampleFamily::Family:
            if (param < 1) throw std::invalid_argument("abelian_connections: family needs p >= 1");
            top = param;
            break;
    }
    std::vector<FlatConnection> out;
    Rational c = abelian_coefficient(fam, param);
    for (Int a = 0; a <= top; ++a) {
        FlatConnection f;
        f.kind = a == 0 ? FlatConnection::Kind::Trivial : FlatConnection::Kind::Abelian;
        f.label = a;
        f.cs_lift = c * a * a;
        f.cs = RationalMod1(f.cs_lift);
        out.push_back(f);
    }
    return out;
}

// Parsed manifold selector.
struct Manifold {
    enum class Kind { Brieskorn, Lens, Seifert, Ex233, ExNeg239, Family };
    Kind kind = Kind::Seifert;
    std::string selector;
    SeifertData data;
    std::array<Int, 3> triple{0, 0, 0};  // Brieskorn only
    Int param = 0;                        // lens p or family p

    std::optional<ExampleFamily> family() const {
        switch (kind) {
            case Kind::Lens: return ExampleFamily::Lens;
            case Kind::Ex233: return ExampleFamily::Ex233;
            case Kind::ExNeg239: return ExampleFamily::ExNeg239;
            case Kind::Family: return ExampleFamily::Family;
            default: return std::nullopt;
        }
    }
};

inline SeifertData example_233() { return SeifertData{1, {{2, 1}, {3, 1}, {3, 1}}, false}; }
inline SeifertData example_neg239() { return SeifertData{-1, {{2, -1}, {3, -1}, {9, -1}}, false}; }
inline SeifertData example_family(Int p) { return SeifertData{0, {{p, 1}, {2 * p + 1, -1}, {2 * p + 1, -1}}, false}; }

// brieskorn:p1,p2,p3 | lens:p | seifert:b;p1/q1,... | S2(b; p1/q1, ...) | ex:2-3-3 | ex:neg-2-3-9 | ex:family:p
inline Manifold parse_manifold(const std::string& text) {
    Manifold m;
    m.selector = detail::trim(text);
    const std::string& s = m.selector;
    auto starts = [&](const char* pre) { return s.rfind(pre, 0) == 0; };
    if (starts("brieskorn:")) {
        auto parts = detail::split(s.substr(10), ',');
        std::vector<Int> p;
        for (auto& t : parts) p.push_back(detail::parse_int(t));
        m.kind = Manifold::Kind::Brieskorn;
        m.data = brieskorn(p);
        if (p.size() == 3) m.triple = {p[0], p[1], p[2]};
        return m;
    }
    if (starts("lens:")) {
        m.kind = Manifold::Kind::Lens;
        m.param = detail::parse_int(s.substr(5));
        m.data = lens_data(m.param);
        return m;
    }
    if (s == "ex:2-3-3") {
        m.kind = Manifold::Kind::Ex233;
        m.data = example_233();
        return m;
    }
    if (s == "ex:neg-2-3-9") {
        m.kind = Manifold::Kind::ExNeg239;
        m.data = example_neg239();
        return m;
    }
    if (starts("ex:family:")) {
        m.kind = Manifold::Kind::Family;
        m.param = detail::parse_int(s.substr(10));
        if (m.param < 2) throw std::invalid_argument("family parameter must be at least 2");
        m.data = example_family(m.param);
        return m;
    }
    std::string body;
    if (starts("seifert:")) {
        body = s.substr(8);
    } else if (starts("S2(") && s.back() == ')') {
        body = s.substr(3, s.size() - 4);
    } else {
        throw std::invalid_argument("unknown manifold syntax '" + s + "'");
    }
    auto semi = body.find(';');
    m.kind = Manifold::Kind::Seifert;
    if (semi == std::string::npos) {
        m.data.b = detail::parse_int(body);
    } else {
        m.data.b = detail::parse_int(body.substr(0, semi));
        m.data.fibers = detail::parse_fibers(body.substr(semi + 1));
    }
    m.data.validate();
    return m;
}

}  // namespace qmwrt

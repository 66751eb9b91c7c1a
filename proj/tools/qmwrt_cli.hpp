#pragma once

#include "qmwrt/qmod.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <atomic>
#include <functional>
#include <iomanip>
#include <iostream>
#include <mutex>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

namespace qmwrt::cli {

using json = nlohmann::ordered_json;

enum class Command { Wrt, FalseTheta, FlatConn, Verify, Sweep, Gauss };
enum class Format { Json, Csv, Text };

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct RRange {
    Int start = 0, stop = 0, step = 2;
    std::vector<Int> values() const {
        std::vector<Int> out;
        for (Int r = start; r <= stop; r += step) out.push_back(r);
        return out;
    }
    bool operator==(const RRange&) const = default;
};

struct JobSpec {
    Command command = Command::Wrt;
    std::string suite;     // verify only
    std::string manifold;  // manifold selector
    std::string basis;     // falsetheta basis selector
    std::optional<Int> r;
    Int s = 1;
    std::optional<RRange> r_range;
    int order = 2;
    Format format = Format::Json;
    bool exact = false;
    bool brute = false;
    int jobs = 1;
    double tolerance = 1e-9;
    double slope_tolerance = 0.5;
    std::string quantity = "residual";  // sweep only

    std::vector<Int> r_values() const {
        if (r_range) return r_range->values();
        if (r) return {*r};
        return {};
    }
    bool operator==(const JobSpec&) const = default;
};

inline const char* command_name(Command c) {
    switch (c) {
        case Command::Wrt: return "wrt";
        case Command::FalseTheta: return "falsetheta";
        case Command::FlatConn: return "flatconn";
        case Command::Verify: return "verify";
        case Command::Sweep: return "sweep";
        case Command::Gauss: return "gauss";
    }
    return "?";
}

inline Command command_from(const std::string& s) {
    for (auto c : {Command::Wrt, Command::FalseTheta, Command::FlatConn, Command::Verify, Command::Sweep, Command::Gauss})
        if (s == command_name(c)) return c;
    throw UsageError("unknown command '" + s + "'");
}

inline const std::vector<std::string>& verify_suites() {
    static const std::vector<std::string> v{"all", "brieskorn", "integrality", "geometric", "decomposition", "oracle", "sign-sums", "modularity"};
    return v;
}

inline RRange parse_range(const std::string& text) {
    auto parts = qmwrt::detail::split(text, ':');
    if (parts.size() != 3) throw UsageError("r-range must be start:stop:step");
    RRange rr;
    try {
        rr.start = qmwrt::detail::parse_int(parts[0]);
        rr.stop = qmwrt::detail::parse_int(parts[1]);
        rr.step = qmwrt::detail::parse_int(parts[2]);
    } catch (const std::invalid_argument& e) {
        throw UsageError(e.what());
    }
    if (rr.step <= 0 || rr.step % 2 != 0) throw UsageError("r-range step must be even and positive");
    if (rr.stop < rr.start) throw UsageError("r-range is empty");
    return rr;
}

inline void validate(const JobSpec& job) {
    bool need_odd = job.command != Command::Gauss;
    auto check_r = [&](Int r) {
        if (r < 1) throw UsageError("r must be positive");
        if (need_odd && r % 2 == 0) throw UsageError("r must be odd");
        if (gcd(job.s, r) != 1) throw UsageError("gcd(s, r) must be 1");
        if (need_odd) normalize_s(job.s, r);
    };
    if (job.r) check_r(*job.r);
    if (job.r_range) {
        if (job.r && job.r_range) throw UsageError("give either --r or --r-range");
        for (Int r : job.r_range->values()) check_r(r);
    }
    bool needs_manifold = job.command == Command::Wrt || job.command == Command::FlatConn || job.command == Command::Verify ||
                          job.command == Command::Sweep;
    if (needs_manifold) {
        if (job.manifold.empty()) throw UsageError("--manifold is required");
        try {
            parse_manifold(job.manifold);
        } catch (const std::invalid_argument& e) {
            throw UsageError(e.what());
        }
    }
    bool needs_r = job.command != Command::FlatConn;
    if (needs_r && job.r_values().empty()) throw UsageError("--r or --r-range is required");
    if (job.command == Command::FalseTheta && job.basis.empty()) throw UsageError("--basis is required");
    if (job.command == Command::Verify && std::find(verify_suites().begin(), verify_suites().end(), job.suite) == verify_suites().end())
        throw UsageError("unknown verify suite '" + job.suite + "'");
    if (job.command == Command::Sweep && job.quantity != "residual" && job.quantity != "wrt")
        throw UsageError("sweep quantity must be residual or wrt");
    if (job.order < 0) throw UsageError("order must be non-negative");
    if (job.jobs < 1) throw UsageError("jobs must be at least 1");
}

inline JobSpec parse_args(const std::vector<std::string>& args) {
    CLI::App app{"qmwrt: WRT invariants, false theta functions and quantum modularity checks"};
    app.require_subcommand(1);
    JobSpec job;
    std::string range, format_flag;
    bool as_json = false, as_csv = false, as_text = false;
    std::optional<Int> r;
    auto common = [&](CLI::App* sub) {
        sub->add_option("--r", r, "odd r, xi = e^{2 pi i s/r}");
        sub->add_option("--s", job.s, "s coprime to r (default 1)");
        sub->add_option("--r-range", range, "start:stop:step with even step");
        sub->add_option("--order", job.order, "truncation order K");
        sub->add_option("--jobs", job.jobs, "worker threads");
        sub->add_option("--tolerance", job.tolerance, "numeric tolerance");
        sub->add_flag("--json", as_json, "JSON output (default)");
        sub->add_flag("--csv", as_csv, "CSV output");
        sub->add_flag("--text", as_text, "plain text output");
        sub->add_flag("--exact", job.exact, "include exact cyclotomic values");
    };
    auto* wrt = app.add_subcommand("wrt", "WRT invariant of a manifold");
    common(wrt);
    wrt->add_option("--manifold", job.manifold, "manifold selector");
    wrt->add_flag("--brute", job.brute, "use the colored Jones surgery sum");
    auto* ft = app.add_subcommand("falsetheta", "Eichler limit of a false theta function");
    common(ft);
    ft->add_option("--basis", job.basis, "phi:p1,p2,p3:a1,a2,a3 or psi:P:a=n,b=m");
    auto* fc = app.add_subcommand("flatconn", "flat connections and CS values");
    fc->add_option("--manifold", job.manifold, "manifold selector");
    fc->add_flag("--json", as_json, "JSON output (default)");
    fc->add_flag("--text", as_text, "plain text output");
    auto* ver = app.add_subcommand("verify", "run verification checks");
    common(ver);
    ver->add_option("suite", job.suite, "all | brieskorn | integrality | geometric | decomposition | oracle | sign-sums | modularity");
    ver->add_option("--manifold", job.manifold, "manifold selector");
    ver->add_option("--slope-tolerance", job.slope_tolerance, "allowed deviation of the fitted slope from -(K+1)");
    auto* sw = app.add_subcommand("sweep", "tabulate a quantity over r");
    common(sw);
    sw->add_option("--manifold", job.manifold, "manifold selector");
    sw->add_option("--quantity", job.quantity, "residual | wrt");
    auto* ga = app.add_subcommand("gauss", "quadratic Gauss sum, closed form against direct sum");
    common(ga);

    std::vector<const char*> argv{"qmwrt"};
    for (auto& a : args) argv.push_back(a.c_str());
    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::ParseError& e) {
        throw UsageError(e.what());
    }
    auto* sub = app.get_subcommands().front();
    job.command = command_from(sub->get_name());
    if (job.command == Command::Verify && job.suite.empty()) job.suite = "all";
    job.r = r;
    if (!range.empty()) job.r_range = parse_range(range);
    int formats = static_cast<int>(as_json) + static_cast<int>(as_csv) + static_cast<int>(as_text);
    if (formats > 1) throw UsageError("choose one of --json, --csv, --text");
    job.format = as_csv ? Format::Csv : as_text ? Format::Text : Format::Json;
    validate(job);
    return job;
}

// ---------------------------------------------------------------- serialization

inline std::string fmt17(double x) {
    std::ostringstream os;
    os << std::setprecision(17) << x;
    return os.str();
}

inline json exact_json(const CycloNumber& x) {
    json terms = json::array();
    for (auto& [k, c] : x.terms()) terms.push_back({k, c.get_num().get_str(), c.get_den().get_str()});
    return {{"conductor", x.conductor()}, {"terms", terms}};
}

inline CycloNumber exact_from_json(const json& j) {
    std::vector<CycloNumber::Term> t;
    for (auto& e : j.at("terms")) {
        Rational c(mpz_class(e[1].get<std::string>()), mpz_class(e[2].get<std::string>()));
        c.canonicalize();
        t.emplace_back(e[0].get<Int>(), c);
    }
    return CycloNumber::from_terms(j.at("conductor").get<Int>(), std::move(t));
}

inline json complex_json(std::complex<double> z) { return json::array({z.real(), z.imag()}); }

inline json job_json(const JobSpec& job) {
    json j{{"command", command_name(job.command)}};
    if (!job.suite.empty()) j["suite"] = job.suite;
    if (!job.manifold.empty()) j["manifold"] = job.manifold;
    if (!job.basis.empty()) j["basis"] = job.basis;
    if (job.r) j["r"] = *job.r;
    j["s"] = job.s;
    if (job.r_range) j["r_range"] = {job.r_range->start, job.r_range->stop, job.r_range->step};
    j["order"] = job.order;
    j["exact"] = job.exact;
    j["brute"] = job.brute;
    j["jobs"] = job.jobs;
    j["tolerance"] = job.tolerance;
    j["slope_tolerance"] = job.slope_tolerance;
    j["quantity"] = job.quantity;
    j["format"] = job.format == Format::Json ? "json" : job.format == Format::Csv ? "csv" : "text";
    return j;
}

inline JobSpec job_from_json(const json& j) {
    JobSpec job;
    job.command = command_from(j.at("command").get<std::string>());
    job.suite = j.value("suite", "");
    job.manifold = j.value("manifold", "");
    job.basis = j.value("basis", "");
    if (j.contains("r")) job.r = j["r"].get<Int>();
    job.s = j.value("s", Int{1});
    if (j.contains("r_range")) job.r_range = RRange{j["r_range"][0].get<Int>(), j["r_range"][1].get<Int>(), j["r_range"][2].get<Int>()};
    job.order = j.value("order", 2);
    job.exact = j.value("exact", false);
    job.brute = j.value("brute", false);
    job.jobs = j.value("jobs", 1);
    job.tolerance = j.value("tolerance", 1e-9);
    job.slope_tolerance = j.value("slope_tolerance", 0.5);
    job.quantity = j.value("quantity", "residual");
    auto f = j.value("format", "json");
    job.format = f == "csv" ? Format::Csv : f == "text" ? Format::Text : Format::Json;
    return job;
}

inline json check_json(const Check& c) {
    json j{{"name", c.name}, {"status", c.passed ? "pass" : "fail"}, {"exact", c.exact}};
    if (!c.exact) j["tolerance"] = c.tolerance;
    j["residual"] = c.residual;
    j["lhs"] = complex_json(c.lhs);
    j["rhs"] = complex_json(c.rhs);
    if (!c.note.empty()) j["note"] = c.note;
    return j;
}

inline json report_json(const VerificationReport& rep, const JobSpec& job) {
    json ctx = json::array();
    for (auto& c : rep.contexts) ctx.push_back({{"r", c.r}, {"s", c.s}});
    json results = json::array();
    json summary = json::object();
    for (auto& c : rep.checks) {
        results.push_back(check_json(c));
        if (!summary.contains(c.name) || summary[c.name] == "pass") summary[c.name] = c.passed ? "pass" : "fail";
    }
    json j{{"manifold", rep.manifold}, {"ctx", ctx}, {"job", job_json(job)}, {"results", results}};
    for (auto& [k, v] : summary.items()) j[k] = v;
    j["passed"] = rep.passed();
    return j;
}

// ---------------------------------------------------------------- worker pool

// Runs f(i) for i in [0, n) on `workers` threads; results stay in index order.
template <class T>
std::vector<T> parallel_map(size_t n, int workers, const std::function<T(size_t)>& f) {
    std::vector<T> out(n);
    std::vector<std::exception_ptr> errors(n);
    std::atomic<size_t> next{0};
    auto work = [&] {
        for (size_t i = next++; i < n; i = next++) {
            try {
                out[i] = f(i);
            } catch (...) {
                errors[i] = std::current_exception();
            }
        }
    };
    std::vector<std::thread> pool;
    int k = std::max(1, std::min<int>(workers, static_cast<int>(n)));
    for (int t = 1; t < k; ++t) pool.emplace_back(work);
    work();
    for (auto& th : pool) th.join();
    for (auto& e : errors)
        if (e) std::rethrow_exception(e);
    return out;
}

// ---------------------------------------------------------------- commands

struct Outcome {
    int code = 0;
    std::vector<std::string> failures;
};

inline RootContext normalized_ctx(Int r, Int s) { return RootContext::make(r, normalize_s(s, r)); }

struct Row {
    Int r = 0, s = 0;
    std::string quantity;
    std::complex<double> value;
    std::optional<CycloNumber> exact;
};

inline void write_rows(std::ostream& out, const std::vector<Row>& rows, Format f, const JobSpec& job, const std::string& manifold) {
    if (f == Format::Csv) {
        out << "r,s,quantity,re,im,abs,exact\n";
        for (auto& row : rows)
            out << row.r << "," << row.s << "," << row.quantity << "," << fmt17(row.value.real()) << "," << fmt17(row.value.imag()) << ","
                << fmt17(std::abs(row.value)) << "," << (row.exact ? "true" : "false") << "\n";
        return;
    }
    if (f == Format::Text) {
        for (auto& row : rows)
            out << row.quantity << "(r=" << row.r << ", s=" << row.s << ") = " << fmt17(row.value.real()) << " + " << fmt17(row.value.imag())
                << "i\n";
        return;
    }
    json results = json::array();
    for (auto& row : rows) {
        json j{{"r", row.r}, {"s", row.s}, {"quantity", row.quantity}, {"re", row.value.real()}, {"im", row.value.imag()}, {"abs", std::abs(row.value)}};
        if (row.exact && job.exact) j["exact"] = exact_json(*row.exact);
        results.push_back(j);
    }
    json ctx = json::array();
    for (Int r : job.r_values()) ctx.push_back({{"r", r}, {"s", job.s}});
    out << json{{"manifold", manifold}, {"ctx", ctx}, {"job", job_json(job)}, {"results", results}}.dump(2) << "\n";
}

inline std::vector<Row> wrt_rows(const Manifold& m, Int r, const JobSpec& job) {
    auto ctx = normalized_ctx(r, job.s);
    std::vector<Row> rows;
    auto add = [&](const std::string& q, const WrtValue& v) { rows.push_back({r, ctx.s, q, v.numeric, v.exact}); };
    if (m.kind == Manifold::Kind::Lens && !job.brute) {
        add("W", wrt_lens(m.param, ctx).W);
        return rows;
    }
    auto inv = invariants(m.data);
    if (job.brute) {
        auto tau = wrt_brute_surgery(m.data, ctx);
        add("tau", tau);
        add("W", w_normalized(tau, inv.H, ctx));
        return rows;
    }
    auto pre = wrt_seifert_closed(m.data, ctx);
    auto tau = WrtValue::from_exact(tau_of(pre, inv.H, ctx), WrtNormalization::Tau);
    add("tau", tau);
    add("W", w_normalized(pre, inv.H, ctx));
    Row p{r, ctx.s, "prefactored", pre.numeric, pre.exact};
    rows.push_back(p);
    return rows;
}

inline Outcome run_wrt(const JobSpec& job, std::ostream& out) {
    auto m = parse_manifold(job.manifold);
    auto rs = job.r_values();
    auto per = parallel_map<std::vector<Row>>(rs.size(), job.jobs, [&](size_t i) { return wrt_rows(m, rs[i], job); });
    std::vector<Row> rows;
    for (auto& v : per) rows.insert(rows.end(), v.begin(), v.end());
    write_rows(out, rows, job.format, job, m.data.format());
    return {};
}

struct BasisSpec {
    PeriodicFunction f;
    std::optional<std::array<Int, 3>> triple, rotation;
};

inline std::array<Int, 3> parse_triple(const std::string& s) {
    auto parts = qmwrt::detail::split(s, ',');
    if (parts.size() != 3) throw UsageError("expected three comma-separated integers in '" + s + "'");
    return {qmwrt::detail::parse_int(parts[0]), qmwrt::detail::parse_int(parts[1]), qmwrt::detail::parse_int(parts[2])};
}

// phi:p1,p2,p3:a1,a2,a3 | psi:P:a=n,b=m
inline BasisSpec parse_basis(const std::string& s) {
    auto parts = qmwrt::detail::split(s, ':');
    BasisSpec b;
    try {
        if (parts.size() == 3 && parts[0] == "phi") {
            b.triple = parse_triple(parts[1]);
            b.rotation = parse_triple(parts[2]);
            b.f = phi_basis(*b.triple, *b.rotation);
            return b;
        }
        if (parts.size() == 3 && parts[0] == "psi") {
            Int P = qmwrt::detail::parse_int(parts[1]);
            std::map<Int, Int> coeffs;
            for (auto& tok : qmwrt::detail::split(parts[2], ',')) {
                auto kv = qmwrt::detail::split(tok, '=');
                Int a = qmwrt::detail::parse_int(kv[0]);
                coeffs[a] += kv.size() == 2 ? qmwrt::detail::parse_int(kv[1]) : 1;
            }
            b.f = psi_combination(P, coeffs);
            return b;
        }
    } catch (const std::invalid_argument& e) {
        throw UsageError(e.what());
    }
    throw UsageError("unknown basis '" + s + "'");
}

inline Outcome run_falsetheta(const JobSpec& job, std::ostream& out) {
    auto b = parse_basis(job.basis);
    json results = json::array();
    std::vector<Row> rows;
    for (Int r : job.r_values()) {
        auto v = eichler_limit(b.f, rat(job.s, r));
        json j{{"r", r}, {"s", job.s}, {"quantity", "eichler_limit"}, {"re", v.eval().real()}, {"im", v.eval().imag()}};
        if (job.exact) j["exact"] = exact_json(v);
        if (b.triple) {
            auto p = canonical_triple(*b.triple);
            j["cs_lift"] = nonabelian_cs_lift(p, *b.rotation).get_str();
            j["t_phase"] = t_phase(p, *b.rotation).get_str();
            if (r % 2 == 1) j["integral"] = integrality_check(p, *b.rotation, RootContext{r, job.s}).integral;
        }
        results.push_back(j);
        rows.push_back({r, job.s, "eichler_limit", v.eval(), v});
    }
    if (job.format == Format::Json) {
        out << json{{"basis", job.basis}, {"job", job_json(job)}, {"results", results}}.dump(2) << "\n";
    } else {
        write_rows(out, rows, job.format, job, job.basis);
    }
    return {};
}

inline json connection_json(const FlatConnection& c) {
    const char* kind = c.kind == FlatConnection::Kind::Trivial ? "trivial" : c.kind == FlatConnection::Kind::Abelian ? "abelian" : "nonabelian";
    json j{{"kind", kind}, {"cs", c.cs.str()}, {"cs_lift", c.cs_lift.get_str()}};
    if (c.kind == FlatConnection::Kind::Nonabelian && c.rotation[0] != 0) j["rotation"] = c.rotation;
    if (c.kind == FlatConnection::Kind::Abelian || c.kind == FlatConnection::Kind::Trivial) j["label"] = c.label;
    return j;
}

inline Outcome run_flatconn(const JobSpec& job, std::ostream& out) {
    auto m = parse_manifold(job.manifold);
    auto inv = invariants(m.data);
    json conns = json::array();
    std::vector<FlatConnection> list;
    if (m.kind == Manifold::Kind::Brieskorn) {
        FlatConnection triv;
        list.push_back(triv);
        for (auto& c : nonabelian_connections(m.triple)) list.push_back(c);
    } else if (auto fam = m.family()) {
        list = abelian_connections(*fam, m.param);
    }
    for (auto& c : list) conns.push_back(connection_json(c));
    json j{{"manifold", m.data.format()},
           {"e", inv.e.get_str()},
           {"chi", inv.chi.get_str()},
           {"phi", inv.phi.get_str()},
           {"H", inv.H},
           {"geometry", geometry_name(classify_geometry(inv.e, inv.chi))},
           {"connections", conns}};
    try {
        auto g = geometric_connection(m.data);
        j["geometric"] = connection_json(g.connection);
    } catch (const std::invalid_argument&) {
    }
    if (job.format == Format::Text) {
        out << m.data.format() << ": e=" << inv.e << " chi=" << inv.chi << " phi=" << inv.phi << " |H1|=" << inv.H << "\n";
        for (auto& c : list) out << "  " << connection_json(c).dump() << "\n";
    } else {
        out << j.dump(2) << "\n";
    }
    return {};
}

inline Outcome run_gauss(const JobSpec& job, std::ostream& out) {
    json results = json::array();
    bool all = true;
    for (Int r : job.r_values()) {
        auto g = gauss_closed(job.s, r);
        auto brute = gauss_brute(job.s, r).eval();
        bool match = std::abs(g.value() - brute) < job.tolerance * std::max(1.0, std::sqrt(static_cast<double>(r)));
        all = all && match;
        json closed{{"jacobi", g.jacobi}, {"multiplicity", g.multiplicity}, {"sqrt_arg", g.sqrt_arg}, {"re", g.value().real()}, {"im", g.value().imag()}};
        json j{{"r", r}, {"s", job.s}, {"closed", closed}, {"brute_re", brute.real()}, {"brute_im", brute.imag()}, {"match", match}};
        if (job.exact) j["exact"] = exact_json(gauss_brute(job.s, r));
        results.push_back(j);
    }
    json doc = results.size() == 1 ? results[0] : json{{"results", results}};
    doc["job"] = job_json(job);
    out << doc.dump(2) << "\n";
    if (!all) return {1, {"gauss_match"}};
    return {};
}

inline std::vector<std::array<Int, 3>> rotations_of(const Manifold& m) { return rotation_numbers(m.triple); }

inline VerificationReport verify_at(const Manifold& m, const std::string& suite, Int r, const JobSpec& job) {
    VerificationReport rep;
    rep.manifold = m.data.format();
    auto ctx = normalized_ctx(r, job.s);
    rep.contexts.push_back(ctx);
    auto want = [&](const char* name) { return suite == "all" || suite == name; };
    bool brieskorn_kind = m.kind == Manifold::Kind::Brieskorn;
    bool abelian_kind = m.family().has_value();
    auto inv = invariants(m.data);
    if (want("brieskorn") && brieskorn_kind) rep.merge(brieskorn_identity(m.triple, ctx));
    if (want("integrality") && brieskorn_kind)
        for (auto& a : rotations_of(m)) {
            auto res = integrality_check(m.triple, a, ctx);
            std::ostringstream note;
            note << "a=(" << a[0] << "," << a[1] << "," << a[2] << ") " << context_label(ctx);
            rep.checks.push_back(bool_check("integrality", res.integral, note.str()));
        }
    if (want("sign-sums") && brieskorn_kind)
        for (auto& a : rotations_of(m)) {
            auto b = sign_sum_checks(m.triple, a, r);
            for (auto& c : b.checks) rep.checks.push_back(c);
        }
    if (want("geometric") && (brieskorn_kind || (abelian_kind && m.kind != Manifold::Kind::Lens))) {
        bool ok = brieskorn_kind || (gcd(ctx.s, inv.P) == 1 && gcd(r, inv.H) == 1);
        if (ok) rep.merge(geometric_relation(m, ctx));
    }
    if (want("decomposition") && abelian_kind) {
        auto spec = decomposition_spec(m);
        if (gcd(ctx.s, spec.H) == 1 && (m.kind == Manifold::Kind::Lens || gcd(ctx.s, inv.P) == 1)) {
            auto W = m.kind == Manifold::Kind::Lens ? *wrt_lens(m.param, ctx).W.exact : *wrt_w(m.data, ctx).exact;
            rep.checks.push_back(exact_check("decomposition", reconstruct(qhs_decomposition(m, ctx), ctx), W, context_label(ctx)));
            if (m.kind == Manifold::Kind::Lens)
                rep.checks.push_back(bool_check("lens_sum_identity", lens_sum_identity(m.param, ctx).dual_reading, context_label(ctx)));
        }
    }
    if (want("oracle") && m.data.integral_framings()) {
        long double tuples = std::pow(static_cast<long double>(r - 1), static_cast<long double>(m.data.m() + 1));
        bool closed_ok = m.kind == Manifold::Kind::Lens || inv.H == 1 || gcd(ctx.s, inv.P) == 1;
        if (tuples <= max_colors() && closed_ok && gcd(ctx.s, inv.H) == 1) {
            auto brute = wrt_brute_surgery(m.data, ctx);
            auto Wb = w_normalized(brute, inv.H, ctx);
            auto Wc = m.kind == Manifold::Kind::Lens ? wrt_lens(m.param, ctx).W : wrt_w(m.data, ctx);
            rep.checks.push_back(exact_check("oracle_equivalence", *Wb.exact, *Wc.exact, context_label(ctx)));
            rep.checks.push_back(numeric_check("oracle_numeric", Wb.numeric, Wc.numeric, job.tolerance, context_label(ctx)));
        }
    }
    return rep;
}

inline Outcome finish(const VerificationReport& rep, const JobSpec& job, std::ostream& out, std::ostream& err) {
    if (job.format == Format::Json) {
        out << report_json(rep, job).dump(2) << "\n";
    } else if (job.format == Format::Csv) {
        out << "name,status,exact,residual,note\n";
        for (auto& c : rep.checks)
            out << c.name << "," << (c.passed ? "pass" : "fail") << "," << (c.exact ? "true" : "false") << "," << fmt17(c.residual) << ",\""
                << c.note << "\"\n";
    } else {
        for (auto& c : rep.checks) out << (c.passed ? "PASS " : "FAIL ") << c.name << "  " << c.note << "\n";
    }
    Outcome o;
    o.failures = rep.failures();
    if (!o.failures.empty()) {
        o.code = 1;
        err << "failed checks:";
        for (auto& f : o.failures) err << " " << f;
        err << "\n";
    }
    return o;
}

inline VerificationReport modularity_report(const Manifold& m, const JobSpec& job) {
    auto rs = job.r_values();
    auto vals = parallel_map<double>(rs.size(), job.jobs,
                                     [&](size_t i) { return std::abs(residual(m, RootContext::raw(rs[i], job.s), job.order)); });
    ResidualScan scan;
    for (size_t i = 0; i < rs.size(); ++i) scan.rows.push_back({rs[i], vals[i]});
    scan.slope = loglog_slope(scan.rows);
    VerificationReport rep;
    rep.manifold = m.data.format();
    for (Int r : rs) rep.contexts.push_back(RootContext::raw(r, job.s));
    double target = -(job.order + 1);
    std::ostringstream note;
    note << "K=" << job.order << " fitted slope " << scan.slope << " against " << target;
    rep.checks.push_back(numeric_check("residual_slope", scan.slope, target, job.slope_tolerance, note.str()));
    return rep;
}

inline Outcome run_verify(const JobSpec& job, std::ostream& out, std::ostream& err) {
    auto m = parse_manifold(job.manifold);
    if (job.suite == "modularity") return finish(modularity_report(m, job), job, out, err);
    auto rs = job.r_values();
    auto reps = parallel_map<VerificationReport>(rs.size(), job.jobs, [&](size_t i) { return verify_at(m, job.suite, rs[i], job); });
    VerificationReport all;
    all.manifold = m.data.format();
    for (auto& r : reps) all.merge(r);
    if (all.checks.empty()) all.checks.push_back(bool_check(job.suite, false, "no applicable checks for this manifold and r"));
    return finish(all, job, out, err);
}

inline Outcome run_sweep(const JobSpec& job, std::ostream& out) {
    auto m = parse_manifold(job.manifold);
    auto rs = job.r_values();
    std::vector<Row> rows;
    if (job.quantity == "residual") {
        auto vals = parallel_map<std::complex<double>>(rs.size(), job.jobs,
                                                       [&](size_t i) { return residual(m, RootContext::raw(rs[i], job.s), job.order); });
        for (size_t i = 0; i < rs.size(); ++i) rows.push_back({rs[i], job.s, "residual", vals[i], std::nullopt});
    } else {
        auto per = parallel_map<std::vector<Row>>(rs.size(), job.jobs, [&](size_t i) { return wrt_rows(m, rs[i], job); });
        for (auto& v : per)
            for (auto& row : v)
                if (row.quantity == "W") rows.push_back(row);
    }
    write_rows(out, rows, job.format, job, m.data.format());
    return {};
}

inline Outcome run(const JobSpec& job, std::ostream& out, std::ostream& err) {
    switch (job.command) {
        case Command::Wrt: return run_wrt(job, out);
        case Command::FalseTheta: return run_falsetheta(job, out);
        case Command::FlatConn: return run_flatconn(job, out);
        case Command::Verify: return run_verify(job, out, err);
        case Command::Sweep: return run_sweep(job, out);
        case Command::Gauss: return run_gauss(job, out);
    }
    return {2, {}};
}

// Exit codes: 0 all checks pass, 1 a check failed, 2 usage or input error.
inline int main_entry(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    JobSpec job;
    try {
        job = parse_args(args);
    } catch (const UsageError& e) {
        err << "usage error: " << e.what() << "\n";
        return 2;
    }
    try {
        return run(job, out, err).code;
    } catch (const UsageError& e) {
        err << "usage error: " << e.what() << "\n";
        return 2;
    } catch (const std::invalid_argument& e) {
        err << "input error: " << e.what() << "\n";
        return 2;
    } catch (const std::length_error& e) {
        err << "input error: " << e.what() << "\n";
        return 2;
    }
}

}  // namespace qmwrt::cli

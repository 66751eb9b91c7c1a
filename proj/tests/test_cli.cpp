#include <gtest/gtest.h>

#include "qmwrt_cli.hpp"

#include <cmath>
#include <sstream>

using namespace qmwrt;
using namespace qmwrt::cli;

namespace {

std::vector<std::string> words(const std::string& line) {
    std::istringstream is(line);
    std::vector<std::string> out;
    for (std::string w; is >> w;) out.push_back(w);
    return out;
}

struct Run {
    int code;
    std::string out, err;
};

Run invoke(const std::string& line) {
    std::ostringstream out, err;
    int code = main_entry(words(line), out, err);
    return {code, out.str(), err.str()};
}

}  // namespace

TEST(Parse, WrtJob) {
    auto job = parse_args(words("wrt --manifold brieskorn:2,3,7 --r 29 --s 5 --exact --json"));
    EXPECT_EQ(job.command, Command::Wrt);
    EXPECT_EQ(job.manifold, "brieskorn:2,3,7");
    ASSERT_TRUE(job.r.has_value());
    EXPECT_EQ(*job.r, 29);
    EXPECT_EQ(job.s, 5);
    EXPECT_TRUE(job.exact);
    EXPECT_EQ(job.format, Format::Json);
}

TEST(Parse, ModularitySweep) {
    auto job = parse_args(words("verify modularity --manifold brieskorn:2,3,7 --s 5 --r-range 101:501:50 --order 3"));
    EXPECT_EQ(job.command, Command::Verify);
    EXPECT_EQ(job.suite, "modularity");
    EXPECT_EQ(job.order, 3);
    auto rs = job.r_values();
    ASSERT_EQ(rs.size(), 9u);
    EXPECT_EQ(rs.front(), 101);
    EXPECT_EQ(rs.back(), 501);
    for (Int r : rs) EXPECT_EQ(r % 2, 1);
}

TEST(Parse, EvenRRejected) {
    try {
        parse_args(words("wrt --manifold brieskorn:2,3,7 --r 4"));
        FAIL() << "expected a usage error";
    } catch (const UsageError& e) {
        EXPECT_NE(std::string(e.what()).find("r must be odd"), std::string::npos);
    }
    auto run = invoke("wrt --manifold brieskorn:2,3,7 --r 4");
    EXPECT_EQ(run.code, 2);
    EXPECT_NE(run.err.find("r must be odd"), std::string::npos);
}

TEST(Parse, Errors) {
    EXPECT_THROW(parse_args(words("wrt --manifold torus:2,3 --r 7")), UsageError);
    EXPECT_THROW(parse_args(words("wrt --manifold brieskorn:2,3,7 --r 15 --s 5")), UsageError);
    EXPECT_THROW(parse_args(words("sweep --manifold brieskorn:2,3,7 --r-range 101:201:25")), UsageError);
    EXPECT_THROW(parse_args(words("verify nonsense --manifold brieskorn:2,3,7 --r 7")), UsageError);
    EXPECT_THROW(parse_args(words("wrt --manifold brieskorn:2,3,7")), UsageError);
    EXPECT_THROW(parse_args(words("wrt --manifold brieskorn:2,3,7 --r 7 --csv --json")), UsageError);
    EXPECT_THROW(parse_args(words("frobnicate")), UsageError);
    EXPECT_EQ(invoke("wrt --bogus").code, 2);
}

TEST(Json, JobRoundTrip) {
    for (auto line : {"wrt --manifold brieskorn:2,3,7 --r 29 --s 5 --exact --json",
                      "verify modularity --manifold brieskorn:2,3,7 --s 5 --r-range 101:501:50 --order 3 --jobs 4",
                      "falsetheta --basis phi:2,3,7:1,1,1 --r 7 --csv", "gauss --s 3 --r 8 --tolerance 1e-6"}) {
        auto job = parse_args(words(line));
        auto text = job_json(job).dump();
        EXPECT_EQ(job_from_json(json::parse(text)), job) << line;
    }
}

TEST(Json, EmittedDocumentCarriesJob) {
    auto run = invoke("wrt --manifold ex:2-3-3 --r 7 --s 1 --exact");
    ASSERT_EQ(run.code, 0) << run.err;
    auto doc = json::parse(run.out);
    EXPECT_EQ(job_from_json(doc["job"]), parse_args(words("wrt --manifold ex:2-3-3 --r 7 --s 1 --exact")));
    EXPECT_TRUE(doc.contains("manifold"));
    EXPECT_TRUE(doc.contains("ctx"));
    EXPECT_FALSE(doc["results"].empty());
}

TEST(Json, ExactValuesRoundTrip) {
    auto ctx = RootContext::make(7, 5);
    auto W = *wrt_w(example_233(), ctx).exact;
    auto back = exact_from_json(json::parse(exact_json(W).dump()));
    EXPECT_TRUE((back - W).is_zero());

    auto run = invoke("wrt --manifold ex:2-3-3 --r 7 --s 5 --exact");
    ASSERT_EQ(run.code, 0) << run.err;
    auto doc = json::parse(run.out);
    bool found = false;
    for (auto& row : doc["results"])
        if (row["quantity"] == "W") {
            EXPECT_TRUE((exact_from_json(row["exact"]) - W).is_zero());
            found = true;
        }
    EXPECT_TRUE(found);
}

TEST(Run, VerifyPoincareSphere) {
    auto run = invoke("verify --manifold brieskorn:2,3,5 --r 7");
    EXPECT_EQ(run.code, 0) << run.err;
    auto doc = json::parse(run.out);
    EXPECT_EQ(doc["geometric_relation"], "pass");
    EXPECT_EQ(doc["false_theta_identity"], "pass");
    EXPECT_TRUE(doc["passed"].get<bool>());
}

TEST(Run, VerifySuites) {
    for (auto line : {"verify oracle --manifold ex:neg-2-3-9 --r 5", "verify decomposition --manifold ex:family:2 --r 7 --s 3",
                      "verify decomposition --manifold lens:5 --r 7", "verify integrality --manifold brieskorn:2,3,7 --r 9 --s 13",
                      "verify sign-sums --manifold brieskorn:2,5,7 --r 11", "verify geometric --manifold ex:2-3-3 --r 7 --s 5"}) {
        auto run = invoke(line);
        EXPECT_EQ(run.code, 0) << line << "\n" << run.err;
        EXPECT_TRUE(json::parse(run.out)["passed"].get<bool>()) << line;
    }
}

TEST(Run, WrongToleranceFails) {
    auto good = invoke("verify modularity --manifold brieskorn:2,3,7 --r-range 101:1001:100 --order 2");
    EXPECT_EQ(good.code, 0) << good.out << good.err;
    auto bad = invoke("verify modularity --manifold brieskorn:2,3,7 --r-range 101:1001:100 --order 2 --slope-tolerance 1e-9");
    EXPECT_EQ(bad.code, 1);
    EXPECT_NE(bad.err.find("residual_slope"), std::string::npos);

    auto oracle_bad = invoke("verify oracle --manifold ex:2-3-3 --r 7 --tolerance -1");
    EXPECT_EQ(oracle_bad.code, 1);
    EXPECT_NE(oracle_bad.err.find("oracle_numeric"), std::string::npos);
}

TEST(Run, SweepCsvOneRowPerR) {
    auto run = invoke("sweep --manifold brieskorn:2,3,7 --r-range 31:71:10 --order 1 --csv --jobs 3");
    ASSERT_EQ(run.code, 0) << run.err;
    std::istringstream is(run.out);
    std::string line;
    std::getline(is, line);
    EXPECT_EQ(line, "r,s,quantity,re,im,abs,exact");
    std::vector<Int> rs;
    while (std::getline(is, line)) {
        auto cols = detail::split(line, ',');
        ASSERT_EQ(cols.size(), 7u);
        rs.push_back(detail::parse_int(cols[0]));
        EXPECT_EQ(cols[2], "residual");
        double re = std::stod(cols[3]), im = std::stod(cols[4]), ab = std::stod(cols[5]);
        EXPECT_NEAR(std::hypot(re, im), ab, 1e-12);
    }
    EXPECT_EQ(rs, (std::vector<Int>{31, 41, 51, 61, 71}));
}

TEST(Run, SweepOrderIndependentOfWorkers) {
    auto a = invoke("sweep --manifold ex:2-3-3 --r-range 7:31:2 --order 1 --csv --jobs 1");
    auto b = invoke("sweep --manifold ex:2-3-3 --r-range 7:31:2 --order 1 --csv --jobs 5");
    EXPECT_EQ(a.code, 2);  // r = 9, 15, 21, 27 share a factor with |H_1| = 3
    auto c = invoke("sweep --manifold brieskorn:2,3,7 --r-range 11:41:2 --order 1 --csv --jobs 1");
    auto d = invoke("sweep --manifold brieskorn:2,3,7 --r-range 11:41:2 --order 1 --csv --jobs 5");
    ASSERT_EQ(c.code, 0);
    EXPECT_EQ(c.out, d.out);
    EXPECT_EQ(b.code, 2);
}

TEST(Run, GaussJob) {
    auto run = invoke("gauss --s 1 --r 5");
    ASSERT_EQ(run.code, 0) << run.err;
    auto doc = json::parse(run.out);
    EXPECT_NEAR(doc["brute_re"].get<double>(), std::sqrt(5.0), 1e-12);
    EXPECT_TRUE(doc["match"].get<bool>());
    EXPECT_TRUE(doc["closed"].is_object());
    // even r is fine for a bare Gauss sum
    EXPECT_EQ(invoke("gauss --s 1 --r 8").code, 0);
}

TEST(Run, WrtClosedAgreesWithBrute) {
    auto a = json::parse(invoke("wrt --manifold ex:neg-2-3-9 --r 7 --s 5").out);
    auto b = json::parse(invoke("wrt --manifold ex:neg-2-3-9 --r 7 --s 5 --brute").out);
    auto pick = [](const json& doc, const std::string& q) {
        for (auto& row : doc["results"])
            if (row["quantity"] == q) return std::complex<double>(row["re"].get<double>(), row["im"].get<double>());
        return std::complex<double>(NAN, NAN);
    };
    EXPECT_LT(std::abs(pick(a, "W") - pick(b, "W")), 1e-9);
    EXPECT_LT(std::abs(pick(a, "tau") - pick(b, "tau")), 1e-9);
}

TEST(Run, FlatConnections) {
    auto doc = json::parse(invoke("flatconn --manifold brieskorn:2,3,7").out);
    EXPECT_EQ(doc["connections"].size(), 4u);  // trivial + three rotation numbers
    EXPECT_EQ(doc["H"], 1);
    EXPECT_TRUE(doc.contains("geometric"));
    auto lens = json::parse(invoke("flatconn --manifold lens:5").out);
    EXPECT_EQ(lens["H"], 5);
}

TEST(Run, FalseTheta) {
    auto run = invoke("falsetheta --basis phi:2,3,7:1,1,1 --r 7 --exact");
    ASSERT_EQ(run.code, 0) << run.err;
    auto doc = json::parse(run.out);
    auto v = exact_from_json(doc["results"][0]["exact"]);
    EXPECT_TRUE((v - eichler_limit(phi_basis({2, 3, 7}, {1, 1, 1}), rat(1, 7))).is_zero());
    EXPECT_TRUE(doc["results"][0]["integral"].get<bool>());
    EXPECT_EQ(invoke("falsetheta --basis psi:6:1=1,5=-1 --r 7").code, 0);
    EXPECT_EQ(invoke("falsetheta --basis chi:6 --r 7").code, 2);
}

TEST(Run, InapplicableSuiteFails) {
    // gcd(5, P) = 5 for ex:family:2, so no decomposition check can run
    auto run = invoke("verify decomposition --manifold ex:family:2 --r 7 --s 5");
    EXPECT_EQ(run.code, 1);
    EXPECT_NE(run.err.find("decomposition"), std::string::npos);
}

TEST(Run, BruteGuardIsInputError) {
    setenv("QMWRT_MAX_COLORS", "10", 1);
    auto run = invoke("wrt --manifold ex:2-3-3 --r 7 --brute");
    unsetenv("QMWRT_MAX_COLORS");
    EXPECT_EQ(run.code, 2);
    EXPECT_NE(run.err.find("QMWRT_MAX_COLORS"), std::string::npos);
}

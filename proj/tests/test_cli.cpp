#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <fstream>
#include <sstream>

#include "report.hpp"

using namespace mono;
using mono::cli::json;

namespace {

json load(const std::string& name) {
    std::ifstream in(std::string(TEST_DATA_DIR) + "/" + name);
    return json::parse(in);
}

cplx entry(const json& m, int i, int j) { return {m[i][j][0].get<double>(), m[i][j][1].get<double>()}; }

double identity_deviation(const json& m) {
    double d = 0;
    for (size_t i = 0; i < m.size(); ++i)
        for (size_t j = 0; j < m.size(); ++j) d = std::max(d, std::abs(entry(m, i, j) - (i == j ? 1.0 : 0.0)));
    return d;
}

bool has_angle(const json& list, double a) {
    for (auto& v : list)
        if (std::abs(std::remainder(v.get<double>() - a, kTwoPi)) < 1e-12) return true;
    return false;
}

}  // namespace

TEST_CASE("parse errors") {
    CHECK_THROWS_AS(cli::parse_job(load("bad.json"), {"rays"}), Error);
    json j = load("two_pole.json");
    j["n"] = 2.5;
    CHECK_THROWS_AS(cli::parse_job(j, {"rays"}), Error);
    j = load("two_pole.json");
    j["A1"][0][0] = "x";
    CHECK_THROWS_AS(cli::parse_job(j, {"rays"}), Error);
    j = load("two_pole.json");
    j["lambda"][1] = j["lambda"][0];
    try {
        cli::parse_job(j, {"rays"});
        CHECK(false);
    } catch (const Error& e) {
        CHECK(e.kind() == "ParseError");
    }
}

TEST_CASE("defaults and integer tokens") {
    cli::JobSpec job = cli::parse_job(load("jordan.json"), {"connection"});
    CHECK(job.series_order == 60);
    CHECK(job.tol == 1e-12);
    CHECK_FALSE(job.eta.has_value());
    CHECK(job.system.lambda_prime[0] == cplx(-1.0));
    CHECK(classify(job.system.lambda_prime[0]).kind == CaseKind::Jordan);
    auto out = cli::run(job);
    CHECK(out.status == 0);
    CHECK(out.report["case_tags"][0]["tag"] == "Jordan");
    CHECK(entry(out.report["C"], 0, 0) == cplx(0.0));
}

TEST_CASE("rays for two poles") {
    auto out = cli::run(cli::parse_job(load("two_pole.json"), {"rays"}));
    REQUIRE(out.status == 0);
    const json& r = out.report["critical_directions"];
    CHECK(r["m"] == 2);
    CHECK(has_angle(r["tau"], kPi / 2));
    CHECK(has_angle(r["tau"], 3 * kPi / 2));
    CHECK(has_angle(r["critical_eta"], 0.0));
    CHECK(has_angle(r["critical_eta"], kPi));
    CHECK(out.report.contains("dominance"));
    CHECK_FALSE(out.report.contains("C"));
}

TEST_CASE("diagonal A1 gives identity Stokes matrices") {
    auto out = cli::run(cli::parse_job(load("diagonal.json"), {"stokes"}));
    REQUIRE(out.status == 0);
    CHECK(identity_deviation(out.report["S_plus"]) < 1e-12);
    CHECK(identity_deviation(out.report["S_minus_inv"]) < 1e-12);
    CHECK(out.report.contains("traces"));
}

TEST_CASE("verify on a seeded three-pole system") {
    auto out = cli::run(cli::parse_job(load("seeded3.json"), {"verify"}));
    REQUIRE(out.report.contains("verify"));
    const json& v = out.report["verify"];
    CHECK(v["tolerance"] == 1e-6);
    CHECK(v["max_diff_S_plus"].get<double>() <= 1e-6);
    CHECK(v["max_diff_S_minus_inv"].get<double>() <= 1e-6);
    CHECK(v["pass"] == true);
    CHECK(out.status == 0);
}

TEST_CASE("full report: sections, determinism, round trip") {
    json input = load("two_pole.json");
    auto job = cli::parse_job(input, cli::all_commands());
    auto a = cli::run(job);
    REQUIRE(a.status == 0);
    for (const char* key : {"case_tags", "critical_directions", "dominance", "C", "err_C", "M", "M_star", "S_plus",
                            "S_minus_inv", "W", "traces", "verify"})
        CHECK(a.report.contains(key));
    auto b = cli::run(job);
    CHECK(a.report.dump() == b.report.dump());
    auto again = cli::parse_job(a.report["input"], cli::all_commands());
    CHECK(again.system.lambda == job.system.lambda);
    CHECK(again.system.a1 == job.system.a1);
    CHECK(again.eta == job.eta);
    CHECK(again.series_order == job.series_order);
    CHECK(again.tol == job.tol);
    CHECK(cli::run(again).report.dump() == a.report.dump());
}

TEST_CASE("numeric failure sets status 2") {
    json j = load("two_pole.json");
    j["eta"] = kPi;
    auto out = cli::run(cli::parse_job(j, {"connection"}));
    CHECK(out.status == 2);
    CHECK(out.report["error"]["kind"] == "InadmissibleDirection");
}

TEST_CASE("csv export") {
    auto out = cli::run(cli::parse_job(load("two_pole.json"), {"rays", "connection", "stokes"}));
    std::string csv = cli::to_csv(out.report);
    std::istringstream in(csv);
    std::string line;
    std::getline(in, line);
    CHECK(line == "section,row,col,re,im");
    int c_rows = 0, s_rows = 0, bad = 0;
    while (std::getline(in, line)) {
        if (std::count(line.begin(), line.end(), ',') != 4) ++bad;
        if (line.rfind("C,", 0) == 0) ++c_rows;
        if (line.rfind("S_plus,", 0) == 0) ++s_rows;
    }
    CHECK(bad == 0);
    CHECK(c_rows == 4);
    CHECK(s_rows == 4);
    CHECK(csv.find("tau,0,") != std::string::npos);
}

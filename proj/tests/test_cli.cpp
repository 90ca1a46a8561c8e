#include <cstdio>
#include <sstream>

#include "doctest.h"
#include "mqc/cli.hpp"
#include "mqc/io.hpp"

using namespace mqc;

namespace {

struct Run {
    int code;
    std::string out;
    std::string err;
};

Run run(std::vector<std::string> args) {
    std::ostringstream out, err;
    int code = run_cli(args, out, err);
    return {code, out.str(), err.str()};
}

Json out_json(const Run& r) { return Json::parse(r.out); }
int error_code(const Run& r) { return Json::parse(r.err)["error"]["code"].get<int>(); }

}  // namespace

TEST_CASE("gen and measure") {
    REQUIRE(run({"gen", "--what", "ghz", "--n", "3", "--out", "cli_ghz.json"}).code == 0);
    auto r = run({"measure", "--measure", "c_l1", "--state", "cli_ghz.json", "--partition", "1|2|3"});
    REQUIRE(r.code == 0);
    CHECK(out_json(r)["value"].get<double>() == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(out_json(r)["bound_kind"] == "exact");

    write_json_file("cli_gprod.json", to_json(g_vacuum({1, 1, 1})));
    r = run({"measure", "--measure", "m_nonproduct", "--state", "cli_gprod.json", "--partition", "1|2|3"});
    REQUIRE(r.code == 0);
    CHECK(std::abs(out_json(r)["value"].get<double>()) < 1e-12);

    REQUIRE(run({"gen", "--what", "random", "--n", "2", "--d", "3", "--seed", "9", "--out", "cli_r1.json"}).code == 0);
    REQUIRE(run({"gen", "--what", "random", "--n", "2", "--d", "3", "--seed", "9", "--out", "cli_r2.json"}).code == 0);
    auto a = density_from_json(read_json_file("cli_r1.json"));
    auto b = density_from_json(read_json_file("cli_r2.json"));
    CHECK(a.dims() == Dims{3, 3});
    CHECK((a.matrix() - b.matrix()).max_abs() == 0.0);
    for (const char* f : {"cli_ghz.json", "cli_gprod.json", "cli_r1.json", "cli_r2.json"}) std::remove(f);
}

TEST_CASE("steer-check on Werner states") {
    REQUIRE(run({"gen", "--what", "pauli", "--n", "1", "--axes", "zx", "--out", "cli_zx.json"}).code == 0);
    REQUIRE(run({"gen", "--what", "werner", "--eta", "0.9", "--out", "cli_w9.json"}).code == 0);
    REQUIRE(run({"gen", "--what", "werner", "--eta", "0.5", "--out", "cli_w5.json"}).code == 0);
    auto r = run({"steer-check", "--state", "cli_w9.json", "--split", "1;2", "--measurements", "cli_zx.json"});
    REQUIRE(r.code == 0);
    CHECK(out_json(r)["verdict"] == "steerable-evidence");
    r = run({"steer-check", "--state", "cli_w5.json", "--split", "1;2", "--measurements", "cli_zx.json"});
    CHECK(out_json(r)["verdict"] == "lhs-member");
    for (const char* f : {"cli_zx.json", "cli_w9.json", "cli_w5.json"}) std::remove(f);
}

TEST_CASE("suites report through exit codes") {
    auto r = run({"axiom-check", "--measure", "c_l1", "--suite", "mqcm1", "--trials", "5", "--seed", "3"});
    CHECK(r.code == 0);
    CHECK(out_json(r)["suite"] == "MQCM1");
    CHECK(out_json(r)["trials"] == 5);

    REQUIRE(run({"gen", "--what", "ghz", "--n", "3", "--out", "cli_ghz.json"}).code == 0);
    r = run({"hierarchy-scan", "--measure", "c_l1", "--state", "cli_ghz.json"});
    CHECK(r.code == 0);
    CHECK(out_json(r)["violations"].empty());
    r = run({"monogamy-check", "--measure", "e_f", "--state", "cli_ghz.json", "--kind", "bogus"});
    CHECK(r.code == exit_invalid_args);
    std::remove("cli_ghz.json");
}

TEST_CASE("error codes") {
    REQUIRE(run({"gen", "--what", "ghz", "--n", "3", "--out", "cli_ghz.json"}).code == 0);
    auto r = run({"measure", "--measure", "nope", "--state", "cli_ghz.json", "--partition", "1"});
    CHECK(r.code == exit_unknown_measure);
    CHECK(error_code(r) == exit_unknown_measure);
    CHECK(r.out.empty());

    r = run({"measure", "--measure", "c_l1", "--state", "does_not_exist.json", "--partition", "1"});
    CHECK(r.code == exit_malformed_file);
    {
        std::FILE* f = std::fopen("cli_bad.json", "w");
        std::fputs("{\"kind\":\"density\",\"dims\":[2]", f);
        std::fclose(f);
    }
    r = run({"measure", "--measure", "c_l1", "--state", "cli_bad.json", "--partition", "1"});
    CHECK(r.code == exit_malformed_file);

    for (const char* p : {"1|1", "1|4", "1,,2", "a"}) {
        r = run({"measure", "--measure", "c_l1", "--state", "cli_ghz.json", "--partition", p});
        CHECK_MESSAGE(r.code == exit_grammar, p);
    }
    CHECK(run({"measure", "--measure", "c_l1"}).code == exit_invalid_args);
    CHECK(run({"frobnicate"}).code == exit_invalid_args);
    CHECK(run({"axiom-check", "--measure", "c_l1", "--suite", "MQCM1", "--trials", "2"}).code == exit_invalid_args);
    CHECK(run({"gen", "--what", "random", "--out", "cli_x.json"}).code == exit_invalid_args);

    r = run({"--help"});
    CHECK(r.code == 0);
    CHECK(r.out.empty());
    CHECK(r.err.find("Usage") != std::string::npos);
    for (const char* f : {"cli_ghz.json", "cli_bad.json"}) std::remove(f);
}

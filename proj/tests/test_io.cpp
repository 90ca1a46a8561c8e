#include <cstdio>

#include "doctest.h"
#include "mqc/io.hpp"

using namespace mqc;

TEST_CASE("density and Gaussian round trips are bit identical") {
    Rng rng(1);
    auto s = sample_ginibre({2, 3}, 0, rng);
    auto back = density_from_json(Json::parse(to_json(s).dump()));
    CHECK(back.dims() == s.dims());
    CHECK((back.matrix() - s.matrix()).max_abs() == 0.0);
    auto g = g_random({1, 2}, rng);
    auto gb = gaussian_from_json(Json::parse(to_json(g).dump()));
    CHECK((gb.cov() - g.cov()).max_abs() == 0.0);
    CHECK(gb.mean() == g.mean());
    CHECK(gb.modes_per_party() == g.modes_per_party());
    CHECK(std::holds_alternative<GaussianState>(state_from_json(to_json(g))));

    const std::string path = "test_io_state.json";
    write_json_file(path, to_json(s));
    CHECK((density_from_json(read_json_file(path)).matrix() - s.matrix()).max_abs() == 0.0);
    std::remove(path.c_str());
}

TEST_CASE("measurement and assemblage files") {
    MeasurementAssemblage ma{{pauli_measurements("zx")}};
    auto mb = measurements_from_json(to_json(ma));
    REQUIRE(mb.parties.size() == 1);
    CHECK((mb.parties[0].settings[1][0] - ma.parties[0].settings[1][0]).max_abs() == 0.0);
    auto sa = make_assemblage(werner(0.6), parse_split("1;2", 1, 2), ma);
    Json j = to_json(sa);
    CHECK(j["elements"].contains("1;0"));
    auto sb = assemblage_from_json(j);
    for (std::size_t i = 0; i < sa.elements.size(); ++i) CHECK((sa.elements[i] - sb.elements[i]).max_abs() == 0.0);
    j["elements"].erase("1;0");
    CHECK_THROWS_AS(assemblage_from_json(j), ParseError);
}

TEST_CASE("malformed inputs raise parse errors") {
    CHECK_THROWS_AS(density_from_json(Json::parse(R"({"kind":"gaussian"})")), ParseError);
    CHECK_THROWS_AS(density_from_json(Json::parse(R"({"kind":"density","dims":[2]})")), ParseError);
    CHECK_THROWS_AS(density_from_json(Json::parse(R"({"kind":"density","dims":[2],"matrix":[[1,0],[0]]})")), ParseError);
    CHECK_THROWS_AS(density_from_json(Json::parse(R"({"kind":"density","dims":[2],"matrix":[[1,"a"],[0,0]]})")), ParseError);
    CHECK_THROWS_AS(read_json_file("/nonexistent/file.json"), ParseError);
    CHECK_THROWS_AS(state_from_json(Json::parse(R"({"kind":"other"})")), ParseError);
    // Structurally valid but not a state.
    CHECK_THROWS_AS(density_from_json(Json::parse(R"({"kind":"density","dims":[2],"matrix":[[2,0],[0,0]]})")), Error);
}

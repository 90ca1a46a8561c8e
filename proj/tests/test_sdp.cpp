#include <chrono>

#include "doctest.h"
#include "mqc/sdp.hpp"

using namespace mqc;

namespace {

CMatrix werner2(double p) {
    return ghz(2, 2).matrix() * cplx(p) + CMatrix::identity(4) * cplx((1 - p) / 4);
}

}  // namespace

TEST_CASE("bipartite witness value on symmetric families") {
    // Two-qubit Werner family: max(0, (3p - 1)/2).
    for (double p : {1.0, 0.8, 0.5, 0.2}) {
        auto sol = solve_witness({{2, 2}, werner2(p), {{1}}});
        const double expect = std::max(0.0, (3 * p - 1) / 2);
        CHECK(sol.value == doctest::Approx(expect).epsilon(1e-5));
        CHECK(sol.upper >= sol.value - 1e-12);
        CHECK(sol.upper - expect > -1e-9);
        CHECK(sol.value - expect < 1e-9);
        CHECK(sol.bound_kind == BoundKind::exact);
    }
    // Isotropic states in 3 x 3: the twirl-symmetric optimum gives
    // max(0, (4p - 1)/3).
    CVector phi(9);
    for (std::size_t i = 0; i < 3; ++i) phi[4 * i] = 1 / std::sqrt(3.0);
    for (double p : {0.9, 0.5, 0.2}) {
        CMatrix rho = projector(phi) * cplx(p) + CMatrix::identity(9) * cplx((1 - p) / 9);
        auto sol = solve_witness({{3, 3}, rho, {{1}}});
        const double expect = std::max(0.0, (4 * p - 1) / 3);
        CHECK(sol.value <= expect + 1e-9);
        CHECK(sol.upper >= expect - 1e-9);
        CHECK(sol.value == doctest::Approx(expect).epsilon(1e-5));
    }
}

TEST_CASE("witness is feasible for the program") {
    auto sol = solve_witness({{2, 2}, werner2(0.9), {{1}}});
    const auto& w = sol.witness;
    CHECK(op_norm(w) <= 1 + 1e-12);
    CHECK(min_eigval(sol.m[0]) > -1e-10);
    CHECK(min_eigval(sol.n[0]) > -1e-10);
    CHECK((sol.m[0] + partial_transpose(sol.n[0], {2, 2}, {1}) - w).max_abs() < 1e-10);
    CHECK(-trace_product_re(werner2(0.9), w) == doctest::Approx(sol.value).epsilon(1e-12));
}

TEST_CASE("choice of transposed side does not matter") {
    Rng rng(9);
    auto s = sample_ginibre({2, 2, 2}, 2, rng);
    auto a = solve_witness({s.dims(), s.matrix(), {{0}, {1}, {2}}});
    auto b = solve_witness({s.dims(), s.matrix(), {{1, 2}, {0, 2}, {0, 1}}});
    CHECK(a.value == doctest::Approx(b.value).epsilon(1e-4));
}

TEST_CASE("separable and PPT states give zero") {
    Rng rng(13);
    auto s = sample_separable({2, 2, 2}, 6, rng);
    auto sol = solve_witness({s.dims(), s.matrix(), {{0}, {1}, {2}}});
    CHECK(sol.value < 1e-9);
    CHECK(sol.upper < 1e-6);
    CHECK(sol.bound_kind == BoundKind::exact);
}

TEST_CASE("removing a constraint cannot lower the value") {
    auto g = ghz(3, 2);
    auto all = solve_witness({g.dims(), g.matrix(), {{0}, {1}, {2}}});
    auto two = solve_witness({g.dims(), g.matrix(), {{0}, {1}}});
    CHECK(all.value > 0.1);
    CHECK(two.value >= all.value - 1e-5);
    CHECK(all.duality_gap < 1e-5);
}

TEST_CASE("witness program input checks") {
    CHECK_THROWS_AS(solve_witness({{2, 2}, CMatrix::identity(3), {{0}}}), ShapeError);
    CHECK_THROWS_AS(solve_witness({{2, 2}, CMatrix::identity(4), {}}), InvalidArgument);
}

TEST_CASE("feasibility: PSD decomposition of a target") {
    // X1 + X2 = A, X1 - X2 = B is feasible iff A +- B are PSD.
    FeasibilityProgram prog;
    prog.dim = 2;
    prog.vars = 2;
    prog.coeff = RMatrix{{1, 1}, {1, -1}};
    CMatrix a = CMatrix::identity(2);
    CMatrix b{{cplx(0.5), cplx(0.2)}, {cplx(0.2), cplx(-0.3)}};
    prog.targets = {a, b};
    auto ok = solve_feasibility(prog);
    REQUIRE(ok.feasible);
    CHECK(min_eigval(ok.x[0]) > -1e-9);
    CHECK((ok.x[0] + ok.x[1] - a).max_abs() < 1e-6);

    prog.targets[1] = CMatrix{{cplx(1.5), cplx(0)}, {cplx(0), cplx(0)}};
    auto bad = solve_feasibility(prog);
    CHECK_FALSE(bad.feasible);
    CHECK(bad.certified);
    CHECK(bad.certificate_value < 0);
    CHECK(bad.status == SolveStatus::infeasible);
}

TEST_CASE("witness solve time for three bipartitions of three qubits") {
    Rng rng(3);
    auto s = sample_ginibre({2, 2, 2}, 1, rng);
    auto t0 = std::chrono::steady_clock::now();
    auto sol = solve_witness({s.dims(), s.matrix(), {{0}, {1}, {2}}});
    double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    MESSAGE("iterations " << sol.iterations << " gap " << sol.duality_gap << " seconds " << secs);
    CHECK(sol.value > 0);
}

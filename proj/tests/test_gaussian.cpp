#include <cmath>

#include "doctest.h"
#include "mqc/gaussian.hpp"

using namespace mqc;

TEST_CASE("validation of covariance matrices") {
    CHECK_NOTHROW(g_vacuum({1, 1}));
    RMatrix bad{{0.5, 0}, {0, 0.5}};
    CHECK_THROWS_AS(GaussianState({1}, bad, {0, 0}), PreconditionError);
    RMatrix asym{{1, 0.1}, {0, 1}};
    CHECK_THROWS_AS(GaussianState({1}, asym, {0, 0}), PreconditionError);
    CHECK_THROWS_AS(GaussianState({1}, RMatrix::identity(4), {0, 0, 0, 0}), ShapeError);
    CHECK(uncertainty_margin(RMatrix::identity(2)) == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("symplectic eigenvalues") {
    auto nu = symplectic_eigenvalues(tmsv(0.4).cov());
    CHECK(nu[0] == doctest::Approx(1.0));
    CHECK(nu[1] == doctest::Approx(1.0));
    RMatrix thermal = RMatrix::identity(2) * 2.5;
    CHECK(symplectic_eigenvalues(thermal)[0] == doctest::Approx(2.5));
    Rng rng(3);
    auto g = g_random({2, 1}, rng);
    for (double v : symplectic_eigenvalues(g.cov())) CHECK(v >= 1.0 - 1e-9);
    CHECK_NOTHROW(GaussianState(g.modes_per_party(), g.cov(), g.mean()));
}

TEST_CASE("random symplectic matrices preserve the form") {
    Rng rng(12);
    for (std::size_t m = 1; m <= 3; ++m) {
        RMatrix s = random_symplectic(m, rng);
        RMatrix w = symplectic_form(m);
        CHECK((s * w * s.transpose() - w).max_abs() < 1e-10);
        CHECK(det(s) == doctest::Approx(1.0).epsilon(1e-9));
    }
}

TEST_CASE("non-product measure") {
    for (double r : {0.1, 0.5, 1.0}) {
        const double expect = 1.0 - std::pow(std::cosh(2 * r), -4.0);
        CHECK(m_nonproduct(tmsv(r), parse_partition("1|2", 2)) == doctest::Approx(expect).epsilon(1e-12));
    }
    Rng rng(4);
    auto prod = g_sample_product({1, 1, 2}, rng);
    CHECK(std::abs(m_nonproduct(prod, parse_partition("1|2|3", 3))) < 1e-10);
    // Product with a third party: the three-party value equals the pair value
    // and the pairs involving the third party vanish.
    auto joint = g_direct_sum(g_random({1, 1}, rng), g_random({1}, rng));
    const double m12 = m_nonproduct(joint, parse_partition("1|2", 3));
    CHECK(m_nonproduct(joint, parse_partition("1|2|3", 3)) == doctest::Approx(m12).epsilon(1e-10));
    CHECK(std::abs(m_nonproduct(joint, parse_partition("1|3", 3))) < 1e-10);
    CHECK(std::abs(m_nonproduct(joint, parse_partition("2|3", 3))) < 1e-10);
    CHECK(std::abs(m_nonproduct(joint, parse_partition("1,2|3", 3))) < 1e-10);
}

TEST_CASE("imaginarity and coherence") {
    Rng rng(5);
    auto real = g_sample_real({1, 2}, rng);
    CHECK(std::abs(g_imaginarity(real)) < 1e-10);
    CHECK_NOTHROW(GaussianState(real.modes_per_party(), real.cov(), real.mean()));
    auto g = g_random({1, 1}, rng);
    CHECK(g_imaginarity(g) > 0.0);
    for (double r : {0.2, 0.7}) {
        const double expect = 1.0 - 2.0 / (std::exp(4 * r) + std::exp(-4 * r));
        CHECK(g_coherence(squeezed_vacuum(r)) == doctest::Approx(expect).epsilon(1e-12));
    }
    CHECK(std::abs(g_coherence(g_sample_incoherent(3, rng))) < 1e-12);
    CHECK_THROWS_AS(g_coherence(g_random({2}, rng)), InvalidArgument);
}

TEST_CASE("Gaussian channels") {
    Rng rng(6);
    for (auto tag : {GaussianChannelTag::local, GaussianChannelTag::real_local}) {
        auto ch = sample_gaussian_channel({1, 2}, tag, rng);
        auto out = g_apply(g_random({1, 2}, rng), ch);
        CHECK(uncertainty_margin(out.cov()) > -1e-9);
    }
    auto real_out = g_apply(g_sample_real({1, 1}, rng), sample_gaussian_channel({1, 1}, GaussianChannelTag::real_local, rng));
    CHECK(std::abs(g_imaginarity(real_out)) < 1e-10);
    auto inc_out = g_apply(g_sample_incoherent(2, rng), sample_gaussian_channel({1, 1}, GaussianChannelTag::attenuation_rotation, rng));
    CHECK(std::abs(g_coherence(inc_out)) < 1e-12);
    auto prod_out = g_apply(g_sample_product({1, 1}, rng), sample_gaussian_channel({1, 1}, GaussianChannelTag::local, rng));
    CHECK(std::abs(m_nonproduct(prod_out, parse_partition("1|2", 2))) < 1e-10);
    GaussianChannel amp;
    amp.modes_per_party = {1};
    amp.x = RMatrix::identity(2) * 2.0;
    amp.y = RMatrix(2, 2);
    amp.shift = {0, 0};
    CHECK_THROWS_AS(amp.validate(), PreconditionError);
}

TEST_CASE("grouping and reduction") {
    Rng rng(7);
    auto g = g_random({1, 1, 1}, rng);
    auto r = g_partial_trace(g, {0, 2});
    CHECK(r.modes_per_party().size() == 2);
    CHECK(r.cov()(2, 2) == g.cov()(4, 4));
    auto grouped = g_group_by(g, parse_partition("1,3|2", 3));
    CHECK(grouped.modes_per_party() == std::vector<std::size_t>{2, 1});
    CHECK(grouped.cov()(2, 2) == g.cov()(4, 4));
}

#include "doctest.h"
#include "mqc/harness.hpp"

using namespace mqc;

TEST_CASE("binding registry") {
    for (const char* id : {"c_l1", "imag_robustness", "e_f", "concurrence", "tsallis", "kpe_min_sum", "witness_ke", "witness_kpe", "non_mppt",
                           "m_nonproduct", "g_imaginarity", "g_coherence", "unsteerable_distance"}) {
        const auto& b = find_binding(id);
        CHECK(b.evaluator);
        CHECK(b.sample_free);
        CHECK(b.apply_free_channel);
        CHECK(b.resource);
    }
    CHECK_THROWS_AS(find_binding("nope"), UnknownMeasureError);
}

TEST_CASE("MQCM1 on l1 coherence") {
    AxiomConfig cfg;
    cfg.trials = 20;
    auto r = axiom_check(find_binding("c_l1"), AxiomSuite::mqcm1, cfg);
    CHECK(r.violations.empty());
    CHECK(r.details["resource_value"].get<double>() > 10 * r.tol);
    CHECK(exit_code(r) == 0);
}

TEST_CASE("MQCM2 on imaginarity under real channels") {
    AxiomConfig cfg;
    cfg.trials = 50;
    cfg.tol = 1e-7;
    cfg.seed = 3;
    auto r = axiom_check(find_binding("imag_robustness"), AxiomSuite::mqcm2, cfg);
    CHECK(r.violations.empty());
    CHECK(r.trials == 50);
}

TEST_CASE("MQCM5 on Gaussian non-product correlation") {
    AxiomConfig cfg;
    cfg.trials = 100;
    cfg.tol = 1e-10;
    auto r = axiom_check(find_binding("m_nonproduct"), AxiomSuite::mqcm5, cfg);
    CHECK(r.violations.empty());
    auto steer = axiom_check(find_binding("unsteerable_distance"), AxiomSuite::mqcm5, cfg);
    CHECK(steer.trials == 0);
    CHECK(exit_code(steer) == 3);
}

TEST_CASE("trials reproduce from their seed and reports do not depend on threads") {
    const auto& b = find_binding("c_l1");
    AxiomConfig cfg;
    auto a = run_trial(b, AxiomSuite::mqcm2, trial_seed(9, 4), cfg);
    auto c = run_trial(b, AxiomSuite::mqcm2, trial_seed(9, 4), cfg);
    CHECK(a.lhs == c.lhs);
    CHECK(a.rhs == c.rhs);
    cfg.trials = 12;
    auto one = to_json(axiom_check(b, AxiomSuite::mqcm2, cfg));
    cfg.threads = 4;
    CHECK(to_json(axiom_check(b, AxiomSuite::mqcm2, cfg)) == one);
}

TEST_CASE("a forced violation is reported and reproduces") {
    const auto& b = find_binding("c_l1");
    AxiomConfig cfg;
    cfg.trials = 10;
    cfg.tol = 1e-12;
    cfg.seed = 5;
    auto r = axiom_check(b, AxiomSuite::mqcm5, cfg);
    CHECK(r.violations.empty());
    // The negated measure increases under incoherent channels.
    MeasureBinding inv = b;
    inv.id = "neg_c_l1";
    inv.evaluator = [](const AnyState& s, const SubRepartition& p, const MeasureArgs& a) {
        auto m = find_binding("c_l1").evaluate(s, p, a);
        m.value = -m.value;
        return m;
    };
    cfg.tol = 1e-8;
    auto bad = axiom_check(inv, AxiomSuite::mqcm2, cfg);
    REQUIRE_FALSE(bad.violations.empty());
    CHECK(exit_code(bad) == 2);
    const auto& v = bad.violations.front();
    auto again = run_trial(inv, AxiomSuite::mqcm2, v.input["trial_seed"].get<std::uint64_t>(), cfg);
    CHECK(std::abs(again.lhs - v.lhs) <= 1e-12);
    CHECK(std::abs(again.rhs - v.rhs) <= 1e-12);
    double worst = 0;
    for (const auto& x : bad.violations) worst = std::max(worst, x.slack);
    CHECK(bad.worst_slack == worst);
}

TEST_CASE("hierarchy scans") {
    Rng rng(1);
    auto s = sample_ginibre({2, 2, 2}, 0, rng);
    auto im = hierarchy_scan(find_binding("imag_robustness"), s);
    CHECK(im.violations.empty());
    CHECK(im.details["type_b_pairs"].get<std::size_t>() > 0);
    CHECK(im.details["type_b_max_gap"].get<double>() <= 1e-10);
    auto cl = hierarchy_scan(find_binding("c_l1"), s);
    CHECK(cl.violations.empty());
    auto g = g_random({1, 1, 1}, rng);
    CHECK(hierarchy_scan(find_binding("m_nonproduct"), g).violations.empty());
    CHECK(hierarchy_scan(find_binding("g_coherence"), g).violations.empty());
    auto nm = hierarchy_scan(find_binding("non_mppt"), ghz(3, 2), {1e-5});
    CHECK(nm.violations.empty());
    CHECK(nm.trials > 0);
    CHECK_THROWS_AS(hierarchy_scan(find_binding("m_nonproduct"), s), InvalidArgument);
}

TEST_CASE("tagged and steering hierarchy scans") {
    auto kpe = hierarchy_scan(find_binding("kpe_min_sum"), ghz(3, 2));
    CHECK(kpe.violations.empty());
    CHECK(kpe.trials > 0);
    Rng rng(2);
    ScanConfig cfg;
    cfg.args.t = 1;
    auto st = hierarchy_scan(find_binding("unsteerable_distance"), sample_ginibre({2, 2, 2}, 2, rng), cfg);
    CHECK(st.trials > 0);
    CHECK(st.violations.empty());
}

TEST_CASE("complete monogamy of Gaussian non-product correlation") {
    Rng rng(3);
    auto g = g_direct_sum(g_random({1, 1}, rng), g_random({1}, rng));
    auto r = monogamy_check(find_binding("m_nonproduct"), g, MonogamyKind::complete);
    CHECK(r.violations.empty());
    CHECK(r.details["premises_triggered"].get<std::size_t>() > 0);
    // Fully product: every premise triggers and every implication holds.
    auto prod = g_sample_product({1, 1, 1}, rng);
    auto pr = monogamy_check(find_binding("m_nonproduct"), prod, MonogamyKind::tight);
    CHECK(pr.violations.empty());
    CHECK(pr.details["premises_triggered"].get<std::size_t>() == pr.details["pairs"].get<std::size_t>());
    CHECK_THROWS_AS(monogamy_check(find_binding("witness_ke"), ghz(3, 2), MonogamyKind::complete), UnsupportedError);
}

TEST_CASE("monogamy report on coherence of GHZ with a plus state") {
    CVector plus{cplx(1 / std::sqrt(2.0)), cplx(1 / std::sqrt(2.0))};
    auto psi = product_vector({ghz_vector(3, 2), plus});
    auto s = pure_state({2, 2, 2, 2}, psi);
    auto r = monogamy_check(find_binding("c_l1"), s, MonogamyKind::complete);
    CHECK(r.details.contains("premises_triggered"));
    CHECK(r.details["pairs"].get<std::size_t>() > 0);
}

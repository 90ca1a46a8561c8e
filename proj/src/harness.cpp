#include "mqc/harness.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <limits>
#include <map>
#include <numbers>
#include <thread>
#include <tuple>
#include <variant>

#include "mqc/config.hpp"

namespace mqc {

const char* to_string(RelationId r) {
    switch (r) {
        case RelationId::standard: return "standard";
        case RelationId::standard_a: return "standard-a";
        case RelationId::k_e: return "k-E";
        case RelationId::k_pe: return "k-PE";
        case RelationId::steering: return "steering";
    }
    return "standard";
}

namespace {

const DensityState& density(const AnyState& s) {
    if (const auto* d = std::get_if<DensityState>(&s)) return *d;
    throw InvalidArgument("measure expects a density-matrix state");
}

const GaussianState& gaussian(const AnyState& s) {
    if (const auto* g = std::get_if<GaussianState>(&s)) return *g;
    throw InvalidArgument("measure expects a Gaussian state");
}

std::size_t parties_of(const AnyState& s) {
    return std::visit([](const auto& x) { return x.parties(); }, s);
}

SubRepartition singles(std::size_t n) { return SubRepartition::singletons(static_cast<int>(n), (Mask{1} << n) - 1); }

MeasureResult roof(const AnyState& s, const SubRepartition& p, PureKind kind, const MeasureArgs& a) {
    const auto& d = density(s);
    EntanglementKind ek{kind, a.q};
    if (is_pure(group_by(d, p))) return pure_entanglement(d, p, ek);
    RoofConfig cfg;
    cfg.seed = a.seed;
    return convex_roof(d, p, ek, cfg);
}

MeasureResult from_value(double v) { return MeasureResult{v, BoundKind::exact, Json::object()}; }

CVector phase_qubit() { return {cplx(1 / std::sqrt(2.0)), cplx(0, 1 / std::sqrt(2.0))}; }

AnyState apply_kraus_family(const AnyState& s, ChannelTag tag, std::size_t split, Rng& rng) {
    const auto& d = density(s);
    return apply_channel(d, sample_channel(d.dims(), tag, rng, split));
}

AnyState apply_local_unitaries(const AnyState& s, Rng& rng) {
    const auto& d = density(s);
    std::vector<CMatrix> us;
    for (auto dim : d.dims()) us.push_back(haar_unitary(dim, rng));
    return apply_channel(d, local_unitary_channel(d.dims(), us, ChannelTag::local_product));
}

AnyState apply_gaussian_family(const AnyState& s, GaussianChannelTag tag, Rng& rng) {
    const auto& g = gaussian(s);
    return g_apply(g, sample_gaussian_channel(g.modes_per_party(), tag, rng));
}

std::vector<MeasureBinding> make_bindings() {
    std::vector<MeasureBinding> out;
    auto separable = [](const std::vector<std::size_t>& d, const MeasureArgs&, Rng& r) -> AnyState { return sample_separable(d, 4, r); };
    auto local_product = [](const AnyState& s, const MeasureArgs&, Rng& r) { return apply_kraus_family(s, ChannelTag::local_product, 0, r); };
    auto ghz3 = [](const MeasureArgs&) -> AnyState { return ghz(3, 2); };

    {
        MeasureBinding b;
        b.id = "c_l1";
        b.evaluator = [](const AnyState& s, const SubRepartition& p, const MeasureArgs&) { return c_l1(group_by(density(s), p)); };
        b.free_sampler = "incoherent";
        b.sample_free = [](const std::vector<std::size_t>& d, const MeasureArgs&, Rng& r) -> AnyState { return sample_incoherent(d, r); };
        b.channel_family = "incoherent-local";
        b.apply_free_channel = [](const AnyState& s, const MeasureArgs&, Rng& r) { return apply_kraus_family(s, ChannelTag::incoherent_local, 0, r); };
        b.resource = ghz3;
        out.push_back(std::move(b));
    }
    {
        MeasureBinding b;
        b.id = "imag_robustness";
        b.evaluator = [](const AnyState& s, const SubRepartition& p, const MeasureArgs&) { return imag_robustness(group_by(density(s), p)); };
        b.free_sampler = "real";
        b.sample_free = [](const std::vector<std::size_t>& d, const MeasureArgs&, Rng& r) -> AnyState { return sample_real(d, r); };
        b.channel_family = "real-local";
        b.apply_free_channel = [](const AnyState& s, const MeasureArgs&, Rng& r) { return apply_kraus_family(s, ChannelTag::real_local, 0, r); };
        b.resource = [](const MeasureArgs&) -> AnyState {
            CVector v = phase_qubit();
            return pure_state({2, 2, 2}, product_vector({v, v, v}));
        };
        out.push_back(std::move(b));
    }
    const std::pair<const char*, PureKind> roofs[] = {{"e_f", PureKind::ef}, {"concurrence", PureKind::concurrence}, {"tsallis", PureKind::tsallis}};
    for (const auto& [id, kind] : roofs) {
        MeasureBinding b;
        b.id = id;
        b.evaluator = [kind = kind](const AnyState& s, const SubRepartition& p, const MeasureArgs& a) { return roof(s, p, kind, a); };
        b.free_sampler = "separable";
        b.sample_free = separable;
        b.channel_family = "local-product";
        b.apply_free_channel = local_product;
        b.resource = ghz3;
        b.min_blocks = 2;
        b.exact = false;
        out.push_back(std::move(b));
    }
    {
        MeasureBinding b;
        b.id = "kpe_min_sum";
        b.evaluator = [](const AnyState& s, const SubRepartition& p, const MeasureArgs& a) { return kpe_min_sum(density(s), p, a.k); };
        b.free_sampler = "k-producible-pure";
        b.sample_free = [](const std::vector<std::size_t>& d, const MeasureArgs& a, Rng& r) -> AnyState {
            return sample_k_producible_pure(d, a.k - 1, r);
        };
        b.channel_family = "local-unitary";
        b.apply_free_channel = [](const AnyState& s, const MeasureArgs&, Rng& r) { return apply_local_unitaries(s, r); };
        b.resource = ghz3;
        b.relation = RelationId::k_pe;
        b.min_blocks = 2;
        out.push_back(std::move(b));
    }
    for (auto [id, mode, rel] : {std::tuple{"witness_ke", OverlapMode::k_separable, RelationId::k_e},
                                 std::tuple{"witness_kpe", OverlapMode::k_partite, RelationId::k_pe}}) {
        MeasureBinding b;
        b.id = id;
        b.evaluator = [mode = mode](const AnyState& s, const SubRepartition& p, const MeasureArgs& a) {
            WitnessConfig cfg;
            cfg.seed = a.seed;
            return witness_entanglement(group_by(density(s), p), a.k, mode, cfg);
        };
        if (mode == OverlapMode::k_separable) {
            b.free_sampler = "k-separable-pure";
            b.sample_free = [](const std::vector<std::size_t>& d, const MeasureArgs& a, Rng& r) -> AnyState { return sample_k_separable_pure(d, a.k, r); };
        } else {
            b.free_sampler = "k-producible-pure";
            b.sample_free = [](const std::vector<std::size_t>& d, const MeasureArgs& a, Rng& r) -> AnyState {
                return sample_k_producible_pure(d, a.k - 1, r);
            };
        }
        b.channel_family = "local-product";
        b.apply_free_channel = local_product;
        b.resource = ghz3;
        b.relation = rel;
        b.min_blocks = 2;
        b.exact = false;
        out.push_back(std::move(b));
    }
    {
        MeasureBinding b;
        b.id = "non_mppt";
        b.evaluator = [](const AnyState& s, const SubRepartition& p, const MeasureArgs&) { return non_mppt(density(s), p); };
        b.free_sampler = "separable";
        b.sample_free = separable;
        b.channel_family = "local-product";
        b.apply_free_channel = local_product;
        b.resource = ghz3;
        b.min_blocks = 2;
        b.hierarchy_tol = tol().hierarchy_sdp;
        out.push_back(std::move(b));
    }
    {
        MeasureBinding b;
        b.id = "m_nonproduct";
        b.kind = StateKind::gaussian;
        b.evaluator = [](const AnyState& s, const SubRepartition& p, const MeasureArgs&) { return from_value(m_nonproduct(gaussian(s), p)); };
        b.free_sampler = "gaussian-product";
        b.sample_free = [](const std::vector<std::size_t>& d, const MeasureArgs&, Rng& r) -> AnyState { return g_sample_product(d, r); };
        b.channel_family = "gaussian-local";
        b.apply_free_channel = [](const AnyState& s, const MeasureArgs&, Rng& r) { return apply_gaussian_family(s, GaussianChannelTag::local, r); };
        b.resource = [](const MeasureArgs&) -> AnyState { return g_direct_sum(tmsv(0.5), g_vacuum({1})); };
        out.push_back(std::move(b));
    }
    {
        MeasureBinding b;
        b.id = "g_imaginarity";
        b.kind = StateKind::gaussian;
        b.evaluator = [](const AnyState& s, const SubRepartition& p, const MeasureArgs&) { return from_value(g_imaginarity(g_group_by(gaussian(s), p))); };
        b.free_sampler = "gaussian-real";
        b.sample_free = [](const std::vector<std::size_t>& d, const MeasureArgs&, Rng& r) -> AnyState { return g_sample_real(d, r); };
        b.channel_family = "gaussian-real-local";
        b.apply_free_channel = [](const AnyState& s, const MeasureArgs&, Rng& r) { return apply_gaussian_family(s, GaussianChannelTag::real_local, r); };
        b.resource = [](const MeasureArgs&) -> AnyState {
            Rng r(11);
            return g_random({1, 1, 1}, r);
        };
        out.push_back(std::move(b));
    }
    {
        MeasureBinding b;
        b.id = "g_coherence";
        b.kind = StateKind::gaussian;
        b.evaluator = [](const AnyState& s, const SubRepartition& p, const MeasureArgs&) { return from_value(g_coherence(g_group_by(gaussian(s), p))); };
        b.free_sampler = "gaussian-incoherent";
        b.sample_free = [](const std::vector<std::size_t>& d, const MeasureArgs&, Rng& r) -> AnyState { return g_sample_incoherent(d.size(), r); };
        b.channel_family = "attenuation-rotation";
        b.apply_free_channel = [](const AnyState& s, const MeasureArgs&, Rng& r) {
            return apply_gaussian_family(s, GaussianChannelTag::attenuation_rotation, r);
        };
        b.resource = [](const MeasureArgs&) -> AnyState { return g_direct_sum(squeezed_vacuum(0.5), g_vacuum({1, 1})); };
        b.relation = RelationId::standard_a;
        b.single_party_blocks = true;
        out.push_back(std::move(b));
    }
    {
        MeasureBinding b;
        b.id = "unsteerable_distance";
        b.evaluator = [](const AnyState& s, const SubRepartition& p, const MeasureArgs& a) {
            return unsteerable_distance_ub(density(s), split_from_partition(p, a.t));
        };
        b.free_sampler = "separable";
        b.sample_free = separable;
        b.channel_family = "steering-free";
        b.apply_free_channel = [](const AnyState& s, const MeasureArgs& a, Rng& r) {
            return apply_kraus_family(s, ChannelTag::steering_free, static_cast<std::size_t>(a.t), r);
        };
        b.resource = [](const MeasureArgs&) -> AnyState { return ghz(2, 2); };
        b.relation = RelationId::steering;
        b.symmetric = false;
        b.min_blocks = 2;
        b.exact = false;
        out.push_back(std::move(b));
    }
    return out;
}

}  // namespace

const std::vector<MeasureBinding>& bindings() {
    static const std::vector<MeasureBinding> all = make_bindings();
    return all;
}

const MeasureBinding& find_binding(const std::string& id) {
    for (const auto& b : bindings())
        if (b.id == id) return b;
    throw UnknownMeasureError("unknown measure '" + id + "'");
}

SteeringSplit split_from_partition(const SubRepartition& p, int t) {
    const int n = p.n();
    if (t < 1 || t >= n) throw InvalidArgument("split point must satisfy 1 <= t < n");
    const Mask low = (Mask{1} << t) - 1;
    std::vector<Mask> u, tr;
    for (Mask b : p.masks()) {
        if ((b & low) == b) u.push_back(b);
        else if ((b & low) == 0) tr.push_back(b);
        else throw InvalidArgument("a block mixes untrusted and trusted parties");
    }
    if (u.empty() || tr.empty()) throw InvalidArgument("a steering split needs untrusted and trusted blocks");
    return make_split(t, SubRepartition(n, u), SubRepartition(n, tr));
}

SubRepartition partition_from_split(const SteeringSplit& s) {
    std::vector<Mask> blocks = s.untrusted.masks();
    for (Mask m : s.trusted.masks()) blocks.push_back(m);
    return SubRepartition(s.untrusted.n(), blocks);
}

void CheckReport::add_violation(Violation v) {
    worst_slack = violations.empty() ? v.slack : std::max(worst_slack, v.slack);
    violations.push_back(std::move(v));
}

Json to_json(const CheckReport& r) {
    Json vs = Json::array();
    for (const auto& v : r.violations) vs.push_back({{"input", v.input}, {"lhs", v.lhs}, {"rhs", v.rhs}, {"slack", v.slack}});
    return {{"suite", r.suite}, {"measure", r.measure}, {"trials", r.trials}, {"tol", r.tol}, {"violations", vs},
            {"worst_slack", r.worst_slack}, {"caveats", r.caveats}, {"details", r.details}};
}

int exit_code(const CheckReport& r) {
    if (!r.violations.empty()) return 2;
    if (!r.caveats.empty()) return 3;
    return 0;
}

AxiomSuite parse_suite(const std::string& text) {
    std::string s = text;
    for (auto& c : s) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
    if (s == "MQCM1" || s == "1") return AxiomSuite::mqcm1;
    if (s == "MQCM2" || s == "2") return AxiomSuite::mqcm2;
    if (s == "MQCM5" || s == "5") return AxiomSuite::mqcm5;
    throw InvalidArgument("suite must be one of MQCM1, MQCM2, MQCM5");
}

const char* to_string(AxiomSuite s) {
    switch (s) {
        case AxiomSuite::mqcm1: return "MQCM1";
        case AxiomSuite::mqcm2: return "MQCM2";
        case AxiomSuite::mqcm5: return "MQCM5";
    }
    return "MQCM1";
}

std::uint64_t trial_seed(std::uint64_t seed, std::size_t trial) {
    // splitmix64 of the pair
    std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (trial + 1);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

namespace {

std::vector<std::size_t> default_dims(const MeasureBinding& b) {
    if (b.kind == StateKind::gaussian) return {1, 1, 1};
    if (b.relation == RelationId::steering) return {2, 2};
    return {2, 2, 2};
}

AnyState random_state(const MeasureBinding& b, const std::vector<std::size_t>& dims, Rng& rng) {
    if (b.kind == StateKind::gaussian) return g_random(dims, rng);
    if (b.id == "kpe_min_sum") return sample_pure(dims, rng);
    return sample_ginibre(dims, 2, rng);
}

// The partition a suite evaluates on: all parties as singletons, or the
// steering split with every untrusted and trusted party separate.
SubRepartition suite_partition(const MeasureBinding&, std::size_t n) { return singles(n); }

GaussianState g_permute(const GaussianState& g, const std::vector<int>& perm) {
    const auto& mp = g.modes_per_party();
    std::vector<std::size_t> offset(mp.size() + 1, 0);
    for (std::size_t i = 0; i < mp.size(); ++i) offset[i + 1] = offset[i] + mp[i];
    std::vector<std::size_t> idx, modes;
    for (int p : perm) {
        const auto sp = static_cast<std::size_t>(p);
        modes.push_back(mp[sp]);
        for (std::size_t m = offset[sp]; m < offset[sp + 1]; ++m) {
            idx.push_back(2 * m);
            idx.push_back(2 * m + 1);
        }
    }
    RMatrix cov = submatrix(g.cov(), idx);
    std::vector<double> mean;
    for (auto i : idx) mean.push_back(g.mean()[i]);
    return GaussianState::unchecked(modes, cov, mean);
}

AnyState permute_state(const AnyState& s, const std::vector<int>& perm) {
    if (const auto* d = std::get_if<DensityState>(&s)) return permute_subsystems(*d, perm);
    return g_permute(std::get<GaussianState>(s), perm);
}

SubRepartition permute_partition(const SubRepartition& p, const std::vector<int>& perm) {
    // perm[i] is the old index now at position i.
    std::vector<int> pos(perm.size());
    for (std::size_t i = 0; i < perm.size(); ++i) pos[static_cast<std::size_t>(perm[i])] = static_cast<int>(i);
    std::vector<Mask> blocks;
    for (Mask b : p.masks()) {
        Mask nb = 0;
        for (int m : mask_members(b)) nb |= Mask{1} << pos[static_cast<std::size_t>(m)];
        blocks.push_back(nb);
    }
    return SubRepartition(p.n(), blocks);
}

double suite_tol(const MeasureBinding& b, AxiomSuite suite, const AxiomConfig& cfg) {
    if (cfg.tol >= 0) return cfg.tol;
    switch (suite) {
        case AxiomSuite::mqcm1: return b.exact ? std::max(tol().faithful_exact, b.hierarchy_tol) : tol().faithful_heuristic;
        case AxiomSuite::mqcm2: return std::max(tol().monotone, b.hierarchy_tol);
        case AxiomSuite::mqcm5: return std::max(tol().symmetry, b.hierarchy_tol);
    }
    return tol().monotone;
}

bool inexact(const MeasureBinding& b, const MeasureResult& r) { return !b.exact || r.bound_kind != BoundKind::exact; }

template <class F>
void parallel_for(std::size_t count, int threads, F&& f) {
    const std::size_t nt = std::max<std::size_t>(1, std::min<std::size_t>(static_cast<std::size_t>(std::max(threads, 1)), count));
    if (nt == 1) {
        for (std::size_t i = 0; i < count; ++i) f(i);
        return;
    }
    std::vector<std::thread> pool;
    for (std::size_t w = 0; w < nt; ++w)
        pool.emplace_back([&, w] {
            for (std::size_t i = w; i < count; i += nt) f(i);
        });
    for (auto& t : pool) t.join();
}

}  // namespace

TrialOutcome run_trial(const MeasureBinding& b, AxiomSuite suite, std::uint64_t seed, const AxiomConfig& cfg) {
    Rng rng(seed);
    const auto dims = cfg.dims.empty() ? default_dims(b) : cfg.dims;
    MeasureArgs args = cfg.args;
    args.seed = seed;
    const SubRepartition full = suite_partition(b, dims.size());
    TrialOutcome out;
    out.input = {{"suite", to_string(suite)}, {"measure", b.id}, {"trial_seed", seed}, {"dims", dims}};
    try {
        switch (suite) {
            case AxiomSuite::mqcm1: {
                auto s = b.sample_free(dims, args, rng);
                auto r = b.evaluate(s, full, args);
                out.lhs = r.value;
                out.rhs = 0;
                out.exact = !inexact(b, r);
                out.input["sampler"] = b.free_sampler;
                break;
            }
            case AxiomSuite::mqcm2: {
                auto s = random_state(b, dims, rng);
                auto after = b.apply_free_channel(s, args, rng);
                auto r0 = b.evaluate(s, full, args);
                auto r1 = b.evaluate(after, full, args);
                out.lhs = r1.value;
                out.rhs = r0.value;
                out.exact = !inexact(b, r0) && !inexact(b, r1);
                out.input["channel_family"] = b.channel_family;
                break;
            }
            case AxiomSuite::mqcm5: {
                auto s = random_state(b, dims, rng);
                const int n = static_cast<int>(dims.size());
                std::vector<int> perm(dims.size());
                for (int i = 0; i < n; ++i) perm[static_cast<std::size_t>(i)] = i;
                for (int i = n - 1; i > 0; --i) std::swap(perm[static_cast<std::size_t>(i)], perm[rng.index(static_cast<std::size_t>(i) + 1)]);
                std::vector<SubRepartition> candidates;
                for (const auto& p : enumerate_subrepartitions(n))
                    if (p.size() >= b.min_blocks && (!b.single_party_blocks || p.depth() == 1))
                        candidates.push_back(p);
                const auto& p = candidates[rng.index(candidates.size())];
                auto r0 = b.evaluate(s, p, args);
                auto r1 = b.evaluate(permute_state(s, perm), permute_partition(p, perm), args);
                out.lhs = std::abs(r0.value - r1.value);
                out.rhs = 0;
                out.exact = !inexact(b, r0) && !inexact(b, r1);
                out.input["permutation"] = perm;
                out.input["partition"] = p.to_string();
                break;
            }
        }
    } catch (const PreconditionError& e) {
        out.skipped = e.what();
    }
    return out;
}

CheckReport axiom_check(const MeasureBinding& b, AxiomSuite suite, const AxiomConfig& cfg) {
    CheckReport rep;
    rep.suite = to_string(suite);
    rep.measure = b.id;
    rep.trials = cfg.trials;
    rep.tol = suite_tol(b, suite, cfg);
    rep.details["relation"] = to_string(b.relation);
    rep.details["unification"] = "structural: one evaluator over every (state, partition) pair";
    if (suite == AxiomSuite::mqcm5 && !b.symmetric) {
        rep.caveats.push_back("MQCM5 skipped: the measure is asymmetric under reordering of parties");
        rep.trials = 0;
        return rep;
    }
    std::vector<TrialOutcome> outcomes(cfg.trials);
    parallel_for(cfg.trials, cfg.threads, [&](std::size_t i) { outcomes[i] = run_trial(b, suite, trial_seed(cfg.seed, i), cfg); });
    double worst_margin = -std::numeric_limits<double>::infinity();
    std::size_t skipped = 0, demoted = 0;
    for (const auto& o : outcomes) {
        if (!o.skipped.empty()) {
            ++skipped;
            continue;
        }
        const double slack = o.lhs - o.rhs;
        worst_margin = std::max(worst_margin, slack);
        if (slack <= rep.tol) continue;
        if (o.exact) rep.add_violation({o.input, o.lhs, o.rhs, slack});
        else ++demoted;
    }
    if (suite == AxiomSuite::mqcm1) {
        MeasureArgs args = cfg.args;
        args.seed = cfg.seed;
        auto s = b.resource(args);
        auto r = b.evaluate(s, singles(parties_of(s)), args);
        rep.details["resource_value"] = r.value;
        if (r.value <= 10 * rep.tol)
            rep.add_violation({{{"suite", "MQCM1"}, {"measure", b.id}, {"resource", true}}, 10 * rep.tol, r.value, 10 * rep.tol - r.value});
    }
    if (skipped) rep.caveats.push_back(std::to_string(skipped) + " trials skipped on degenerate inputs");
    if (demoted) rep.caveats.push_back(std::to_string(demoted) + " trials exceeded tol on bound-valued evaluations (demoted)");
    rep.details["worst_margin"] = std::isfinite(worst_margin) ? worst_margin : 0.0;
    rep.details["skipped"] = skipped;
    return rep;
}

namespace {

struct Node {
    SubRepartition p;
    std::size_t k = 0;  // tag for k-E / k-PE
    std::string key() const { return std::to_string(k) + ":" + p.to_string(); }
};

struct NodeValue {
    bool ok = false;
    MeasureResult r;
    std::string error;
};

std::vector<Node> nodes_for(const MeasureBinding& b, int n, const MeasureArgs& args) {
    std::vector<Node> out;
    if (b.relation == RelationId::steering) {
        const Mask low = (Mask{1} << args.t) - 1;
        for (const auto& u : enumerate_subrepartitions(n)) {
            if (u.support() & ~low) continue;
            for (const auto& tr : enumerate_subrepartitions(n))
                if ((tr.support() & low) == 0) out.push_back({partition_from_split(make_split(args.t, u, tr)), 0});
        }
        return out;
    }
    for (const auto& p : enumerate_subrepartitions(n)) {
        if (p.size() < b.min_blocks || (b.single_party_blocks && p.depth() > 1)) continue;
        if (b.relation == RelationId::k_e || b.relation == RelationId::k_pe) {
            for (std::size_t k = 2; k <= p.size(); ++k) out.push_back({p, k});
        } else {
            out.push_back({p, 0});
        }
    }
    return out;
}

bool related(const MeasureBinding& b, const Node& q, const Node& p, int t) {
    switch (b.relation) {
        case RelationId::standard: return coarser(q.p, p.p);
        case RelationId::standard_a: return coarser_basic(q.p, p.p, Coarsening::a);
        case RelationId::k_e: return ke_hierarchy({static_cast<int>(q.k), q.p}, {static_cast<int>(p.k), p.p});
        case RelationId::k_pe: return kpe_hierarchy({static_cast<int>(q.k), q.p}, {static_cast<int>(p.k), p.p});
        case RelationId::steering: return steering_hierarchy(split_from_partition(q.p, t), split_from_partition(p.p, t));
    }
    return false;
}

}  // namespace

CheckReport hierarchy_scan(const MeasureBinding& b, const AnyState& s, const ScanConfig& cfg) {
    const int n = static_cast<int>(parties_of(s));
    if (n > 6) throw InvalidArgument("hierarchy scans support at most 6 parties");
    if ((b.kind == StateKind::gaussian) != std::holds_alternative<GaussianState>(s)) throw InvalidArgument("state kind does not match the measure");
    CheckReport rep;
    rep.suite = "MQCM4";
    rep.measure = b.id;
    rep.tol = cfg.tol >= 0 ? cfg.tol : b.hierarchy_tol;
    rep.details["relation"] = to_string(b.relation);

    const auto nodes = nodes_for(b, n, cfg.args);
    std::vector<std::pair<std::size_t, std::size_t>> pairs;
    if (n <= 4) {
        for (std::size_t i = 0; i < nodes.size(); ++i)
            for (std::size_t j = 0; j < nodes.size(); ++j)
                if (i != j && related(b, nodes[i], nodes[j], cfg.args.t)) pairs.emplace_back(i, j);
        rep.details["enumeration"] = "exhaustive";
    } else {
        Rng rng(cfg.args.seed);
        std::size_t attempts = 0;
        while (pairs.size() < cfg.sampled_pairs && attempts < 200 * cfg.sampled_pairs) {
            ++attempts;
            const std::size_t i = rng.index(nodes.size()), j = rng.index(nodes.size());
            if (i != j && related(b, nodes[i], nodes[j], cfg.args.t)) pairs.emplace_back(i, j);
        }
        std::sort(pairs.begin(), pairs.end());
        pairs.erase(std::unique(pairs.begin(), pairs.end()), pairs.end());
        rep.details["enumeration"] = "sampled";
    }
    rep.trials = pairs.size();

    std::vector<char> needed(nodes.size(), 0);
    for (auto [i, j] : pairs) needed[i] = needed[j] = 1;
    std::vector<std::size_t> todo;
    for (std::size_t i = 0; i < nodes.size(); ++i)
        if (needed[i]) todo.push_back(i);
    std::vector<NodeValue> values(nodes.size());
    parallel_for(todo.size(), cfg.threads, [&](std::size_t t) {
        const std::size_t i = todo[t];
        MeasureArgs args = cfg.args;
        if (nodes[i].k) args.k = nodes[i].k;
        try {
            values[i].r = b.evaluate(s, nodes[i].p, args);
            values[i].ok = true;
        } catch (const PreconditionError& e) {
            values[i].error = e.what();
        }
    });

    std::size_t skipped = 0, demoted = 0, type_b = 0;
    double type_b_gap = 0, worst_margin = -std::numeric_limits<double>::infinity();
    for (auto [i, j] : pairs) {
        const auto &vq = values[i], &vp = values[j];
        if (!vq.ok || !vp.ok) {
            ++skipped;
            continue;
        }
        const double slack = vq.r.value - vp.r.value;
        worst_margin = std::max(worst_margin, slack);
        // Merging blocks over an unchanged support; the equality claim is about
        // these pairs.
        if (b.relation == RelationId::standard && nodes[i].p.support() == nodes[j].p.support() &&
            coarser_basic(nodes[i].p, nodes[j].p, Coarsening::b)) {
            ++type_b;
            type_b_gap = std::max(type_b_gap, std::abs(slack));
        }
        if (slack <= rep.tol) continue;
        Json input = {{"lower", nodes[i].p.to_string()}, {"upper", nodes[j].p.to_string()}};
        if (nodes[i].k) {
            input["k_lower"] = nodes[i].k;
            input["k_upper"] = nodes[j].k;
        }
        if (inexact(b, vq.r) || inexact(b, vp.r)) ++demoted;
        else rep.add_violation({input, vq.r.value, vp.r.value, slack});
    }
    if (skipped) rep.caveats.push_back(std::to_string(skipped) + " pairs skipped: a side could not be evaluated");
    if (demoted) rep.caveats.push_back(std::to_string(demoted) + " pairs exceeded tol on bound-valued evaluations (demoted)");
    if (b.relation == RelationId::standard) {
        rep.details["type_b_pairs"] = type_b;
        rep.details["type_b_max_gap"] = type_b_gap;
    }
    rep.details["worst_margin"] = std::isfinite(worst_margin) ? worst_margin : 0.0;
    rep.details["nodes_evaluated"] = todo.size();
    return rep;
}

MonogamyKind parse_monogamy(const std::string& s) {
    if (s == "global") return MonogamyKind::global;
    if (s == "complete") return MonogamyKind::complete;
    if (s == "tight") return MonogamyKind::tight;
    if (s == "strong") return MonogamyKind::strong;
    throw InvalidArgument("monogamy kind must be one of global, complete, tight, strong");
}

const char* to_string(MonogamyKind k) {
    switch (k) {
        case MonogamyKind::global: return "global";
        case MonogamyKind::complete: return "complete";
        case MonogamyKind::tight: return "tight";
        case MonogamyKind::strong: return "strong";
    }
    return "complete";
}

CheckReport monogamy_check(const MeasureBinding& b, const AnyState& s, MonogamyKind kind, const MonogamyConfig& cfg) {
    const bool relation_ok = b.relation == RelationId::standard || (b.relation == RelationId::standard_a && kind == MonogamyKind::complete);
    if (!relation_ok) throw UnsupportedError(std::string("monogamy scans need the standard relation; '") + b.id + "' uses " + to_string(b.relation));
    const int n = static_cast<int>(parties_of(s));
    if (n > 5) throw InvalidArgument("monogamy scans support at most 5 parties");
    if ((kind == MonogamyKind::complete || kind == MonogamyKind::tight) && n < 3)
        throw InvalidArgument("complete and tight monogamy need at least 3 parties");
    CheckReport rep;
    rep.suite = std::string("monogamy-") + to_string(kind);
    rep.measure = b.id;
    rep.tol = cfg.eps_zero;
    rep.details["eps_eq"] = cfg.eps_eq;
    rep.details["eps_zero"] = cfg.eps_zero;

    std::map<std::string, NodeValue> cache;
    auto value = [&](const SubRepartition& p) -> const NodeValue& {
        auto key = p.to_string();
        auto it = cache.find(key);
        if (it != cache.end()) return it->second;
        NodeValue v;
        if (p.size() < b.min_blocks) {
            v.error = "fewer blocks than the measure needs";
        } else {
            try {
                v.r = b.evaluate(s, p, cfg.args);
                v.ok = true;
            } catch (const PreconditionError& e) {
                v.error = e.what();
            } catch (const InvalidArgument& e) {
                v.error = e.what();
            }
        }
        return cache.emplace(key, std::move(v)).first->second;
    };

    const auto all = enumerate_subrepartitions(n);
    std::size_t pairs = 0, triggered = 0, implications = 0, skipped = 0, demoted = 0;
    for (const auto& p : all)
        for (const auto& q : all) {
            if (p == q) continue;
            bool rel = false;
            switch (kind) {
                case MonogamyKind::complete: rel = coarser_basic(q, p, Coarsening::a); break;
                case MonogamyKind::tight: rel = coarser_basic(q, p, Coarsening::b); break;
                case MonogamyKind::strong: rel = coarser_basic(q, p, Coarsening::c); break;
                case MonogamyKind::global: rel = coarser(q, p); break;
            }
            if (!rel) continue;
            const auto &vp = value(p), &vq = value(q);
            if (!vp.ok || !vq.ok) continue;
            ++pairs;
            if (std::abs(vp.r.value - vq.r.value) > cfg.eps_eq) continue;
            ++triggered;
            std::vector<SubRepartition> implied;
            switch (kind) {
                case MonogamyKind::complete: {
                    const Mask z = q.support(), w = p.support() & ~z;
                    implied.push_back(SubRepartition(n, {z, w}));
                    std::vector<Mask> rest;
                    for (Mask m : p.masks())
                        if (std::find(q.masks().begin(), q.masks().end(), m) == q.masks().end()) rest.push_back(m);
                    if (rest.size() >= 2) implied.push_back(SubRepartition(n, rest));
                    break;
                }
                case MonogamyKind::tight:
                    for (Mask qb : q.masks()) {
                        std::vector<Mask> parts;
                        for (Mask pb : p.masks())
                            if ((pb & qb) == pb) parts.push_back(pb);
                        if (parts.size() >= 2) implied.push_back(SubRepartition(n, parts));
                    }
                    break;
                case MonogamyKind::strong: {
                    for (Mask qb : q.masks())
                        if (popcount(qb) >= 2) implied.push_back(SubRepartition::singletons(n, qb));
                    const auto members = mask_members(p.support());
                    for (std::size_t a = 0; a < members.size(); ++a)
                        for (std::size_t c = a + 1; c < members.size(); ++c) {
                            const Mask ma = Mask{1} << members[a], mc = Mask{1} << members[c];
                            if ((q.support() & ma) && (q.support() & mc)) continue;
                            implied.push_back(SubRepartition(n, {ma, mc}));
                        }
                    break;
                }
                case MonogamyKind::global: implied = complementarity(p, q); break;
            }
            for (const auto& u : implied) {
                const auto& vu = value(u);
                if (!vu.ok) {
                    ++skipped;
                    continue;
                }
                ++implications;
                if (vu.r.value <= cfg.eps_zero) continue;
                Json input = {{"P", p.to_string()}, {"Q", q.to_string()}, {"implied", u.to_string()}};
                if (inexact(b, vu.r) || inexact(b, vp.r) || inexact(b, vq.r)) ++demoted;
                else rep.add_violation({input, vu.r.value, 0.0, vu.r.value});
            }
        }
    rep.trials = pairs;
    rep.details["pairs"] = pairs;
    rep.details["premises_triggered"] = triggered;
    rep.details["implications_checked"] = implications;
    rep.details["vacuous"] = triggered == 0;
    if (triggered == 0) rep.caveats.push_back("no equality premise triggered: the scan is vacuous");
    if (skipped) rep.caveats.push_back(std::to_string(skipped) + " implied reductions could not be evaluated");
    if (demoted) rep.caveats.push_back(std::to_string(demoted) + " implied values above eps_zero on bound-valued evaluations (demoted)");
    return rep;
}

}  // namespace mqc

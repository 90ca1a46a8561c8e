#include "mqc/steering.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "mqc/config.hpp"

namespace mqc {

void PartyMeasurements::validate() const {
    if (dim == 0) throw InvalidArgument("measurement dimension must be positive");
    if (settings.empty()) throw InvalidArgument("a party needs at least one setting");
    const std::size_t o = settings.front().size();
    if (o == 0) throw InvalidArgument("a setting needs at least one outcome");
    const CMatrix id = CMatrix::identity(dim);
    for (const auto& povm : settings) {
        if (povm.size() != o) throw InvalidArgument("every setting must have the same number of outcomes");
        CMatrix sum(dim, dim);
        for (const auto& m : povm) {
            if (m.rows() != dim || m.cols() != dim) throw ShapeError("POVM element does not match the party dimension");
            if (!is_hermitian(m, tol().hermitian) || min_eigval(hermitian_part(m)) < -tol().psd)
                throw PreconditionError("POVM element is not positive semidefinite");
            sum += m;
        }
        if ((sum - id).max_abs() > 1e-9) throw PreconditionError("POVM elements do not sum to the identity");
    }
}

void MeasurementAssemblage::validate() const {
    if (parties.empty()) throw InvalidArgument("no untrusted parties");
    for (const auto& p : parties) p.validate();
}

PartyMeasurements pauli_measurements(const std::string& axes) {
    PartyMeasurements pm;
    pm.dim = 2;
    const double r = 1 / std::sqrt(2.0);
    for (char c : axes) {
        CVector up, down;
        switch (c) {
            case 'z': up = {cplx(1), cplx(0)}; down = {cplx(0), cplx(1)}; break;
            case 'x': up = {cplx(r), cplx(r)}; down = {cplx(r), cplx(-r)}; break;
            case 'y': up = {cplx(r), cplx(0, r)}; down = {cplx(r), cplx(0, -r)}; break;
            default: throw InvalidArgument(std::string("unknown Pauli axis '") + c + "'");
        }
        pm.settings.push_back({projector(up), projector(down)});
    }
    if (pm.settings.empty()) throw InvalidArgument("no measurement axes given");
    return pm;
}

std::size_t encode_mixed(const std::vector<std::size_t>& digits, const std::vector<std::size_t>& radix) {
    std::size_t v = 0;
    for (std::size_t i = 0; i < radix.size(); ++i) v = v * radix[i] + digits[i];
    return v;
}

std::vector<std::size_t> decode_mixed(std::size_t value, const std::vector<std::size_t>& radix) {
    std::vector<std::size_t> d(radix.size());
    for (std::size_t i = radix.size(); i-- > 0;) {
        d[i] = value % radix[i];
        value /= radix[i];
    }
    return d;
}

namespace {

std::size_t product_of(const std::vector<std::size_t>& v) {
    std::size_t p = 1;
    for (auto x : v) p *= x;
    return p;
}

SubRepartition combined(const SteeringSplit& split) {
    std::vector<Mask> blocks = split.untrusted.masks();
    for (Mask m : split.trusted.masks()) blocks.push_back(m);
    return SubRepartition(split.untrusted.n(), blocks);
}

}  // namespace

std::size_t StateAssemblage::joint_settings() const { return product_of(settings); }
std::size_t StateAssemblage::joint_outcomes() const { return product_of(outcomes); }

const CMatrix& StateAssemblage::at(std::size_t a, std::size_t x) const { return elements.at(x * joint_outcomes() + a); }
CMatrix& StateAssemblage::at(std::size_t a, std::size_t x) { return elements.at(x * joint_outcomes() + a); }

double StateAssemblage::no_signalling_defect() const {
    const std::size_t no = joint_outcomes(), ns = joint_settings();
    CMatrix ref;
    double worst = 0;
    for (std::size_t x = 0; x < ns; ++x) {
        CMatrix sum(trusted_dim(), trusted_dim());
        for (std::size_t a = 0; a < no; ++a) sum += at(a, x);
        if (x == 0) ref = sum;
        else worst = std::max(worst, (sum - ref).max_abs());
    }
    return worst;
}

void StateAssemblage::validate() const {
    if (trusted_dims.empty()) throw InvalidArgument("assemblage has no trusted groups");
    if (settings.size() != outcomes.size() || settings.empty()) throw InvalidArgument("settings and outcomes must list every untrusted party");
    for (std::size_t i = 0; i < settings.size(); ++i)
        if (settings[i] == 0 || outcomes[i] == 0) throw InvalidArgument("settings and outcomes must be positive");
    if (elements.size() != joint_settings() * joint_outcomes()) throw ShapeError("assemblage element count mismatch");
    const std::size_t d = trusted_dim();
    for (const auto& e : elements) {
        if (e.rows() != d || e.cols() != d) throw ShapeError("assemblage element does not match the trusted dimension");
        if (!is_hermitian(e, tol().hermitian)) throw NonHermitianError("assemblage element is not Hermitian");
        if (min_eigval(hermitian_part(e)) < -tol().psd) throw PreconditionError("assemblage element is not positive semidefinite");
    }
    if (no_signalling_defect() > 1e-8) throw PreconditionError("assemblage violates no-signalling");
}

StateAssemblage make_assemblage(const DensityState& rho, const SteeringSplit& split, const MeasurementAssemblage& ma) {
    if (static_cast<std::size_t>(split.untrusted.n()) != rho.parties()) throw ShapeError("split does not match the state");
    ma.validate();
    if (ma.parties.size() != split.untrusted.size()) throw ShapeError("one measurement set per untrusted group is required");
    DensityState g = group_by(rho, combined(split));
    const std::size_t nu = split.untrusted.size();
    StateAssemblage sa;
    std::size_t du = 1;
    for (std::size_t i = 0; i < nu; ++i) {
        if (ma.parties[i].dim != g.dims()[i]) throw ShapeError("measurement dimension does not match the untrusted group");
        du *= g.dims()[i];
        sa.settings.push_back(ma.parties[i].settings.size());
        sa.outcomes.push_back(ma.parties[i].outcomes());
    }
    for (std::size_t i = nu; i < g.parties(); ++i) sa.trusted_dims.push_back(g.dims()[i]);
    const std::size_t dt = sa.trusted_dim();
    const std::size_t no = sa.joint_outcomes(), ns = sa.joint_settings();
    sa.elements.assign(no * ns, CMatrix(dt, dt));
    const CMatrix& r = g.matrix();
    for (std::size_t x = 0; x < ns; ++x) {
        const auto xs = decode_mixed(x, sa.settings);
        for (std::size_t a = 0; a < no; ++a) {
            const auto as = decode_mixed(a, sa.outcomes);
            CMatrix m = ma.parties[0].settings[xs[0]][as[0]];
            for (std::size_t i = 1; i < nu; ++i) m = kron(m, ma.parties[i].settings[xs[i]][as[i]]);
            // Tr_U[(M x I) rho] with the untrusted factors leading.
            CMatrix& out = sa.at(a, x);
            for (std::size_t i = 0; i < du; ++i)
                for (std::size_t j = 0; j < du; ++j) {
                    const cplx mji = m(j, i);
                    if (mji == cplx(0)) continue;
                    for (std::size_t p = 0; p < dt; ++p)
                        for (std::size_t q = 0; q < dt; ++q) out(p, q) += mji * r(i * dt + p, j * dt + q);
                }
            out = hermitian_part(out);
        }
    }
    return sa;
}

const char* to_string(LhsVerdict v) {
    switch (v) {
        case LhsVerdict::lhs_member: return "lhs-member";
        case LhsVerdict::steerable_evidence: return "steerable-evidence";
        case LhsVerdict::inconclusive: return "inconclusive";
    }
    return "inconclusive";
}

StateAssemblage LhsModel::predict() const {
    StateAssemblage sa;
    sa.trusted_dims = trusted_dims;
    sa.settings = settings;
    sa.outcomes = outcomes;
    const std::size_t d = sa.trusted_dim(), no = sa.joint_outcomes(), ns = sa.joint_settings();
    sa.elements.assign(no * ns, CMatrix(d, d));
    for (std::size_t l = 0; l < strategies.size(); ++l)
        for (std::size_t x = 0; x < ns; ++x) {
            const auto xs = decode_mixed(x, settings);
            std::vector<std::size_t> as(settings.size());
            for (std::size_t i = 0; i < settings.size(); ++i) as[i] = strategies[l][i][xs[i]];
            sa.at(encode_mixed(as, outcomes), x) += hidden[l];
        }
    return sa;
}

double separable_ball_radius(const Dims& factors) {
    const double D = static_cast<double>(total_dim(factors));
    if (factors.size() <= 1) return std::numeric_limits<double>::infinity();
    // Two factors: purity at most 1/(D-1) implies separability.
    if (factors.size() == 2) return 1 / std::sqrt(D * (D - 1));
    // Expanding rho - I/D in products of local Weyl operators U_mu gives
    // rho = (I + sum_mu c_mu U_mu)/D, separable when sum |c_mu| <= 1. With
    // ||rho - I/D||_F^2 = sum |c_mu|^2 / D and D^2 - 1 coefficients,
    // Cauchy-Schwarz turns this into the radius below.
    return 1 / (std::sqrt(D) * std::sqrt(D * D - 1));
}

bool certified_separable(const CMatrix& sigma, const Dims& factors) {
    const std::size_t D = total_dim(factors);
    if (sigma.rows() != D || sigma.cols() != D) throw ShapeError("operator does not match the factors");
    const double tr = sigma.trace().real();
    if (tr <= 1e-14) return sigma.max_abs() <= 1e-14;
    if (factors.size() <= 1) return min_eigval(hermitian_part(sigma)) >= -tol().psd * tr;
    CMatrix rho = hermitian_part(sigma) / cplx(tr);
    if (factors.size() == 2 && D <= 6) return min_eigval(partial_transpose(rho, factors, {1})) >= -1e-12;
    CMatrix diff = rho - CMatrix::identity(D) / cplx(static_cast<double>(D));
    return diff.frobenius_norm() <= separable_ball_radius(factors);
}

LhsResult lhs_check(const StateAssemblage& sa, const SdpOptions& opt) {
    sa.validate();
    const std::size_t parties = sa.settings.size();
    std::vector<std::size_t> per_party(parties);
    double count = 1;
    for (std::size_t i = 0; i < parties; ++i) {
        double c = std::pow(static_cast<double>(sa.outcomes[i]), static_cast<double>(sa.settings[i]));
        per_party[i] = static_cast<std::size_t>(c);
        count *= c;
    }
    if (count > static_cast<double>(kMaxStrategies)) throw InvalidArgument("deterministic strategy count exceeds 1e6");
    const std::size_t nl = static_cast<std::size_t>(count);

    std::vector<std::vector<std::vector<std::size_t>>> strategies(nl);
    for (std::size_t l = 0; l < nl; ++l) {
        const auto digits = decode_mixed(l, per_party);
        strategies[l].resize(parties);
        for (std::size_t i = 0; i < parties; ++i)
            strategies[l][i] = decode_mixed(digits[i], std::vector<std::size_t>(sa.settings[i], sa.outcomes[i]));
    }

    const std::size_t no = sa.joint_outcomes(), ns = sa.joint_settings();
    FeasibilityProgram prog;
    prog.dim = sa.trusted_dim();
    prog.vars = nl;
    prog.coeff = RMatrix(no * ns, nl);
    prog.targets = sa.elements;
    for (std::size_t l = 0; l < nl; ++l)
        for (std::size_t x = 0; x < ns; ++x) {
            const auto xs = decode_mixed(x, sa.settings);
            std::vector<std::size_t> as(parties);
            for (std::size_t i = 0; i < parties; ++i) as[i] = strategies[l][i][xs[i]];
            prog.coeff(x * no + encode_mixed(as, sa.outcomes), l) = 1;
        }

    auto sol = solve_feasibility(prog, opt);
    LhsResult res;
    res.strategies = nl;
    res.residual = sol.residual;
    res.certificate_value = sol.certificate_value;
    res.iterations = sol.iterations;
    if (!sol.feasible) {
        if (sol.certified) {
            res.verdict = LhsVerdict::steerable_evidence;
            res.note = sa.trusted_dims.size() > 1 ? "no LHS model even without the product constraint" : "infeasibility certificate verified";
        } else {
            res.note = std::string("solver ") + to_string(sol.status) + " without a certificate";
        }
        return res;
    }
    LhsModel model;
    model.trusted_dims = sa.trusted_dims;
    model.settings = sa.settings;
    model.outcomes = sa.outcomes;
    model.strategies = std::move(strategies);
    model.hidden = std::move(sol.x);
    if (sa.trusted_dims.size() > 1) {
        // Separable hidden states split into product terms sharing the same
        // response function, so certifying each one gives a product model.
        std::size_t uncertified = 0;
        for (const auto& h : model.hidden)
            if (!certified_separable(h, sa.trusted_dims)) ++uncertified;
        if (uncertified > 0) {
            res.note = std::to_string(uncertified) + " hidden states not certified separable";
            return res;
        }
        res.note = "hidden states certified separable";
    }
    res.verdict = LhsVerdict::lhs_member;
    res.model = std::move(model);
    return res;
}

DensityState steer_free_apply(const DensityState& rho, const SteeringSplit& split, const KrausChannel& ch) {
    if (ch.tag != ChannelTag::steering_free) throw InvalidArgument("channel is not tagged steering-free");
    if (static_cast<std::size_t>(split.untrusted.n()) != rho.parties()) throw ShapeError("split does not match the state");
    if (ch.split != static_cast<std::size_t>(split.t)) throw InvalidArgument("channel split does not match the steering split");
    return apply_channel(rho, ch);
}

MeasureResult unsteerable_distance_ub(const DensityState& rho, const SteeringSplit& split, const UnsteerableConfig& cfg) {
    if (static_cast<std::size_t>(split.untrusted.n()) != rho.parties()) throw ShapeError("split does not match the state");
    DensityState g = group_by(rho, combined(split));
    const std::size_t D = g.dim();
    const CMatrix mixed = CMatrix::identity(D) / cplx(static_cast<double>(D));
    auto point = [&](double s) { return g.matrix() * cplx(1 - s) + mixed * cplx(s); };
    auto ok = [&](double s) { return certified_separable(point(s), g.dims()); };
    double hi = 0;
    if (!ok(0)) {
        double lo = 0;
        hi = 1;
        for (int it = 0; it < cfg.bisection_steps; ++it) {
            const double mid = 0.5 * (lo + hi);
            (ok(mid) ? hi : lo) = mid;
        }
    }
    MeasureResult r;
    r.value = hi == 0 ? 0.0 : 0.5 * trace_norm(g.matrix() - point(hi));
    r.bound_kind = BoundKind::upper_bound;
    const bool ppt = g.parties() == 2 && D <= 6;
    r.diagnostics["s_star"] = hi;
    r.diagnostics["criterion"] = g.parties() <= 1 ? "single-group" : ppt ? "ppt" : "separability-ball";
    r.diagnostics["groups"] = g.dims();
    return r;
}

MeasurementAssemblage block_measurements(const Dims& dims, const SteeringSplit& split, const SiteMeasurements& sites, Mask active) {
    MeasurementAssemblage ma;
    for (const auto& block : split.untrusted.blocks()) {
        std::vector<int> act;
        std::vector<std::size_t> sr, orad;
        for (int m : block)
            if (active & (Mask{1} << m)) {
                if (static_cast<std::size_t>(m) >= sites.size() || sites[static_cast<std::size_t>(m)].empty())
                    throw InvalidArgument("no measurements for an active untrusted site");
                act.push_back(m);
                sr.push_back(sites[static_cast<std::size_t>(m)].size());
                orad.push_back(sites[static_cast<std::size_t>(m)].front().size());
            }
        PartyMeasurements pm;
        pm.dim = 1;
        for (int m : block) pm.dim *= dims.at(static_cast<std::size_t>(m));
        const std::size_t ns = product_of(sr), no = product_of(orad);
        pm.settings.assign(ns, std::vector<CMatrix>(no));
        for (std::size_t x = 0; x < ns; ++x) {
            const auto xs = decode_mixed(x, sr);
            for (std::size_t a = 0; a < no; ++a) {
                const auto as = decode_mixed(a, orad);
                CMatrix e = CMatrix::identity(1);
                std::size_t k = 0;
                for (int m : block) {
                    const auto sm = static_cast<std::size_t>(m);
                    if (k < act.size() && act[k] == m) {
                        e = kron(e, sites[sm].at(xs[k]).at(as[k]));
                        ++k;
                    } else {
                        e = kron(e, CMatrix::identity(dims[sm]));
                    }
                }
                pm.settings[x][a] = std::move(e);
            }
        }
        ma.parties.push_back(std::move(pm));
    }
    return ma;
}

namespace {

struct BlockLayout {
    std::vector<std::vector<int>> active;  // active sites per untrusted block
    std::vector<std::size_t> settings, outcomes;
};

BlockLayout layout_of(const SteeringSplit& split, const SiteMeasurements& sites, Mask active) {
    BlockLayout L;
    for (const auto& block : split.untrusted.blocks()) {
        std::vector<int> act;
        std::size_t s = 1, o = 1;
        for (int m : block)
            if (active & (Mask{1} << m)) {
                act.push_back(m);
                s *= sites[static_cast<std::size_t>(m)].size();
                o *= sites[static_cast<std::size_t>(m)].front().size();
            }
        L.active.push_back(act);
        L.settings.push_back(s);
        L.outcomes.push_back(o);
    }
    return L;
}

std::vector<std::size_t> site_radix(const std::vector<int>& act, const SiteMeasurements& sites, bool outcomes) {
    std::vector<std::size_t> r;
    for (int m : act) {
        const auto& s = sites[static_cast<std::size_t>(m)];
        r.push_back(outcomes ? s.front().size() : s.size());
    }
    return r;
}

std::vector<int> trusted_order(const SteeringSplit& split) {
    std::vector<int> order;
    for (const auto& b : split.trusted.blocks()) order.insert(order.end(), b.begin(), b.end());
    return order;
}

}  // namespace

TransportReport transport_check(const DensityState& rho, const SteeringSplit& lower, const SteeringSplit& upper, Coarsening x,
                                Coarsening y, const SiteMeasurements& sites, const SdpOptions& opt) {
    if (!steering_basic(lower, upper, x, y)) throw InvalidArgument("the splits are not a basic steering pair of this type");
    const Dims& dims = rho.dims();
    // Measurements go from separate to grouped parties for type b, and from
    // the larger to the smaller configuration for types a and c. The trusted
    // side always goes from the finer (upper) to the coarser (lower) one.
    SteeringSplit src{lower.t, x == Coarsening::b ? lower.untrusted : upper.untrusted, upper.trusted};
    SteeringSplit tgt{lower.t, x == Coarsening::b ? upper.untrusted : lower.untrusted, lower.trusted};
    TransportReport rep;
    rep.source = src.to_string();
    rep.target = tgt.to_string();

    const Mask tgt_support = tgt.untrusted.support();
    Mask src_active = 0;
    for (Mask b : src.untrusted.masks()) src_active |= (b & tgt_support) ? (b & tgt_support) : b;
    const BlockLayout SL = layout_of(src, sites, src_active);
    const BlockLayout TL = layout_of(tgt, sites, tgt_support);

    auto source = make_assemblage(rho, src, block_measurements(dims, src, sites, src_active));
    auto lhs = lhs_check(source, opt);
    if (lhs.verdict != LhsVerdict::lhs_member) {
        rep.note = std::string("source configuration: ") + to_string(lhs.verdict);
        return rep;
    }
    rep.model_found = true;
    const LhsModel& model = *lhs.model;

    // Hidden states on the target trusted groups: trace out dropped sites
    // and reorder to the target grouping.
    const auto s_order = trusted_order(src), t_order = trusted_order(tgt);
    Dims site_dims;
    for (int m : s_order) site_dims.push_back(dims[static_cast<std::size_t>(m)]);
    std::vector<int> keep;
    for (std::size_t i = 0; i < s_order.size(); ++i)
        if (std::find(t_order.begin(), t_order.end(), s_order[i]) != t_order.end()) keep.push_back(static_cast<int>(i));
    std::vector<int> kept_sites;
    for (int i : keep) kept_sites.push_back(s_order[static_cast<std::size_t>(i)]);
    Dims kept_dims;
    for (int m : kept_sites) kept_dims.push_back(dims[static_cast<std::size_t>(m)]);
    std::vector<int> perm;
    for (int m : t_order)
        perm.push_back(static_cast<int>(std::find(kept_sites.begin(), kept_sites.end(), m) - kept_sites.begin()));
    std::vector<CMatrix> hidden;
    for (const auto& h : model.hidden) {
        CMatrix r = keep.size() == s_order.size() ? h : partial_trace(h, site_dims, keep);
        hidden.push_back(permute_subsystems(r, kept_dims, perm));
    }

    auto target = make_assemblage(rho, tgt, block_measurements(dims, tgt, sites, tgt_support));
    StateAssemblage predicted = target;
    for (auto& e : predicted.elements) e = CMatrix(e.rows(), e.cols());

    std::vector<int> site_setting(static_cast<std::size_t>(rho.parties()), 0), site_outcome(site_setting);
    for (std::size_t l = 0; l < model.strategies.size(); ++l)
        for (std::size_t xt = 0; xt < target.joint_settings(); ++xt) {
            const auto block_x = decode_mixed(xt, TL.settings);
            for (std::size_t b = 0; b < TL.active.size(); ++b) {
                const auto digits = decode_mixed(block_x[b], site_radix(TL.active[b], sites, false));
                for (std::size_t k = 0; k < digits.size(); ++k) site_setting[static_cast<std::size_t>(TL.active[b][k])] = static_cast<int>(digits[k]);
            }
            // Every source block whose active sites are measured in the target
            // answers with its deterministic response; dropped blocks are
            // marginalized.
            for (std::size_t b = 0; b < SL.active.size(); ++b) {
                const auto& act = SL.active[b];
                if (act.empty() || !(tgt_support & (Mask{1} << act.front()))) continue;
                std::vector<std::size_t> xs;
                for (int m : act) xs.push_back(static_cast<std::size_t>(site_setting[static_cast<std::size_t>(m)]));
                const std::size_t a = model.strategies[l][b][encode_mixed(xs, site_radix(act, sites, false))];
                const auto as = decode_mixed(a, site_radix(act, sites, true));
                for (std::size_t k = 0; k < act.size(); ++k) site_outcome[static_cast<std::size_t>(act[k])] = static_cast<int>(as[k]);
            }
            std::vector<std::size_t> block_a;
            for (const auto& act : TL.active) {
                std::vector<std::size_t> as;
                for (int m : act) as.push_back(static_cast<std::size_t>(site_outcome[static_cast<std::size_t>(m)]));
                block_a.push_back(encode_mixed(as, site_radix(act, sites, true)));
            }
            predicted.at(encode_mixed(block_a, TL.outcomes), xt) += hidden[l];
        }

    for (std::size_t i = 0; i < target.elements.size(); ++i)
        rep.max_deviation = std::max(rep.max_deviation, (target.elements[i] - predicted.elements[i]).max_abs());
    bool positive = true;
    for (const auto& h : hidden) positive = positive && min_eigval(h) >= -tol().psd;
    rep.success = positive && rep.max_deviation <= 1e-6;
    if (!positive) rep.note = "transported hidden state not positive";
    return rep;
}

}  // namespace mqc

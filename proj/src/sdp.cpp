#include "mqc/sdp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "mqc/config.hpp"

namespace mqc {

const char* to_string(BoundKind k) {
    switch (k) {
        case BoundKind::exact: return "exact";
        case BoundKind::lower_bound: return "lower-bound";
        case BoundKind::upper_bound: return "upper-bound";
        case BoundKind::heuristic: return "heuristic";
    }
    return "unknown";
}

const char* to_string(SolveStatus s) {
    switch (s) {
        case SolveStatus::converged: return "converged";
        case SolveStatus::max_iterations: return "max-iterations";
        case SolveStatus::infeasible: return "infeasible";
        case SolveStatus::stalled: return "stalled";
    }
    return "unknown";
}

namespace {

double sq(const CMatrix& a) {
    double s = a.frobenius_norm();
    return s * s;
}

CMatrix clip_spectrum(const CMatrix& a, double lo, double hi) {
    return herm_function(a, [lo, hi](double x) { return std::clamp(x, lo, hi); });
}

}  // namespace

WitnessSolution solve_witness(const WitnessProgram& prog, const SdpOptions& opt) {
    const std::size_t D = total_dim(prog.dims);
    if (!prog.rho.square() || prog.rho.rows() != D) throw ShapeError("witness program: state does not match dims");
    const std::size_t K = prog.transposed.size();
    if (K == 0) throw InvalidArgument("witness program needs at least one bipartition");
    const int max_iter = opt.max_iter > 0 ? opt.max_iter : tol().sdp_max_iter;
    const double target = opt.target_gap > 0 ? opt.target_gap : tol().sdp_target_gap;
    const double alpha = opt.relaxation;
    const CMatrix& rho = prog.rho;
    const CMatrix id = CMatrix::identity(D);
    auto T = [&](const CMatrix& a, std::size_t b) { return partial_transpose(a, prog.dims, prog.transposed[b]); };

    WitnessSolution sol;
    sol.witness = CMatrix(D, D);
    sol.m.assign(K, CMatrix(D, D));
    sol.n.assign(K, CMatrix(D, D));
    sol.value = 0.0;
    sol.upper = trace_norm(rho);

    // A state that is PPT across one bipartition has value zero: Y_B = rho
    // (plus a shift absorbing round-off) is a dual point with objective mu D.
    for (std::size_t b = 0; b < K; ++b) {
        const double mu = std::max(0.0, -min_eigval(T(rho, b)));
        sol.upper = std::min(sol.upper, mu * static_cast<double>(D));
    }
    auto finish = [&](SolveStatus st) {
        sol.status = st;
        sol.duality_gap = std::max(0.0, sol.upper - sol.value);
        sol.bound_kind = sol.duality_gap <= tol().sdp_exact_gap ? BoundKind::exact : BoundKind::lower_bound;
        return sol;
    };
    if (sol.upper - sol.value <= target) return finish(SolveStatus::converged);

    CMatrix W(D, D), zW(D, D), uW(D, D);
    std::vector<CMatrix> M(K, CMatrix(D, D)), N(K, CMatrix(D, D));
    std::vector<CMatrix> zM = M, zN = N, uM = M, uN = N;
    double sigma = 1.0;
    const int every = std::max(1, opt.check_every);

    for (int it = 1; it <= max_iter; ++it) {
        // x-update: Euclidean projection onto {W = M_B + T_B(N_B)} of the
        // shifted point. T_B is an isometric involution, so the problem
        // decouples in terms of N'_B = T_B(N_B).
        CMatrix a = zW - uW - rho / cplx(sigma);
        std::vector<CMatrix> bb(K), cp(K), s(K);
        CMatrix acc = a;
        for (std::size_t b = 0; b < K; ++b) {
            bb[b] = zM[b] - uM[b];
            cp[b] = T(zN[b] - uN[b], b);
            s[b] = bb[b] + cp[b];
            acc += s[b] * cplx(0.5);
        }
        W = acc / cplx(1.0 + 0.5 * static_cast<double>(K));
        for (std::size_t b = 0; b < K; ++b) {
            CMatrix r = (W - s[b]) * cplx(0.5);
            M[b] = bb[b] + r;
            N[b] = T(cp[b] + r, b);
        }

        // Over-relaxed z-update onto the cones.
        auto relax = [alpha](const CMatrix& x, const CMatrix& z) { return x * cplx(alpha) + z * cplx(1.0 - alpha); };
        CMatrix hW = relax(W, zW);
        CMatrix nzW = clip_spectrum(hermitian_part(hW + uW), -1.0, 1.0);
        double dual_sq = sq(nzW - zW);
        double prim_sq = sq(W - nzW);
        uW += hW - nzW;
        zW = std::move(nzW);
        for (std::size_t b = 0; b < K; ++b) {
            CMatrix hM = relax(M[b], zM[b]);
            CMatrix hN = relax(N[b], zN[b]);
            CMatrix nzM = psd_project(hermitian_part(hM + uM[b]));
            CMatrix nzN = psd_project(hermitian_part(hN + uN[b]));
            dual_sq += sq(nzM - zM[b]) + sq(nzN - zN[b]);
            prim_sq += sq(M[b] - nzM) + sq(N[b] - nzN);
            uM[b] += hM - nzM;
            uN[b] += hN - nzN;
            zM[b] = std::move(nzM);
            zN[b] = std::move(nzN);
        }
        sol.primal_residual = std::sqrt(prim_sq);
        sol.dual_residual = sigma * std::sqrt(dual_sq);
        sol.iterations = it;

        if (it % every != 0 && it != max_iter) continue;

        // Certified lower bound: average the per-bipartition witnesses, shift
        // by the worst disagreement so the average lies in every cone, then
        // rescale into the operator-norm ball.
        std::vector<CMatrix> wb(K);
        CMatrix wbar(D, D);
        for (std::size_t b = 0; b < K; ++b) {
            wb[b] = zM[b] + T(zN[b], b);
            wbar += wb[b];
        }
        wbar /= cplx(static_cast<double>(K));
        wbar = hermitian_part(wbar);
        double delta = 0.0;
        for (std::size_t b = 0; b < K; ++b) delta = std::max(delta, -min_eigval(hermitian_part(wbar - wb[b])));
        CMatrix w2 = wbar + id * cplx(delta);
        const double scale = std::max(1.0, op_norm(w2));
        w2 /= cplx(scale);
        const double lb = std::max(0.0, -trace_product_re(rho, w2));
        if (lb > sol.value) {
            sol.value = lb;
            sol.witness = w2;
            for (std::size_t b = 0; b < K; ++b) {
                sol.m[b] = (zM[b] + (wbar - wb[b]) + id * cplx(delta)) / cplx(scale);
                sol.n[b] = zN[b] / cplx(scale);
            }
        }

        // Certified upper bound from the scaled multipliers of the cone
        // constraints, repaired into PSD and PPT form.
        CMatrix ysum(D, D);
        for (std::size_t b = 0; b < K; ++b) {
            CMatrix y = (uM[b] * cplx(-sigma) + T(uN[b] * cplx(-sigma), b)) * cplx(0.5);
            y = psd_project(hermitian_part(y));
            const double mu = std::max(0.0, -min_eigval(T(y, b)));
            ysum += y + id * cplx(mu);
        }
        sol.upper = std::min(sol.upper, trace_norm(hermitian_part(rho - ysum)));
        if (sol.upper - sol.value <= target) return finish(SolveStatus::converged);

        // Residual balancing.
        if (sol.primal_residual > 10.0 * sol.dual_residual) {
            sigma *= 2.0;
            uW /= cplx(2.0);
            for (std::size_t b = 0; b < K; ++b) {
                uM[b] /= cplx(2.0);
                uN[b] /= cplx(2.0);
            }
        } else if (sol.dual_residual > 10.0 * sol.primal_residual) {
            sigma /= 2.0;
            uW *= cplx(2.0);
            for (std::size_t b = 0; b < K; ++b) {
                uM[b] *= cplx(2.0);
                uN[b] *= cplx(2.0);
            }
        }
    }
    return finish(SolveStatus::max_iterations);
}

namespace {

// Moore-Penrose pseudo-inverse of a symmetric positive semidefinite matrix.
RMatrix psd_pinv(const RMatrix& a) {
    auto e = sym_eig(a);
    const double cut = 1e-10 * std::max(1.0, std::abs(e.values.front()));
    return sym_function(a, [cut](double x) { return std::abs(x) > cut ? 1.0 / x : 0.0; });
}

std::vector<CMatrix> apply_c(const RMatrix& c, const std::vector<CMatrix>& x, std::size_t dim) {
    std::vector<CMatrix> out(c.rows(), CMatrix(dim, dim));
    for (std::size_t i = 0; i < c.rows(); ++i)
        for (std::size_t v = 0; v < c.cols(); ++v)
            if (c(i, v) != 0.0) out[i] += x[v] * cplx(c(i, v));
    return out;
}

std::vector<CMatrix> apply_ct(const RMatrix& c, const std::vector<CMatrix>& y, std::size_t dim) {
    std::vector<CMatrix> out(c.cols(), CMatrix(dim, dim));
    for (std::size_t i = 0; i < c.rows(); ++i)
        for (std::size_t v = 0; v < c.cols(); ++v)
            if (c(i, v) != 0.0) out[v] += y[i] * cplx(c(i, v));
    return out;
}

std::vector<CMatrix> mix(const RMatrix& m, const std::vector<CMatrix>& y, std::size_t dim) { return apply_c(m, y, dim); }

double total_norm(const std::vector<CMatrix>& xs) {
    double s = 0;
    for (const auto& x : xs) s += sq(x);
    return std::sqrt(s);
}

}  // namespace

FeasibilitySolution solve_feasibility(const FeasibilityProgram& prog, const SdpOptions& opt) {
    const std::size_t d = prog.dim;
    const std::size_t C = prog.targets.size();
    const std::size_t V = prog.vars;
    if (prog.coeff.rows() != C || prog.coeff.cols() != V) throw ShapeError("feasibility program: coefficient shape mismatch");
    for (const auto& t : prog.targets)
        if (t.rows() != d || t.cols() != d) throw ShapeError("feasibility program: target shape mismatch");
    const int max_iter = opt.max_iter > 0 ? opt.max_iter : tol().sdp_max_iter;
    const int every = std::max(1, opt.check_every);

    const RMatrix cct = prog.coeff * prog.coeff.transpose();
    const RMatrix cct_pinv = psd_pinv(cct);
    // P = C^T (C C^T)^+ maps constraint residuals back to variable space.
    const RMatrix proj = prog.coeff.transpose() * cct_pinv;
    double tnorm = total_norm(prog.targets);
    const double feas_tol = tol().feas_residual * std::max(1.0, tnorm);

    auto affine_project = [&](const std::vector<CMatrix>& v) {
        auto r = apply_c(prog.coeff, v, d);
        for (std::size_t i = 0; i < C; ++i) r[i] -= prog.targets[i];
        auto corr = mix(proj, r, d);
        std::vector<CMatrix> x = v;
        for (std::size_t k = 0; k < V; ++k) x[k] -= corr[k];
        return x;
    };
    auto constraint_residual = [&](const std::vector<CMatrix>& z) {
        auto r = apply_c(prog.coeff, z, d);
        for (std::size_t i = 0; i < C; ++i) r[i] -= prog.targets[i];
        return total_norm(r);
    };

    FeasibilitySolution sol;
    std::vector<CMatrix> z(V, CMatrix(d, d)), u(V, CMatrix(d, d)), x;

    // Farkas certificate from the displacement between the affine set and
    // the cone: Y = (C C^T)^+ C dir, repaired by a shift along s with
    // C^T s = 1 so that every C^T Y block becomes PSD.
    auto try_certificate = [&](const std::vector<CMatrix>& disp) {
        const RMatrix lsq = cct_pinv * prog.coeff;
        RMatrix ones(V, 1, 1.0);
        RMatrix s = cct_pinv * (prog.coeff * ones);
        RMatrix check = prog.coeff.transpose() * s;
        double sres = 0;
        for (std::size_t k = 0; k < V; ++k) sres = std::max(sres, std::abs(check(k, 0) - 1.0));
        const bool have_shift = sres < 1e-9;
        for (double sign : {1.0, -1.0}) {
            auto y = mix(lsq, disp, d);
            for (auto& yc : y) yc = hermitian_part(yc) * cplx(sign);
            auto aty = apply_ct(prog.coeff, y, d);
            double mu = 0;
            for (const auto& blk : aty) mu = std::max(mu, -min_eigval(hermitian_part(blk)));
            double value = 0;
            for (std::size_t c = 0; c < C; ++c) value += trace_product_re(y[c], prog.targets[c]);
            if (mu > 0) {
                if (!have_shift) continue;
                double st = 0;
                for (std::size_t c = 0; c < C; ++c) st += s(c, 0) * prog.targets[c].trace().real();
                value += mu * st;
            }
            if (value < -1e-12) {
                sol.certified = true;
                sol.certificate_value = value;
                return true;
            }
        }
        return false;
    };

    double last_disp = -1;
    int flat_checks = 0;
    for (int it = 1; it <= max_iter; ++it) {
        std::vector<CMatrix> v(V);
        for (std::size_t k = 0; k < V; ++k) v[k] = z[k] - u[k];
        x = affine_project(v);
        std::vector<CMatrix> nz(V);
        for (std::size_t k = 0; k < V; ++k) {
            nz[k] = psd_project(hermitian_part(x[k] + u[k]));
            u[k] += x[k] - nz[k];
        }
        z = std::move(nz);
        sol.iterations = it;
        if (it % every != 0 && it != max_iter) continue;

        sol.residual = constraint_residual(z);
        if (sol.residual <= feas_tol) {
            sol.feasible = true;
            sol.x = z;
            sol.status = SolveStatus::converged;
            return sol;
        }
        std::vector<CMatrix> disp(V);
        for (std::size_t k = 0; k < V; ++k) disp[k] = x[k] - z[k];
        const double dn = total_norm(disp);
        if (dn > 1e-4 && last_disp > 0 && std::abs(dn - last_disp) <= 1e-3 * dn) ++flat_checks;
        else flat_checks = 0;
        last_disp = dn;
        if (flat_checks >= 4 && try_certificate(disp)) {
            sol.status = SolveStatus::infeasible;
            return sol;
        }
    }
    std::vector<CMatrix> disp(V);
    for (std::size_t k = 0; k < V; ++k) disp[k] = x[k] - z[k];
    if (try_certificate(disp)) {
        sol.status = SolveStatus::infeasible;
        return sol;
    }
    sol.status = SolveStatus::stalled;
    sol.x = z;
    return sol;
}

}  // namespace mqc

#include "mqc/measures.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <queue>

#include "mqc/config.hpp"

namespace mqc {

nlohmann::json to_json(const MeasureResult& r) {
    return {{"value", r.value}, {"bound_kind", to_string(r.bound_kind)}, {"diagnostics", r.diagnostics}};
}

MeasureResult c_l1(const DensityState& s) {
    const CMatrix& r = s.matrix();
    double sum = 0;
    for (std::size_t i = 0; i < r.rows(); ++i)
        for (std::size_t j = 0; j < r.cols(); ++j)
            if (i != j) sum += std::abs(r(i, j));
    return {sum, BoundKind::exact, nlohmann::json::object()};
}

MeasureResult imag_robustness(const DensityState& s) {
    // For Hermitian rho, rho - rho^T = 2i Im(rho) is itself Hermitian.
    CMatrix d = s.matrix() - s.matrix().transpose();
    return {0.5 * trace_norm(hermitian_part(d)), BoundKind::exact, nlohmann::json::object()};
}

namespace {

// Reduced operator of |psi><psi| on factor j.
CMatrix reduce_factor(const CVector& psi, const Dims& dims, std::size_t j) {
    std::size_t left = 1, right = 1;
    for (std::size_t a = 0; a < j; ++a) left *= dims[a];
    for (std::size_t a = j + 1; a < dims.size(); ++a) right *= dims[a];
    const std::size_t d = dims[j];
    CMatrix out(d, d);
    for (std::size_t l = 0; l < left; ++l)
        for (std::size_t a = 0; a < d; ++a)
            for (std::size_t b = 0; b < d; ++b) {
                cplx acc = 0;
                const std::size_t ia = (l * d + a) * right, ib = (l * d + b) * right;
                for (std::size_t r = 0; r < right; ++r) acc += psi[ia + r] * std::conj(psi[ib + r]);
                out(a, b) += acc;
            }
    return out;
}

double entropy_of(const CMatrix& rho, EntropyKind h, double q) {
    return h == EntropyKind::von_neumann ? von_neumann_entropy(rho) : tsallis_entropy(rho, q);
}

// Dominant eigenvector of a state that must be pure within tolerance.
CVector pure_vector(const DensityState& s, const char* what) {
    if (purity(s.matrix()) < 1 - tol().purity) throw PreconditionError(std::string(what) + " requires a pure state");
    auto e = herm_eig(s.matrix());
    CVector v(s.dim());
    for (std::size_t i = 0; i < v.size(); ++i) v[i] = e.vectors(i, 0);
    return v;
}

double norm2(const CVector& v) {
    double s = 0;
    for (const auto& x : v) s += std::norm(x);
    return s;
}

}  // namespace

double pure_functional(const CVector& psi, const Dims& dims, EntanglementKind kind) {
    const double n2 = norm2(psi);
    if (n2 <= 0) throw InvalidArgument("zero vector");
    double acc = 0;
    for (std::size_t j = 0; j < dims.size(); ++j) {
        CMatrix r = reduce_factor(psi, dims, j) / cplx(n2);
        switch (kind.kind) {
            case PureKind::ef: acc += von_neumann_entropy(r); break;
            case PureKind::concurrence: acc += 1.0 - purity(r); break;
            case PureKind::tsallis: acc += tsallis_entropy(r, kind.q); break;
        }
    }
    if (kind.kind == PureKind::concurrence) return std::sqrt(std::max(0.0, acc));
    return 0.5 * acc;
}

namespace {

const char* kind_name(EntanglementKind k) {
    switch (k.kind) {
        case PureKind::ef: return "Ef";
        case PureKind::concurrence: return "C";
        case PureKind::tsallis: return "Tq";
    }
    return "?";
}

DensityState grouped_for(const DensityState& s, const SubRepartition& p) {
    if (p.size() < 2) throw InvalidArgument("the partition needs at least two blocks");
    return group_by(s, p);
}

}  // namespace

MeasureResult pure_entanglement(const DensityState& s, const SubRepartition& p, EntanglementKind kind) {
    auto g = grouped_for(s, p);
    CVector psi = pure_vector(g, "pure_entanglement");
    MeasureResult r{pure_functional(psi, g.dims(), kind), BoundKind::exact, {{"kind", kind_name(kind)}}};
    if (kind.kind == PureKind::tsallis) r.diagnostics["q"] = kind.q;
    return r;
}

MeasureResult convex_roof(const DensityState& s, const SubRepartition& p, EntanglementKind kind, const RoofConfig& cfg) {
    if (cfg.restarts < 1 || cfg.iterations < 1) throw InvalidArgument("roof budgets must be positive");
    auto g = grouped_for(s, p);
    const Dims& dims = g.dims();
    const std::size_t D = g.dim();
    auto e = herm_eig(g.matrix());
    std::vector<CVector> cols;
    for (std::size_t j = 0; j < D; ++j) {
        if (e.values[j] <= 1e-12) continue;
        CVector a(D);
        const double w = std::sqrt(e.values[j]);
        for (std::size_t i = 0; i < D; ++i) a[i] = e.vectors(i, j) * w;
        cols.push_back(std::move(a));
    }
    const std::size_t r = cols.size();
    const std::size_t kmin = std::max(r, cfg.min_ensemble ? cfg.min_ensemble : r);
    const std::size_t kmax = std::max(kmin, cfg.max_ensemble ? cfg.max_ensemble : r * r);

    auto term = [&](const CVector& v) {
        const double w = norm2(v);
        return w < 1e-15 ? 0.0 : w * pure_functional(v, dims, kind);
    };

    Rng rng(cfg.seed);
    double best = std::numeric_limits<double>::infinity();
    std::size_t best_k = 0;
    int total_iter = 0;
    for (int start = 0; start < cfg.restarts; ++start) {
        std::size_t K = kmin;
        if (start > 0) K = (start % 2 == 1) ? kmax : kmin + rng.index(kmax - kmin + 1);
        // Unnormalized ensemble vectors psi_i = sum_j U_ij a_j with U an
        // isometry; the first start is the eigendecomposition itself.
        std::vector<CVector> psi(K, CVector(D));
        if (start == 0) {
            for (std::size_t i = 0; i < r; ++i) psi[i] = cols[i];
        } else {
            CMatrix u = haar_unitary(K, rng);
            for (std::size_t i = 0; i < K; ++i)
                for (std::size_t j = 0; j < r; ++j)
                    for (std::size_t x = 0; x < D; ++x) psi[i][x] += u(i, j) * cols[j][x];
        }
        std::vector<double> terms(K);
        double value = 0;
        for (std::size_t i = 0; i < K; ++i) value += terms[i] = term(psi[i]);

        double step = 0.3;
        int rejected = 0;
        for (int it = 0; it < cfg.iterations && K > 1 && step > 1e-7; ++it) {
            ++total_iter;
            const std::size_t i = rng.index(K);
            std::size_t k = rng.index(K - 1);
            if (k >= i) ++k;
            const double t = step * rng.normal();
            const cplx ph = std::polar(1.0, 2 * std::numbers::pi * rng.uniform());
            const double c = std::cos(t), sn = std::sin(t);
            CVector a(D), b(D);
            for (std::size_t x = 0; x < D; ++x) {
                a[x] = c * psi[i][x] + sn * ph * psi[k][x];
                b[x] = -sn * std::conj(ph) * psi[i][x] + c * psi[k][x];
            }
            const double ta = term(a), tb = term(b);
            const double next = value - terms[i] - terms[k] + ta + tb;
            if (next < value - cfg.tolerance * 1e-3) {
                psi[i] = std::move(a);
                psi[k] = std::move(b);
                terms[i] = ta;
                terms[k] = tb;
                value = next;
                step = std::min(1.0, step * 1.2);
                rejected = 0;
            } else if (++rejected >= 40) {
                step *= 0.5;
                rejected = 0;
            }
        }
        if (value < best) {
            best = value;
            best_k = K;
        }
    }
    MeasureResult res{std::max(0.0, best), BoundKind::upper_bound, nlohmann::json::object()};
    res.diagnostics = {{"kind", kind_name(kind)}, {"rank", r}, {"ensemble_size", best_k}, {"restarts", cfg.restarts},
                       {"iterations", total_iter}, {"seed", cfg.seed}};
    return res;
}

MeasureResult kpe_min_sum(const DensityState& s, const SubRepartition& p, std::size_t k, EntropyKind h, double q) {
    if (k < 2) throw InvalidArgument("kpe_min_sum needs k >= 2");
    if (p.size() < 2) throw InvalidArgument("the partition needs at least two blocks");
    auto g = group_by(s, p);
    if (purity(g.matrix()) < 1 - tol().purity) throw PreconditionError("kpe_min_sum requires a pure grouped state");
    double best = std::numeric_limits<double>::infinity();
    std::string arg;
    for (const auto& x : bounded_coarsenings(p, k - 1)) {
        double sum = 0;
        for (Mask m : x.masks()) sum += entropy_of(partial_trace(s.matrix(), s.dims(), mask_members(m)), h, q);
        if (sum < best) {
            best = sum;
            arg = x.to_string();
        }
    }
    MeasureResult r{std::max(0.0, 0.5 * best), BoundKind::exact, {{"argmin", arg}}};
    if (h == EntropyKind::tsallis) {
        r.diagnostics["entropy"] = "tsallis";
        r.diagnostics["q"] = q;
        r.diagnostics["warning"] = "Tsallis entropy is not asserted to be subadditive";
    } else {
        r.diagnostics["entropy"] = "von-neumann";
    }
    return r;
}

const char* to_string(OverlapMode m) { return m == OverlapMode::k_separable ? "k-separable" : "k-partite"; }

std::vector<SubRepartition> overlap_partitions(int n, OverlapMode mode, std::size_t k) {
    if (mode == OverlapMode::k_separable && (k < 1 || k > static_cast<std::size_t>(n)))
        throw InvalidArgument("k-separable overlap needs 1 <= k <= n");
    if (mode == OverlapMode::k_partite && k < 2) throw InvalidArgument("k-partite overlap needs k >= 2");
    const Mask full = (Mask{1} << n) - 1;
    std::vector<SubRepartition> out;
    for (auto& x : set_partitions_of(n, full)) {
        const bool keep = mode == OverlapMode::k_separable ? x.size() == k : x.depth() <= k - 1;
        if (keep) out.push_back(std::move(x));
    }
    return out;
}

namespace {

// An operator reordered so that the blocks of a partition are contiguous
// tensor factors, together with the block dimensions.
struct BlockedOperator {
    CMatrix l;
    std::vector<std::size_t> bdims;
    std::vector<std::size_t> stride;  // row-major stride of each block index
};

BlockedOperator block_operator(const CMatrix& l, const Dims& dims, const SubRepartition& x) {
    std::vector<int> perm;
    BlockedOperator b;
    for (Mask m : x.masks()) {
        std::size_t d = 1;
        for (int i : mask_members(m)) {
            perm.push_back(i);
            d *= dims[static_cast<std::size_t>(i)];
        }
        b.bdims.push_back(d);
    }
    b.l = permute_subsystems(l, dims, perm);
    b.stride.assign(b.bdims.size(), 1);
    for (std::size_t j = b.bdims.size(); j-- > 1;) b.stride[j - 1] = b.stride[j] * b.bdims[j];
    return b;
}

std::vector<cplx> rest_weights(const BlockedOperator& bo, const std::vector<CVector>& f, std::size_t blk, std::vector<std::size_t>& idx) {
    const std::size_t D = bo.l.rows();
    std::vector<cplx> w(D);
    idx.assign(D, 0);
    for (std::size_t x = 0; x < D; ++x) {
        cplx c = 1;
        for (std::size_t j = 0; j < bo.bdims.size(); ++j) {
            const std::size_t xj = (x / bo.stride[j]) % bo.bdims[j];
            if (j == blk) idx[x] = xj;
            else c *= f[j][xj];
        }
        w[x] = c;
    }
    return w;
}

// <bra_rest| L |ket_rest> as an operator on block `blk`.
CMatrix contract_pair(const BlockedOperator& bo, const std::vector<CVector>& bra, const std::vector<CVector>& ket, std::size_t blk) {
    std::vector<std::size_t> idx;
    const auto wb = rest_weights(bo, bra, blk, idx);
    const auto wk = rest_weights(bo, ket, blk, idx);
    const std::size_t D = bo.l.rows();
    const std::size_t d = bo.bdims[blk];
    CMatrix out(d, d);
    for (std::size_t x = 0; x < D; ++x) {
        if (wb[x] == cplx(0)) continue;
        const cplx cx = std::conj(wb[x]);
        for (std::size_t y = 0; y < D; ++y)
            if (wk[y] != cplx(0)) out(idx[x], idx[y]) += cx * bo.l(x, y) * wk[y];
    }
    return out;
}

// <phi_rest| L |phi_rest> on block `blk`, with every other block fixed.
CMatrix contract_except(const BlockedOperator& bo, const std::vector<CVector>& f, std::size_t blk) {
    return hermitian_part(contract_pair(bo, f, f, blk));
}

CVector top_vector(const CMatrix& a, double* value) {
    auto e = herm_eig(a);
    CVector v(a.rows());
    for (std::size_t i = 0; i < v.size(); ++i) v[i] = e.vectors(i, 0);
    if (value) *value = e.values[0];
    return v;
}

void check_overlap_operator(const CMatrix& l, const Dims& dims) {
    if (!l.square() || l.rows() != total_dim(dims)) throw ShapeError("overlap operator does not match dims");
    if (!is_hermitian(l, tol().hermitian)) throw NonHermitianError("overlap operator must be Hermitian");
    if (min_eigval(l) < -tol().psd) throw PreconditionError("overlap operator must be positive semidefinite");
    if (max_eigval(l) > 1 + 1e-9) throw PreconditionError("overlap operator must have operator norm at most 1");
}

}  // namespace

OverlapEstimate sep_overlap(const CMatrix& l, const Dims& dims, OverlapMode mode, std::size_t k, std::uint64_t seed, int starts) {
    check_overlap_operator(l, dims);
    const int n = static_cast<int>(dims.size());
    OverlapEstimate best;
    best.value = -1;
    Rng rng(seed);
    for (const auto& x : overlap_partitions(n, mode, k)) {
        BlockedOperator bo = block_operator(l, dims, x);
        const std::size_t m = bo.bdims.size();
        for (int s = 0; s < std::max(1, starts); ++s) {
            std::vector<CVector> f(m);
            for (std::size_t j = 0; j < m; ++j) f[j] = random_pure(bo.bdims[j], rng);
            double value = -1;
            for (int sweep = 0; sweep < 500; ++sweep) {
                double v = 0;
                for (std::size_t j = 0; j < m; ++j) f[j] = top_vector(contract_except(bo, f, j), &v);
                const bool done = v - value <= 1e-13;
                value = v;
                if (done) break;
            }
            if (value > best.value) {
                best.value = value;
                best.best_factors = f;
                best.best_partition = x;
            }
        }
    }
    best.value = std::clamp(best.value, 0.0, 1.0);
    return best;
}

bool grid_oracle_supported(const Dims& dims, OverlapMode mode, std::size_t k) {
    if (total_dim(dims) > 16) return false;
    for (const auto& x : overlap_partitions(static_cast<int>(dims.size()), mode, k)) {
        std::size_t largest = 0;
        for (std::size_t j = 1; j < x.size(); ++j)
            if (popcount(x.block(j)) > popcount(x.block(largest))) largest = j;
        for (std::size_t j = 0; j < x.size(); ++j) {
            if (j == largest) continue;
            auto mem = mask_members(x.block(j));
            if (mem.size() != 1 || dims[static_cast<std::size_t>(mem[0])] != 2) return false;
        }
    }
    return true;
}

namespace {

struct Cell {
    double ub = 0;
    double center = 0;
    std::size_t part = 0;
    std::vector<double> box;  // per gridded qubit: theta0, theta1, phi0, phi1
    bool operator<(const Cell& o) const { return ub < o.ub; }
};

CVector bloch_vector(double theta, double phi) {
    return {cplx(std::cos(theta / 2)), std::polar(std::sin(theta / 2), phi)};
}

// Largest great-circle distance from the center of a (theta, phi) box to
// any of its points: a meridian leg plus a parallel leg.
double box_radius(const double* b) {
    const double th0 = b[0], th1 = b[1];
    double smax = std::max(std::sin(th0), std::sin(th1));
    if (th0 <= std::numbers::pi / 2 && th1 >= std::numbers::pi / 2) smax = 1;
    return 0.5 * (th1 - th0) + 0.5 * smax * (b[3] - b[2]);
}

}  // namespace

GridCertificate overlap_grid_oracle(const CMatrix& l, const Dims& dims, OverlapMode mode, std::size_t k, double accuracy,
                                    std::size_t max_cells) {
    check_overlap_operator(l, dims);
    if (!grid_oracle_supported(dims, mode, k)) throw UnsupportedError("grid oracle needs qubit blocks and total dimension <= 16");
    struct Part {
        BlockedOperator bo;
        std::size_t exact = 0;
        std::vector<std::size_t> gridded;
    };
    std::vector<Part> parts;
    for (const auto& x : overlap_partitions(static_cast<int>(dims.size()), mode, k)) {
        Part p{block_operator(l, dims, x), 0, {}};
        for (std::size_t j = 1; j < x.size(); ++j)
            if (popcount(x.block(j)) > popcount(x.block(p.exact))) p.exact = j;
        for (std::size_t j = 0; j < x.size(); ++j)
            if (j != p.exact) p.gridded.push_back(j);
        parts.push_back(std::move(p));
    }

    GridCertificate cert;
    // Every qubit state in a cell is alpha c + beta c_perp with c the center
    // and |beta| <= sin(r/2). Expanding the contracted operator in that basis
    // bounds the cell by the center term plus the norms of the remaining
    // terms; near a stationary point the first-order terms vanish.
    auto evaluate = [&](Cell& c) {
        const Part& p = parts[c.part];
        const std::size_t g = p.gridded.size();
        std::vector<std::array<CVector, 2>> basis(g);
        std::vector<double> sb(g);
        double prod = 1;
        for (std::size_t q = 0; q < g; ++q) {
            const double* b = &c.box[4 * q];
            const double th = 0.5 * (b[0] + b[1]), ph = 0.5 * (b[2] + b[3]);
            basis[q][0] = bloch_vector(th, ph);
            basis[q][1] = {-std::polar(std::sin(th / 2), -ph), cplx(std::cos(th / 2))};
            const double r = std::min(box_radius(b), std::numbers::pi);
            sb[q] = std::sin(r / 2);
            prod *= std::pow(std::cos(r / 2), 2);
        }
        std::vector<CVector> bra(p.bo.bdims.size()), ket(p.bo.bdims.size());
        double expansion = 0;
        for (std::size_t u = 0; u < (std::size_t{1} << g); ++u)
            for (std::size_t v = 0; v < (std::size_t{1} << g); ++v) {
                double coef = 1;
                for (std::size_t q = 0; q < g; ++q) {
                    bra[p.gridded[q]] = basis[q][(u >> q) & 1];
                    ket[p.gridded[q]] = basis[q][(v >> q) & 1];
                    if ((u >> q) & 1) coef *= sb[q];
                    if ((v >> q) & 1) coef *= sb[q];
                }
                CMatrix o = contract_pair(p.bo, bra, ket, p.exact);
                if (u == 0 && v == 0) {
                    c.center = max_eigval(hermitian_part(o));
                } else if (coef > 0) {
                    expansion += coef * o.frobenius_norm();
                }
            }
        const double lipschitz = std::sqrt(std::max(0.0, 1 - prod));
        c.ub = std::min({1.0, c.center + lipschitz, c.center + expansion});
        cert.lower = std::max(cert.lower, c.center);
        ++cert.cells;
    };

    std::priority_queue<Cell> queue;
    for (std::size_t i = 0; i < parts.size(); ++i) {
        Cell c;
        c.part = i;
        for (std::size_t g = 0; g < parts[i].gridded.size(); ++g) {
            c.box.insert(c.box.end(), {0.0, std::numbers::pi, 0.0, 2 * std::numbers::pi});
        }
        evaluate(c);
        queue.push(std::move(c));
    }
    while (!queue.empty()) {
        const Cell top = queue.top();
        // Cells without gridded qubits are exact, so their bound equals a
        // value already folded into `lower` and they end the search here.
        if (top.ub - cert.lower <= accuracy) {
            cert.upper = std::max(top.ub, cert.lower);
            cert.complete = true;
            return cert;
        }
        if (cert.cells >= max_cells) {
            cert.upper = top.ub;
            cert.complete = false;
            return cert;
        }
        queue.pop();
        // Split the widest coordinate (phi extents weighted by sin theta).
        std::size_t best_axis = 0;
        double widest = -1;
        for (std::size_t g = 0; g < top.box.size() / 4; ++g) {
            const double* b = &top.box[4 * g];
            double smax = std::max(std::sin(b[0]), std::sin(b[1]));
            if (b[0] <= std::numbers::pi / 2 && b[1] >= std::numbers::pi / 2) smax = 1;
            if (b[1] - b[0] > widest) {
                widest = b[1] - b[0];
                best_axis = 4 * g;
            }
            if (smax * (b[3] - b[2]) > widest) {
                widest = smax * (b[3] - b[2]);
                best_axis = 4 * g + 2;
            }
        }
        for (int half = 0; half < 2; ++half) {
            Cell c;
            c.part = top.part;
            c.box = top.box;
            const double mid = 0.5 * (top.box[best_axis] + top.box[best_axis + 1]);
            (half == 0 ? c.box[best_axis + 1] : c.box[best_axis]) = mid;
            evaluate(c);
            if (c.ub > cert.lower) queue.push(std::move(c));
        }
    }
    cert.upper = cert.lower;
    cert.complete = true;
    return cert;
}

MeasureResult witness_entanglement(const DensityState& s, std::size_t k, OverlapMode mode, const WitnessConfig& cfg) {
    const std::size_t n = s.parties();
    if (k < 2 || k > n) throw InvalidArgument("witness_entanglement needs 2 <= k <= n");
    const Dims& dims = s.dims();
    const std::size_t D = s.dim();

    std::vector<std::pair<std::string, CMatrix>> bases;
    {
        auto e = herm_eig(s.matrix());
        CVector v(D);
        for (std::size_t i = 0; i < D; ++i) v[i] = e.vectors(i, 0);
        bases.emplace_back("dominant-eigenvector", projector(v));
    }
    if (std::all_of(dims.begin(), dims.end(), [&](std::size_t d) { return d == dims[0]; }))
        bases.emplace_back("ghz", projector(ghz_vector(n, dims[0])));
    if (std::all_of(dims.begin(), dims.end(), [](std::size_t d) { return d == 2; })) bases.emplace_back("w", projector(w_vector(n)));

    Rng rng(cfg.seed);
    std::vector<std::pair<std::string, CMatrix>> candidates;
    for (const auto& [name, l] : bases) {
        candidates.emplace_back(name, l);
        for (int t = 0; t < cfg.perturbations; ++t) {
            CMatrix u = CMatrix::identity(1);
            for (std::size_t d : dims) u = kron(u, expm(random_hermitian(d, rng) * cplx(0, cfg.perturbation_scale)));
            candidates.emplace_back(name + "-perturbed", u * l * u.adjoint());
        }
    }

    // Rank the candidates by the alternating estimate (an optimistic score,
    // since it underestimates the overlap), then certify the leaders.
    struct Scored {
        std::size_t index;
        double trace;
        double estimate;
    };
    std::vector<Scored> scored;
    for (std::size_t i = 0; i < candidates.size(); ++i) {
        CMatrix& l = candidates[i].second;
        l = hermitian_part(l);
        scored.push_back({i, trace_product_re(l, s.matrix()), sep_overlap(l, dims, mode, k, cfg.seed).value});
    }
    std::stable_sort(scored.begin(), scored.end(),
                     [](const Scored& a, const Scored& b) { return a.trace - a.estimate > b.trace - b.estimate; });

    const bool certified = grid_oracle_supported(dims, mode, k);
    double best = 0, best_overlap = 0;
    std::string best_name = "none";
    bool complete = true;
    if (certified) {
        const std::size_t count = std::min<std::size_t>(scored.size(), std::max(1, cfg.certified_candidates));
        for (std::size_t i = 0; i < count; ++i) {
            const auto& c = scored[i];
            auto cert = overlap_grid_oracle(candidates[c.index].second, dims, mode, k, cfg.grid_accuracy, cfg.grid_cells);
            if (c.trace - cert.upper > best) {
                best = c.trace - cert.upper;
                best_overlap = cert.upper;
                best_name = candidates[c.index].first;
                complete = cert.complete;
            }
        }
    } else if (!scored.empty() && scored[0].trace - scored[0].estimate > 0) {
        best = scored[0].trace - scored[0].estimate;
        best_overlap = scored[0].estimate;
        best_name = candidates[scored[0].index].first;
    }
    MeasureResult r{best, certified ? BoundKind::lower_bound : BoundKind::heuristic, nlohmann::json::object()};
    r.diagnostics = {{"mode", to_string(mode)},
                     {"k", k},
                     {"candidates", candidates.size()},
                     {"best_candidate", best_name},
                     {"overlap", best_overlap},
                     {"overlap_source", certified ? "grid-oracle" : "alternating-maximization"},
                     {"norm", "operator"}};
    if (!scored.empty()) r.diagnostics["heuristic_value"] = std::max(0.0, scored[0].trace - scored[0].estimate);
    if (certified && !complete) r.diagnostics["grid_complete"] = false;
    return r;
}

MeasureResult non_mppt(const DensityState& s, const SubRepartition& p, const SdpOptions& opt) {
    auto g = grouped_for(s, p);
    const std::size_t m = g.parties();
    WitnessProgram prog{g.dims(), g.matrix(), {}};
    // Bipartitions of the blocks, each listed by the side holding block 0.
    const Mask full = (Mask{1} << m) - 1;
    for (Mask side = 1; side < full; side += 2) prog.transposed.push_back(mask_members(side));
    auto sol = solve_witness(prog, opt);
    MeasureResult r{sol.value, sol.bound_kind, nlohmann::json::object()};
    r.diagnostics = {{"upper", sol.upper},
                     {"duality_gap", sol.duality_gap},
                     {"iterations", sol.iterations},
                     {"status", to_string(sol.status)},
                     {"bipartitions", prog.transposed.size()},
                     {"norm", "operator"}};
    if (sol.status != SolveStatus::converged) r.diagnostics["warning"] = "solver budget exhausted; value is the best feasible bound";
    return r;
}

}  // namespace mqc

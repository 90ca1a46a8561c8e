#include "mqc/qstate.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "mqc/config.hpp"

namespace mqc {

std::size_t total_dim(const Dims& dims) {
    std::size_t d = 1;
    for (auto x : dims) {
        if (x == 0) throw InvalidArgument("subsystem dimension must be positive");
        d *= x;
    }
    return d;
}

DensityState::DensityState(Dims dims, CMatrix rho) : dims_(std::move(dims)), rho_(std::move(rho)) {
    if (dims_.empty()) throw InvalidArgument("state needs at least one subsystem");
    if (!rho_.square() || rho_.rows() != total_dim(dims_)) throw ShapeError("density matrix does not match dims");
    if (!is_hermitian(rho_, tol().hermitian)) throw PreconditionError("density matrix is not Hermitian");
    const double tr = rho_.trace().real();
    if (std::abs(tr - 1.0) > tol().trace) throw PreconditionError("density matrix trace differs from 1");
    if (min_eigval(rho_) < -tol().psd) throw PreconditionError("density matrix is not positive semidefinite");
    rho_ = hermitian_part(rho_);
}

DensityState DensityState::unchecked(Dims dims, CMatrix rho) {
    DensityState s;
    s.dims_ = std::move(dims);
    s.rho_ = std::move(rho);
    return s;
}

DensityState pure_state(Dims dims, const CVector& psi) {
    if (psi.size() != total_dim(dims)) throw ShapeError("state vector does not match dims");
    const double n = vec_norm(psi);
    if (std::abs(n - 1.0) > 1e-9) throw PreconditionError("state vector is not normalized");
    return DensityState::unchecked(std::move(dims), projector(psi));
}

CVector ghz_vector(std::size_t n, std::size_t d) {
    if (n < 1 || d < 2) throw InvalidArgument("ghz needs n >= 1 and d >= 2");
    std::size_t D = 1;
    for (std::size_t i = 0; i < n; ++i) D *= d;
    CVector v(D);
    const double a = 1.0 / std::sqrt(static_cast<double>(d));
    for (std::size_t k = 0; k < d; ++k) {
        std::size_t idx = 0;
        for (std::size_t i = 0; i < n; ++i) idx = idx * d + k;
        v[idx] = a;
    }
    return v;
}

CVector w_vector(std::size_t n) {
    if (n < 2) throw InvalidArgument("W state needs n >= 2");
    CVector v(std::size_t{1} << n);
    const double a = 1.0 / std::sqrt(static_cast<double>(n));
    for (std::size_t i = 0; i < n; ++i) v[std::size_t{1} << i] = a;
    return v;
}

CVector product_vector(const std::vector<CVector>& factors) {
    CVector v{cplx(1)};
    for (const auto& f : factors) {
        CVector next(v.size() * f.size());
        for (std::size_t i = 0; i < v.size(); ++i)
            for (std::size_t j = 0; j < f.size(); ++j) next[i * f.size() + j] = v[i] * f[j];
        v = std::move(next);
    }
    return v;
}

DensityState ghz(std::size_t n, std::size_t d) { return pure_state(Dims(n, d), ghz_vector(n, d)); }

DensityState w_state(std::size_t n) { return pure_state(Dims(n, 2), w_vector(n)); }

DensityState maximally_mixed(Dims dims) {
    const std::size_t D = total_dim(dims);
    return DensityState::unchecked(std::move(dims), CMatrix::identity(D) / cplx(static_cast<double>(D)));
}

DensityState werner(double eta) {
    if (!(eta >= -1.0 / 3 && eta <= 1.0)) throw InvalidArgument("werner parameter must lie in [-1/3, 1]");
    const double r = 1 / std::sqrt(2.0);
    CMatrix singlet = projector({cplx(0), cplx(r), cplx(-r), cplx(0)});
    return DensityState::unchecked({2, 2}, singlet * cplx(eta) + CMatrix::identity(4) * cplx((1 - eta) / 4));
}

namespace {

std::vector<std::size_t> strides_of(const Dims& dims) {
    std::vector<std::size_t> s(dims.size());
    std::size_t acc = 1;
    for (std::size_t i = dims.size(); i-- > 0;) {
        s[i] = acc;
        acc *= dims[i];
    }
    return s;
}

void check_sites(const std::vector<int>& sites, std::size_t n) {
    std::vector<char> seen(n, 0);
    for (int s : sites) {
        if (s < 0 || static_cast<std::size_t>(s) >= n) throw InvalidArgument("subsystem index out of range");
        if (seen[static_cast<std::size_t>(s)]) throw InvalidArgument("repeated subsystem index");
        seen[static_cast<std::size_t>(s)] = 1;
    }
}

}  // namespace

CMatrix partial_trace(const CMatrix& rho, const Dims& dims, const std::vector<int>& keep_in) {
    const std::size_t n = dims.size();
    const std::size_t D = total_dim(dims);
    if (!rho.square() || rho.rows() != D) throw ShapeError("operator does not match dims");
    check_sites(keep_in, n);
    std::vector<int> keep = keep_in;
    std::sort(keep.begin(), keep.end());
    std::vector<char> kept(n, 0);
    for (int s : keep) kept[static_cast<std::size_t>(s)] = 1;
    auto strides = strides_of(dims);
    std::size_t dk = 1, dt = 1;
    for (std::size_t i = 0; i < n; ++i) (kept[i] ? dk : dt) *= dims[i];
    // For every full index: its kept and traced components.
    std::vector<std::vector<std::pair<std::size_t, std::size_t>>> groups(dt);
    for (std::size_t a = 0; a < D; ++a) {
        std::size_t ki = 0, ti = 0;
        for (std::size_t i = 0; i < n; ++i) {
            const std::size_t digit = (a / strides[i]) % dims[i];
            if (kept[i]) ki = ki * dims[i] + digit;
            else ti = ti * dims[i] + digit;
        }
        groups[ti].emplace_back(a, ki);
    }
    CMatrix out(dk, dk);
    for (const auto& g : groups)
        for (const auto& [a, ka] : g)
            for (const auto& [b, kb] : g) out(ka, kb) += rho(a, b);
    return out;
}

DensityState partial_trace(const DensityState& s, const std::vector<int>& keep_in) {
    std::vector<int> keep = keep_in;
    std::sort(keep.begin(), keep.end());
    Dims d;
    for (int k : keep) {
        if (k < 0 || static_cast<std::size_t>(k) >= s.parties()) throw InvalidArgument("subsystem index out of range");
        d.push_back(s.dims()[static_cast<std::size_t>(k)]);
    }
    return DensityState::unchecked(std::move(d), partial_trace(s.matrix(), s.dims(), keep));
}

CMatrix partial_transpose(const CMatrix& rho, const Dims& dims, const std::vector<int>& sites) {
    const std::size_t n = dims.size();
    const std::size_t D = total_dim(dims);
    if (!rho.square() || rho.rows() != D) throw ShapeError("operator does not match dims");
    check_sites(sites, n);
    auto strides = strides_of(dims);
    std::vector<char> flip(n, 0);
    for (int s : sites) flip[static_cast<std::size_t>(s)] = 1;
    // Split every index into its transposed part and the rest.
    std::vector<std::size_t> tpart(D), rest(D);
    for (std::size_t a = 0; a < D; ++a) {
        std::size_t t = 0;
        for (std::size_t i = 0; i < n; ++i)
            if (flip[i]) t += ((a / strides[i]) % dims[i]) * strides[i];
        tpart[a] = t;
        rest[a] = a - t;
    }
    CMatrix out(D, D);
    for (std::size_t a = 0; a < D; ++a)
        for (std::size_t b = 0; b < D; ++b) out(rest[a] + tpart[b], rest[b] + tpart[a]) = rho(a, b);
    return out;
}

namespace {

std::vector<std::size_t> permutation_map(const Dims& dims, const std::vector<int>& perm, Dims& new_dims) {
    const std::size_t n = dims.size();
    if (perm.size() != n) throw InvalidArgument("permutation size mismatch");
    check_sites(perm, n);
    new_dims.resize(n);
    for (std::size_t k = 0; k < n; ++k) new_dims[k] = dims[static_cast<std::size_t>(perm[k])];
    auto old_strides = strides_of(dims);
    auto new_strides = strides_of(new_dims);
    const std::size_t D = total_dim(dims);
    std::vector<std::size_t> map(D);
    for (std::size_t a = 0; a < D; ++a) {
        std::size_t b = 0;
        for (std::size_t k = 0; k < n; ++k) {
            const std::size_t old_site = static_cast<std::size_t>(perm[k]);
            b += ((a / old_strides[old_site]) % dims[old_site]) * new_strides[k];
        }
        map[a] = b;
    }
    return map;
}

}  // namespace

CMatrix permute_subsystems(const CMatrix& rho, const Dims& dims, const std::vector<int>& perm) {
    Dims nd;
    auto map = permutation_map(dims, perm, nd);
    const std::size_t D = map.size();
    if (!rho.square() || rho.rows() != D) throw ShapeError("operator does not match dims");
    CMatrix out(D, D);
    for (std::size_t a = 0; a < D; ++a)
        for (std::size_t b = 0; b < D; ++b) out(map[a], map[b]) = rho(a, b);
    return out;
}

DensityState permute_subsystems(const DensityState& s, const std::vector<int>& perm) {
    Dims nd;
    permutation_map(s.dims(), perm, nd);
    return DensityState::unchecked(nd, permute_subsystems(s.matrix(), s.dims(), perm));
}

CVector permute_vector(const CVector& psi, const Dims& dims, const std::vector<int>& perm) {
    Dims nd;
    auto map = permutation_map(dims, perm, nd);
    if (psi.size() != map.size()) throw ShapeError("vector does not match dims");
    CVector out(psi.size());
    for (std::size_t a = 0; a < psi.size(); ++a) out[map[a]] = psi[a];
    return out;
}

DensityState group_by(const DensityState& s, const SubRepartition& p) {
    if (static_cast<std::size_t>(p.n()) != s.parties()) throw InvalidArgument("partition does not match the number of subsystems");
    const auto support = mask_members(p.support());
    DensityState reduced = support.size() == s.parties() ? s : partial_trace(s, support);
    std::vector<int> position(s.parties(), -1);
    for (std::size_t i = 0; i < support.size(); ++i) position[static_cast<std::size_t>(support[i])] = static_cast<int>(i);
    std::vector<int> perm;
    Dims grouped;
    for (const auto& block : p.blocks()) {
        std::size_t d = 1;
        for (int member : block) {
            perm.push_back(position[static_cast<std::size_t>(member)]);
            d *= s.dims()[static_cast<std::size_t>(member)];
        }
        grouped.push_back(d);
    }
    bool identity = true;
    for (std::size_t i = 0; i < perm.size(); ++i) identity = identity && perm[i] == static_cast<int>(i);
    CMatrix m = identity ? reduced.matrix() : permute_subsystems(reduced.matrix(), reduced.dims(), perm);
    return DensityState::unchecked(std::move(grouped), std::move(m));
}

CMatrix apply_local_left(const CMatrix& m, const Dims& dims, std::size_t site, const CMatrix& a) {
    const std::size_t D = total_dim(dims);
    if (m.rows() != D) throw ShapeError("operator does not match dims");
    const std::size_t d = dims.at(site);
    if (a.rows() != d || a.cols() != d) throw ShapeError("local operator does not match the subsystem");
    std::size_t lo = 1;
    for (std::size_t i = site + 1; i < dims.size(); ++i) lo *= dims[i];
    const std::size_t hi = D / (lo * d);
    const std::size_t cols = m.cols();
    CMatrix out(D, cols);
    for (std::size_t h = 0; h < hi; ++h)
        for (std::size_t y = 0; y < d; ++y)
            for (std::size_t x = 0; x < d; ++x) {
                const cplx ayx = a(y, x);
                if (ayx == cplx(0)) continue;
                for (std::size_t l = 0; l < lo; ++l) {
                    const std::size_t ro = (h * d + y) * lo + l;
                    const std::size_t ri = (h * d + x) * lo + l;
                    const cplx* src = m.data() + ri * cols;
                    cplx* dst = out.data() + ro * cols;
                    for (std::size_t c = 0; c < cols; ++c) dst[c] += ayx * src[c];
                }
            }
    return out;
}

double von_neumann_entropy(const CMatrix& rho) {
    double s = 0;
    for (double x : herm_eigvals(rho))
        if (x > 1e-300) s -= x * std::log2(x);
    return std::max(0.0, s);
}

double tsallis_entropy(const CMatrix& rho, double q) {
    if (q <= 0) throw InvalidArgument("Tsallis parameter must be positive");
    if (std::abs(q - 1.0) < 1e-12) return von_neumann_entropy(rho) * std::log(2.0);
    double s = 0;
    for (double x : herm_eigvals(rho))
        if (x > 0) s += std::pow(x, q);
    return std::max(0.0, (1.0 - s) / (q - 1.0));
}

double purity(const CMatrix& rho) { return trace_product_re(rho, rho); }

bool is_pure(const DensityState& s) { return purity(s.matrix()) >= 1.0 - tol().purity; }

const char* to_string(ChannelTag t) {
    switch (t) {
        case ChannelTag::incoherent_local: return "incoherent-local";
        case ChannelTag::real_local: return "real-local";
        case ChannelTag::local_product: return "local-product";
        case ChannelTag::steering_free: return "steering-free";
    }
    return "unknown";
}

void KrausChannel::validate() const {
    if (local.size() != dims.size()) throw PreconditionError("channel needs one Kraus set per subsystem");
    for (std::size_t s = 0; s < dims.size(); ++s) {
        const auto& ks = local[s];
        if (ks.empty()) throw PreconditionError("empty Kraus set");
        CMatrix sum(dims[s], dims[s]);
        for (const auto& k : ks) {
            if (k.rows() != dims[s] || k.cols() != dims[s]) throw ShapeError("Kraus operator does not match the subsystem");
            sum += k.adjoint() * k;
            if (tag == ChannelTag::incoherent_local) {
                for (std::size_t c = 0; c < k.cols(); ++c) {
                    int nz = 0;
                    for (std::size_t r = 0; r < k.rows(); ++r)
                        if (std::abs(k(r, c)) > 1e-12) ++nz;
                    if (nz > 1) throw PreconditionError("incoherent Kraus operator has a column with several non-zeros");
                }
            }
            if (tag == ChannelTag::real_local)
                for (const auto& x : k.storage())
                    if (std::abs(x.imag()) > 1e-12) throw PreconditionError("real channel has a complex Kraus operator");
        }
        if ((sum - CMatrix::identity(dims[s])).max_abs() > 1e-9) throw PreconditionError("Kraus set is not trace preserving");
        if (tag == ChannelTag::steering_free && s < split) {
            if (ks.size() != 1 || (ks[0] - CMatrix::identity(dims[s])).max_abs() > 1e-12)
                throw PreconditionError("steering-free channel acts on an untrusted subsystem");
        }
    }
}

std::vector<CMatrix> KrausChannel::kraus_ops() const {
    std::vector<CMatrix> ops{CMatrix::identity(1)};
    for (const auto& ks : local) {
        std::vector<CMatrix> next;
        for (const auto& a : ops)
            for (const auto& k : ks) next.push_back(kron(a, k));
        ops = std::move(next);
    }
    return ops;
}

DensityState apply_channel(const DensityState& s, const KrausChannel& ch) {
    if (ch.dims != s.dims()) throw ShapeError("channel does not match the state");
    ch.validate();
    CMatrix rho = s.matrix();
    for (std::size_t site = 0; site < s.parties(); ++site) {
        const auto& ks = ch.local[site];
        if (ks.size() == 1 && (ks[0] - CMatrix::identity(s.dims()[site])).max_abs() == 0.0) continue;
        CMatrix acc(rho.rows(), rho.cols());
        for (const auto& k : ks) {
            CMatrix left = apply_local_left(rho, s.dims(), site, k);
            // (K rho K^dagger) = (K (K rho)^dagger)^dagger
            acc += apply_local_left(left.adjoint(), s.dims(), site, k).adjoint();
        }
        rho = hermitian_part(acc);
    }
    return DensityState::unchecked(s.dims(), std::move(rho));
}

namespace {

std::vector<CMatrix> normalized_kraus(std::vector<CMatrix> g) {
    CMatrix s(g[0].cols(), g[0].cols());
    for (const auto& k : g) s += k.adjoint() * k;
    CMatrix inv_sqrt = herm_function(s, [](double x) { return 1.0 / std::sqrt(x); });
    for (auto& k : g) k = k * inv_sqrt;
    return g;
}

std::vector<CMatrix> incoherent_set(std::size_t d, Rng& rng) {
    const std::size_t count = 2 + rng.index(2);
    std::vector<CMatrix> ks;
    for (std::size_t n = 0; n < count; ++n) {
        std::vector<std::size_t> perm(d);
        std::iota(perm.begin(), perm.end(), 0);
        for (std::size_t i = d; i-- > 1;) std::swap(perm[i], perm[rng.index(i + 1)]);
        CMatrix k(d, d);
        for (std::size_t c = 0; c < d; ++c)
            if (n == 0 || rng.uniform() < 0.6) k(perm[c], c) = rng.cnormal();
        ks.push_back(k);
    }
    // Each column carries at most one non-zero per operator, so the sum of
    // K^dagger K is diagonal and a per-column rescaling completes the set.
    for (std::size_t c = 0; c < d; ++c) {
        double norm = 0;
        for (const auto& k : ks)
            for (std::size_t r = 0; r < d; ++r) norm += std::norm(k(r, c));
        norm = std::sqrt(norm);
        for (auto& k : ks)
            for (std::size_t r = 0; r < d; ++r) k(r, c) /= norm;
    }
    return ks;
}

}  // namespace

KrausChannel sample_channel(const Dims& dims, ChannelTag tag, Rng& rng, std::size_t split) {
    KrausChannel ch;
    ch.dims = dims;
    ch.tag = tag;
    ch.split = split;
    for (std::size_t s = 0; s < dims.size(); ++s) {
        const std::size_t d = dims[s];
        switch (tag) {
            case ChannelTag::incoherent_local: ch.local.push_back(incoherent_set(d, rng)); break;
            case ChannelTag::real_local: {
                std::vector<CMatrix> g;
                for (int j = 0; j < 2; ++j) g.push_back(to_complex(real_ginibre(d, d, rng)));
                auto ks = normalized_kraus(std::move(g));
                for (auto& k : ks)
                    for (auto& x : k.storage()) x = cplx(x.real(), 0.0);
                ch.local.push_back(std::move(ks));
                break;
            }
            case ChannelTag::steering_free:
                if (s < split) {
                    ch.local.push_back({CMatrix::identity(d)});
                    break;
                }
                [[fallthrough]];
            case ChannelTag::local_product: {
                std::vector<CMatrix> g;
                for (int j = 0; j < 2; ++j) g.push_back(ginibre(d, d, rng));
                ch.local.push_back(normalized_kraus(std::move(g)));
                break;
            }
        }
    }
    ch.validate();
    return ch;
}

KrausChannel local_unitary_channel(const Dims& dims, const std::vector<CMatrix>& unitaries, ChannelTag tag) {
    KrausChannel ch;
    ch.dims = dims;
    ch.tag = tag;
    for (const auto& u : unitaries) ch.local.push_back({u});
    ch.validate();
    return ch;
}

DensityState sample_pure(const Dims& dims, Rng& rng) { return pure_state(dims, random_pure(total_dim(dims), rng)); }

DensityState sample_product_pure(const Dims& dims, Rng& rng) {
    std::vector<CVector> f;
    for (auto d : dims) f.push_back(random_pure(d, rng));
    return pure_state(dims, product_vector(f));
}

DensityState sample_separable(const Dims& dims, std::size_t terms, Rng& rng) {
    const std::size_t D = total_dim(dims);
    CMatrix rho(D, D);
    std::vector<double> w(terms);
    double tot = 0;
    for (auto& x : w) {
        x = rng.uniform() + 1e-3;
        tot += x;
    }
    for (std::size_t k = 0; k < terms; ++k) rho += sample_product_pure(dims, rng).matrix() * cplx(w[k] / tot);
    return DensityState::unchecked(dims, hermitian_part(rho));
}

DensityState sample_ginibre(const Dims& dims, std::size_t rank, Rng& rng) {
    const std::size_t D = total_dim(dims);
    if (rank == 0) rank = D;
    CMatrix g = ginibre(D, rank, rng);
    CMatrix rho = g * g.adjoint();
    rho /= rho.trace();
    return DensityState::unchecked(dims, hermitian_part(rho));
}

namespace {

// Random assignment of the n subsystems into blocks accepted by `ok`.
std::vector<std::vector<int>> random_blocks(std::size_t n, Rng& rng, const std::function<bool(const std::vector<std::vector<int>>&)>& ok) {
    for (int attempt = 0; attempt < 100000; ++attempt) {
        std::vector<std::vector<int>> blocks(n);
        for (std::size_t i = 0; i < n; ++i) blocks[rng.index(n)].push_back(static_cast<int>(i));
        blocks.erase(std::remove_if(blocks.begin(), blocks.end(), [](const auto& b) { return b.empty(); }), blocks.end());
        if (ok(blocks)) return blocks;
    }
    throw InvalidArgument("could not draw a partition with the requested shape");
}

DensityState product_over_blocks(const Dims& dims, const std::vector<std::vector<int>>& blocks, Rng& rng) {
    std::vector<CVector> factors;
    std::vector<int> order;
    Dims grouped_dims;
    for (const auto& b : blocks) {
        std::size_t d = 1;
        for (int i : b) {
            d *= dims[static_cast<std::size_t>(i)];
            order.push_back(i);
            grouped_dims.push_back(dims[static_cast<std::size_t>(i)]);
        }
        factors.push_back(random_pure(d, rng));
    }
    CVector psi = product_vector(factors);
    // psi lives in the block-ordered factor sequence; move back to natural order.
    std::vector<int> inverse(order.size());
    for (std::size_t k = 0; k < order.size(); ++k) inverse[static_cast<std::size_t>(order[k])] = static_cast<int>(k);
    return pure_state(dims, permute_vector(psi, grouped_dims, inverse));
}

}  // namespace

DensityState sample_k_separable_pure(const Dims& dims, std::size_t k, Rng& rng) {
    if (k < 1 || k > dims.size()) throw InvalidArgument("k must lie in [1, number of subsystems]");
    auto blocks = random_blocks(dims.size(), rng, [k](const auto& b) { return b.size() == k; });
    return product_over_blocks(dims, blocks, rng);
}

DensityState sample_k_producible_pure(const Dims& dims, std::size_t k, Rng& rng) {
    if (k < 1) throw InvalidArgument("k must be positive");
    auto blocks = random_blocks(dims.size(), rng, [k](const auto& b) {
        return std::all_of(b.begin(), b.end(), [k](const auto& x) { return x.size() <= k; });
    });
    return product_over_blocks(dims, blocks, rng);
}

DensityState sample_incoherent(const Dims& dims, Rng& rng) {
    const std::size_t D = total_dim(dims);
    CMatrix rho(D, D);
    double tot = 0;
    std::vector<double> p(D);
    for (auto& x : p) {
        x = rng.uniform() + 1e-3;
        tot += x;
    }
    for (std::size_t i = 0; i < D; ++i) rho(i, i) = p[i] / tot;
    return DensityState::unchecked(dims, std::move(rho));
}

DensityState sample_real(const Dims& dims, Rng& rng) {
    const std::size_t D = total_dim(dims);
    RMatrix g = real_ginibre(D, D, rng);
    RMatrix r = g * g.transpose();
    r /= r.trace();
    return DensityState::unchecked(dims, to_complex(r));
}

}  // namespace mqc

#include "mqc/gaussian.hpp"

#include <cmath>
#include <numeric>

#include "mqc/config.hpp"

namespace mqc {

namespace {

std::size_t sum_modes(const std::vector<std::size_t>& m) { return std::accumulate(m.begin(), m.end(), std::size_t{0}); }

bool symmetric(const RMatrix& a, double rel) {
    double d = 0;
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t j = 0; j < a.cols(); ++j) d = std::max(d, std::abs(a(i, j) - a(j, i)));
    return d <= rel * std::max(1.0, a.max_abs());
}

RMatrix symmetrized(const RMatrix& a) {
    RMatrix s = a + a.transpose();
    s *= 0.5;
    return s;
}

// Permutation from (q1, p1, q2, p2, ...) to (q1, q2, ..., p1, p2, ...).
std::vector<std::size_t> qp_order(std::size_t modes) {
    std::vector<std::size_t> idx;
    for (std::size_t k = 0; k < modes; ++k) idx.push_back(2 * k);
    for (std::size_t k = 0; k < modes; ++k) idx.push_back(2 * k + 1);
    return idx;
}

double indicator(double z) { return z > tol().indicator ? 1.0 : 0.0; }

}  // namespace

RMatrix symplectic_form(std::size_t modes) {
    RMatrix w(2 * modes, 2 * modes);
    for (std::size_t k = 0; k < modes; ++k) {
        w(2 * k, 2 * k + 1) = 1.0;
        w(2 * k + 1, 2 * k) = -1.0;
    }
    return w;
}

double uncertainty_margin(const RMatrix& cov) {
    const std::size_t n = cov.rows();
    RMatrix w = symplectic_form(n / 2);
    CMatrix h(n, n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) h(i, j) = cplx(cov(i, j), w(i, j));
    return min_eigval(h);
}

std::vector<double> symplectic_eigenvalues(const RMatrix& cov) {
    if (!cov.square() || cov.rows() % 2) throw ShapeError("covariance must be square of even size");
    const std::size_t n = cov.rows();
    // i S Omega S with S = cov^(1/2) is Hermitian and similar to i Omega cov.
    RMatrix s = sqrtm_psd(symmetrized(cov));
    RMatrix sws = s * symplectic_form(n / 2) * s;
    CMatrix h(n, n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) h(i, j) = cplx(0.0, sws(i, j));
    auto ev = herm_eigvals(hermitian_part(h));
    std::vector<double> nu(ev.begin(), ev.begin() + static_cast<std::ptrdiff_t>(n / 2));
    std::sort(nu.begin(), nu.end());
    return nu;
}

GaussianState::GaussianState(std::vector<std::size_t> modes_per_party, RMatrix cov, std::vector<double> mean)
    : modes_(std::move(modes_per_party)), cov_(std::move(cov)), mean_(std::move(mean)) {
    if (modes_.empty()) throw InvalidArgument("Gaussian state needs at least one party");
    for (auto m : modes_)
        if (m == 0) throw InvalidArgument("every party needs at least one mode");
    const std::size_t n = 2 * sum_modes(modes_);
    if (!cov_.square() || cov_.rows() != n) throw ShapeError("covariance does not match modes_per_party");
    if (mean_.size() != n) throw ShapeError("mean does not match modes_per_party");
    if (!symmetric(cov_, 1e-10)) throw PreconditionError("covariance matrix is not symmetric");
    cov_ = symmetrized(cov_);
    if (uncertainty_margin(cov_) < -tol().gauss_uncertainty) throw PreconditionError("covariance violates the uncertainty relation");
}

GaussianState GaussianState::unchecked(std::vector<std::size_t> modes_per_party, RMatrix cov, std::vector<double> mean) {
    GaussianState g;
    g.modes_ = std::move(modes_per_party);
    g.cov_ = std::move(cov);
    g.mean_ = std::move(mean);
    return g;
}

std::vector<std::size_t> quadrature_indices(const std::vector<std::size_t>& modes_per_party, const std::vector<int>& parties) {
    std::vector<std::size_t> offset(modes_per_party.size() + 1, 0);
    for (std::size_t i = 0; i < modes_per_party.size(); ++i) offset[i + 1] = offset[i] + modes_per_party[i];
    std::vector<std::size_t> idx;
    for (int p : parties) {
        if (p < 0 || static_cast<std::size_t>(p) >= modes_per_party.size()) throw InvalidArgument("party index out of range");
        for (std::size_t m = offset[static_cast<std::size_t>(p)]; m < offset[static_cast<std::size_t>(p) + 1]; ++m) {
            idx.push_back(2 * m);
            idx.push_back(2 * m + 1);
        }
    }
    return idx;
}

GaussianState g_partial_trace(const GaussianState& g, const std::vector<int>& keep_in) {
    std::vector<int> keep = keep_in;
    std::sort(keep.begin(), keep.end());
    if (std::adjacent_find(keep.begin(), keep.end()) != keep.end()) throw InvalidArgument("repeated party index");
    auto idx = quadrature_indices(g.modes_per_party(), keep);
    std::vector<std::size_t> modes;
    for (int k : keep) modes.push_back(g.modes_per_party()[static_cast<std::size_t>(k)]);
    std::vector<double> mean;
    for (auto i : idx) mean.push_back(g.mean()[i]);
    return GaussianState::unchecked(std::move(modes), submatrix(g.cov(), idx), std::move(mean));
}

GaussianState g_group_by(const GaussianState& g, const SubRepartition& p) {
    if (static_cast<std::size_t>(p.n()) != g.parties()) throw InvalidArgument("partition does not match the number of parties");
    std::vector<std::size_t> idx;
    std::vector<std::size_t> modes;
    for (const auto& block : p.blocks()) {
        auto bi = quadrature_indices(g.modes_per_party(), block);
        idx.insert(idx.end(), bi.begin(), bi.end());
        modes.push_back(bi.size() / 2);
    }
    std::vector<double> mean;
    for (auto i : idx) mean.push_back(g.mean()[i]);
    return GaussianState::unchecked(std::move(modes), submatrix(g.cov(), idx), std::move(mean));
}

double m_nonproduct(const GaussianState& g, const SubRepartition& p) {
    GaussianState r = g_group_by(g, p);
    double denom = 1.0;
    std::vector<int> one(1);
    for (std::size_t j = 0; j < r.parties(); ++j) {
        one[0] = static_cast<int>(j);
        denom *= det(submatrix(r.cov(), quadrature_indices(r.modes_per_party(), one)));
    }
    return 1.0 - det(r.cov()) / denom;
}

double g_imaginarity(const GaussianState& g) {
    const std::size_t m = g.modes();
    auto order = qp_order(m);
    RMatrix reordered = submatrix(g.cov(), order);
    std::vector<std::size_t> qi(m), pi(m);
    std::iota(qi.begin(), qi.end(), 0);
    std::iota(pi.begin(), pi.end(), m);
    double pnorm = 0;
    for (std::size_t k = 0; k < m; ++k) pnorm += std::abs(g.mean()[2 * k + 1]);
    return 1.0 - det(reordered) / (det(submatrix(reordered, qi)) * det(submatrix(reordered, pi))) + indicator(pnorm);
}

double g_coherence(const GaussianState& g) {
    for (auto m : g.modes_per_party())
        if (m != 1) throw InvalidArgument("g_coherence needs a single mode per party");
    const std::size_t n = g.modes();
    double prod = 1.0;
    double h = 0;
    for (std::size_t k = 0; k < n; ++k) {
        const double a = g.cov()(2 * k, 2 * k), b = g.cov()(2 * k, 2 * k + 1), d = g.cov()(2 * k + 1, 2 * k + 1);
        prod *= a * a + 2 * b * b + d * d;
        h += indicator(std::abs(g.mean()[2 * k]) + std::abs(g.mean()[2 * k + 1]));
    }
    return 1.0 - std::ldexp(det(g.cov()), static_cast<int>(n)) / prod + h;
}

GaussianState g_vacuum(const std::vector<std::size_t>& modes_per_party) {
    const std::size_t n = 2 * sum_modes(modes_per_party);
    return GaussianState(modes_per_party, RMatrix::identity(n), std::vector<double>(n, 0.0));
}

GaussianState tmsv(double r) {
    const double c = std::cosh(2 * r), s = std::sinh(2 * r);
    RMatrix cov{{c, 0, s, 0}, {0, c, 0, -s}, {s, 0, c, 0}, {0, -s, 0, c}};
    return GaussianState({1, 1}, cov, std::vector<double>(4, 0.0));
}

GaussianState squeezed_vacuum(double r) {
    RMatrix cov{{std::exp(2 * r), 0}, {0, std::exp(-2 * r)}};
    return GaussianState({1}, cov, {0.0, 0.0});
}

GaussianState g_direct_sum(const GaussianState& a, const GaussianState& b) {
    auto modes = a.modes_per_party();
    modes.insert(modes.end(), b.modes_per_party().begin(), b.modes_per_party().end());
    auto mean = a.mean();
    mean.insert(mean.end(), b.mean().begin(), b.mean().end());
    return GaussianState::unchecked(std::move(modes), direct_sum(a.cov(), b.cov()), std::move(mean));
}

RMatrix random_symplectic(std::size_t modes, Rng& rng, double scale) {
    RMatrix a = real_ginibre(2 * modes, 2 * modes, rng);
    a = symmetrized(a) * scale;
    return expm(symplectic_form(modes) * a);
}

GaussianState g_random(const std::vector<std::size_t>& modes_per_party, Rng& rng) {
    const std::size_t m = sum_modes(modes_per_party);
    RMatrix s = random_symplectic(m, rng);
    RMatrix d(2 * m, 2 * m);
    for (std::size_t k = 0; k < m; ++k) d(2 * k, 2 * k) = d(2 * k + 1, 2 * k + 1) = rng.uniform(1.0, 2.0);
    std::vector<double> mean(2 * m);
    for (auto& x : mean) x = rng.normal();
    return GaussianState::unchecked(modes_per_party, symmetrized(s * d * s.transpose()), std::move(mean));
}

GaussianState g_sample_product(const std::vector<std::size_t>& modes_per_party, Rng& rng) {
    GaussianState acc = g_random({modes_per_party[0]}, rng);
    for (std::size_t i = 1; i < modes_per_party.size(); ++i) acc = g_direct_sum(acc, g_random({modes_per_party[i]}, rng));
    return acc;
}

GaussianState g_sample_real(const std::vector<std::size_t>& modes_per_party, Rng& rng) {
    const std::size_t m = sum_modes(modes_per_party);
    // S = X (+) X^{-T} in (q..., p...) order is symplectic and has no q-p coupling.
    RMatrix x = RMatrix::identity(m) + real_ginibre(m, m, rng) * 0.3;
    RMatrix xit = inverse(x).transpose();
    RMatrix cov_qp(2 * m, 2 * m);
    for (std::size_t k = 0; k < m; ++k) {
        const double nu = rng.uniform(1.0, 2.0);
        for (std::size_t i = 0; i < m; ++i)
            for (std::size_t j = 0; j < m; ++j) {
                cov_qp(i, j) += x(i, k) * nu * x(j, k);
                cov_qp(m + i, m + j) += xit(i, k) * nu * xit(j, k);
            }
    }
    RMatrix cov(2 * m, 2 * m);
    auto order = qp_order(m);
    for (std::size_t i = 0; i < 2 * m; ++i)
        for (std::size_t j = 0; j < 2 * m; ++j) cov(order[i], order[j]) = cov_qp(i, j);
    std::vector<double> mean(2 * m, 0.0);
    for (std::size_t k = 0; k < m; ++k) mean[2 * k] = rng.normal();
    return GaussianState::unchecked(modes_per_party, symmetrized(cov), std::move(mean));
}

GaussianState g_sample_incoherent(std::size_t parties, Rng& rng) {
    RMatrix cov(2 * parties, 2 * parties);
    for (std::size_t k = 0; k < parties; ++k) cov(2 * k, 2 * k) = cov(2 * k + 1, 2 * k + 1) = rng.uniform(1.0, 3.0);
    return GaussianState::unchecked(std::vector<std::size_t>(parties, 1), cov, std::vector<double>(2 * parties, 0.0));
}

const char* to_string(GaussianChannelTag t) {
    switch (t) {
        case GaussianChannelTag::local: return "gaussian-local";
        case GaussianChannelTag::real_local: return "gaussian-real-local";
        case GaussianChannelTag::attenuation_rotation: return "attenuation-rotation";
    }
    return "unknown";
}

void GaussianChannel::validate() const {
    const std::size_t n = 2 * sum_modes(modes_per_party);
    if (x.rows() != n || x.cols() != n || y.rows() != n || y.cols() != n || shift.size() != n)
        throw ShapeError("Gaussian channel does not match modes_per_party");
    if (!symmetric(y, 1e-10)) throw PreconditionError("Gaussian channel noise matrix is not symmetric");
    RMatrix w = symplectic_form(n / 2);
    RMatrix a = w - x * w * x.transpose();
    CMatrix h(n, n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) h(i, j) = cplx(y(i, j), a(i, j));
    if (min_eigval(hermitian_part(h)) < -tol().gauss_uncertainty) throw PreconditionError("Gaussian channel is not completely positive");
    // Locality: no coupling between different parties.
    std::vector<std::size_t> owner;
    for (std::size_t p = 0; p < modes_per_party.size(); ++p)
        for (std::size_t k = 0; k < 2 * modes_per_party[p]; ++k) owner.push_back(p);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
            if (owner[i] != owner[j] && (std::abs(x(i, j)) > 1e-12 || std::abs(y(i, j)) > 1e-12))
                throw PreconditionError("Gaussian channel is not local");
    if (tag == GaussianChannelTag::real_local) {
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t j = 0; j < n; ++j)
                if ((i % 2) != (j % 2) && (std::abs(x(i, j)) > 1e-12 || std::abs(y(i, j)) > 1e-12))
                    throw PreconditionError("real Gaussian channel couples q and p");
            if (i % 2 == 1 && std::abs(shift[i]) > 1e-12) throw PreconditionError("real Gaussian channel displaces momentum");
        }
    }
    if (tag == GaussianChannelTag::attenuation_rotation) {
        for (std::size_t i = 0; i < n; ++i) {
            if (std::abs(shift[i]) > 1e-12) throw PreconditionError("attenuation-rotation channel displaces");
            for (std::size_t j = 0; j < n; ++j)
                if (i / 2 != j / 2 && (std::abs(x(i, j)) > 1e-12 || std::abs(y(i, j)) > 1e-12))
                    throw PreconditionError("attenuation-rotation channel couples modes");
        }
        for (std::size_t k = 0; k < n / 2; ++k) {
            const double a0 = x(2 * k, 2 * k), b0 = x(2 * k, 2 * k + 1);
            if (std::abs(x(2 * k + 1, 2 * k + 1) - a0) > 1e-12 || std::abs(x(2 * k + 1, 2 * k) + b0) > 1e-12 ||
                std::abs(y(2 * k, 2 * k) - y(2 * k + 1, 2 * k + 1)) > 1e-12 || std::abs(y(2 * k, 2 * k + 1)) > 1e-12)
                throw PreconditionError("attenuation-rotation channel has the wrong form");
        }
    }
}

GaussianState g_apply(const GaussianState& g, const GaussianChannel& ch) {
    if (ch.modes_per_party != g.modes_per_party()) throw ShapeError("channel does not match the state");
    ch.validate();
    RMatrix cov = ch.x * g.cov() * ch.x.transpose() + ch.y;
    std::vector<double> mean(g.mean().size());
    for (std::size_t i = 0; i < mean.size(); ++i) {
        double s = ch.shift[i];
        for (std::size_t j = 0; j < mean.size(); ++j) s += ch.x(i, j) * g.mean()[j];
        mean[i] = s;
    }
    return GaussianState::unchecked(g.modes_per_party(), symmetrized(cov), std::move(mean));
}

GaussianChannel sample_gaussian_channel(const std::vector<std::size_t>& modes_per_party, GaussianChannelTag tag, Rng& rng) {
    const std::size_t n = 2 * sum_modes(modes_per_party);
    GaussianChannel ch;
    ch.modes_per_party = modes_per_party;
    ch.tag = tag;
    ch.x = RMatrix(n, n);
    ch.y = RMatrix(n, n);
    ch.shift.assign(n, 0.0);
    std::size_t off = 0;
    for (auto mp : modes_per_party) {
        const std::size_t b = 2 * mp;
        RMatrix xb(b, b), yb(b, b);
        if (tag == GaussianChannelTag::attenuation_rotation) {
            for (std::size_t k = 0; k < mp; ++k) {
                const double eta = rng.uniform(0.2, 1.0), th = rng.uniform(0.0, 6.283185307179586);
                const double extra = 0.3 * rng.uniform();
                const double s = std::sqrt(eta);
                xb(2 * k, 2 * k) = s * std::cos(th);
                xb(2 * k, 2 * k + 1) = s * std::sin(th);
                xb(2 * k + 1, 2 * k) = -s * std::sin(th);
                xb(2 * k + 1, 2 * k + 1) = s * std::cos(th);
                yb(2 * k, 2 * k) = yb(2 * k + 1, 2 * k + 1) = 1.0 - eta + extra;
            }
        } else {
            RMatrix g = real_ginibre(b, b, rng) * (0.8 / std::sqrt(static_cast<double>(b)));
            RMatrix noise = real_ginibre(b, b, rng) * 0.3;
            noise = noise * noise.transpose() / static_cast<double>(b);
            if (tag == GaussianChannelTag::real_local)
                for (std::size_t i = 0; i < b; ++i)
                    for (std::size_t j = 0; j < b; ++j)
                        if ((i % 2) != (j % 2)) g(i, j) = noise(i, j) = 0.0;
            xb = g;
            RMatrix w = symplectic_form(mp);
            const double c = op_norm(w - xb * w * xb.transpose());
            yb = RMatrix::identity(b) * c + noise;
        }
        for (std::size_t i = 0; i < b; ++i) {
            for (std::size_t j = 0; j < b; ++j) {
                ch.x(off + i, off + j) = xb(i, j);
                ch.y(off + i, off + j) = yb(i, j);
            }
            if (tag == GaussianChannelTag::local || (tag == GaussianChannelTag::real_local && i % 2 == 0))
                ch.shift[off + i] = 0.5 * rng.normal();
        }
        off += b;
    }
    ch.y = symmetrized(ch.y);
    ch.validate();
    return ch;
}

}  // namespace mqc

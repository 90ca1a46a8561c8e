#include "mqc/rng.hpp"

#include <cmath>
#include <numbers>

namespace mqc {

double Rng::normal() {
    if (has_spare_) {
        has_spare_ = false;
        return spare_;
    }
    double u1 = uniform();
    while (u1 <= 0.0) u1 = uniform();
    const double u2 = uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double a = 2.0 * std::numbers::pi * u2;
    spare_ = r * std::sin(a);
    has_spare_ = true;
    return r * std::cos(a);
}

CMatrix ginibre(std::size_t rows, std::size_t cols, Rng& rng) {
    CMatrix g(rows, cols);
    for (auto& x : g.storage()) x = rng.cnormal();
    return g;
}

RMatrix real_ginibre(std::size_t rows, std::size_t cols, Rng& rng) {
    RMatrix g(rows, cols);
    for (auto& x : g.storage()) x = rng.normal();
    return g;
}

CMatrix haar_unitary(std::size_t n, Rng& rng) {
    CMatrix g = ginibre(n, n, rng);
    // Modified Gram-Schmidt on columns.
    for (std::size_t k = 0; k < n; ++k) {
        for (std::size_t j = 0; j < k; ++j) {
            cplx p = 0;
            for (std::size_t i = 0; i < n; ++i) p += std::conj(g(i, j)) * g(i, k);
            for (std::size_t i = 0; i < n; ++i) g(i, k) -= p * g(i, j);
        }
        double nrm = 0;
        for (std::size_t i = 0; i < n; ++i) nrm += std::norm(g(i, k));
        nrm = std::sqrt(nrm);
        for (std::size_t i = 0; i < n; ++i) g(i, k) /= nrm;
    }
    return g;
}

CVector random_pure(std::size_t d, Rng& rng) {
    CVector v(d);
    double n = 0;
    for (auto& x : v) {
        x = rng.cnormal();
        n += std::norm(x);
    }
    n = std::sqrt(n);
    for (auto& x : v) x /= n;
    return v;
}

CMatrix random_hermitian(std::size_t n, Rng& rng) {
    CMatrix g = ginibre(n, n, rng);
    CMatrix h = hermitian_part(g);
    h /= cplx(h.frobenius_norm());
    return h;
}

}  // namespace mqc

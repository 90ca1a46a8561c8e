#pragma once

#include <cstdint>
#include <random>

#include "mqc/linalg.hpp"

namespace mqc {

// Seeded generator used by every sampler. The engine is std::mt19937_64;
// uniform and normal variates are derived locally (53-bit mantissa and
// Box-Muller) so that streams do not depend on the standard library's
// distribution implementations.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    std::uint64_t next() { return engine_(); }
    double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
    std::size_t index(std::size_t n) { return static_cast<std::size_t>(uniform() * static_cast<double>(n)) % n; }
    double normal();
    cplx cnormal() { return cplx(normal(), normal()) * std::sqrt(0.5); }

    // Independent child stream, deterministic in the parent's state.
    Rng split() { return Rng(next() ^ 0x9e3779b97f4a7c15ULL); }

private:
    std::mt19937_64 engine_;
    bool has_spare_ = false;
    double spare_ = 0;
};

CMatrix ginibre(std::size_t rows, std::size_t cols, Rng& rng);
RMatrix real_ginibre(std::size_t rows, std::size_t cols, Rng& rng);
// Haar distributed unitary (QR of a Ginibre matrix with phase fix).
CMatrix haar_unitary(std::size_t n, Rng& rng);
CVector random_pure(std::size_t d, Rng& rng);
// Random Hermitian matrix with unit Frobenius norm.
CMatrix random_hermitian(std::size_t n, Rng& rng);

}  // namespace mqc

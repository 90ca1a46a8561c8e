#pragma once

#include <cstddef>
#include <vector>

#include "mqc/linalg.hpp"
#include "mqc/partitions.hpp"
#include "mqc/rng.hpp"

namespace mqc {

// Gaussian state in vacuum-normalized convention: the vacuum covariance is
// the identity and quadratures are ordered (q1, p1, q2, p2, ...).
class GaussianState {
public:
    GaussianState() = default;
    GaussianState(std::vector<std::size_t> modes_per_party, RMatrix cov, std::vector<double> mean);
    static GaussianState unchecked(std::vector<std::size_t> modes_per_party, RMatrix cov, std::vector<double> mean);

    const std::vector<std::size_t>& modes_per_party() const { return modes_; }
    const RMatrix& cov() const { return cov_; }
    const std::vector<double>& mean() const { return mean_; }
    std::size_t parties() const { return modes_.size(); }
    std::size_t modes() const { return cov_.rows() / 2; }

private:
    std::vector<std::size_t> modes_;
    RMatrix cov_;
    std::vector<double> mean_;
};

RMatrix symplectic_form(std::size_t modes);
std::vector<double> symplectic_eigenvalues(const RMatrix& cov);
// Smallest eigenvalue of cov + i Omega.
double uncertainty_margin(const RMatrix& cov);

// Indices of the quadratures of every mode owned by the given parties.
std::vector<std::size_t> quadrature_indices(const std::vector<std::size_t>& modes_per_party, const std::vector<int>& parties);

GaussianState g_partial_trace(const GaussianState& g, const std::vector<int>& keep);
// Reduces to the support of P and merges each block into one party.
GaussianState g_group_by(const GaussianState& g, const SubRepartition& p);

double m_nonproduct(const GaussianState& g, const SubRepartition& p);
double g_imaginarity(const GaussianState& g);
// Requires a single mode per party.
double g_coherence(const GaussianState& g);

GaussianState g_vacuum(const std::vector<std::size_t>& modes_per_party);
GaussianState tmsv(double r);
GaussianState squeezed_vacuum(double r);
GaussianState g_direct_sum(const GaussianState& a, const GaussianState& b);

// S = exp(Omega A) for a random symmetric A, hence det S = 1.
RMatrix random_symplectic(std::size_t modes, Rng& rng, double scale = 0.5);
GaussianState g_random(const std::vector<std::size_t>& modes_per_party, Rng& rng);
GaussianState g_sample_product(const std::vector<std::size_t>& modes_per_party, Rng& rng);
GaussianState g_sample_real(const std::vector<std::size_t>& modes_per_party, Rng& rng);
GaussianState g_sample_incoherent(std::size_t parties, Rng& rng);

enum class GaussianChannelTag { local, real_local, attenuation_rotation };
const char* to_string(GaussianChannelTag t);

// cov -> X cov X^T + Y, mean -> X mean + shift.
struct GaussianChannel {
    std::vector<std::size_t> modes_per_party;
    GaussianChannelTag tag = GaussianChannelTag::local;
    RMatrix x;
    RMatrix y;
    std::vector<double> shift;

    void validate() const;
};

GaussianState g_apply(const GaussianState& g, const GaussianChannel& ch);
GaussianChannel sample_gaussian_channel(const std::vector<std::size_t>& modes_per_party, GaussianChannelTag tag, Rng& rng);

}  // namespace mqc

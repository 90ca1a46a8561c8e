#pragma once

#include <cstddef>
#include <vector>

#include "mqc/linalg.hpp"
#include "mqc/partitions.hpp"
#include "mqc/rng.hpp"

namespace mqc {

using Dims = std::vector<std::size_t>;

std::size_t total_dim(const Dims& dims);

// Density operator of a finite multipartite system. Subsystem 0 is the most
// significant tensor factor. The checked constructor verifies Hermiticity,
// unit trace and positivity; unchecked() is for results of operations that
// preserve validity by construction.
class DensityState {
public:
    DensityState() = default;
    DensityState(Dims dims, CMatrix rho);
    static DensityState unchecked(Dims dims, CMatrix rho);

    const Dims& dims() const { return dims_; }
    const CMatrix& matrix() const { return rho_; }
    std::size_t parties() const { return dims_.size(); }
    std::size_t dim() const { return rho_.rows(); }

private:
    Dims dims_;
    CMatrix rho_;
};

DensityState pure_state(Dims dims, const CVector& psi);
CVector ghz_vector(std::size_t n, std::size_t d);
CVector w_vector(std::size_t n);
CVector product_vector(const std::vector<CVector>& factors);
DensityState ghz(std::size_t n, std::size_t d);
DensityState w_state(std::size_t n);
DensityState maximally_mixed(Dims dims);
// eta |psi-><psi-| + (1 - eta) I/4 with the singlet |psi->.
DensityState werner(double eta);

// Reduced operator on `keep` (any order; result factors follow ascending
// subsystem order).
CMatrix partial_trace(const CMatrix& rho, const Dims& dims, const std::vector<int>& keep);
DensityState partial_trace(const DensityState& s, const std::vector<int>& keep);
CMatrix partial_transpose(const CMatrix& rho, const Dims& dims, const std::vector<int>& sites);
// New subsystem k is old subsystem perm[k].
CMatrix permute_subsystems(const CMatrix& rho, const Dims& dims, const std::vector<int>& perm);
DensityState permute_subsystems(const DensityState& s, const std::vector<int>& perm);
// Reduces to the support of P and regroups so that factor j is block j.
DensityState group_by(const DensityState& s, const SubRepartition& p);
CVector permute_vector(const CVector& psi, const Dims& dims, const std::vector<int>& perm);

// Applies the operator `a` on subsystem `site`: (I (x) a (x) I) m.
CMatrix apply_local_left(const CMatrix& m, const Dims& dims, std::size_t site, const CMatrix& a);

double von_neumann_entropy(const CMatrix& rho);
double tsallis_entropy(const CMatrix& rho, double q);
double purity(const CMatrix& rho);
bool is_pure(const DensityState& s);

enum class ChannelTag { incoherent_local, real_local, local_product, steering_free };
const char* to_string(ChannelTag t);

// Product channel: site s applies the Kraus set local[s]. For steering-free
// channels the sites below `split` carry the identity.
struct KrausChannel {
    Dims dims;
    ChannelTag tag = ChannelTag::local_product;
    std::vector<std::vector<CMatrix>> local;
    std::size_t split = 0;

    void validate() const;
    // Every Kraus operator of the product channel as a full matrix.
    std::vector<CMatrix> kraus_ops() const;
};

DensityState apply_channel(const DensityState& s, const KrausChannel& ch);
KrausChannel sample_channel(const Dims& dims, ChannelTag tag, Rng& rng, std::size_t split = 0);
KrausChannel local_unitary_channel(const Dims& dims, const std::vector<CMatrix>& unitaries, ChannelTag tag);

DensityState sample_product_pure(const Dims& dims, Rng& rng);
DensityState sample_separable(const Dims& dims, std::size_t terms, Rng& rng);
DensityState sample_ginibre(const Dims& dims, std::size_t rank, Rng& rng);
// Pure state that is a product across a random partition into exactly k blocks.
DensityState sample_k_separable_pure(const Dims& dims, std::size_t k, Rng& rng);
// Pure state that is a product across a random partition of depth <= k.
DensityState sample_k_producible_pure(const Dims& dims, std::size_t k, Rng& rng);
DensityState sample_incoherent(const Dims& dims, Rng& rng);
DensityState sample_real(const Dims& dims, Rng& rng);
DensityState sample_pure(const Dims& dims, Rng& rng);

}  // namespace mqc

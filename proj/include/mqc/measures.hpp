#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "json.hpp"
#include "mqc/qstate.hpp"
#include "mqc/sdp.hpp"

namespace mqc {

struct MeasureResult {
    double value = 0;
    BoundKind bound_kind = BoundKind::exact;
    nlohmann::json diagnostics = nlohmann::json::object();
};

nlohmann::json to_json(const MeasureResult& r);

MeasureResult c_l1(const DensityState& s);
MeasureResult imag_robustness(const DensityState& s);

enum class PureKind { ef, concurrence, tsallis };
struct EntanglementKind {
    PureKind kind = PureKind::ef;
    double q = 2.0;  // Tsallis order
};

// Value of the pure-state functional on a vector over the factors `dims`,
// treating every factor as one block.
double pure_functional(const CVector& psi, const Dims& dims, EntanglementKind kind);

// Pure-state entanglement of the grouped state across the blocks of P.
MeasureResult pure_entanglement(const DensityState& s, const SubRepartition& p, EntanglementKind kind = {});

struct RoofConfig {
    std::size_t min_ensemble = 0;  // 0 means rank
    std::size_t max_ensemble = 0;  // 0 means rank squared
    int restarts = 4;
    int iterations = 1500;
    double tolerance = 1e-10;
    std::uint64_t seed = 1;
};

// Heuristic upper bound on the convex roof of the pure-state functional.
MeasureResult convex_roof(const DensityState& s, const SubRepartition& p, EntanglementKind kind = {}, const RoofConfig& cfg = {});

enum class EntropyKind { von_neumann, tsallis };

MeasureResult kpe_min_sum(const DensityState& s, const SubRepartition& p, std::size_t k, EntropyKind h = EntropyKind::von_neumann, double q = 2.0);

// Free pure states for the overlap problems: k_separable means products
// across some partition into exactly k blocks; k_partite means products
// across some partition of depth at most k - 1.
enum class OverlapMode { k_separable, k_partite };
const char* to_string(OverlapMode m);

// Partitions of {0..n-1} over which the maximal product overlap is taken.
std::vector<SubRepartition> overlap_partitions(int n, OverlapMode mode, std::size_t k);

struct OverlapEstimate {
    double value = 0;  // best overlap found (a lower bound on the maximum)
    BoundKind bound_kind = BoundKind::lower_bound;
    std::vector<CVector> best_factors;
    SubRepartition best_partition;
};

OverlapEstimate sep_overlap(const CMatrix& l, const Dims& dims, OverlapMode mode, std::size_t k, std::uint64_t seed = 1, int starts = 12);

struct GridCertificate {
    double lower = 0;  // value attained at an explicit product state
    double upper = 0;  // certified bound on the maximum
    std::size_t cells = 0;
    bool complete = false;  // upper - lower reached the requested accuracy
};

// Branch-and-bound over Bloch-sphere cells. Every block except the largest
// must be a single qubit; the largest block is maximized exactly through the
// top eigenvalue of the contracted operator. Total dimension at most 16.
bool grid_oracle_supported(const Dims& dims, OverlapMode mode, std::size_t k);
GridCertificate overlap_grid_oracle(const CMatrix& l, const Dims& dims, OverlapMode mode, std::size_t k, double accuracy = 2e-2,
                                    std::size_t max_cells = 200000);

struct WitnessConfig {
    int perturbations = 6;
    double perturbation_scale = 0.05;
    std::uint64_t seed = 7;
    double grid_accuracy = 2e-2;
    std::size_t grid_cells = 200000;
    int certified_candidates = 2;  // leaders re-scored with the grid oracle
};

// max{Tr(L rho) - overlap(L), 0} over a finite family of candidate witnesses.
MeasureResult witness_entanglement(const DensityState& s, std::size_t k, OverlapMode mode, const WitnessConfig& cfg = {});

MeasureResult non_mppt(const DensityState& s, const SubRepartition& p, const SdpOptions& opt = {});

}  // namespace mqc

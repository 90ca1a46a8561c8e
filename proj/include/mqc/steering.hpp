#pragma once

#include <optional>
#include <string>
#include <vector>

#include "mqc/measures.hpp"
#include "mqc/qstate.hpp"
#include "mqc/sdp.hpp"

namespace mqc {

// POVMs of one untrusted party: settings[x][a] acting on a space of size dim.
struct PartyMeasurements {
    std::size_t dim = 0;
    std::vector<std::vector<CMatrix>> settings;

    std::size_t outcomes() const { return settings.empty() ? 0 : settings.front().size(); }
    void validate() const;
};

struct MeasurementAssemblage {
    std::vector<PartyMeasurements> parties;
    void validate() const;
};

// Projective qubit measurements along Bloch axes 'x', 'y' or 'z'.
PartyMeasurements pauli_measurements(const std::string& axes);

// Conditional states indexed by joint outcome and joint setting. Joint
// indices are mixed-radix with the first untrusted party most significant.
struct StateAssemblage {
    Dims trusted_dims;  // one entry per trusted group
    std::vector<std::size_t> settings;
    std::vector<std::size_t> outcomes;
    std::vector<CMatrix> elements;  // index: joint_setting * joint_outcomes + joint_outcome

    std::size_t joint_settings() const;
    std::size_t joint_outcomes() const;
    std::size_t trusted_dim() const { return total_dim(trusted_dims); }
    const CMatrix& at(std::size_t joint_outcome, std::size_t joint_setting) const;
    CMatrix& at(std::size_t joint_outcome, std::size_t joint_setting);
    // Largest deviation between the setting-wise sums of the elements.
    double no_signalling_defect() const;
    void validate() const;
};

std::size_t encode_mixed(const std::vector<std::size_t>& digits, const std::vector<std::size_t>& radix);
std::vector<std::size_t> decode_mixed(std::size_t value, const std::vector<std::size_t>& radix);

// Conditional states of the grouped reduced state: untrusted groups are the
// blocks of split.untrusted (one measurement set each), trusted groups the
// blocks of split.trusted, every other party is traced out.
StateAssemblage make_assemblage(const DensityState& rho, const SteeringSplit& split, const MeasurementAssemblage& ma);

enum class LhsVerdict { lhs_member, steerable_evidence, inconclusive };
const char* to_string(LhsVerdict v);

// Mixture of deterministic responses: strategies[l][party] lists the outcome
// of that party for each of its settings.
struct LhsModel {
    Dims trusted_dims;
    std::vector<std::size_t> settings;
    std::vector<std::size_t> outcomes;
    std::vector<std::vector<std::vector<std::size_t>>> strategies;
    std::vector<CMatrix> hidden;

    StateAssemblage predict() const;
};

struct LhsResult {
    LhsVerdict verdict = LhsVerdict::inconclusive;
    std::size_t strategies = 0;
    double residual = 0;
    double certificate_value = 0;
    int iterations = 0;
    std::string note;
    std::optional<LhsModel> model;
};

inline constexpr std::size_t kMaxStrategies = 1000000;

LhsResult lhs_check(const StateAssemblage& sa, const SdpOptions& opt = {});

// Sufficient separability test across the listed factors: PPT for two
// factors of total dimension at most 6, otherwise the Frobenius ball around
// the maximally mixed state. The operator may be unnormalized.
bool certified_separable(const CMatrix& sigma, const Dims& factors);
double separable_ball_radius(const Dims& factors);

DensityState steer_free_apply(const DensityState& rho, const SteeringSplit& split, const KrausChannel& ch);

struct UnsteerableConfig {
    int bisection_steps = 60;
};

// Upper bound on the trace distance to the unsteerable set of the grouped
// reduced state, found along the segment towards the maximally mixed state.
MeasureResult unsteerable_distance_ub(const DensityState& rho, const SteeringSplit& split, const UnsteerableConfig& cfg = {});

// Per-site measurement sets for the untrusted parties 0..t-1.
using SiteMeasurements = std::vector<std::vector<std::vector<CMatrix>>>;

// POVMs for the untrusted blocks of a split: each block measures the product
// of the site measurements of its active members and the identity on the
// rest.
MeasurementAssemblage block_measurements(const Dims& dims, const SteeringSplit& split, const SiteMeasurements& sites, Mask active);

struct TransportReport {
    bool model_found = false;   // lhs_check succeeded on the source configuration
    bool success = false;       // transported model reproduces the target assemblage
    double max_deviation = 0;
    std::string source;
    std::string target;
    std::string note;
};

// Checks the constructive direction behind the hierarchy condition for a
// basic pair lower <=_s^{(x,y)} upper: an LHS model found on the source
// configuration is transported to the target configuration and compared
// with the directly computed target assemblage.
TransportReport transport_check(const DensityState& rho, const SteeringSplit& lower, const SteeringSplit& upper, Coarsening x,
                                Coarsening y, const SiteMeasurements& sites, const SdpOptions& opt = {});

}  // namespace mqc

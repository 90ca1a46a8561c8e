#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "mqc/io.hpp"
#include "mqc/measures.hpp"

namespace mqc {

class UnknownMeasureError : public Error {
public:
    using Error::Error;
};

enum class RelationId { standard, standard_a, k_e, k_pe, steering };
const char* to_string(RelationId r);

enum class StateKind { density, gaussian };

struct MeasureArgs {
    std::size_t k = 2;
    double q = 2.0;
    int t = 1;  // untrusted parties {0..t-1} for steering bindings
    std::uint64_t seed = 1;
};

using Evaluator = std::function<MeasureResult(const AnyState&, const SubRepartition&, const MeasureArgs&)>;
using StateSampler = std::function<AnyState(const std::vector<std::size_t>& dims, const MeasureArgs&, Rng&)>;
// Draws a free channel for the given dims and applies it.
using ChannelSampler = std::function<AnyState(const AnyState&, const MeasureArgs&, Rng&)>;

struct MeasureBinding {
    std::string id;
    StateKind kind = StateKind::density;
    Evaluator evaluator;
    std::string free_sampler;
    StateSampler sample_free;
    std::string channel_family;
    ChannelSampler apply_free_channel;
    std::function<AnyState(const MeasureArgs&)> resource;  // designated resource state
    RelationId relation = RelationId::standard;
    bool symmetric = true;
    std::size_t min_blocks = 1;  // partitions with fewer blocks are not evaluated
    bool single_party_blocks = false;  // only partitions with singleton blocks are evaluated
    bool exact = true;            // false when the evaluator only returns bounds
    double hierarchy_tol = 1e-8;

    MeasureResult evaluate(const AnyState& s, const SubRepartition& p, const MeasureArgs& args) const { return evaluator(s, p, args); }
};

const std::vector<MeasureBinding>& bindings();
const MeasureBinding& find_binding(const std::string& id);

// Steering split read from the blocks of P: blocks inside {0..t-1} are
// untrusted, blocks inside {t..n-1} trusted.
SteeringSplit split_from_partition(const SubRepartition& p, int t);
SubRepartition partition_from_split(const SteeringSplit& s);

struct Violation {
    Json input;
    double lhs = 0;
    double rhs = 0;
    double slack = 0;  // lhs - rhs
};

struct CheckReport {
    std::string suite;
    std::string measure;
    std::size_t trials = 0;
    double tol = 0;
    std::vector<Violation> violations;
    double worst_slack = 0;  // largest slack among violations, 0 without any
    std::vector<std::string> caveats;
    Json details = Json::object();

    void add_violation(Violation v);
};

Json to_json(const CheckReport& r);
// 0 without violations or caveats, 2 with violations, 3 with caveats only.
int exit_code(const CheckReport& r);

enum class AxiomSuite { mqcm1, mqcm2, mqcm5 };
AxiomSuite parse_suite(const std::string& s);
const char* to_string(AxiomSuite s);

struct AxiomConfig {
    std::size_t trials = 50;
    std::uint64_t seed = 1;
    double tol = -1;  // negative selects the suite default
    std::vector<std::size_t> dims;  // subsystem dims or modes per party; empty selects a default
    MeasureArgs args;
    int threads = 1;
};

// One trial of a suite: a deterministic function of (binding, suite, trial
// seed, config). Returns the compared pair (lhs must not exceed rhs).
struct TrialOutcome {
    Json input;
    double lhs = 0;
    double rhs = 0;
    bool exact = true;
    std::string skipped;  // non-empty when the trial could not be evaluated
};

std::uint64_t trial_seed(std::uint64_t seed, std::size_t trial);
TrialOutcome run_trial(const MeasureBinding& b, AxiomSuite suite, std::uint64_t seed, const AxiomConfig& cfg);
CheckReport axiom_check(const MeasureBinding& b, AxiomSuite suite, const AxiomConfig& cfg);

struct ScanConfig {
    double tol = -1;  // negative selects the binding default
    MeasureArgs args;
    std::size_t sampled_pairs = 300;  // used for 5 <= n <= 6
    int threads = 1;
};

CheckReport hierarchy_scan(const MeasureBinding& b, const AnyState& s, const ScanConfig& cfg = {});

enum class MonogamyKind { global, complete, tight, strong };
MonogamyKind parse_monogamy(const std::string& s);
const char* to_string(MonogamyKind k);

struct MonogamyConfig {
    double eps_eq = 1e-6;
    double eps_zero = 1e-6;
    MeasureArgs args;
};

CheckReport monogamy_check(const MeasureBinding& b, const AnyState& s, MonogamyKind kind, const MonogamyConfig& cfg = {});

}  // namespace mqc

#pragma once

#include <string>
#include <vector>

#include "mqc/linalg.hpp"
#include "mqc/qstate.hpp"

namespace mqc {

enum class BoundKind { exact, lower_bound, upper_bound, heuristic };
const char* to_string(BoundKind k);

enum class SolveStatus { converged, max_iterations, infeasible, stalled };
const char* to_string(SolveStatus s);

struct SdpOptions {
    int max_iter = 0;         // 0 means the configured budget
    double target_gap = 0.0;  // 0 means the configured target
    int check_every = 50;
    double relaxation = 1.6;
};

// min Tr(rho W) subject to W = M_B + T_B(N_B) for every listed bipartition,
// M_B, N_B >= 0 and -I <= W <= I. Each entry of `transposed` lists the
// factors of `dims` whose transpose defines T_B.
struct WitnessProgram {
    Dims dims;
    CMatrix rho;
    std::vector<std::vector<int>> transposed;
};

struct WitnessSolution {
    double value = 0;        // certified lower bound on the optimum of -min Tr(rho W), clipped at 0
    double upper = 0;        // certified upper bound from a dual point
    double duality_gap = 0;  // upper - value
    CMatrix witness;         // feasible witness attaining `value`
    std::vector<CMatrix> m;
    std::vector<CMatrix> n;
    double primal_residual = 0;
    double dual_residual = 0;
    int iterations = 0;
    SolveStatus status = SolveStatus::max_iterations;
    BoundKind bound_kind = BoundKind::lower_bound;
};

WitnessSolution solve_witness(const WitnessProgram& prog, const SdpOptions& opt = {});

// Find X_v >= 0 (all of size dim) with sum_v coeff(c, v) X_v = targets[c].
struct FeasibilityProgram {
    std::size_t dim = 0;
    std::size_t vars = 0;
    RMatrix coeff;  // constraints x vars
    std::vector<CMatrix> targets;
};

struct FeasibilitySolution {
    bool feasible = false;
    bool certified = false;   // true when an exact Farkas certificate was verified
    std::vector<CMatrix> x;   // PSD point when feasible
    double residual = 0;      // constraint residual of x
    double certificate_value = 0;  // sum Tr(Y_c T_c) of the certificate, negative when certified
    int iterations = 0;
    SolveStatus status = SolveStatus::max_iterations;
};

FeasibilitySolution solve_feasibility(const FeasibilityProgram& prog, const SdpOptions& opt = {});

}  // namespace mqc

#pragma once

#include <string>

namespace mqc {

// Numerical tolerances used across the library. Every field can be
// overridden at process start through MQC_TOL_OVERRIDE, a comma separated
// list of name=value pairs, e.g. "psd=1e-8,hierarchy=1e-7".
struct Tolerances {
    double hermitian = 1e-10;       // relative Hermiticity check
    double jacobi = 1e-13;          // relative off-diagonal Frobenius stop
    int jacobi_sweeps = 100;
    double psd = 1e-9;              // smallest admissible eigenvalue is -psd
    double trace = 1e-9;
    double purity = 1e-9;
    double gauss_uncertainty = 1e-8;
    double faithful_exact = 1e-8;
    double faithful_heuristic = 2e-2;
    double monotone = 1e-8;
    double hierarchy = 1e-8;
    double hierarchy_sdp = 1e-5;
    double symmetry = 1e-8;
    double equality = 1e-6;         // premise equality in monogamy checks
    double vanish = 1e-6;           // implied vanishing in monogamy checks
    double sdp_exact_gap = 1e-6;
    double sdp_target_gap = 1e-7;
    int sdp_max_iter = 20000;
    double feas_residual = 1e-7;
    double indicator = 1e-12;       // threshold of the Gaussian mean indicator
};

// Returns the process wide tolerances, parsing MQC_TOL_OVERRIDE once.
const Tolerances& tol();

// Parses an override string into a copy of base. Throws InvalidArgument on
// unknown names or malformed values.
Tolerances apply_overrides(Tolerances base, const std::string& text);

}  // namespace mqc

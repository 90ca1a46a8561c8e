#include "mqc/config.hpp"

#include <cstdlib>
#include <map>
#include <sstream>

#include "mqc/errors.hpp"

namespace mqc {

namespace {

template <class T>
void assign(T& field, const std::string& text, const std::string& name) {
    std::istringstream is(text);
    T v{};
    is >> v;
    if (!is || !is.eof()) throw InvalidArgument("bad tolerance value for " + name + ": " + text);
    field = v;
}

}  // namespace

Tolerances apply_overrides(Tolerances t, const std::string& text) {
    std::map<std::string, double*> dfields = {
        {"hermitian", &t.hermitian},
        {"jacobi", &t.jacobi},
        {"psd", &t.psd},
        {"trace", &t.trace},
        {"purity", &t.purity},
        {"gauss_uncertainty", &t.gauss_uncertainty},
        {"faithful_exact", &t.faithful_exact},
        {"faithful_heuristic", &t.faithful_heuristic},
        {"monotone", &t.monotone},
        {"hierarchy", &t.hierarchy},
        {"hierarchy_sdp", &t.hierarchy_sdp},
        {"symmetry", &t.symmetry},
        {"equality", &t.equality},
        {"vanish", &t.vanish},
        {"sdp_exact_gap", &t.sdp_exact_gap},
        {"sdp_target_gap", &t.sdp_target_gap},
        {"feas_residual", &t.feas_residual},
        {"indicator", &t.indicator},
    };
    std::map<std::string, int*> ifields = {
        {"jacobi_sweeps", &t.jacobi_sweeps},
        {"sdp_max_iter", &t.sdp_max_iter},
    };
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (item.empty()) continue;
        auto eq = item.find('=');
        if (eq == std::string::npos) throw InvalidArgument("malformed tolerance override: " + item);
        std::string name = item.substr(0, eq);
        std::string value = item.substr(eq + 1);
        if (auto it = dfields.find(name); it != dfields.end()) {
            assign(*it->second, value, name);
        } else if (auto jt = ifields.find(name); jt != ifields.end()) {
            assign(*jt->second, value, name);
        } else {
            throw InvalidArgument("unknown tolerance: " + name);
        }
    }
    return t;
}

const Tolerances& tol() {
    static const Tolerances instance = [] {
        const char* env = std::getenv("MQC_TOL_OVERRIDE");
        if (env == nullptr) return Tolerances{};
        return apply_overrides(Tolerances{}, env);
    }();
    return instance;
}

}  // namespace mqc

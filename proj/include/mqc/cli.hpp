#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace mqc {

enum CliExit : int {
    exit_ok = 0,
    exit_violations = 2,
    exit_caveats = 3,
    exit_unknown_measure = 10,
    exit_malformed_file = 11,
    exit_grammar = 12,
    exit_invalid_args = 13,
    exit_internal = 14,
};

// Runs one command. JSON results go to `out`, error JSON to `err`.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace mqc

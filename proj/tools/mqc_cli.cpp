#include <iostream>

#include "mqc/cli.hpp"

int main(int argc, char** argv) {
    std::vector<std::string> args(argv + 1, argv + argc);
    return mqc::run_cli(args, std::cout, std::cerr);
}

#include <iostream>

#include "tdi/cli.hpp"

int main(int argc, char** argv) {
    std::vector<std::string> args(argv + 1, argv + argc);
    tdi::CliResult result = tdi::run_cli(args);
    std::cout << result.out;
    std::cerr << result.err;
    return result.exit_code;
}

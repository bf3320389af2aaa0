#pragma once

#include <string>
#include <vector>

namespace tdi {

inline constexpr const char* kToolVersion = "tdi 1.0.0";

struct CliResult {
    int exit_code = 0;
    std::string out;
    std::string err;
};

// Runs one command; args exclude the program name.
CliResult run_cli(const std::vector<std::string>& args);

}  // namespace tdi

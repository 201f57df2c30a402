#pragma once

#include <string>
#include <vector>

namespace gpf {

// Exit-code contract: 0 all checks pass, 2 a check or contract failed,
// 3 input/usage error. All file outputs land under the --out directory.
int run_cli(const std::vector<std::string>& args);

namespace demo {

// Scenarios: affine-thm31 | piecewise-thm44 | falsifier. Returns the CLI
// exit code; every numeric artifact is reproducible from (scenario, seed).
int run_scenario(const std::string& name, std::uint64_t seed,
                 const std::string& out_dir);

}  // namespace demo

}  // namespace gpf

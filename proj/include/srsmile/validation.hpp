#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace srsmile {

struct CriterionResult {
    int index = 0;
    std::string name;
    bool pass = false;
    double seconds = 0.0;
    std::string details;
};

struct ValidationConfig {
    bool quick = false;  // cut Monte Carlo path counts 10x
    std::uint64_t seed = 42;
    int steps_per_year = 365;
};

// Runs the whole suite (or the listed criterion indices, 1-based) against
// built-in representative parameter sets.
std::vector<CriterionResult> run_validation(const ValidationConfig& cfg = {},
                                            const std::vector<int>& only = {});

}  // namespace srsmile

#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace pairspec {

struct CheckResult {
    std::string name;
    bool pass = false;
    std::string detail;
};

// Quick invariant suite over every module. Deterministic for a given seed.
std::vector<CheckResult> run_invariant_suite(std::uint64_t seed = 2024, unsigned threads = 1);

} // namespace pairspec

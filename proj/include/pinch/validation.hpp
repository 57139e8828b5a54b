#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

namespace pinch {

struct SuiteResult {
    std::string name;
    std::size_t checks = 0;
    std::size_t failures = 0;
    std::string detail;

    bool passed() const { return failures == 0; }
};

struct ValidationOptions {
    std::uint64_t seed = 1;
    // Relative error injected into one analytic CNN gradient entry (fault drill).
    double gradient_perturbation = 0.0;
};

// Oracle suites: lp-vs-recursion, projection-qp, gradient-check,
// curvature-signs, brute-force-mrg.
std::vector<SuiteResult> run_validation(const ValidationOptions& options);

} // namespace pinch

#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

namespace nlb::acceptance {

/// Deliberate corruptions used to show the checks can fail.
struct Mutation {
    /// Multiplies the fractional Laplacian normalisation used by the evaluator.
    double c_ns_factor = 1.0;
    /// Central near stencil, monotonicity check off and a coarse near radius.
    bool coarse_central_stencil = false;
    double coarse_near_radius = 0.5;
};

struct RunOptions {
    std::uint64_t seed = 20240611;
    /// Divides every numeric tolerance (runtime budgets are unchanged).
    double tighten = 1.0;
    Mutation mutation;
};

struct Result {
    int id = 0;
    std::string name;
    bool numeric_pass = false;
    double seconds = 0.0;
    double budget_seconds = 0.0;
    /// Measured quantities against their limits, human readable.
    std::string detail;

    bool pass() const { return numeric_pass && seconds <= budget_seconds; }
};

constexpr int kCriteria = 12;

Result run_criterion(int id, const RunOptions& options = {});
std::vector<Result> run(std::span<const int> ids, const RunOptions& options = {});

/// One line per result: id, PASS/FAIL, name, details, timing.
void print(std::ostream& os, const Result& r);

}  // namespace nlb::acceptance

#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>

#include "dreg/kernels.hpp"
#include "dreg/result.hpp"
#include "dreg/solvers.hpp"

namespace dreg {

struct RansacConfig {
    static constexpr int kSubsetSize = 3;

    double confidence = 0.99;
    /// nullopt runs until the adaptive bound is met.
    std::optional<std::size_t> max_iterations_cap = 10000;
    double inlier_threshold = 0.06;
    kernels::Exec exec = kernels::Exec::Serial;

    void validate() const;
};

/// log(1 - confidence) / log(1 - ratio^subset_size), unrounded. Infinite for
/// ratio 0, 1 for ratio 1.
double ransac_iteration_bound(double inlier_ratio, int subset_size, double confidence);

/// Rounded-up bound for `inliers` supporters out of `n`.
std::size_t ransac_adaptive_bound(std::size_t inliers, std::size_t n, double confidence);

/// Classical three-point hypothesize-and-verify with adaptive termination and
/// a final SVD refit on the best consensus.
SolverResult solve_ransac(std::span<const Correspondence> set, const RansacConfig& cfg, std::uint64_t seed);

}  // namespace dreg

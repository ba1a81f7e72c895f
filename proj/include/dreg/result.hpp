#pragma once

#include <cstddef>
#include <vector>

#include "dreg/geom.hpp"

namespace dreg {

/// Output of a robust solver. `inliers` holds Correspondence::index values.
struct SolverResult {
    RigidTransform transform;
    std::vector<std::size_t> inliers;
    std::size_t iterations_layer1 = 0;     // DANIEL layer-1 draws, or RANSAC iterations
    std::size_t total_layer2_samples = 0;  // zero for RANSAC
    std::size_t compat_checks = 0;         // staircase invocations
    std::size_t consensus_builds = 0;
    double elapsed = 0.0;                  // seconds

    /// Everything except the wall-clock time.
    bool same_outcome(const SolverResult& other) const;
};

}  // namespace dreg

#include "dreg/ransac.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "dreg/errors.hpp"
#include "dreg/rng.hpp"

namespace dreg {

void RansacConfig::validate() const {
    if (!(confidence > 0.0 && confidence < 1.0)) {
        throw std::invalid_argument("RANSAC confidence must lie in (0, 1)");
    }
    if (!(inlier_threshold > 0.0) || !std::isfinite(inlier_threshold)) {
        throw std::invalid_argument("RANSAC inlier threshold must be positive");
    }
}

double ransac_iteration_bound(double inlier_ratio, int subset_size, double confidence) {
    if (inlier_ratio >= 1.0) {
        return 1.0;
    }
    if (inlier_ratio <= 0.0) {
        return std::numeric_limits<double>::infinity();
    }
    const double all_inlier = std::pow(inlier_ratio, subset_size);
    return std::log(1.0 - confidence) / std::log1p(-all_inlier);
}

std::size_t ransac_adaptive_bound(std::size_t inliers, std::size_t n, double confidence) {
    const double ratio = static_cast<double>(inliers) / static_cast<double>(n);
    const double bound = std::ceil(ransac_iteration_bound(ratio, RansacConfig::kSubsetSize, confidence) - 1e-9);
    if (!(bound < 1e18)) {
        return std::numeric_limits<std::size_t>::max();
    }
    return std::max<std::size_t>(1, static_cast<std::size_t>(bound));
}

SolverResult solve_ransac(std::span<const Correspondence> set, const RansacConfig& cfg, std::uint64_t seed) {
    const auto started = std::chrono::steady_clock::now();
    cfg.validate();
    const std::size_t n = set.size();
    if (n < 3) {
        throw DegenerateSet("at least 3 correspondences are required");
    }
    const std::size_t cap = cfg.max_iterations_cap.value_or(std::numeric_limits<std::size_t>::max());

    Rng rng(seed);
    std::size_t limit = std::min(cap, ransac_adaptive_bound(3, n, cfg.confidence));
    std::size_t best_count = 0;
    RigidTransform best_model;
    std::size_t iter = 0;
    for (; iter < limit; ++iter) {
        const auto [i, j] = rng.distinct_pair(n);
        std::size_t k = rng.index(n - 2);
        // third distinct index: skip over i and j in ascending order
        for (std::size_t taken : {std::min(i, j), std::max(i, j)}) {
            if (k >= taken) {
                ++k;
            }
        }
        const auto model = try_solve_minimal_triad(set[i], set[j], set[k]);
        if (!model) {
            continue;
        }
        const std::size_t count = kernels::consensus_count(cfg.exec, set, *model, cfg.inlier_threshold);
        if (count > best_count) {
            best_count = count;
            best_model = *model;
            if (best_count >= 3) {
                limit = std::min(cap, ransac_adaptive_bound(best_count, n, cfg.confidence));
            }
        }
    }
    if (best_count < 3) {
        throw NoConsensusFound("no minimal model reached 3 supporters");
    }

    SolverResult result;
    result.iterations_layer1 = iter;
    result.consensus_builds = iter;
    const auto support = kernels::consensus(cfg.exec, set, best_model, cfg.inlier_threshold);
    RigidTransform fit = best_model;
    try {
        fit = solve_svd(set, support);
    } catch (const DegenerateSet&) {
    }
    auto inliers = kernels::consensus(cfg.exec, set, fit, cfg.inlier_threshold);
    if (inliers.size() < 3) {
        fit = best_model;
        inliers = support;
    }
    result.transform = fit;
    for (std::size_t p : inliers) {
        result.inliers.push_back(set[p].index);
    }
    result.elapsed = std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
    return result;
}

}  // namespace dreg

#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "dreg/rng.hpp"
#include "dreg/solvers.hpp"

namespace dreg {

/// Parameters of one semi-synthetic registration problem.
struct SyntheticSpec {
    std::size_t n = 1000;
    double sigma = 0.01;
    double outlier_ratio = 0.0;
    double box_half_width = 0.5;
    double outlier_sphere_radius = 1.0;
    double translation_norm_bound = 3.0;
    std::uint64_t seed = 0;

    /// floor(outlier_ratio * n)
    std::size_t outlier_count() const;
    /// Throws SpecInvalid when fewer than 3 inliers would remain.
    void validate() const;
};

struct GroundTruth {
    RigidTransform transform;
    std::vector<bool> inlier_mask;

    std::size_t inlier_count() const;
};

struct SyntheticProblem {
    CorrespondenceSet correspondences;
    GroundTruth truth;
};

/// Centers the cloud's bounding box at the origin and scales it uniformly so
/// its largest extent spans [-half_width, half_width].
std::vector<Vec3> normalize_into_box(std::span<const Vec3> cloud, double half_width);

/// Haar-uniform rotation (Arvo's subgroup construction).
Rotation random_rotation(Rng& rng);
/// Uniform direction, norm uniform in [0, bound].
Vec3 random_translation(Rng& rng, double bound);
/// Uniform point in the ball of the given radius around center.
Vec3 random_in_ball(Rng& rng, const Vec3& center, double radius);

/**
 * Source points come from `source_cloud` (normalized into the box and
 * downsampled to spec.n) or, when empty, uniformly from the box. Targets are
 * R x + t + N(0, sigma^2 I); floor(ratio * n) uniformly chosen targets are
 * replaced by uniform points in the outlier sphere centered at the
 * transformed source centroid. Sources are never altered.
 */
SyntheticProblem generate_problem(const SyntheticSpec& spec, std::span<const Vec3> source_cloud = {});

/// Geodesic rotation error in degrees.
double rotation_error_deg(const Rotation& gt, const Rotation& est);
/// Euclidean translation error in meters.
double translation_error(const Translation& gt, const Translation& est);

}  // namespace dreg

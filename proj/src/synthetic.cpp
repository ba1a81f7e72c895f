#include "dreg/synthetic.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>

#include "dreg/errors.hpp"

namespace dreg {

std::size_t SyntheticSpec::outlier_count() const {
    // Guard against 0.99 * 1000 landing just below an integer.
    return static_cast<std::size_t>(std::floor(outlier_ratio * static_cast<double>(n) + 1e-9));
}

void SyntheticSpec::validate() const {
    if (!(outlier_ratio >= 0.0 && outlier_ratio < 1.0)) {
        throw SpecInvalid("outlier ratio must lie in [0, 1)");
    }
    if (n < 3 || n - outlier_count() < 3) {
        throw SpecInvalid("spec leaves fewer than 3 inliers");
    }
    if (!(sigma >= 0.0) || !(box_half_width > 0.0) || !(outlier_sphere_radius > 0.0) ||
        !(translation_norm_bound >= 0.0)) {
        throw SpecInvalid("noise and geometry parameters must be non-negative");
    }
}

std::size_t GroundTruth::inlier_count() const {
    return static_cast<std::size_t>(std::count(inlier_mask.begin(), inlier_mask.end(), true));
}

std::vector<Vec3> normalize_into_box(std::span<const Vec3> cloud, double half_width) {
    if (cloud.empty()) {
        return {};
    }
    Vec3 lo = cloud.front();
    Vec3 hi = cloud.front();
    for (const auto& p : cloud) {
        lo = lo.cwiseMin(p);
        hi = hi.cwiseMax(p);
    }
    const Vec3 center = (lo + hi) / 2.0;
    const double extent = (hi - lo).maxCoeff();
    if (!(extent > 0.0)) {
        throw SpecInvalid("source cloud has zero extent");
    }
    const double scale = 2.0 * half_width / extent;
    std::vector<Vec3> out;
    out.reserve(cloud.size());
    for (const auto& p : cloud) {
        out.push_back((p - center) * scale);
    }
    return out;
}

Rotation random_rotation(Rng& rng) {
    const double theta = 2.0 * std::numbers::pi * rng.uniform();
    const double phi = 2.0 * std::numbers::pi * rng.uniform();
    const double z = rng.uniform();
    const double r = std::sqrt(z);
    const Vec3 v(std::cos(phi) * r, std::sin(phi) * r, std::sqrt(1.0 - z));
    // (2 v v^T - I) is a rotation by pi; composing with a uniform z-rotation is Haar-uniform.
    const Mat3 householder = 2.0 * v * v.transpose() - Mat3::Identity();
    Mat3 rz;
    rz << std::cos(theta), -std::sin(theta), 0.0,
          std::sin(theta), std::cos(theta), 0.0,
          0.0, 0.0, 1.0;
    return Rotation::from_matrix_unchecked(householder * rz);
}

Vec3 random_translation(Rng& rng, double bound) {
    Vec3 dir;
    do {
        dir = Vec3(rng.normal(), rng.normal(), rng.normal());
    } while (dir.norm() < 1e-12);
    return dir.normalized() * rng.uniform(0.0, bound);
}

Vec3 random_in_ball(Rng& rng, const Vec3& center, double radius) {
    Vec3 p;
    do {
        p = Vec3(rng.uniform(-1.0, 1.0), rng.uniform(-1.0, 1.0), rng.uniform(-1.0, 1.0));
    } while (p.squaredNorm() > 1.0);
    return center + radius * p;
}

SyntheticProblem generate_problem(const SyntheticSpec& spec, std::span<const Vec3> source_cloud) {
    spec.validate();
    Rng rng(spec.seed);

    std::vector<Vec3> source;
    if (source_cloud.empty()) {
        source.reserve(spec.n);
        const double h = spec.box_half_width;
        for (std::size_t i = 0; i < spec.n; ++i) {
            source.emplace_back(rng.uniform(-h, h), rng.uniform(-h, h), rng.uniform(-h, h));
        }
    } else {
        if (source_cloud.size() < spec.n) {
            throw SpecInvalid("source cloud has fewer points than requested");
        }
        std::vector<Vec3> normalized = normalize_into_box(source_cloud, spec.box_half_width);
        // Partial Fisher-Yates keeps a uniform subset of n points.
        std::vector<std::size_t> order(normalized.size());
        std::iota(order.begin(), order.end(), std::size_t{0});
        for (std::size_t i = 0; i < spec.n; ++i) {
            std::swap(order[i], order[i + rng.index(order.size() - i)]);
        }
        source.reserve(spec.n);
        for (std::size_t i = 0; i < spec.n; ++i) {
            source.push_back(normalized[order[i]]);
        }
    }

    SyntheticProblem problem;
    GroundTruth& truth = problem.truth;
    truth.transform = {random_rotation(rng), random_translation(rng, spec.translation_norm_bound)};
    truth.inlier_mask.assign(spec.n, true);

    auto& corr = problem.correspondences;
    corr.reserve(spec.n);
    Vec3 centroid = Vec3::Zero();
    for (std::size_t i = 0; i < spec.n; ++i) {
        const Vec3 noise(rng.normal(), rng.normal(), rng.normal());
        corr.push_back({i, source[i], truth.transform.apply(source[i]) + spec.sigma * noise});
        centroid += source[i];
    }
    centroid /= static_cast<double>(spec.n);
    const Vec3 sphere_center = truth.transform.apply(centroid);

    std::vector<std::size_t> order(spec.n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    const std::size_t outliers = spec.outlier_count();
    for (std::size_t i = 0; i < outliers; ++i) {
        std::swap(order[i], order[i + rng.index(spec.n - i)]);
        const std::size_t victim = order[i];
        corr[victim].y = random_in_ball(rng, sphere_center, spec.outlier_sphere_radius);
        truth.inlier_mask[victim] = false;
    }
    return problem;
}

double rotation_error_deg(const Rotation& gt, const Rotation& est) {
    return geodesic_distance(gt, est) * 180.0 / std::numbers::pi;
}

double translation_error(const Translation& gt, const Translation& est) { return (gt - est).norm(); }

}  // namespace dreg

#pragma once

// Shared fixtures for the unit tests. The oracles here are written
// independently of the library (plain arrays, no Eigen helpers from dreg).

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numbers>

#include "dreg/geom.hpp"
#include "dreg/rng.hpp"
#include "dreg/solvers.hpp"
#include "dreg/synthetic.hpp"

namespace testing {

inline constexpr double kPi = std::numbers::pi;

/// Rotation about a unit axis via quaternion components, independent of exp_map.
inline dreg::Mat3 quat_rotation(const dreg::Vec3& axis, double angle) {
    const dreg::Vec3 u = axis.normalized();
    const double w = std::cos(angle / 2.0);
    const double s = std::sin(angle / 2.0);
    const double x = u.x() * s, y = u.y() * s, z = u.z() * s;
    dreg::Mat3 m;
    m << 1 - 2 * (y * y + z * z), 2 * (x * y - w * z), 2 * (x * z + w * y),
         2 * (x * y + w * z), 1 - 2 * (x * x + z * z), 2 * (y * z - w * x),
         2 * (x * z - w * y), 2 * (y * z + w * x), 1 - 2 * (x * x + y * y);
    return m;
}

inline dreg::Vec3 random_unit(dreg::Rng& rng) {
    while (true) {
        dreg::Vec3 v(rng.uniform(-1, 1), rng.uniform(-1, 1), rng.uniform(-1, 1));
        const double n = v.norm();
        if (n > 1e-3 && n <= 1.0) {
            return v / n;
        }
    }
}

/// Random rotation with angle in [0, max_angle].
inline dreg::Rotation any_rotation(dreg::Rng& rng, double max_angle = kPi) {
    return dreg::Rotation::from_matrix_unchecked(quat_rotation(random_unit(rng), rng.uniform(0.0, max_angle)));
}

inline dreg::RigidTransform random_transform(dreg::Rng& rng) {
    return {any_rotation(rng), dreg::Vec3(rng.uniform(-3, 3), rng.uniform(-3, 3), rng.uniform(-3, 3))};
}

inline dreg::Vec3 random_point(dreg::Rng& rng, double half = 0.5) {
    return {rng.uniform(-half, half), rng.uniform(-half, half), rng.uniform(-half, half)};
}

/// Angle between rotations computed from the quaternion-free trace formula.
inline double angle_between(const dreg::Mat3& a, const dreg::Mat3& b) {
    double tr = 0.0;
    for (int i = 0; i < 3; ++i) {
        for (int k = 0; k < 3; ++k) {
            tr += a(k, i) * b(k, i);
        }
    }
    return std::acos(std::clamp((tr - 1.0) / 2.0, -1.0, 1.0));
}

/// Geodesic distance through the atan2-based log map. The arccos form loses
/// precision near zero (about 2e-8 rad at the identity), too coarse for 1e-9 checks.
inline double precise_angle(const dreg::Rotation& a, const dreg::Rotation& b) {
    return dreg::log_map(a.inverse() * b).norm();
}

inline dreg::Correspondence make_pair(std::size_t i, const dreg::RigidTransform& tf, const dreg::Vec3& x,
                                      const dreg::Vec3& noise = dreg::Vec3::Zero()) {
    return {i, x, tf.rot.matrix() * x + tf.tra + noise};
}

inline dreg::CorrespondenceSet inlier_set(dreg::Rng& rng, const dreg::RigidTransform& tf, std::size_t n,
                                          double sigma = 0.0) {
    dreg::CorrespondenceSet out;
    for (std::size_t i = 0; i < n; ++i) {
        dreg::Vec3 e(rng.normal(), rng.normal(), rng.normal());
        out.push_back(make_pair(i, tf, random_point(rng), sigma * e));
    }
    return out;
}

}  // namespace testing

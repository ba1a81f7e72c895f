#pragma once

#include <cmath>
#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "dreg/geom.hpp"

namespace dreg {

/// One putative point pair. `index` is the correspondence's identity in the
/// caller's original list (0-based; file formats print it 1-based).
struct Correspondence {
    std::size_t index = 0;
    Vec3 x = Vec3::Zero();
    Vec3 y = Vec3::Zero();
};

using CorrespondenceSet = std::vector<Correspondence>;

/// Triangles with area at or below this (m^2) are treated as collinear.
inline constexpr double kMinTriadArea = 1e-8;

/// ||R x + t - y||, written out so the scan kernels inline it.
inline double residual(const Correspondence& c, const RigidTransform& tf) {
    const Mat3& r = tf.rot.matrix();
    const Vec3& x = c.x;
    const double dx = r(0, 0) * x[0] + r(0, 1) * x[1] + r(0, 2) * x[2] + tf.tra[0] - c.y[0];
    const double dy = r(1, 0) * x[0] + r(1, 1) * x[1] + r(1, 2) * x[2] + tf.tra[1] - c.y[1];
    const double dz = r(2, 0) * x[0] + r(2, 1) * x[1] + r(2, 2) * x[2] + tf.tra[2] - c.y[2];
    return std::sqrt(dx * dx + dy * dy + dz * dz);
}

/// Exact three-point solver from orthonormal triads; nullopt when either
/// triangle is degenerate.
std::optional<RigidTransform> try_solve_minimal_triad(const Correspondence& c1,
                                                      const Correspondence& c2,
                                                      const Correspondence& c3);

/// Throws DegenerateTriad on collinear source or target points.
RigidTransform solve_minimal_triad(const Correspondence& c1, const Correspondence& c2,
                                   const Correspondence& c3);

/// Least-squares rigid fit (SVD of the cross-covariance, reflection-corrected).
/// Throws DegenerateSet with fewer than 3 points or rank(H) < 2.
RigidTransform solve_svd(std::span<const Correspondence> set);

/// Same fit over the members of `set` at the given positions.
RigidTransform solve_svd(std::span<const Correspondence> set, std::span<const std::size_t> positions);

/// Indices (Correspondence::index) whose residual under tf is <= threshold, in input order.
std::vector<std::size_t> consensus_set(std::span<const Correspondence> set, const RigidTransform& tf,
                                       double threshold);

}  // namespace dreg

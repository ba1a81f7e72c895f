#include "dreg/solvers.hpp"

#include <stdexcept>

#include <Eigen/LU>
#include <Eigen/SVD>

#include "dreg/errors.hpp"
#include "dreg/kernels.hpp"

namespace dreg {

namespace {

double triangle_area(const Vec3& a, const Vec3& b, const Vec3& c) {
    return 0.5 * (b - a).cross(c - a).norm();
}

// Columns: unit first edge, in-plane orthogonal, normal.
Mat3 triad_frame(const Vec3& p1, const Vec3& p2, const Vec3& p3) {
    const Vec3 e1 = (p2 - p1).normalized();
    const Vec3 v = p3 - p1;
    const Vec3 e2 = (v - v.dot(e1) * e1).normalized();
    Mat3 f;
    f.col(0) = e1;
    f.col(1) = e2;
    f.col(2) = e1.cross(e2);
    return f;
}

RigidTransform fit_centered(const Mat3& h, const Vec3& cx, const Vec3& cy) {
    Eigen::JacobiSVD<Mat3> svd(h, Eigen::ComputeFullU | Eigen::ComputeFullV);
    const Vec3 s = svd.singularValues();
    if (!(s(0) > 0.0) || s(1) <= 1e-12 * s(0)) {
        throw DegenerateSet("cross-covariance has rank < 2");
    }
    const Mat3& u = svd.matrixU();
    const Mat3& v = svd.matrixV();
    Mat3 d = Mat3::Identity();
    d(2, 2) = (v * u.transpose()).determinant() < 0.0 ? -1.0 : 1.0;
    const Mat3 r = v * d * u.transpose();
    return {Rotation::from_matrix_unchecked(r), cy - r * cx};
}

}  // namespace

std::optional<RigidTransform> try_solve_minimal_triad(const Correspondence& c1, const Correspondence& c2,
                                                      const Correspondence& c3) {
    if (triangle_area(c1.x, c2.x, c3.x) <= kMinTriadArea || triangle_area(c1.y, c2.y, c3.y) <= kMinTriadArea) {
        return std::nullopt;
    }
    const Mat3 fx = triad_frame(c1.x, c2.x, c3.x);
    const Mat3 fy = triad_frame(c1.y, c2.y, c3.y);
    const Mat3 r = fy * fx.transpose();
    const Vec3 cx = (c1.x + c2.x + c3.x) / 3.0;
    const Vec3 cy = (c1.y + c2.y + c3.y) / 3.0;
    return RigidTransform{Rotation::from_matrix_unchecked(r), cy - r * cx};
}

RigidTransform solve_minimal_triad(const Correspondence& c1, const Correspondence& c2, const Correspondence& c3) {
    auto tf = try_solve_minimal_triad(c1, c2, c3);
    if (!tf) {
        throw DegenerateTriad("source or target points are collinear");
    }
    return *tf;
}

RigidTransform solve_svd(std::span<const Correspondence> set) {
    if (set.size() < 3) {
        throw DegenerateSet("at least 3 correspondences are required");
    }
    Vec3 cx = Vec3::Zero();
    Vec3 cy = Vec3::Zero();
    for (const auto& c : set) {
        cx += c.x;
        cy += c.y;
    }
    cx /= static_cast<double>(set.size());
    cy /= static_cast<double>(set.size());
    Mat3 h = Mat3::Zero();
    for (const auto& c : set) {
        h += (c.x - cx) * (c.y - cy).transpose();
    }
    return fit_centered(h, cx, cy);
}

RigidTransform solve_svd(std::span<const Correspondence> set, std::span<const std::size_t> positions) {
    if (positions.size() < 3) {
        throw DegenerateSet("at least 3 correspondences are required");
    }
    Vec3 cx = Vec3::Zero();
    Vec3 cy = Vec3::Zero();
    for (std::size_t p : positions) {
        cx += set[p].x;
        cy += set[p].y;
    }
    cx /= static_cast<double>(positions.size());
    cy /= static_cast<double>(positions.size());
    Mat3 h = Mat3::Zero();
    for (std::size_t p : positions) {
        h += (set[p].x - cx) * (set[p].y - cy).transpose();
    }
    return fit_centered(h, cx, cy);
}

std::vector<std::size_t> consensus_set(std::span<const Correspondence> set, const RigidTransform& tf,
                                       double threshold) {
    if (!(threshold > 0.0)) {
        throw std::invalid_argument("consensus threshold must be positive");
    }
    std::vector<std::size_t> out = kernels::consensus_serial(set, tf, threshold);
    for (auto& p : out) {
        p = set[p].index;
    }
    return out;
}

}  // namespace dreg

#include "dreg/geom.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include <Eigen/LU>

#include "dreg/errors.hpp"

namespace dreg {

namespace {

constexpr double kPi = std::numbers::pi;
// Past this angle the skew part of R is too small to carry the axis reliably.
constexpr double kNearPi = kPi - 1e-3;

double clamp_unit(double c) { return std::clamp(c, -1.0, 1.0); }

}  // namespace

bool is_rotation(const Mat3& m, double tol) {
    if (!m.allFinite()) {
        return false;
    }
    const double ortho = (m.transpose() * m - Mat3::Identity()).norm();
    return ortho < tol && std::abs(m.determinant() - 1.0) < tol;
}

Rotation Rotation::from_matrix(const Mat3& m) {
    if (!is_rotation(m)) {
        throw NotARotation("matrix is not in SO(3)");
    }
    return Rotation(m);
}

std::array<double, 9> Rotation::vec() const {
    std::array<double, 9> out{};
    for (int c = 0; c < 3; ++c) {
        for (int r = 0; r < 3; ++r) {
            out[static_cast<std::size_t>(3 * c + r)] = m_(r, c);
        }
    }
    return out;
}

RigidTransform RigidTransform::inverse() const {
    const Rotation inv = rot.inverse();
    return {inv, -(inv * tra)};
}

RigidTransform RigidTransform::operator*(const RigidTransform& other) const {
    return {rot * other.rot, rot * other.tra + tra};
}

Mat3 hat(const Vec3& w) {
    Mat3 k;
    k << 0.0, -w.z(), w.y(),
         w.z(), 0.0, -w.x(),
         -w.y(), w.x(), 0.0;
    return k;
}

Vec3 vee(const Mat3& s) { return {s(2, 1), s(0, 2), s(1, 0)}; }

Rotation rot_x(double angle) { return exp_map(Vec3::UnitX() * angle); }
Rotation rot_y(double angle) { return exp_map(Vec3::UnitY() * angle); }
Rotation rot_z(double angle) { return exp_map(Vec3::UnitZ() * angle); }

Rotation exp_map(const Vec3& w) {
    const double theta = w.norm();
    const Mat3 k = hat(w);
    if (theta < kSmallAngle) {
        return Rotation::from_matrix_unchecked(Mat3::Identity() + k + 0.5 * k * k);
    }
    const double a = std::sin(theta) / theta;
    const double b = (1.0 - std::cos(theta)) / (theta * theta);
    return Rotation::from_matrix_unchecked(Mat3::Identity() + a * k + b * k * k);
}

Vec3 log_map(const Rotation& r) {
    const Mat3& m = r.matrix();
    const double c = clamp_unit((m.trace() - 1.0) / 2.0);
    const Vec3 skew = vee(m - m.transpose()) / 2.0;  // sin(theta) * axis
    const double s = skew.norm();
    const double theta = std::atan2(s, c);

    if (theta < kSmallAngle) {
        // log(R) ~ (R - R^T)/2 to second order
        return skew;
    }
    if (theta < kNearPi) {
        return skew * (theta / s);
    }

    // Near pi: the symmetric part gives a a^T = ((R + R^T)/2 - c I) / (1 - c).
    const Mat3 sym = ((m + m.transpose()) / 2.0 - c * Mat3::Identity()) / (1.0 - c);
    Eigen::Index k = 0;
    sym.diagonal().maxCoeff(&k);
    Vec3 axis = sym.col(k) / std::sqrt(std::max(sym(k, k), 0.0));
    axis.normalize();
    if (s > 0.0 && axis.dot(skew) < 0.0) {
        axis = -axis;
    } else if (s == 0.0 && axis(k) < 0.0) {
        axis = -axis;
    }
    return axis * theta;
}

AxisAngle to_axis_angle(const Rotation& r) {
    const Vec3 w = log_map(r);
    const double angle = w.norm();
    if (angle == 0.0) {
        return {};
    }
    return {w / angle, angle};
}

Rotation from_axis_angle(const AxisAngle& aa) { return exp_map(aa.axis.normalized() * aa.angle); }

double geodesic_distance(const Rotation& a, const Rotation& b) {
    const double tr = (a.matrix().transpose() * b.matrix()).trace();
    return std::abs(std::acos(clamp_unit((tr - 1.0) / 2.0)));
}

double chordal_distance(const Rotation& a, const Rotation& b) {
    return (a.matrix() - b.matrix()).norm();
}

Rotation average_rotation(const Rotation& a, const Rotation& b) {
    const Rotation rel = a.inverse() * b;
    if (geodesic_distance(Rotation::identity(), rel) >= kPi - 1e-6) {
        throw DegenerateAverage("rotations are antipodal; the geodesic midpoint is not unique");
    }
    return a * exp_map(log_map(rel) / 2.0);
}

Translation average_translation(const Translation& a, const Translation& b) { return (a + b) / 2.0; }

}  // namespace dreg

#pragma once

#include <array>

#include <Eigen/Core>
#include <Eigen/Geometry>

namespace dreg {

using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;

/// Tolerance used for the orthogonality and determinant checks of SO(3).
inline constexpr double kRotationTolerance = 1e-9;
/// Below this angle exp/log switch to their series expansions.
inline constexpr double kSmallAngle = 1e-8;

/// True when m^T m = I (Frobenius error below tol) and det(m) = +1 within tol.
bool is_rotation(const Mat3& m, double tol = kRotationTolerance);

/**
 * An element of SO(3).
 *
 * Construction from an arbitrary matrix is checked; no projection onto the
 * nearest rotation is ever applied. Producers that build rotations by
 * construction (exp map, triads, SVD) use from_matrix_unchecked.
 */
class Rotation {
public:
    Rotation() : m_(Mat3::Identity()) {}

    /// Throws NotARotation when m fails the SO(3) checks.
    static Rotation from_matrix(const Mat3& m);
    static Rotation from_matrix_unchecked(const Mat3& m) { return Rotation(m); }
    static Rotation identity() { return Rotation(); }

    const Mat3& matrix() const { return m_; }
    double operator()(int row, int col) const { return m_(row, col); }

    Rotation inverse() const { return Rotation(m_.transpose()); }
    Rotation operator*(const Rotation& other) const { return Rotation(m_ * other.m_); }
    Vec3 operator*(const Vec3& p) const { return m_ * p; }

    /// Column-major vectorization (r1..r9 read down the columns).
    std::array<double, 9> vec() const;

private:
    explicit Rotation(const Mat3& m) : m_(m) {}

    Mat3 m_;
};

using Translation = Vec3;

struct RigidTransform {
    Rotation rot;
    Translation tra = Translation::Zero();

    static RigidTransform identity() { return {}; }

    Vec3 apply(const Vec3& p) const { return rot * p + tra; }
    RigidTransform inverse() const;
    /// (this * other).apply(p) == this->apply(other.apply(p))
    RigidTransform operator*(const RigidTransform& other) const;
};

struct AxisAngle {
    Vec3 axis = Vec3::UnitX();
    double angle = 0.0;  // radians, in [0, pi]
};

AxisAngle to_axis_angle(const Rotation& r);
Rotation from_axis_angle(const AxisAngle& aa);

Mat3 hat(const Vec3& w);
Vec3 vee(const Mat3& skew);

Rotation rot_x(double angle);
Rotation rot_y(double angle);
Rotation rot_z(double angle);

/// Rodrigues' formula; second-order series for |w| < kSmallAngle.
Rotation exp_map(const Vec3& w);

/// Inverse of exp_map with |w| in [0, pi]. At angle pi the axis is taken from
/// the largest diagonal element of (R + I)/2 and its sign fixed so that that
/// component is positive.
Vec3 log_map(const Rotation& r);

/// |arccos((trace(a^T b) - 1) / 2)| with the argument clamped to [-1, 1].
double geodesic_distance(const Rotation& a, const Rotation& b);

/// ||a - b||_F, equal to 2*sqrt(2)*sin(geodesic / 2).
double chordal_distance(const Rotation& a, const Rotation& b);

/// Geodesic midpoint a * exp(log(a^T b) / 2). Throws DegenerateAverage when
/// the inputs are (numerically) antipodal.
Rotation average_rotation(const Rotation& a, const Rotation& b);

Translation average_translation(const Translation& a, const Translation& b);

inline Vec3 apply(const RigidTransform& tf, const Vec3& p) { return tf.apply(p); }

}  // namespace dreg

#pragma once

#include <Eigen/Core>
#include <Eigen/Eigenvalues>
#include <cmath>
#include <numbers>
#include <span>
#include <stdexcept>

#include "prbpf/rotation_grid.hpp"

namespace prbpf {

inline constexpr double kDegToRad = std::numbers::pi / 180.0;
inline constexpr double kRadToDeg = 180.0 / std::numbers::pi;

/// Rotation as a unit quaternion (w, x, y, z). q and -q denote the same
/// rotation; canonical() picks the representative with w >= 0.
struct UnitQuaternion {
    double w = 1.0, x = 0.0, y = 0.0, z = 0.0;

    static UnitQuaternion identity() { return {}; }

    double norm() const { return std::sqrt(w * w + x * x + y * y + z * z); }

    UnitQuaternion normalized() const {
        const double n = norm();
        if (!(n > 0.0)) throw std::domain_error("UnitQuaternion: zero norm");
        return {w / n, x / n, y / n, z / n};
    }

    UnitQuaternion canonical() const {
        constexpr double kTie = 1e-12;
        bool flip;
        if (std::abs(w) > kTie) flip = w < 0.0;
        else if (std::abs(x) > kTie) flip = x < 0.0;
        else if (std::abs(y) > kTie) flip = y < 0.0;
        else flip = z < 0.0;
        return flip ? UnitQuaternion{-w, -x, -y, -z} : *this;
    }

    UnitQuaternion conjugate() const { return {w, -x, -y, -z}; }

    double dot(const UnitQuaternion& o) const { return w * o.w + x * o.x + y * o.y + z * o.z; }

    friend UnitQuaternion operator*(const UnitQuaternion& a, const UnitQuaternion& b) {
        return {a.w * b.w - a.x * b.x - a.y * b.y - a.z * b.z,
                a.w * b.x + a.x * b.w + a.y * b.z - a.z * b.y,
                a.w * b.y - a.x * b.z + a.y * b.w + a.z * b.x,
                a.w * b.z + a.x * b.y - a.y * b.x + a.z * b.w};
    }

    /// Rotates a 3-vector.
    Eigen::Vector3d rotate(const Eigen::Vector3d& v) const {
        const Eigen::Vector3d u(x, y, z);
        const Eigen::Vector3d t = 2.0 * u.cross(v);
        return v + w * t + u.cross(t);
    }

    Eigen::Matrix3d matrix() const {
        Eigen::Matrix3d r;
        r << 1 - 2 * (y * y + z * z), 2 * (x * y - w * z), 2 * (x * z + w * y),
            2 * (x * y + w * z), 1 - 2 * (x * x + z * z), 2 * (y * z - w * x),
            2 * (x * z - w * y), 2 * (y * z + w * x), 1 - 2 * (x * x + y * y);
        return r;
    }
};

inline UnitQuaternion axis_angle_quaternion(const Eigen::Vector3d& axis, double angle_deg) {
    const Eigen::Vector3d a = axis.normalized();
    const double h = 0.5 * angle_deg * kDegToRad;
    const double s = std::sin(h);
    return {std::cos(h), a.x() * s, a.y() * s, a.z() * s};
}

/// Euler convention: R = Ry(azimuth) * Rx(elevation) * Rz(inplane) — azimuth
/// about the camera up-axis, then elevation about the rotated lateral axis,
/// then in-plane about the viewing axis.
inline UnitQuaternion euler_to_quaternion(const EulerAngles& e) {
    const double ha = 0.5 * e.azimuth * kDegToRad;
    const double he = 0.5 * e.elevation * kDegToRad;
    const double hi = 0.5 * e.inplane * kDegToRad;
    const UnitQuaternion qa{std::cos(ha), 0.0, std::sin(ha), 0.0};
    const UnitQuaternion qe{std::cos(he), std::sin(he), 0.0, 0.0};
    const UnitQuaternion qi{std::cos(hi), 0.0, 0.0, std::sin(hi)};
    return qa * qe * qi;
}

/// Inverse of euler_to_quaternion away from gimbal lock (|elevation| = 90).
/// At the poles azimuth and in-plane are degenerate; the combined angle is
/// reported as azimuth and in-plane is set to zero.
inline EulerAngles quaternion_to_euler(const UnitQuaternion& qin) {
    const UnitQuaternion q = qin.normalized();
    const double sin_el = 2.0 * (q.w * q.x - q.y * q.z);
    constexpr double kLock = 1.0 - 1e-12;
    if (sin_el >= kLock || sin_el <= -kLock) {
        // R00 = cos(az -/+ ip), R01 = +/- sin(az -/+ ip); collapse onto azimuth.
        const double r00 = 1.0 - 2.0 * (q.y * q.y + q.z * q.z);
        const double r01 = 2.0 * (q.x * q.y - q.w * q.z);
        const double el = sin_el > 0.0 ? 90.0 : -90.0;
        const double az = (sin_el > 0.0 ? std::atan2(r01, r00) : std::atan2(-r01, r00)) * kRadToDeg;
        return EulerAngles(az, el, 0.0);
    }
    const double el = std::asin(sin_el) * kRadToDeg;
    const double az =
        std::atan2(2.0 * (q.x * q.z + q.w * q.y), 1.0 - 2.0 * (q.x * q.x + q.y * q.y)) * kRadToDeg;
    const double ip =
        std::atan2(2.0 * (q.x * q.y + q.w * q.z), 1.0 - 2.0 * (q.x * q.x + q.z * q.z)) * kRadToDeg;
    return EulerAngles(az, el, ip);
}

/// Angle in degrees of the relative rotation, in [0, 180]. Double-cover safe.
inline double geodesic_distance(const UnitQuaternion& a, const UnitQuaternion& b) {
    double d = std::abs(a.dot(b));
    if (d > 1.0) d = 1.0;
    return 2.0 * std::acos(d) * kRadToDeg;
}

/// Weighted rotation mean: the maximizer of sum_i w_i (q . q_i)^2, i.e. the
/// principal eigenvector of sum_i w_i q_i q_i^T.
inline UnitQuaternion quaternion_weighted_average(std::span<const UnitQuaternion> qs,
                                                  std::span<const double> ws) {
    if (qs.empty() || qs.size() != ws.size())
        throw std::domain_error("quaternion_weighted_average: empty or mismatched inputs");
    Eigen::Matrix4d outer = Eigen::Matrix4d::Zero();
    bool any_positive = false;
    for (std::size_t i = 0; i < qs.size(); ++i) {
        const double w = ws[i];
        if (w < 0.0) throw std::domain_error("quaternion_weighted_average: negative weight");
        if (w == 0.0) continue;
        any_positive = true;
        Eigen::Vector4d v(qs[i].w, qs[i].x, qs[i].y, qs[i].z);
        outer.noalias() += w * v * v.transpose();
    }
    if (!any_positive)
        throw std::domain_error("quaternion_weighted_average: all weights are zero");
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix4d> solver(outer);
    const Eigen::Vector4d v = solver.eigenvectors().col(3);  // largest eigenvalue
    return UnitQuaternion{v[0], v[1], v[2], v[3]}.normalized().canonical();
}

inline UnitQuaternion slerp(const UnitQuaternion& a, const UnitQuaternion& b, double t) {
    double d = a.dot(b);
    UnitQuaternion bb = b;
    if (d < 0.0) {
        d = -d;
        bb = {-b.w, -b.x, -b.y, -b.z};
    }
    if (d > 1.0 - 1e-12) {
        return UnitQuaternion{a.w + t * (bb.w - a.w), a.x + t * (bb.x - a.x),
                              a.y + t * (bb.y - a.y), a.z + t * (bb.z - a.z)}
            .normalized();
    }
    const double theta = std::acos(d);
    const double sa = std::sin((1.0 - t) * theta) / std::sin(theta);
    const double sb = std::sin(t * theta) / std::sin(theta);
    return UnitQuaternion{sa * a.w + sb * bb.w, sa * a.x + sb * bb.x, sa * a.y + sb * bb.y,
                          sa * a.z + sb * bb.z}
        .normalized();
}

}  // namespace prbpf

#pragma once

#include <algorithm>
#include <stdexcept>
#include <utility>

#include "prbpf/quaternion.hpp"

namespace prbpf {

struct CameraIntrinsics {
    double fx = 500.0, fy = 500.0;
    double px = 320.0, py = 240.0;
    int width = 640, height = 480;
};

/// Camera-frame position in meters; valid hypotheses have z > 0 (in front of
/// the camera). Motion noise may push particles to z <= 0 — those are treated
/// as starved by the observation model rather than rejected here.
struct Translation {
    double x = 0.0, y = 0.0, z = 1.0;

    friend Translation operator+(const Translation& a, const Translation& b) {
        return {a.x + b.x, a.y + b.y, a.z + b.z};
    }
    friend Translation operator-(const Translation& a, const Translation& b) {
        return {a.x - b.x, a.y - b.y, a.z - b.z};
    }
    friend Translation operator*(double s, const Translation& t) {
        return {s * t.x, s * t.y, s * t.z};
    }
    double norm() const { return std::sqrt(x * x + y * y + z * z); }
    Eigen::Vector3d vec() const { return {x, y, z}; }
};

struct Pose {
    UnitQuaternion rotation;
    Translation translation;
};

/// Square region of interest; center and size in (real-valued) pixels.
struct Roi {
    double center_u = 0.0, center_v = 0.0;
    double size = 0.0;
};

/// Pinhole projection of a camera-frame point: u = fx*x/z + px, v = fy*y/z + py.
inline std::pair<double, double> project_translation(const Translation& t,
                                                     const CameraIntrinsics& c) {
    if (!(t.z > 0.0)) throw std::domain_error("project_translation: z must be positive");
    return {c.fx * t.x / t.z + c.px, c.fy * t.y / t.z + c.py};
}

inline Translation backproject(double u, double v, double z, const CameraIntrinsics& c) {
    return {z * (u - c.px) / c.fx, z * (v - c.py) / c.fy, z};
}

/// RoI implied by a translation hypothesis: center from projection, size
/// scaled from the canonical view by z_canonical / z (apparent size shrinks
/// with distance).
inline Roi roi_for_translation(const Translation& t, const CameraIntrinsics& c,
                               double z_canonical, double s_canonical) {
    const auto [u, v] = project_translation(t, c);
    return {u, v, s_canonical * z_canonical / t.z};
}

/// Fraction of the RoI area that overlaps the image rectangle.
inline double roi_image_overlap(const Roi& roi, const CameraIntrinsics& c) {
    if (!(roi.size > 0.0)) return 0.0;
    const double h = 0.5 * roi.size;
    const double u0 = std::max(roi.center_u - h, 0.0);
    const double v0 = std::max(roi.center_v - h, 0.0);
    const double u1 = std::min(roi.center_u + h, static_cast<double>(c.width));
    const double v1 = std::min(roi.center_v + h, static_cast<double>(c.height));
    if (u1 <= u0 || v1 <= v0) return 0.0;
    return (u1 - u0) * (v1 - v0) / (roi.size * roi.size);
}

}  // namespace prbpf

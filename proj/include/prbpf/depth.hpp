#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <limits>
#include <variant>
#include <vector>

#include "prbpf/camera.hpp"
#include "prbpf/errors.hpp"
#include "prbpf/io.hpp"

namespace prbpf {

/// Depth raster in meters with a per-pixel validity flag (sensor holes and
/// background are invalid).
struct DepthPatch {
    int width = 0, height = 0;
    std::vector<float> depth_m;
    std::vector<std::uint8_t> valid;

    static DepthPatch invalid_patch(int w, int h) {
        DepthPatch p;
        p.width = w;
        p.height = h;
        p.depth_m.assign(static_cast<std::size_t>(w) * h, 0.0f);
        p.valid.assign(static_cast<std::size_t>(w) * h, 0);
        return p;
    }

    std::size_t count() const { return depth_m.size(); }
    void set(int r, int c, float d) {
        depth_m[static_cast<std::size_t>(r) * width + c] = d;
        valid[static_cast<std::size_t>(r) * width + c] = 1;
    }
};

struct SphereShape {
    double radius = 0.1;
};

/// Axis-aligned box in the object frame, given by half extents.
struct BoxShape {
    Eigen::Vector3d half_extents{0.05, 0.05, 0.05};
};

using ProxyShape = std::variant<SphereShape, BoxShape>;

namespace detail {

constexpr double kRayNear = 1e-6;

// Rays are parametrized as p = t * (dx, dy, 1), so the parameter t is the
// camera-frame depth of the hit directly.
inline bool ray_depth(const ProxyShape& shape, const Pose& pose, double dx, double dy,
                      double& depth_out) {
    if (std::holds_alternative<SphereShape>(shape)) {
        const double r = std::get<SphereShape>(shape).radius;
        const Eigen::Vector3d c = pose.translation.vec();
        const Eigen::Vector3d d(dx, dy, 1.0);
        const double a = d.squaredNorm();
        const double b = -2.0 * d.dot(c);
        const double cc = c.squaredNorm() - r * r;
        const double disc = b * b - 4.0 * a * cc;
        if (disc < 0.0) return false;
        const double sq = std::sqrt(disc);
        double t = (-b - sq) / (2.0 * a);
        if (t < kRayNear) t = (-b + sq) / (2.0 * a);
        if (t < kRayNear) return false;
        depth_out = t;
        return true;
    }
    const BoxShape& box = std::get<BoxShape>(shape);
    // Transform the ray into the object frame and slab-test the box.
    const Eigen::Matrix3d rt = pose.rotation.matrix().transpose();
    const Eigen::Vector3d o = rt * (-pose.translation.vec());
    const Eigen::Vector3d d = rt * Eigen::Vector3d(dx, dy, 1.0);
    double tmin = kRayNear, tmax = std::numeric_limits<double>::infinity();
    for (int k = 0; k < 3; ++k) {
        const double h = box.half_extents[k];
        if (std::abs(d[k]) < 1e-15) {
            if (o[k] < -h || o[k] > h) return false;
            continue;
        }
        double t0 = (-h - o[k]) / d[k];
        double t1 = (h - o[k]) / d[k];
        if (t0 > t1) std::swap(t0, t1);
        tmin = std::max(tmin, t0);
        tmax = std::min(tmax, t1);
        if (tmin > tmax) return false;
    }
    depth_out = tmin;
    return true;
}

}  // namespace detail

/// Renders the analytic proxy shape at `pose` over the RoI resampled to a
/// raster x raster grid. Background cells are invalid.
inline DepthPatch render_depth(const Pose& pose, const ProxyShape& shape,
                               const CameraIntrinsics& c, const Roi& roi, int raster = 64) {
    DepthPatch patch = DepthPatch::invalid_patch(raster, raster);
    const double cell = roi.size / raster;
    const double u0 = roi.center_u - 0.5 * roi.size;
    const double v0 = roi.center_v - 0.5 * roi.size;
    for (int r = 0; r < raster; ++r) {
        const double v = v0 + (r + 0.5) * cell;
        const double dy = (v - c.py) / c.fy;
        for (int col = 0; col < raster; ++col) {
            const double u = u0 + (col + 0.5) * cell;
            const double dx = (u - c.px) / c.fx;
            double depth;
            if (detail::ray_depth(shape, pose, dx, dy, depth))
                patch.set(r, col, static_cast<float>(depth));
        }
    }
    return patch;
}

/// Nearest-neighbor resampling of a full-image depth raster onto the RoI grid.
inline DepthPatch resample_depth(const DepthPatch& full, const Roi& roi, int raster = 64) {
    DepthPatch patch = DepthPatch::invalid_patch(raster, raster);
    const double cell = roi.size / raster;
    const double u0 = roi.center_u - 0.5 * roi.size;
    const double v0 = roi.center_v - 0.5 * roi.size;
    for (int r = 0; r < raster; ++r) {
        const int src_v = static_cast<int>(std::floor(v0 + (r + 0.5) * cell));
        if (src_v < 0 || src_v >= full.height) continue;
        for (int col = 0; col < raster; ++col) {
            const int src_u = static_cast<int>(std::floor(u0 + (col + 0.5) * cell));
            if (src_u < 0 || src_u >= full.width) continue;
            const std::size_t idx = static_cast<std::size_t>(src_v) * full.width + src_u;
            if (full.valid[idx]) patch.set(r, col, full.depth_m[idx]);
        }
    }
    return patch;
}

struct VisibilityResult {
    std::vector<std::uint8_t> mask;
    double ratio = 0.0;  // visible / rendered-valid
};

/// A rendered pixel is visible when the measurement does not contradict it:
/// rendered - measured < margin. Sensor holes never count as visible.
inline VisibilityResult visibility_mask(const DepthPatch& rendered, const DepthPatch& measured,
                                        double margin_m) {
    if (rendered.width != measured.width || rendered.height != measured.height)
        throw std::domain_error("visibility_mask: raster mismatch");
    VisibilityResult res;
    res.mask.assign(rendered.count(), 0);
    std::size_t rendered_valid = 0, visible = 0;
    for (std::size_t i = 0; i < rendered.count(); ++i) {
        if (!rendered.valid[i]) continue;
        ++rendered_valid;
        if (measured.valid[i] &&
            static_cast<double>(rendered.depth_m[i]) - measured.depth_m[i] < margin_m) {
            res.mask[i] = 1;
            ++visible;
        }
    }
    res.ratio = rendered_valid == 0 ? 0.0 : static_cast<double>(visible) / rendered_valid;
    return res;
}

/// Mean clamped depth error over visible pixels: avg(min(|measured - rendered| / tau, 1)).
/// An empty mask scores worst case 1 — an invisible hypothesis is not rewarded.
inline double depth_discrepancy(const DepthPatch& rendered, const DepthPatch& measured,
                                const std::vector<std::uint8_t>& mask, double tau_m) {
    if (!(tau_m > 0.0)) throw std::domain_error("depth_discrepancy: tau must be positive");
    double acc = 0.0;
    std::size_t n = 0;
    for (std::size_t i = 0; i < mask.size(); ++i) {
        if (!mask[i]) continue;
        const double err =
            std::abs(static_cast<double>(measured.depth_m[i]) - rendered.depth_m[i]) / tau_m;
        acc += std::min(err, 1.0);
        ++n;
    }
    return n == 0 ? 1.0 : acc / n;
}

/// Depth score per particle: s_d = v * (1 - Delta) in [0, 1]; likelihood is a
/// Gaussian in score space centered at the per-frame maximum over particles.
inline std::vector<double> depth_likelihoods(
    const std::vector<std::pair<double, double>>& visibility_and_discrepancy, double sigma_d) {
    if (!(sigma_d > 0.0)) throw std::domain_error("depth_likelihoods: sigma must be positive");
    std::vector<double> scores(visibility_and_discrepancy.size());
    double best = 0.0;
    for (std::size_t i = 0; i < scores.size(); ++i) {
        const auto& [v, delta] = visibility_and_discrepancy[i];
        scores[i] = v * (1.0 - delta);
        best = std::max(best, scores[i]);
    }
    const double inv2s2 = 1.0 / (2.0 * sigma_d * sigma_d);
    for (double& s : scores) {
        const double d = best - s;
        s = std::exp(-d * d * inv2s2);
    }
    return scores;
}

// ---------------------------------------------------------------------------
// Raster file format: 16-byte header (magic "PRBD", width u32, height u32,
// scale u16 = millimeters per unit, u16 pad), then row-major u16 little-endian
// samples. Zero samples are invalid (sensor holes / background).
// ---------------------------------------------------------------------------

inline void save_depth_raster(const DepthPatch& patch, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw FormatError("cannot open for write: " + path.string());
    out.write("PRBD", 4);
    io::write_u32(out, static_cast<std::uint32_t>(patch.width));
    io::write_u32(out, static_cast<std::uint32_t>(patch.height));
    io::write_u16(out, 1);  // 1 mm per unit
    io::write_u16(out, 0);
    std::vector<std::uint16_t> row(patch.count());
    for (std::size_t i = 0; i < patch.count(); ++i) {
        if (!patch.valid[i]) {
            row[i] = 0;
            continue;
        }
        const double mm = std::round(patch.depth_m[i] * 1000.0);
        row[i] = (mm >= 1.0 && mm <= 65535.0) ? static_cast<std::uint16_t>(mm) : 0;
    }
    io::write_u16_array(out, row);
    if (!out) throw FormatError("short write: " + path.string());
}

inline DepthPatch load_depth_raster(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw FormatError("cannot open depth raster: " + path.string());
    char magic[4];
    in.read(magic, 4);
    if (!in || std::string_view(magic, 4) != "PRBD")
        throw FormatError("bad depth raster magic: " + path.string());
    const std::uint32_t w = io::read_u32(in);
    const std::uint32_t h = io::read_u32(in);
    const std::uint16_t scale = io::read_u16(in);
    io::read_u16(in);  // pad
    if (w == 0 || h == 0 || scale == 0)
        throw FormatError("bad depth raster header: " + path.string());
    std::vector<std::uint16_t> raw(static_cast<std::size_t>(w) * h);
    io::read_u16_array(in, raw);
    if (!in) throw FormatError("truncated depth raster: " + path.string());
    DepthPatch patch = DepthPatch::invalid_patch(static_cast<int>(w), static_cast<int>(h));
    const double to_m = scale / 1000.0;
    for (std::size_t i = 0; i < raw.size(); ++i) {
        if (raw[i] == 0) continue;
        patch.depth_m[i] = static_cast<float>(raw[i] * to_m);
        patch.valid[i] = 1;
    }
    return patch;
}

}  // namespace prbpf

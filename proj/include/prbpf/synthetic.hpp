#pragma once

#include <cmath>
#include <cstdint>
#include <optional>
#include <string>

#include "prbpf/depth.hpp"
#include "prbpf/encoder.hpp"
#include "prbpf/rng.hpp"

namespace prbpf {

enum class SymmetryAxis { azimuth, elevation, inplane };

/// Appearance symmetry of a synthetic object, declared in grid coordinates:
/// cyclic(k) wraps the axis with period 360/k, revolution makes it free, and
/// mirror folds the axis onto a two-element orbit.
struct SymmetrySpec {
    enum class Kind { none, cyclic, mirror, revolution };
    Kind kind = Kind::none;
    int order = 1;
    SymmetryAxis axis = SymmetryAxis::inplane;

    static SymmetrySpec none() { return {}; }
    static SymmetrySpec cyclic(int k, SymmetryAxis axis) {
        if (k < 2) throw std::domain_error("cyclic symmetry requires order >= 2");
        if (axis == SymmetryAxis::elevation)
            throw std::domain_error("cyclic symmetry is only defined on a periodic axis");
        return {Kind::cyclic, k, axis};
    }
    static SymmetrySpec mirror(SymmetryAxis axis) { return {Kind::mirror, 2, axis}; }
    static SymmetrySpec revolution(SymmetryAxis axis) {
        if (axis == SymmetryAxis::elevation)
            throw std::domain_error("revolution symmetry is only defined on a periodic axis");
        return {Kind::revolution, 1, axis};
    }
};

namespace detail {

inline double mirrored_coordinate(double value, SymmetryAxis axis, double elevation) {
    (void)elevation;
    return axis == SymmetryAxis::elevation ? -value : EulerAngles::wrap360(value + 180.0);
}

}  // namespace detail

/// Maps an orientation to its symmetry-orbit representative. Cyclic axes
/// reduce modulo the period; revolution zeroes the axis; mirror picks the
/// lexicographically smaller (azimuth, elevation, inplane) member of the
/// two-element orbit (arbitrary but fixed).
inline EulerAngles canonicalize(const EulerAngles& e, const SymmetrySpec& sym) {
    switch (sym.kind) {
        case SymmetrySpec::Kind::none:
            return e;
        case SymmetrySpec::Kind::cyclic: {
            const double period = 360.0 / sym.order;
            EulerAngles c = e;
            if (sym.axis == SymmetryAxis::azimuth) c.azimuth = std::fmod(c.azimuth, period);
            else c.inplane = std::fmod(c.inplane, period);
            return c;
        }
        case SymmetrySpec::Kind::revolution: {
            EulerAngles c = e;
            if (sym.axis == SymmetryAxis::azimuth) c.azimuth = 0.0;
            else c.inplane = 0.0;
            return c;
        }
        case SymmetrySpec::Kind::mirror: {
            EulerAngles m = e;
            switch (sym.axis) {
                case SymmetryAxis::azimuth:
                    m.azimuth = EulerAngles::wrap360(e.azimuth + 180.0);
                    break;
                case SymmetryAxis::elevation:
                    m.elevation = -e.elevation;
                    break;
                case SymmetryAxis::inplane:
                    m.inplane = EulerAngles::wrap360(e.inplane + 180.0);
                    break;
            }
            const auto key = [](const EulerAngles& a) {
                return std::array<double, 3>{a.azimuth, a.elevation, a.inplane};
            };
            return key(m) < key(e) ? m : e;
        }
    }
    return e;
}

struct SyntheticObject;

/// Random Fourier features of the orbit-canonicalized rotation quaternion:
/// a smooth deterministic unit code, exactly invariant under the declared
/// symmetry. The basis is a pure function of (code_seed, dim, bandwidth).
class SynthFeatureBasis {
  public:
    SynthFeatureBasis(std::uint64_t code_seed, int dim, double bandwidth) : freq_(dim, 4),
                                                                            phase_(dim) {
        std::mt19937_64 rng(derive_seed(code_seed, 0x5e17f0de));
        std::normal_distribution<double> gauss(0.0, bandwidth);
        std::uniform_real_distribution<double> uni(0.0, 2.0 * std::numbers::pi);
        for (int d = 0; d < dim; ++d) {
            for (int k = 0; k < 4; ++k) freq_(d, k) = gauss(rng);
            phase_(d) = uni(rng);
        }
    }

    Embedding features(const UnitQuaternion& q) const {
        const UnitQuaternion c = q.canonical();
        const Eigen::Vector4d v(c.w, c.x, c.y, c.z);
        Eigen::VectorXd f = (freq_ * v + phase_).array().cos();
        f /= f.norm();
        return f.cast<float>();
    }

  private:
    Eigen::Matrix<double, Eigen::Dynamic, 4> freq_;
    Eigen::VectorXd phase_;
};

/// Analytic stand-in for a trained per-object encoder: symmetry group, code
/// generator seed, and a depth-proxy shape with exact ray intersections.
struct SyntheticObject {
    std::string object_id = "object";
    SymmetrySpec symmetry = SymmetrySpec::none();
    std::uint64_t code_seed = 1;
    int dim = 128;
    ProxyShape proxy = SphereShape{0.08};
    double feature_bandwidth = 1.5;

    SynthFeatureBasis basis() const { return SynthFeatureBasis(code_seed, dim, feature_bandwidth); }
};

inline Embedding synth_encode(const SyntheticObject& obj, const SynthFeatureBasis& basis,
                              const EulerAngles& view) {
    return basis.features(euler_to_quaternion(canonicalize(view, obj.symmetry)));
}

/// Code for the object seen from `view`. Symmetry-equivalent orientations map
/// to bitwise-identical codes.
inline Embedding synth_encode(const SyntheticObject& obj, const EulerAngles& view) {
    return synth_encode(obj, obj.basis(), view);
}

inline Embedding synth_encode(const SyntheticObject& obj, const UnitQuaternion& rotation) {
    return synth_encode(obj, quaternion_to_euler(rotation));
}

/// Image-space occluder: rectangle at a fixed depth in front of the scene.
struct Occluder {
    double u0 = 0, v0 = 0, u1 = 0, v1 = 0;
    double depth_m = 0.5;
};

struct NoiseSpec {
    double code_noise = 0.0;      // std of additive embedding perturbation
    double depth_noise = 0.0;     // std meters on measured depth
    double sigma_uv = 8.0;        // RoI center attenuation scale, pixels
    double sigma_logscale = 0.15; // RoI log-size attenuation scale
    std::optional<Occluder> occlusion;
};

/// Canonical view parameters shared by codebook and tracker: the object is
/// encoded at translation (0, 0, z) with an s x s pixel RoI.
struct CanonicalView {
    double z = 1.0;
    std::uint32_t s = 128;
};

namespace detail {

inline double rect_overlap_fraction(double au0, double av0, double au1, double av1,
                                    const Occluder& occ) {
    const double u0 = std::max(au0, occ.u0), v0 = std::max(av0, occ.v0);
    const double u1 = std::min(au1, occ.u1), v1 = std::min(av1, occ.v1);
    if (u1 <= u0 || v1 <= v0) return 0.0;
    const double area = (au1 - au0) * (av1 - av0);
    return area > 0.0 ? (u1 - u0) * (v1 - v0) / area : 0.0;
}

inline Embedding gaussian_vector(int dim, std::mt19937_64& rng) {
    std::normal_distribution<double> gauss(0.0, 1.0);
    Eigen::VectorXd g(dim);
    for (int i = 0; i < dim; ++i) g(i) = gauss(rng);
    return g.cast<float>();
}

}  // namespace detail

/// Simulated observation of the object through a hypothesized RoI. The code
/// is the true code attenuated by RoI misalignment (and occlusion), blended
/// with an orthogonal residual so that cosine(e, true) equals the attenuation
/// exactly when code_noise is zero:
///   a = exp(-|dc|^2/(2 su^2) - ln^2(size/size_true)/(2 sl^2)) * (1 - occluded)
///   e = normalize(a t + sqrt(1-a^2) n + code_noise g)
inline Embedding observe(const SyntheticObject& obj, const SynthFeatureBasis& basis,
                         const Frame& frame, const Roi& roi, const NoiseSpec& noise,
                         const CanonicalView& canonical, std::mt19937_64& rng) {
    double a = 0.0;
    Eigen::VectorXf true_code = Eigen::VectorXf::Zero(obj.dim);
    if (frame.object_present && frame.gt_pose.translation.z > 0.0) {
        const Roi roi_true =
            roi_for_translation(frame.gt_pose.translation, frame.intrinsics, canonical.z,
                                static_cast<double>(canonical.s));
        const double du = roi.center_u - roi_true.center_u;
        const double dv = roi.center_v - roi_true.center_v;
        const double dlog = std::log(roi.size / roi_true.size);
        a = std::exp(-(du * du + dv * dv) / (2.0 * noise.sigma_uv * noise.sigma_uv) -
                     dlog * dlog / (2.0 * noise.sigma_logscale * noise.sigma_logscale));
        if (noise.occlusion && noise.occlusion->depth_m < frame.gt_pose.translation.z) {
            const double h = 0.5 * roi_true.size;
            a *= 1.0 - detail::rect_overlap_fraction(roi_true.center_u - h, roi_true.center_v - h,
                                                     roi_true.center_u + h, roi_true.center_v + h,
                                                     *noise.occlusion);
        }
        true_code = basis.features(frame.gt_pose.rotation);
    }

    Eigen::VectorXf residual = detail::gaussian_vector(obj.dim, rng);
    if (a > 0.0) residual -= residual.dot(true_code) * true_code;
    const float rnorm = residual.norm();
    if (rnorm > 0.0f) residual /= rnorm;

    Eigen::VectorXf e = static_cast<float>(a) * true_code +
                        static_cast<float>(std::sqrt(std::max(0.0, 1.0 - a * a))) * residual;
    if (noise.code_noise > 0.0)
        e += static_cast<float>(noise.code_noise) * detail::gaussian_vector(obj.dim, rng);
    const float norm = e.norm();
    return norm > 0.0f ? Embedding(e / norm) : Embedding(true_code);
}

inline Embedding observe(const SyntheticObject& obj, const Frame& frame, const Roi& roi,
                         const NoiseSpec& noise, const CanonicalView& canonical,
                         std::mt19937_64& rng) {
    const SynthFeatureBasis basis = obj.basis();
    return observe(obj, basis, frame, roi, noise, canonical, rng);
}

/// Encoder backed by the synthetic code generator. Observation noise is a
/// deterministic function of (frame seed, RoI): the same crop always yields
/// the same embedding, so parallel particle evaluation stays reproducible.
class SyntheticEncoder : public Encoder {
  public:
    SyntheticEncoder(SyntheticObject obj, NoiseSpec noise, CanonicalView canonical)
        : obj_(std::move(obj)), noise_(noise), canonical_(canonical), basis_(obj_.basis()) {}

    int dim() const override { return obj_.dim; }

    Embedding encode_canonical(const EulerAngles& view) const override {
        return synth_encode(obj_, basis_, view);
    }

    Embedding encode_roi(const Frame& frame, const Roi& roi) const override {
        std::uint64_t seed = derive_seed(frame.noise_seed, 0x0b5e7fULL);
        seed = derive_seed(seed, static_cast<std::uint64_t>(std::llround(roi.center_u * 4096.0)));
        seed = derive_seed(seed, static_cast<std::uint64_t>(std::llround(roi.center_v * 4096.0)));
        seed = derive_seed(seed, static_cast<std::uint64_t>(std::llround(roi.size * 4096.0)));
        std::mt19937_64 rng(seed);
        return observe(obj_, basis_, frame, roi, noise_, canonical_, rng);
    }

    const SyntheticObject& object() const { return obj_; }
    const NoiseSpec& noise() const { return noise_; }
    const CanonicalView& canonical() const { return canonical_; }

  private:
    SyntheticObject obj_;
    NoiseSpec noise_;
    CanonicalView canonical_;
    SynthFeatureBasis basis_;
};

/// Deterministic surface samples of the proxy shape, for pose metrics.
inline std::vector<Eigen::Vector3d> sample_model_points(const ProxyShape& shape, int count,
                                                        std::uint64_t seed) {
    std::mt19937_64 rng(derive_seed(seed, 0x90de15ULL));
    std::normal_distribution<double> gauss(0.0, 1.0);
    std::uniform_real_distribution<double> uni(-1.0, 1.0);
    std::vector<Eigen::Vector3d> points;
    points.reserve(count);
    if (std::holds_alternative<SphereShape>(shape)) {
        const double r = std::get<SphereShape>(shape).radius;
        while (static_cast<int>(points.size()) < count) {
            Eigen::Vector3d v(gauss(rng), gauss(rng), gauss(rng));
            const double n = v.norm();
            if (n < 1e-9) continue;
            points.push_back(v * (r / n));
        }
        return points;
    }
    const Eigen::Vector3d h = std::get<BoxShape>(shape).half_extents;
    const double areas[3] = {h.y() * h.z(), h.x() * h.z(), h.x() * h.y()};
    const double total = areas[0] + areas[1] + areas[2];
    std::uniform_real_distribution<double> pick(0.0, total);
    for (int i = 0; i < count; ++i) {
        const double p = pick(rng);
        const int axis = p < areas[0] ? 0 : (p < areas[0] + areas[1] ? 1 : 2);
        const double side = uni(rng) < 0.0 ? -1.0 : 1.0;
        Eigen::Vector3d v(uni(rng) * h.x(), uni(rng) * h.y(), uni(rng) * h.z());
        v[axis] = side * h[axis];
        points.push_back(v);
    }
    return points;
}

}  // namespace prbpf

#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <utility>
#include <vector>

#include "prbpf/rotation_grid.hpp"

namespace prbpf {

/// Dense non-negative array over a rotation grid. Stored unnormalized while
/// likelihoods accumulate; normalize() is called at well-defined points so
/// the particle weight can be read off the raw sum first.
class RotationDistribution {
  public:
    RotationDistribution(const RotationGrid& grid, std::vector<double> values)
        : grid_(grid), values_(std::move(values)) {
        if (values_.size() != grid_.total())
            throw std::domain_error("RotationDistribution: size does not match grid");
    }

    static RotationDistribution uniform(const RotationGrid& grid) {
        return RotationDistribution(grid,
                                    std::vector<double>(grid.total(), 1.0 / grid.total()));
    }

    static RotationDistribution delta(const RotationGrid& grid, std::size_t bin) {
        if (bin >= grid.total()) throw std::domain_error("delta: bin out of range");
        std::vector<double> v(grid.total(), 0.0);
        v[bin] = 1.0;
        return RotationDistribution(grid, std::move(v));
    }

    static RotationDistribution zeros(const RotationGrid& grid) {
        return RotationDistribution(grid, std::vector<double>(grid.total(), 0.0));
    }

    const RotationGrid& grid() const { return grid_; }
    std::size_t size() const { return values_.size(); }
    double operator[](std::size_t i) const { return values_[i]; }
    double& operator[](std::size_t i) { return values_[i]; }
    const double* data() const { return values_.data(); }
    double* data() { return values_.data(); }
    std::vector<double>& values() { return values_; }
    const std::vector<double>& values() const { return values_; }

    double sum() const {
        double s = 0.0;
        for (double v : values_) s += v;
        return s;
    }

    /// Scales entries to sum 1; returns the pre-normalization sum.
    double normalize() {
        const double s = sum();
        if (!(s > 0.0)) throw std::domain_error("normalize: empty distribution");
        const double inv = 1.0 / s;
        for (double& v : values_) v *= inv;
        return s;
    }

  private:
    RotationGrid grid_;
    std::vector<double> values_;
};

/// Separable kernel over grid bin offsets, one 1-D tap array per axis, each
/// normalized to sum 1 so the product kernel also sums to 1.
struct GridKernel {
    int hw_azimuth = 0, hw_elevation = 0, hw_inplane = 0;
    std::vector<double> taps_azimuth{1.0};
    std::vector<double> taps_elevation{1.0};
    std::vector<double> taps_inplane{1.0};

    static GridKernel delta() { return {}; }

    bool is_delta() const { return hw_azimuth == 0 && hw_elevation == 0 && hw_inplane == 0; }

    /// Product weight at offset (da, de, di), offsets in bins.
    double dense(int da, int de, int di) const {
        if (std::abs(da) > hw_azimuth || std::abs(de) > hw_elevation ||
            std::abs(di) > hw_inplane)
            return 0.0;
        return taps_azimuth[da + hw_azimuth] * taps_elevation[de + hw_elevation] *
               taps_inplane[di + hw_inplane];
    }
};

namespace detail {

inline std::vector<double> gaussian_taps(double sigma_deg, double truncation, double step_deg,
                                         int& half_width) {
    // ceil with a small nudge so the sigma -> 0 limit degenerates to a clean
    // single-tap delta instead of a 3-tap kernel with vanishing wings.
    const double extent = truncation * sigma_deg / step_deg;
    half_width = static_cast<int>(std::ceil(extent - 1e-9));
    if (half_width < 0) half_width = 0;
    std::vector<double> taps(2 * half_width + 1);
    const double inv2s2 = 1.0 / (2.0 * sigma_deg * sigma_deg);
    double total = 0.0;
    for (int o = -half_width; o <= half_width; ++o) {
        const double d = o * step_deg;
        taps[o + half_width] = std::exp(-d * d * inv2s2);
        total += taps[o + half_width];
    }
    for (double& t : taps) t /= total;
    return taps;
}

}  // namespace detail

/// Truncated separable Gaussian evaluated at bin offsets, per-axis std in
/// degrees, truncated at ceil(truncation * sigma / step) bins, renormalized.
inline GridKernel gaussian_kernel(const std::array<double, 3>& sigma_deg, double truncation,
                                  double step_deg) {
    for (double s : sigma_deg)
        if (!(s > 0.0)) throw std::domain_error("gaussian_kernel: sigma must be positive");
    if (!(truncation >= 1.0)) throw std::domain_error("gaussian_kernel: truncation must be >= 1");
    if (!(step_deg > 0.0)) throw std::domain_error("gaussian_kernel: step must be positive");
    GridKernel k;
    k.taps_azimuth = detail::gaussian_taps(sigma_deg[0], truncation, step_deg, k.hw_azimuth);
    k.taps_elevation = detail::gaussian_taps(sigma_deg[1], truncation, step_deg, k.hw_elevation);
    k.taps_inplane = detail::gaussian_taps(sigma_deg[2], truncation, step_deg, k.hw_inplane);
    return k;
}

namespace detail {

// One cyclic pass along the outermost (azimuth) axis: slices of width
// n_el * n_ip are combined with wrapped neighbors. Consecutive outputs reuse
// the same input slices, so the streamed reads stay cache-resident.
inline void convolve_azimuth(const double* src, double* dst, int n_az, std::size_t slice,
                             const std::vector<double>& taps, int hw) {
    for (int a = 0; a < n_az; ++a) {
        double* out = dst + static_cast<std::size_t>(a) * slice;
        for (int o = -hw; o <= hw; ++o) {
            const double c = taps[o + hw];
            int ain = (a - o) % n_az;
            if (ain < 0) ain += n_az;
            const double* in = src + static_cast<std::size_t>(ain) * slice;
            if (o == -hw) {
                for (std::size_t j = 0; j < slice; ++j) out[j] = c * in[j];
            } else {
                for (std::size_t j = 0; j < slice; ++j) out[j] += c * in[j];
            }
        }
    }
}

// Elevation pass, per azimuth block. Taps that would index past a pole are
// dropped (mass truncated); the caller renormalizes the whole distribution.
inline void convolve_elevation(const double* src, double* dst, int n_az, int n_el, int n_ip,
                               const std::vector<double>& taps, int hw) {
    const std::size_t row = static_cast<std::size_t>(n_ip);
    for (int a = 0; a < n_az; ++a) {
        const double* sblk = src + static_cast<std::size_t>(a) * n_el * row;
        double* dblk = dst + static_cast<std::size_t>(a) * n_el * row;
        for (int e = 0; e < n_el; ++e) {
            double* out = dblk + static_cast<std::size_t>(e) * row;
            bool first = true;
            for (int o = -hw; o <= hw; ++o) {
                const int ein = e - o;
                if (ein < 0 || ein >= n_el) continue;
                const double c = taps[o + hw];
                const double* in = sblk + static_cast<std::size_t>(ein) * row;
                if (first) {
                    for (std::size_t j = 0; j < row; ++j) out[j] = c * in[j];
                    first = false;
                } else {
                    for (std::size_t j = 0; j < row; ++j) out[j] += c * in[j];
                }
            }
            if (first)
                for (std::size_t j = 0; j < row; ++j) out[j] = 0.0;
        }
    }
}

// In-plane pass over contiguous cyclic lines, via a small wrapped-halo pad.
inline void convolve_inplane(const double* src, double* dst, std::size_t n_lines, int n_ip,
                             const std::vector<double>& taps, int hw) {
    std::vector<double> pad(static_cast<std::size_t>(n_ip) + 2 * hw);
    for (std::size_t l = 0; l < n_lines; ++l) {
        const double* in = src + l * n_ip;
        double* out = dst + l * n_ip;
        for (int j = 0; j < n_ip + 2 * hw; ++j) {
            int idx = (j - hw) % n_ip;
            if (idx < 0) idx += n_ip;
            pad[j] = in[idx];
        }
        for (int o = -hw; o <= hw; ++o) {
            const double c = taps[o + hw];
            const double* p = pad.data() + hw - o;
            if (o == -hw) {
                for (int i = 0; i < n_ip; ++i) out[i] = c * p[i];
            } else {
                for (int i = 0; i < n_ip; ++i) out[i] += c * p[i];
            }
        }
    }
}

}  // namespace detail

/// Convolves in place using an external scratch buffer (resized as needed).
/// Azimuth and in-plane wrap cyclically; elevation truncates at the poles and
/// the result is renormalized to sum 1.
inline void convolve_in_place(RotationDistribution& d, const GridKernel& k,
                              std::vector<double>& scratch) {
    const RotationGrid& g = d.grid();
    if (k.hw_azimuth >= g.n_azimuth() || k.hw_elevation >= g.n_elevation() ||
        k.hw_inplane >= g.n_inplane())
        throw std::domain_error("convolve: kernel half-width >= axis length");
    if (k.is_delta()) return;
    scratch.resize(g.total());
    const int n_az = g.n_azimuth(), n_el = g.n_elevation(), n_ip = g.n_inplane();
    const std::size_t slice = static_cast<std::size_t>(n_el) * n_ip;
    std::vector<double>& v = d.values();
    detail::convolve_azimuth(v.data(), scratch.data(), n_az, slice, k.taps_azimuth,
                             k.hw_azimuth);
    detail::convolve_elevation(scratch.data(), v.data(), n_az, n_el, n_ip, k.taps_elevation,
                               k.hw_elevation);
    detail::convolve_inplane(v.data(), scratch.data(), static_cast<std::size_t>(n_az) * n_el,
                             n_ip, k.taps_inplane, k.hw_inplane);
    v.swap(scratch);
    d.normalize();
}

/// Pure form of the grid convolution; `d` must be normalized.
inline RotationDistribution convolve_distribution(const RotationDistribution& d,
                                                  const GridKernel& k) {
    RotationDistribution out = d;
    std::vector<double> scratch;
    convolve_in_place(out, k, scratch);
    return out;
}

}  // namespace prbpf

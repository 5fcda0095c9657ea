#pragma once

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <string>

namespace prbpf {

/// Orientation in degrees: azimuth about the camera up-axis, elevation about
/// the rotated lateral axis, in-plane about the viewing axis (intrinsic
/// Y-X'-Z'' composition, camera-egocentric frame). Azimuth and in-plane wrap
/// modulo 360; elevation must lie in [-90, +90] and is rejected otherwise.
struct EulerAngles {
    double azimuth = 0.0;
    double elevation = 0.0;
    double inplane = 0.0;

    EulerAngles() = default;
    EulerAngles(double az, double el, double ip)
        : azimuth(wrap360(az)), elevation(el), inplane(wrap360(ip)) {
        // Tolerate representation noise from asin() at the poles.
        constexpr double kPoleSlack = 1e-9;
        if (elevation > 90.0 && elevation <= 90.0 + kPoleSlack) elevation = 90.0;
        if (elevation < -90.0 && elevation >= -90.0 - kPoleSlack) elevation = -90.0;
        if (!(elevation >= -90.0 && elevation <= 90.0))
            throw std::domain_error("EulerAngles: elevation " + std::to_string(el) +
                                    " outside [-90, 90]");
    }

    static double wrap360(double deg) {
        double w = std::fmod(deg, 360.0);
        if (w < 0.0) w += 360.0;
        if (w == 360.0) w = 0.0;
        return w;
    }
};

/// Regular discretization of the orientation space: azimuth and in-plane in
/// [0, 360) cyclic, elevation in [-90, +90] with bin centers at both poles.
/// The standard grid is 72 x 37 x 72 bins at a 5 degree step (191,808 bins).
class RotationGrid {
  public:
    static RotationGrid standard() { return RotationGrid(5.0); }

    /// Grid with the given step in degrees. The step must divide 360 and 180
    /// evenly so azimuth/in-plane wrap and elevation reaches both poles.
    static RotationGrid with_step(double step_deg) { return RotationGrid(step_deg); }

    int n_azimuth() const { return n_azimuth_; }
    int n_elevation() const { return n_elevation_; }
    int n_inplane() const { return n_inplane_; }
    double step() const { return step_; }
    std::size_t total() const {
        return static_cast<std::size_t>(n_azimuth_) * n_elevation_ * n_inplane_;
    }

    friend bool operator==(const RotationGrid& a, const RotationGrid& b) {
        return a.n_azimuth_ == b.n_azimuth_ && a.n_elevation_ == b.n_elevation_ &&
               a.n_inplane_ == b.n_inplane_;
    }

  private:
    explicit RotationGrid(double step_deg) : step_(step_deg) {
        if (!(step_deg > 0.0)) throw std::domain_error("RotationGrid: step must be positive");
        const double na = 360.0 / step_deg;
        const double ne = 180.0 / step_deg;
        n_azimuth_ = static_cast<int>(std::lround(na));
        n_elevation_ = static_cast<int>(std::lround(ne)) + 1;
        n_inplane_ = n_azimuth_;
        if (std::abs(na - n_azimuth_) > 1e-9 || std::abs(ne - (n_elevation_ - 1)) > 1e-9)
            throw std::domain_error("RotationGrid: step must divide 360 and 180 evenly");
    }

    int n_azimuth_;
    int n_elevation_;
    int n_inplane_;
    double step_;
};

/// Index of the bin whose center is nearest to `e` (per-axis nearest with
/// cyclic wrap on azimuth/in-plane). Row-major: azimuth outer, elevation
/// middle, in-plane inner.
inline std::size_t grid_index(const EulerAngles& e, const RotationGrid& g) {
    const double step = g.step();
    long ia = std::lround(e.azimuth / step) % g.n_azimuth();
    long ii = std::lround(e.inplane / step) % g.n_inplane();
    long ie = std::lround((e.elevation + 90.0) / step);
    if (ie < 0) ie = 0;
    if (ie >= g.n_elevation()) ie = g.n_elevation() - 1;
    return (static_cast<std::size_t>(ia) * g.n_elevation() + ie) * g.n_inplane() + ii;
}

/// Center of bin `i`; exact inverse of grid_index on bin centers.
inline EulerAngles bin_center(std::size_t i, const RotationGrid& g) {
    if (i >= g.total())
        throw std::domain_error("bin_center: index " + std::to_string(i) + " out of range");
    const std::size_t ii = i % g.n_inplane();
    const std::size_t ie = (i / g.n_inplane()) % g.n_elevation();
    const std::size_t ia = i / (static_cast<std::size_t>(g.n_inplane()) * g.n_elevation());
    const double step = g.step();
    return EulerAngles(static_cast<double>(ia) * step, -90.0 + static_cast<double>(ie) * step,
                       static_cast<double>(ii) * step);
}

}  // namespace prbpf

#pragma once

#include "vortex/grid.hpp"

namespace vortex {

enum class CylinderShape { BallCylinder, AxisCylinder };  // Q(r) vs the finite cylinder

/// Space-time probe Q(r; x0, t0) = region x (t0 - r^2, t0]. BallCylinder uses
/// the ball B(r); AxisCylinder the finite cylinder {|x_h|<r, |x3|<r}.
struct CylinderRegion {
    double r = 0;
    Vec3 center{0, 0, 0};
    double t0 = 0;
    CylinderShape shape = CylinderShape::BallCylinder;

    CylinderRegion() = default;
    CylinderRegion(double r_, const Vec3& c, double t, CylinderShape s = CylinderShape::BallCylinder)
        : r(r_), center(c), t0(t), shape(s) {
        if (!(r > 0)) throw precondition_error("cylinder region radius must be positive");
    }

    double t_begin() const { return t0 - r * r; }

    /// Probes must stay well inside the periodic box: r <= min(L)/4, so a
    /// region never overlaps its own periodic image.
    void validate(const GridSpec& g) const {
        if (r > g.min_L() / 4 + 1e-12)
            throw precondition_error("probe radius " + std::to_string(r) +
                                     " exceeds the probe-safe bound min(L)/4 = " +
                                     std::to_string(g.min_L() / 4));
    }
};

/// Horizontal disc D(r, z, t) = {|x_h - c_h| < r, x3 = z}, with an explicit
/// horizontal center (the translated discs of the flux diagnostics).
struct DiscSpec {
    double r = 0;
    double z = 0;
    double t = 0;
    double c1 = 0, c2 = 0;

    DiscSpec() = default;
    DiscSpec(double r_, double z_, double t_, double c1_ = 0, double c2_ = 0)
        : r(r_), z(z_), t(t_), c1(c1_), c2(c2_) {
        if (r < 0) throw precondition_error("disc radius must be >= 0");
    }

    void validate(const GridSpec& g) const {
        if (r > g.min_L() / 4 + 1e-12)
            throw precondition_error("disc radius exceeds probe-safe bound min(L)/4");
    }
};

}  // namespace vortex

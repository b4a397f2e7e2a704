#pragma once

#include "vortex/interp.hpp"

namespace vortex {

/// Navier-Stokes rescaling of one sampled snapshot:
///   v'(x) = lambda^power v(x0 + lambda x),  t' = (t - t0)/lambda^2.
/// The result lives on a grid with the same node counts and box lengths
/// L/lambda, which is exactly one period of the rescaled field; evaluation is
/// by trigonometric interpolation (exact for band-limited data).
inline VectorField rescale_snapshot(const VectorField& v, double lambda, const Vec3& x0 = {0, 0, 0},
                                    double t0 = 0, int power = 1) {
    if (!(lambda > 0)) throw precondition_error("rescale requires lambda > 0");
    const GridSpec& g = v.grid;
    GridSpec tg(g.n1, g.n2, g.n3, g.L1 / lambda, g.L2 / lambda, g.L3 / lambda);
    VectorField out(tg, (v.time - t0) / (lambda * lambda));
    double amp = std::pow(lambda, power);
    SpectralVector vs = fft_forward(v);
    for (int c = 0; c < 3; ++c) {
        for (int i3 = 0; i3 < tg.n3; ++i3) {
            double zs = x0.z + lambda * (i3 * tg.h3());
            SpectralSlice slice(vs.comp[c], zs);
            for (int i2 = 0; i2 < tg.n2; ++i2)
                for (int i1 = 0; i1 < tg.n1; ++i1) {
                    double xs = x0.x + lambda * (i1 * tg.h1());
                    double ys = x0.y + lambda * (i2 * tg.h2());
                    out.at(c, i1, i2, i3) = amp * slice.eval(xs, ys);
                }
        }
    }
    return out;
}

/// Rescale a whole series; snapshot times map to (t - t0)/lambda^2.
inline SnapshotSeries rescale_series(const SnapshotSeries& s, double lambda,
                                     const Vec3& x0 = {0, 0, 0}, double t0 = 0, int power = 1) {
    SnapshotSeries out;
    for (const auto& v : s.snaps) out.snaps.push_back(rescale_snapshot(v, lambda, x0, t0, power));
    return out;
}

/// Rescaled snapshot at a requested (rescaled-clock) time; the matching
/// source snapshot must exist, otherwise the request is outside coverage.
inline VectorField rescale_snapshot_at(const SnapshotSeries& s, double lambda, const Vec3& x0,
                                       double t0, double t_request, int power = 1) {
    double t_source = t0 + lambda * lambda * t_request;
    for (const auto& v : s.snaps)
        if (std::abs(v.time - t_source) <= 1e-9 * std::max(1.0, std::abs(t_source)))
            return rescale_snapshot(v, lambda, x0, t0, power);
    throw precondition_error("rescale: requested time " + std::to_string(t_request) +
                             " maps to t=" + std::to_string(t_source) +
                             " which is outside the sampled data coverage");
}

}  // namespace vortex

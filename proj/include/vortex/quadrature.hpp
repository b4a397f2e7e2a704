#pragma once

#include <map>
#include <mutex>
#include <vector>

#include "vortex/core.hpp"

namespace vortex {

/// Gauss-Legendre nodes and weights on [-1,1], computed by Newton iteration
/// on the Legendre recurrence and cached per order.
struct GaussLegendre {
    std::vector<double> nodes;
    std::vector<double> weights;

    static const GaussLegendre& get(int n) {
        static std::map<int, GaussLegendre> cache;
        static std::mutex mtx;
        std::lock_guard<std::mutex> lock(mtx);
        auto it = cache.find(n);
        if (it == cache.end()) it = cache.emplace(n, compute(n)).first;
        return it->second;
    }

    static GaussLegendre compute(int n) {
        if (n < 1) throw precondition_error("Gauss-Legendre order must be >= 1");
        GaussLegendre q;
        q.nodes.resize(n);
        q.weights.resize(n);
        for (int i = 0; i < n; ++i) {
            // Chebyshev-based initial guess for the i-th root.
            double x = std::cos(pi * (i + 0.75) / (n + 0.5));
            double p1 = 0, dp = 0;
            for (int it = 0; it < 100; ++it) {
                p1 = 1.0;
                double p2 = 0.0;
                for (int j = 0; j < n; ++j) {
                    double p3 = p2;
                    p2 = p1;
                    p1 = ((2.0 * j + 1.0) * x * p2 - j * p3) / (j + 1.0);
                }
                dp = n * (x * p1 - p2) / (x * x - 1.0);
                double dx = p1 / dp;
                x -= dx;
                if (std::abs(dx) < 1e-15) break;
            }
            q.nodes[i] = x;
            q.weights[i] = 2.0 / ((1.0 - x * x) * dp * dp);
        }
        return q;
    }
};

/// One quadrature node in the plane together with its weight.
struct PlanePoint {
    double x1, x2, w;
};

/// Polar quadrature of a disc of radius r centered at (c1,c2):
/// Gauss-Legendre in radius, trapezoid (equispaced, spectrally accurate for
/// periodic integrands) in angle.
inline std::vector<PlanePoint> disc_points(double c1, double c2, double r, int n_r, int n_t) {
    if (r < 0) throw precondition_error("disc radius must be >= 0");
    std::vector<PlanePoint> pts;
    if (r == 0) return pts;
    const auto& gl = GaussLegendre::get(n_r);
    pts.reserve(std::size_t(n_r) * n_t);
    double dt = two_pi / n_t;
    for (int i = 0; i < n_r; ++i) {
        double rho = 0.5 * r * (gl.nodes[i] + 1.0);
        double wr = 0.5 * r * gl.weights[i] * rho * dt;
        for (int j = 0; j < n_t; ++j) {
            double th = j * dt;
            pts.push_back({c1 + rho * std::cos(th), c2 + rho * std::sin(th), wr});
        }
    }
    return pts;
}

/// Same as disc_points but for the annulus r_in < rho < r_out.
inline std::vector<PlanePoint> annulus_points(double c1, double c2, double r_in, double r_out,
                                              int n_r, int n_t) {
    if (r_out < r_in || r_in < 0) throw precondition_error("bad annulus radii");
    std::vector<PlanePoint> pts;
    if (r_out == r_in) return pts;
    const auto& gl = GaussLegendre::get(n_r);
    pts.reserve(std::size_t(n_r) * n_t);
    double dt = two_pi / n_t;
    double mid = 0.5 * (r_in + r_out), half = 0.5 * (r_out - r_in);
    for (int i = 0; i < n_r; ++i) {
        double rho = mid + half * gl.nodes[i];
        double wr = half * gl.weights[i] * rho * dt;
        for (int j = 0; j < n_t; ++j) {
            double th = j * dt;
            pts.push_back({c1 + rho * std::cos(th), c2 + rho * std::sin(th), wr});
        }
    }
    return pts;
}

/// Circle {|x_h - c| = r}: equispaced nodes, weight = ds = r*dtheta.
/// Also returns the outward radial unit vector per node via the callback form.
struct CirclePoint {
    double x1, x2, w;
    double er1, er2;  // outward unit normal e_r
};

inline std::vector<CirclePoint> circle_points(double c1, double c2, double r, int n_t) {
    std::vector<CirclePoint> pts;
    pts.reserve(n_t);
    double dt = two_pi / n_t;
    for (int j = 0; j < n_t; ++j) {
        double th = j * dt;
        double ct = std::cos(th), st = std::sin(th);
        pts.push_back({c1 + r * ct, c2 + r * st, r * dt, ct, st});
    }
    return pts;
}

/// Gauss-Legendre nodes mapped to [a,b], as (node, weight) pairs.
inline std::vector<std::pair<double, double>> gl_interval(double a, double b, int n) {
    const auto& gl = GaussLegendre::get(n);
    std::vector<std::pair<double, double>> out(n);
    double mid = 0.5 * (a + b), half = 0.5 * (b - a);
    for (int i = 0; i < n; ++i) out[i] = {mid + half * gl.nodes[i], half * gl.weights[i]};
    return out;
}

/// Node counts for the disc/circle/volume quadratures. `refined()` doubles
/// everything for convergence audits.
struct QuadSpec {
    int n_r = 64;    // radial Gauss nodes on discs
    int n_t = 128;   // angular trapezoid nodes
    int n_axis = 32; // axial / polar Gauss nodes for volume integrals
    int n_time = 8;  // Gauss nodes in time for analytic series

    QuadSpec refined(int factor = 2) const {
        return {n_r * factor, n_t * factor, n_axis * factor, n_time * factor};
    }
};

}  // namespace vortex

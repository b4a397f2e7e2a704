#pragma once

#include "vortex/evaluate.hpp"
#include "vortex/regions.hpp"

namespace vortex {

/// Scale-invariant quantities of a probe Q(r; x0, t0).
struct ScaleQuantities {
    double r = 0;
    Vec3 center{0, 0, 0};
    double t0 = 0;
    double F = 0;  // r^-2 int_Q |v|^3
    double E = 0;  // r^-1 int_Q |grad v|^2
    double A = 0;  // r^-1 sup_t int_B |v|^2
    double D = 0;  // r^-2 int_Q |p|^{3/2}
    double sum() const { return F + E + A + D; }
};

namespace detail {

/// Volume integral over the ball or finite cylinder of radius r centered at
/// `c`, by Gauss nodes in z and polar disc quadrature per plane (plane slices
/// make the sampled path affordable).
template <class Series, class Fn>
inline double volume_integral(Series& s, const Vec3& c, double r, CylinderShape shape, double t,
                              const QuadSpec& q, Fn&& point_fn) {
    double total = 0;
    for (auto [zeta, wz] : gl_interval(-r, r, q.n_axis)) {
        double rho = shape == CylinderShape::BallCylinder
                         ? std::sqrt(std::max(0.0, r * r - zeta * zeta))
                         : r;
        if (rho <= 0) continue;
        double plane = 0;
        for (const auto& p : disc_points(c.x, c.y, rho, q.n_r, q.n_t))
            plane += p.w * point_fn(Vec3{p.x1, p.x2, c.z + zeta}, t);
        total += wz * plane;
    }
    return total;
}

inline void check_probe(double r, double min_L) {
    if (!(r > 0)) throw precondition_error("probe radius must be positive");
    if (r > min_L / 4 + 1e-12)
        throw precondition_error("probe radius exceeds probe-safe bound min(L)/4");
}

}  // namespace detail

/// F, E, A, D at the given radii. Time integrals run over (t0 - r^2, t0]
/// (Gauss nodes for analytic series, snapshot trapezoid for sampled ones);
/// A takes the sup over the same window.
template <class Series>
inline std::vector<ScaleQuantities> scale_quantities(Series& s, const Vec3& center, double t0,
                                                     const std::vector<double>& radii,
                                                     CylinderShape shape = CylinderShape::BallCylinder,
                                                     const QuadSpec& q = {}) {
    std::vector<ScaleQuantities> out;
    for (double r : radii) {
        detail::check_probe(r, s.min_L());
        ScaleQuantities sq;
        sq.r = r;
        sq.center = center;
        sq.t0 = t0;
        double t_lo = t0 - r * r;
        for (const auto& tn : s.time_nodes(t_lo, t0)) {
            double vi3 = detail::volume_integral(s, center, r, shape, tn.t, q,
                                                 [&](const Vec3& x, double t) {
                                                     double m = norm(s.velocity(x, t));
                                                     return m * m * m;
                                                 });
            double ei = detail::volume_integral(s, center, r, shape, tn.t, q,
                                                [&](const Vec3& x, double t) {
                                                    Mat3 g = s.velocity_gradient(x, t);
                                                    double a = 0;
                                                    for (int i = 0; i < 3; ++i)
                                                        for (int j = 0; j < 3; ++j)
                                                            a += g[i][j] * g[i][j];
                                                    return a;
                                                });
            double di = detail::volume_integral(s, center, r, shape, tn.t, q,
                                                [&](const Vec3& x, double t) {
                                                    double p = s.pressure(x, t);
                                                    return std::pow(std::abs(p), 1.5);
                                                });
            sq.F += tn.w * vi3;
            sq.E += tn.w * ei;
            sq.D += tn.w * di;
        }
        for (double ts : s.sup_times(t_lo, t0)) {
            double a2 = detail::volume_integral(s, center, r, shape, ts, q,
                                                [&](const Vec3& x, double t) {
                                                    return norm2(s.velocity(x, t));
                                                });
            sq.A = std::max(sq.A, a2);
        }
        sq.F /= r * r;
        sq.E /= r;
        sq.A /= r;
        sq.D /= r * r;
        out.push_back(sq);
    }
    return out;
}

/// Lambda_q = sup over the dyadic radius lattice and the time window of
/// r^{q-3} int_{B(r)} |v|^q. The exponent must lie strictly in (3/2, 2).
template <class Series>
inline double lambda_q(Series& s, double q_exp, const Vec3& center, double t0, double r_max,
                       int levels, const QuadSpec& q = {}) {
    if (!(q_exp > 1.5 && q_exp < 2.0))
        throw precondition_error("lambda_q requires q strictly inside (3/2, 2)");
    detail::check_probe(r_max, s.min_L());
    double sup = 0;
    for (int m = 0; m < levels; ++m) {
        double r = r_max * std::pow(2.0, -m);
        for (double ts : s.sup_times(t0 - r * r, t0)) {
            double integral = detail::volume_integral(
                s, center, r, CylinderShape::BallCylinder, ts, q,
                [&](const Vec3& x, double t) { return std::pow(norm(s.velocity(x, t)), q_exp); });
            sup = std::max(sup, std::pow(r, q_exp - 3.0) * integral);
        }
    }
    return sup;
}

/// sup over (z, t) of the disc integral of |omega| at fixed radius (1/2 in
/// the critical estimate; configurable so rescaling tests can shift it).
template <class Series>
inline double critical_flux_norm(Series& s, double t0, double t1, double disc_r = 0.5,
                                 const Vec3& center = {0, 0, 0}, int n_z = 9,
                                 double z_half_range = 0.5, const QuadSpec& q = {}) {
    double sup = 0;
    for (double t : s.sup_times(t0, t1))
        for (int iz = 0; iz < n_z; ++iz) {
            double z = center.z - z_half_range + 2.0 * z_half_range * iz / std::max(1, n_z - 1);
            double total = 0;
            for (const auto& p : disc_points(center.x, center.y, disc_r, q.n_r, q.n_t))
                total += p.w * norm(s.vorticity({p.x1, p.x2, z}, t));
            sup = std::max(sup, total);
        }
    return sup;
}

/// G = int_Q (|v|^3 + |p|^{3/2}) dx dt + 2 over the probe region.
template <class Series>
inline double g_energy(Series& s, const CylinderRegion& region, const QuadSpec& q = {}) {
    double total = 0;
    for (const auto& tn : s.time_nodes(region.t_begin(), region.t0)) {
        total += tn.w * detail::volume_integral(
                            s, region.center, region.r, region.shape, tn.t, q,
                            [&](const Vec3& x, double t) {
                                double m = norm(s.velocity(x, t));
                                double p = s.pressure(x, t);
                                return m * m * m + std::pow(std::abs(p), 1.5);
                            });
    }
    return total + 2.0;
}

/// Smooth space-time bump test function: amplitude * psi(|x-x0|^2/R^2) *
/// psi((t-tc)^2/tau^2) with psi(u) = exp(1 - 1/(1-u)) on [0,1), 0 beyond.
struct TestBump {
    Vec3 x0{0, 0, 0};
    double R = 1.0;
    double tc = 0.0;
    double tau = 1.0;
    double amplitude = 1.0;

    static double psi(double u) { return u < 1.0 ? std::exp(1.0 - 1.0 / (1.0 - u)) : 0.0; }
    static double dpsi(double u) {
        if (u >= 1.0) return 0.0;
        double d = 1.0 - u;
        return -psi(u) / (d * d);
    }
    static double d2psi(double u) {
        if (u >= 1.0) return 0.0;
        double d = 1.0 - u;
        return psi(u) * (1.0 / (d * d * d * d) - 2.0 / (d * d * d));
    }

    double time_factor(double t) const {
        double ut = (t - tc) * (t - tc) / (tau * tau);
        return psi(ut);
    }

    double value(const Vec3& x, double t) const {
        double s = norm2(x - x0) / (R * R);
        return amplitude * psi(s) * time_factor(t);
    }
    double dt(const Vec3& x, double t) const {
        double s = norm2(x - x0) / (R * R);
        double ut = (t - tc) * (t - tc) / (tau * tau);
        return amplitude * psi(s) * dpsi(ut) * 2.0 * (t - tc) / (tau * tau);
    }
    Vec3 grad(const Vec3& x, double t) const {
        double s = norm2(x - x0) / (R * R);
        return (x - x0) * (amplitude * dpsi(s) * 2.0 / (R * R) * time_factor(t));
    }
    double laplacian(const Vec3& x, double t) const {
        double r2 = norm2(x - x0);
        double s = r2 / (R * R);
        return amplitude * time_factor(t) *
               (d2psi(s) * 4.0 * r2 / (R * R * R * R) + dpsi(s) * 6.0 / (R * R));
    }
};

/// Signed residual LHS - RHS of the local energy inequality over the series
/// span, with phi the bump above. Space integrals are exact periodic node
/// sums; time integrals trapezoid over snapshots. Smooth solutions satisfy
/// the balance with equality, so |residual| measures discretization only.
inline double local_energy_residual(SampledSeries& s, const TestBump& phi) {
    const GridSpec& g = s.grid();
    if (phi.R > g.min_L() / 2)
        throw precondition_error("test function support exceeds the probe region");
    const auto& snaps = s.snapshots();
    double t_first = snaps.t_begin(), t_last = snaps.t_end();
    double h3 = g.cell_volume();

    auto node_sums = [&](const VectorField& v) {
        // returns (int |v|^2 phi, int |grad v|^2 phi, RHS integrand integral)
        double t = v.time;
        SpectralVector vs = fft_forward(v);
        std::array<std::array<std::vector<double>, 3>, 3> dv;
        for (int j = 0; j < 3; ++j)
            for (int i = 0; i < 3; ++i)
                dv[j][i] = fft_backward(spectral_derivative(vs.comp[j], i)).values;
        const ScalarField& p = s.pressure_field(t);
        double e_phi = 0, diss_phi = 0, rhs = 0;
        for (int i3 = 0; i3 < g.n3; ++i3)
            for (int i2 = 0; i2 < g.n2; ++i2)
                for (int i1 = 0; i1 < g.n1; ++i1) {
                    std::size_t idx = g.index(i1, i2, i3);
                    Vec3 x = g.node(i1, i2, i3);
                    double ph = phi.value(x, t);
                    Vec3 vv = v.vec_at(idx);
                    double v2 = norm2(vv);
                    double gradsq = 0;
                    for (int j = 0; j < 3; ++j)
                        for (int i = 0; i < 3; ++i) gradsq += dv[j][i][idx] * dv[j][i][idx];
                    e_phi += v2 * ph;
                    diss_phi += gradsq * ph;
                    double dtphi = phi.dt(x, t);
                    double lap = phi.laplacian(x, t);
                    Vec3 gr = phi.grad(x, t);
                    rhs += v2 * (dtphi + lap) + (v2 + 2.0 * p.values[idx]) * dot(vv, gr);
                }
        return std::array<double, 3>{e_phi * h3, diss_phi * h3, rhs * h3};
    };

    // trapezoid in time over all snapshots
    double lhs_boundary_T = 0, lhs_boundary_T0 = 0, diss_int = 0, rhs_int = 0;
    std::vector<std::array<double, 3>> sums;
    for (const auto& v : snaps.snaps) sums.push_back(node_sums(v));
    for (std::size_t i = 0; i + 1 < snaps.size(); ++i) {
        double dt = snaps[i + 1].time - snaps[i].time;
        diss_int += 0.5 * dt * (sums[i][1] + sums[i + 1][1]);
        rhs_int += 0.5 * dt * (sums[i][2] + sums[i + 1][2]);
    }
    lhs_boundary_T = sums.back()[0];
    lhs_boundary_T0 = sums.front()[0];
    (void)t_first;
    (void)t_last;
    return (lhs_boundary_T - lhs_boundary_T0) + 2.0 * diss_int - rhs_int;
}

/// Quantitative regular-shell search: scan (a, delta) over lattices inside
/// the given ranges and report the space-time shell Q(a+delta) \ Q(a-delta)
/// minimizing sup(|v| + |grad v| + |grad^2 v|) over grid nodes and snapshot
/// times, together with that sup.
struct ShellResult {
    double a = 0;
    double delta = 0;
    double shell_sup = 0;
};

inline ShellResult regular_shell_search(SampledSeries& s, const Vec3& center, double t0,
                                        double a_lo = 2.0 / 3.0, double a_hi = 3.0 / 4.0,
                                        double delta_lo = 0.02, double delta_hi = 0.09,
                                        int n_a = 9, int n_delta = 3) {
    const GridSpec& g = s.grid();
    ShellResult best;
    best.shell_sup = std::numeric_limits<double>::infinity();

    double d_max = delta_hi;
    double t_window = (a_hi + d_max) * (a_hi + d_max);
    std::vector<double> times = s.sup_times(t0 - t_window, t0);
    std::vector<ScalarField> fields;
    for (double t : times) fields.push_back(s.speed_grad_hess_field(t));

    for (int ia = 0; ia < n_a; ++ia) {
        double a = a_lo + (a_hi - a_lo) * (ia + 0.5) / n_a;
        for (int id = 0; id < n_delta; ++id) {
            double delta = delta_lo + (delta_hi - delta_lo) * (id + 0.5) / std::max(1, n_delta);
            double outer = a + delta, inner = a - delta;
            if (inner <= 0) continue;
            double sup = 0;
            for (std::size_t it = 0; it < times.size(); ++it) {
                double t = times[it];
                bool in_outer_t = t > t0 - outer * outer && t <= t0 + 1e-12;
                if (!in_outer_t) continue;
                bool in_inner_t = t > t0 - inner * inner && t <= t0 + 1e-12;
                for (int i3 = 0; i3 < g.n3; ++i3)
                    for (int i2 = 0; i2 < g.n2; ++i2)
                        for (int i1 = 0; i1 < g.n1; ++i1) {
                            double dist = norm(g.periodic_delta(g.node(i1, i2, i3), center));
                            if (dist >= outer) continue;
                            if (in_inner_t && dist < inner) continue;
                            sup = std::max(sup, fields[it].values[g.index(i1, i2, i3)]);
                        }
            }
            if (sup < best.shell_sup) {
                best = {a, delta, sup};
            }
        }
    }
    return best;
}

/// Heuristic epsilon-regularity flag: F + D <= eps at the probed scale.
inline bool epsilon_regularity_flag(const ScaleQuantities& sq, double eps_ckn = 0.05) {
    return sq.F + sq.D <= eps_ckn;
}

}  // namespace vortex

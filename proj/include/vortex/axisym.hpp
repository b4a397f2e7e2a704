#pragma once

#include <functional>

#include "vortex/interp.hpp"
#include "vortex/quadrature.hpp"

namespace vortex {

struct MeridianGrid {
    std::vector<double> r;  // uniform, r[0] = 0
    std::vector<double> z;

    std::size_t idx(std::size_t ir, std::size_t iz) const { return ir + r.size() * iz; }
    std::size_t size() const { return r.size() * z.size(); }
    double dr() const { return r.size() > 1 ? r[1] - r[0] : 0; }
    double dz() const { return z.size() > 1 ? z[1] - z[0] : 0; }
};

/// Angular averages of an axisymmetric field in cylindrical components,
/// on an (r,z) meridian lattice. v_r and v_theta vanish on the axis.
struct MeridianField {
    MeridianGrid grid;
    std::vector<double> v_r, v_th, v_z;
    double time = 0;
    double c1 = 0, c2 = 0;   // the vertical axis passes through (c1, c2)
    double deviation = 0;    // measured theta-dependence (relative)
};

struct MeridianScalar {
    MeridianGrid grid;
    std::vector<double> values;
};

/// Cylindrical decomposition by angular averaging over sampled rays.
/// Fields that are not axisymmetric about the given axis (deviation above
/// tol, relative to the field scale) are rejected with the measured value.
inline MeridianField to_cylindrical(const VectorField& v, double c1, double c2, int n_r = 65,
                                    double r_max = 0, int n_theta = 16, double tol = 1e-8) {
    v.check_finite("to_cylindrical input");
    const GridSpec& g = v.grid;
    if (r_max <= 0) r_max = g.min_L() / 4;
    MeridianField m;
    m.time = v.time;
    m.c1 = c1;
    m.c2 = c2;
    m.grid.r.resize(n_r);
    for (int i = 0; i < n_r; ++i) m.grid.r[i] = r_max * i / (n_r - 1);
    m.grid.z.resize(g.n3);
    for (int i = 0; i < g.n3; ++i) m.grid.z[i] = i * g.h3();
    m.v_r.assign(m.grid.size(), 0.0);
    m.v_th.assign(m.grid.size(), 0.0);
    m.v_z.assign(m.grid.size(), 0.0);

    SpectralVector vs = fft_forward(v);
    double scale = std::max(v.max_norm(), 1e-300);
    double dev = 0;

    for (std::size_t iz = 0; iz < m.grid.z.size(); ++iz) {
        double z = m.grid.z[iz];
        SpectralSlice s0(vs.comp[0], z), s1(vs.comp[1], z), s2(vs.comp[2], z);
        for (std::size_t ir = 0; ir < m.grid.r.size(); ++ir) {
            double r = m.grid.r[ir];
            if (ir == 0) {
                // axis: v_h must vanish for an axisymmetric field
                double vx = s0.eval(c1, c2), vy = s1.eval(c1, c2);
                dev = std::max(dev, std::hypot(vx, vy) / scale);
                m.v_z[m.grid.idx(0, iz)] = s2.eval(c1, c2);
                continue;
            }
            double sr = 0, st = 0, sz = 0;
            std::vector<double> samp_r(n_theta), samp_t(n_theta), samp_z(n_theta);
            for (int it = 0; it < n_theta; ++it) {
                double th = two_pi * it / n_theta;
                double ct = std::cos(th), stn = std::sin(th);
                double x = c1 + r * ct, y = c2 + r * stn;
                double vx = s0.eval(x, y), vy = s1.eval(x, y), vz = s2.eval(x, y);
                samp_r[it] = vx * ct + vy * stn;
                samp_t[it] = -vx * stn + vy * ct;
                samp_z[it] = vz;
                sr += samp_r[it];
                st += samp_t[it];
                sz += samp_z[it];
            }
            sr /= n_theta;
            st /= n_theta;
            sz /= n_theta;
            for (int it = 0; it < n_theta; ++it)
                dev = std::max({dev, std::abs(samp_r[it] - sr) / scale,
                                std::abs(samp_t[it] - st) / scale,
                                std::abs(samp_z[it] - sz) / scale});
            std::size_t id = m.grid.idx(ir, iz);
            m.v_r[id] = sr;
            m.v_th[id] = st;
            m.v_z[id] = sz;
        }
    }
    m.deviation = dev;
    if (dev > tol)
        throw precondition_error("to_cylindrical: field is not axisymmetric about the axis "
                                 "(deviation " + std::to_string(dev) + " > tol)");
    return m;
}

/// Swirl Gamma_s(r,z) = r v_theta.
inline MeridianScalar swirl(const MeridianField& m) {
    MeridianScalar s;
    s.grid = m.grid;
    s.values.resize(m.grid.size());
    for (std::size_t iz = 0; iz < m.grid.z.size(); ++iz)
        for (std::size_t ir = 0; ir < m.grid.r.size(); ++ir)
            s.values[m.grid.idx(ir, iz)] = m.grid.r[ir] * m.v_th[m.grid.idx(ir, iz)];
    return s;
}

/// Meridian stream function with psi(0,z) = 0:
///   d_r psi = r v_z,  d_z psi = -r v_r.
struct StreamFunction {
    MeridianGrid grid;
    std::vector<double> psi;
    double C1 = 0, C2 = 0;        // slope-bound constants (caller-set)
    double cross_residual = 0;    // max |d_z psi + r v_r| (path-independence)
};

namespace detail {

/// 4-point Lagrange interpolation on a uniform lattice, clamped at the ends.
inline double lagrange4(const std::vector<double>& xs, const std::vector<double>& ys, double x) {
    int n = int(xs.size());
    double h = xs[1] - xs[0];
    int i = std::clamp(int(std::floor((x - xs[0]) / h)), 0, n - 2);
    int a = std::clamp(i - 1, 0, n - 4);
    double val = 0;
    for (int j = a; j < a + 4; ++j) {
        double lj = 1;
        for (int k = a; k < a + 4; ++k)
            if (k != j) lj *= (x - xs[k]) / (xs[j] - xs[k]);
        val += ys[j] * lj;
    }
    return val;
}

}  // namespace detail

/// Radial integration of r v_z from the axis by composite Gauss quadrature
/// (3 nodes per cell on a local cubic interpolant). The incompressibility
/// pre-check d_r(r v_r) + d_z(r v_z) ~ 0 guards path independence; the
/// returned cross_residual audits d_z psi = -r v_r after the fact.
inline StreamFunction stream_function(const MeridianField& m, double compat_tol = 1e-4) {
    const MeridianGrid& gr = m.grid;
    std::size_t nr = gr.r.size(), nz = gr.z.size();
    if (nr < 4 || nz < 3) throw precondition_error("stream_function: meridian grid too small");

    // incompressibility pre-check (centered differences, interior nodes)
    double scale = 0;
    for (std::size_t i = 0; i < m.v_r.size(); ++i)
        scale = std::max({scale, std::abs(m.v_r[i]), std::abs(m.v_z[i])});
    scale = std::max(scale, 1e-300);
    double div_res = 0;
    for (std::size_t iz = 1; iz + 1 < nz; ++iz)
        for (std::size_t ir = 1; ir + 1 < nr; ++ir) {
            double rv_r_p = gr.r[ir + 1] * m.v_r[gr.idx(ir + 1, iz)];
            double rv_r_m = gr.r[ir - 1] * m.v_r[gr.idx(ir - 1, iz)];
            double rv_z_p = gr.r[ir] * m.v_z[gr.idx(ir, iz + 1)];
            double rv_z_m = gr.r[ir] * m.v_z[gr.idx(ir, iz - 1)];
            double d = (rv_r_p - rv_r_m) / (2 * gr.dr()) + (rv_z_p - rv_z_m) / (2 * gr.dz());
            div_res = std::max(div_res, std::abs(d) / scale);
        }
    if (div_res > compat_tol)
        throw precondition_error(
            "stream_function: meridian incompressibility residual " + std::to_string(div_res) +
            " exceeds tolerance (psi would be path-dependent)");

    StreamFunction sf;
    sf.grid = gr;
    sf.psi.assign(gr.size(), 0.0);
    std::vector<double> integrand(nr);
    for (std::size_t iz = 0; iz < nz; ++iz) {
        for (std::size_t ir = 0; ir < nr; ++ir)
            integrand[ir] = gr.r[ir] * m.v_z[gr.idx(ir, iz)];
        double acc = 0;
        sf.psi[gr.idx(0, iz)] = 0;
        for (std::size_t ir = 0; ir + 1 < nr; ++ir) {
            for (auto [x, w] : gl_interval(gr.r[ir], gr.r[ir + 1], 3))
                acc += w * detail::lagrange4(gr.r, integrand, x);
            sf.psi[gr.idx(ir + 1, iz)] = acc;
        }
    }

    // cross-check: d_z psi + r v_r = 0
    double cres = 0;
    for (std::size_t iz = 1; iz + 1 < nz; ++iz)
        for (std::size_t ir = 0; ir < nr; ++ir) {
            double dzpsi =
                (sf.psi[gr.idx(ir, iz + 1)] - sf.psi[gr.idx(ir, iz - 1)]) / (2 * gr.dz());
            cres = std::max(cres, std::abs(dzpsi + gr.r[ir] * m.v_r[gr.idx(ir, iz)]));
        }
    sf.cross_residual = cres;
    return sf;
}

/// Velocity-direction cone test: every node must satisfy |v| <= M or
/// |v_z|/|v| <= 1 - delta. Reports the worst violator and the largest delta
/// that would pass at this M.
struct ConeCheckResult {
    bool pass = true;
    double worst_ratio = 0;  // max |v_z|/|v| over nodes with |v| > M
    std::size_t worst_ir = 0, worst_iz = 0;
    double best_delta = 1;   // 1 - worst_ratio
};

inline ConeCheckResult velocity_cone_check(const MeridianField& m, double delta, double M) {
    if (!(delta > 0) || delta > 1) throw precondition_error("cone check needs delta in (0,1]");
    if (M < 0) throw precondition_error("cone check needs M >= 0");
    ConeCheckResult res;
    for (std::size_t iz = 0; iz < m.grid.z.size(); ++iz)
        for (std::size_t ir = 0; ir < m.grid.r.size(); ++ir) {
            std::size_t id = m.grid.idx(ir, iz);
            Vec3 v{m.v_r[id], m.v_th[id], m.v_z[id]};
            double mag = norm(v);
            if (mag <= M || mag == 0) continue;
            double ratio = std::abs(m.v_z[id]) / mag;
            if (ratio > res.worst_ratio) {
                res.worst_ratio = ratio;
                res.worst_ir = ir;
                res.worst_iz = iz;
            }
        }
    res.best_delta = 1.0 - res.worst_ratio;
    res.pass = res.worst_ratio <= 1.0 - delta + 1e-15;
    return res;
}

/// Evaluable stream function for the exploration procedure: value and both
/// partial derivatives at arbitrary (r,z).
struct PsiFn {
    std::function<double(double, double)> psi;
    std::function<double(double, double)> psi_r;
    std::function<double(double, double)> psi_z;
};

/// Bicubic (Catmull-Rom) interpolant of a gridded stream function, with the
/// interpolant's own derivatives. Outside the r-range it clamps; z wraps only
/// if the z lattice is periodic-complete (callers keep traces interior).
inline PsiFn make_psi_interpolant(const StreamFunction& sf) {
    auto shared = std::make_shared<StreamFunction>(sf);
    auto weights = [](double u, double w[4], double dw[4]) {
        w[0] = 0.5 * (((2 - u) * u - 1) * u);
        w[1] = 0.5 * ((3 * u - 5) * u * u + 2);
        w[2] = 0.5 * (((4 - 3 * u) * u + 1) * u);
        w[3] = 0.5 * ((u - 1) * u * u);
        dw[0] = 0.5 * (-3 * u * u + 4 * u - 1);
        dw[1] = 0.5 * (9 * u * u - 10 * u);
        dw[2] = 0.5 * (-9 * u * u + 8 * u + 1);
        dw[3] = 0.5 * (3 * u * u - 2 * u);
    };
    auto eval = [shared, weights](double r, double z, int deriv) {
        const auto& g = shared->grid;
        int nr = int(g.r.size()), nz = int(g.z.size());
        double fr = (r - g.r[0]) / g.dr(), fz = (z - g.z[0]) / g.dz();
        int ir = std::clamp(int(std::floor(fr)), 0, nr - 2);
        int iz = std::clamp(int(std::floor(fz)), 0, nz - 2);
        double ur = fr - ir, uz = fz - iz;
        double wr[4], dwr[4], wz[4], dwz[4];
        weights(ur, wr, dwr);
        weights(uz, wz, dwz);
        double val = 0;
        for (int b = 0; b < 4; ++b) {
            int jz = std::clamp(iz - 1 + b, 0, nz - 1);
            for (int a = 0; a < 4; ++a) {
                int jr = std::clamp(ir - 1 + a, 0, nr - 1);
                double cwr = deriv == 1 ? dwr[a] / g.dr() : wr[a];
                double cwz = deriv == 2 ? dwz[b] / g.dz() : wz[b];
                val += cwr * cwz * shared->psi[g.idx(jr, jz)];
            }
        }
        return val;
    };
    PsiFn f;
    f.psi = [eval](double r, double z) { return eval(r, z, 0); };
    f.psi_r = [eval](double r, double z) { return eval(r, z, 1); };
    f.psi_z = [eval](double r, double z) { return eval(r, z, 2); };
    return f;
}

/// Level-set exploration trace (the two-mode automaton with hysteresis at
/// 2C1 -+ 1). Mode (i) follows {psi = const} toward decreasing r; mode (ii)
/// marches straight toward the axis at fixed z.
struct ExplorationTrace {
    double r0 = 0, z0 = 0;
    double psi_start = 0;
    double bound = 0;  // 3 C1 r0
    bool certificate_pass = false;
    bool terminated = false;
    bool guard_violated = false;      // |psi_r| > 3 C2 |psi_z| observed in mode (i)
    bool mode1_axis_arrival = false;  // should never happen for admissible inputs
    bool left_domain = false;         // trace escaped B(1)
    int mode_switches = 0;
    long steps = 0;
    double final_r = 0, final_z = 0;
    double mode2_abs_dpsi = 0;  // accumulated |dpsi| along mode (ii) segments
    double mode1_abs_drift = 0; // accumulated |psi drift| along mode (i) segments
    std::vector<std::pair<double, double>> polyline;  // (r,z), thinned
};

struct ExploreParams {
    double step = 0;         // base step; default r0 / 512
    double psi_tol = 0;      // mode (i) per-step drift tolerance; default C1*step*1e-4
    double r_axis_tol = 0;   // termination radius; default r0 * 1e-3
    long max_steps = 4000000;
    int polyline_stride = 16;
};

inline ExplorationTrace explore_level_set(const PsiFn& f, double r0, double z0, double C1,
                                          double C2, ExploreParams prm = {}) {
    if (!(C1 > 10 && C2 > 10))
        throw precondition_error("explore_level_set requires C1, C2 > 10");
    double eps = 1.0 / (100.0 * C2);
    if (!(r0 > 0) || std::hypot(r0, 0.0) > eps || std::abs(z0) > eps)
        throw precondition_error("start point must lie inside B(eps), eps = 1/(100 C2)");
    if (prm.step <= 0) prm.step = r0 / 512;
    if (prm.psi_tol <= 0) prm.psi_tol = C1 * prm.step * 1e-4;
    if (prm.r_axis_tol <= 0) prm.r_axis_tol = std::max(r0 * 1e-3, prm.step / 4);

    ExplorationTrace tr;
    tr.r0 = r0;
    tr.z0 = z0;
    tr.psi_start = f.psi(r0, z0);
    tr.bound = 3.0 * C1 * r0;

    double r = r0, z = z0;
    enum class Mode { LevelSet, Straight };
    Mode mode = std::abs(f.psi_r(r, z)) > 2 * C1 ? Mode::LevelSet : Mode::Straight;
    double seg_psi = f.psi(r, z);  // psi at the current segment start

    tr.polyline.push_back({r, z});
    while (tr.steps < prm.max_steps) {
        ++tr.steps;
        if (r <= prm.r_axis_tol) {
            tr.terminated = true;
            tr.mode1_axis_arrival = (mode == Mode::LevelSet);
            break;
        }
        if (r > 1.0 || std::abs(z) > 1.0) {
            tr.left_domain = true;
            break;
        }
        double pr = f.psi_r(r, z);
        if (mode == Mode::Straight) {
            if (std::abs(pr) >= 2 * C1 + 1) {
                mode = Mode::LevelSet;
                ++tr.mode_switches;
                seg_psi = f.psi(r, z);
                continue;
            }
            double h = std::min(prm.step, r);  // do not overshoot the axis
            double p_before = f.psi(r, z);
            r -= h;
            tr.mode2_abs_dpsi += std::abs(f.psi(r, z) - p_before);
        } else {
            double pz = f.psi_z(r, z);
            if (std::abs(pr) <= 2 * C1 - 1) {
                mode = Mode::Straight;
                ++tr.mode_switches;
                tr.mode1_abs_drift += std::abs(f.psi(r, z) - seg_psi);
                continue;
            }
            if (std::abs(pr) > 3 * C2 * std::abs(pz)) {
                tr.guard_violated = true;
                break;
            }
            // tangent of {psi = const} oriented toward decreasing r
            double gn = std::hypot(pr, pz);
            double dr = -std::abs(pz) / gn;
            double dz = (pz >= 0 ? 1.0 : -1.0) * pr / gn;
            double h = prm.step;
            double target = f.psi(r, z);
            for (;;) {
                double rn = r + h * dr, zn = z + h * dz;
                // Newton correction back onto the level set
                for (int it = 0; it < 3; ++it) {
                    double p = f.psi(rn, zn) - target;
                    if (std::abs(p) <= 0.25 * prm.psi_tol) break;
                    double gr = f.psi_r(rn, zn), gz = f.psi_z(rn, zn);
                    double g2 = gr * gr + gz * gz;
                    if (g2 == 0) break;
                    rn -= gr * p / g2;
                    zn -= gz * p / g2;
                }
                if (std::abs(f.psi(rn, zn) - target) <= prm.psi_tol || h < prm.step / 64) {
                    r = rn;
                    z = zn;
                    break;
                }
                h /= 2;
            }
        }
        if (tr.steps % prm.polyline_stride == 0) tr.polyline.push_back({r, z});
    }
    if (mode == Mode::LevelSet)
        tr.mode1_abs_drift += std::abs(f.psi(r, z) - seg_psi);
    tr.final_r = r;
    tr.final_z = z;
    tr.polyline.push_back({r, z});
    tr.certificate_pass = tr.terminated && std::abs(tr.psi_start) <= tr.bound + 1e-12;
    return tr;
}

}  // namespace vortex

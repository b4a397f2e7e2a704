#pragma once

#include "vortex/spectral.hpp"

namespace vortex {

/// Fixed-step pseudo-spectral integrator configuration. Viscosity is fixed to
/// one; Reynolds variation comes from scaling the initial data amplitude.
struct SolverConfig {
    double dt = 1e-3;
    double t_end = 1.0;
    double snap_every = 0.05;
    bool dealias = true;  // 2/3 rule on the quadratic term
    double cfl_limit = 0.5;

    void validate() const {
        if (!(dt > 0)) throw precondition_error("dt must be positive");
        if (snap_every < dt) throw precondition_error("snapshot interval must be >= dt");
        if (!(t_end >= 0)) throw precondition_error("t_end must be >= 0");
    }
};

/// Spectral velocity state: divergence-free, zero-mean coefficients.
class SolverState {
  public:
    SolverState(const VectorField& v0, bool dealias = true) : dealias_(dealias) {
        v0.check_finite("initial data");
        vhat_ = fft_forward(v0);
        vhat_.comp[0].c[0] = vhat_.comp[1].c[0] = vhat_.comp[2].c[0] = 0;  // zero mean
        leray_project(vhat_);
        if (dealias_) dealias_23(vhat_);
        time_ = v0.time;
    }

    double time() const { return time_; }
    const GridSpec& grid() const { return vhat_.grid(); }
    const SpectralVector& spectral() const { return vhat_; }

    VectorField velocity() const {
        VectorField v = fft_backward(vhat_);
        v.time = time_;
        return v;
    }

    /// Diagnostic pressure p = -inv_lap div(v . grad v), mean zero.
    ScalarField pressure() const { return pressure_from_velocity(velocity()); }

    /// max |div v| relative to max |grad v| in spectral space.
    double divergence_rel() const { return divergence_defect_relative(velocity()); }

    double energy() const { return kinetic_energy(velocity()); }
    double enstrophy() const { return gradient_energy(vhat_); }

    /// One RK4 step of  dv/dt = -P[omega x v] + lap v  (rotational form; the
    /// gradient part of the advection is absorbed by the projection).
    void step(double dt, double cfl_limit = 0.5) {
        // CFL check on the current velocity
        VectorField v = fft_backward(vhat_);
        double vmax = v.max_norm();
        double cfl = vmax * dt / grid().min_h();
        if (cfl > cfl_limit)
            throw precondition_error("CFL violation: max|v| dt/h = " + std::to_string(cfl) +
                                     " exceeds limit " + std::to_string(cfl_limit) + " at t = " +
                                     std::to_string(time_));

        SpectralVector k1 = rhs(vhat_);
        SpectralVector k2 = rhs(axpy(vhat_, k1, 0.5 * dt));
        SpectralVector k3 = rhs(axpy(vhat_, k2, 0.5 * dt));
        SpectralVector k4 = rhs(axpy(vhat_, k3, dt));
        for (int c = 0; c < 3; ++c) {
            auto& out = vhat_.comp[c].c;
            const auto& a = k1.comp[c].c;
            const auto& b = k2.comp[c].c;
            const auto& d = k3.comp[c].c;
            const auto& e = k4.comp[c].c;
            for (std::size_t i = 0; i < out.size(); ++i)
                out[i] += dt / 6.0 * (a[i] + 2.0 * b[i] + 2.0 * d[i] + e[i]);
        }
        // keep the invariant exactly: re-project after the combined update
        leray_project(vhat_);
        time_ += dt;
        for (int c = 0; c < 3; ++c) vhat_.comp[c].time = time_;
    }

  private:
    static SpectralVector axpy(const SpectralVector& x, const SpectralVector& d, double s) {
        SpectralVector y = x;
        for (int c = 0; c < 3; ++c)
            for (std::size_t i = 0; i < y.comp[c].c.size(); ++i) y.comp[c].c[i] += s * d.comp[c].c[i];
        return y;
    }

    SpectralVector rhs(const SpectralVector& vh) const {
        const GridSpec& g = vh.grid();
        VectorField v = fft_backward(vh);
        VectorField om = fft_backward(spectral_curl(vh));
        VectorField n(g);
        for (std::size_t i = 0; i < n.size(); ++i) {
            Vec3 c = cross(om.vec_at(i), v.vec_at(i));
            n.comp[0][i] = c.x;
            n.comp[1][i] = c.y;
            n.comp[2][i] = c.z;
        }
        SpectralVector nh = fft_forward(n);
        if (dealias_) dealias_23(nh);
        leray_project(nh);
        SpectralVector out = nh;
        for_each_mode(g, [&](std::size_t i, const Vec3& k, bool) {
            double k2 = norm2(k);
            for (int c = 0; c < 3; ++c) out.comp[c].c[i] = -out.comp[c].c[i] - k2 * vh.comp[c].c[i];
        });
        return out;
    }

    SpectralVector vhat_;
    double time_ = 0;
    bool dealias_ = true;
};

/// Per-run invariant audit: energy/enstrophy history and the dissipation
/// balance  E(t0) - E(t) = int ||grad v||^2 dt  (trapezoid over steps).
struct RunAudit {
    std::vector<double> snap_times;
    std::vector<double> energy;
    std::vector<double> enstrophy;
    std::vector<double> div_rel;
    std::vector<double> cum_dissipation;  // at snapshot times
    bool energy_monotone = true;
    double worst_energy_growth = 0.0;  // relative, > 0 only on violation
    double worst_balance_error = 0.0;  // relative energy-balance mismatch
};

struct RunResult {
    SnapshotSeries series;
    RunAudit audit;
};

/// Integrate from an initial field, emitting snapshots every `snap_every`.
inline RunResult run_solver(const VectorField& v0, const SolverConfig& cfg) {
    cfg.validate();
    SolverState st(v0, cfg.dealias);
    RunResult res;

    int snap_stride = std::max(1, int(std::llround(cfg.snap_every / cfg.dt)));
    int n_steps = int(std::llround(cfg.t_end / cfg.dt));

    double cum_diss = 0;
    double prev_enstrophy = st.enstrophy();
    double e0 = st.energy();

    auto emit = [&](const SolverState& s) {
        VectorField v = s.velocity();
        res.series.snaps.push_back(v);
        res.audit.snap_times.push_back(s.time());
        res.audit.energy.push_back(kinetic_energy(v));
        res.audit.enstrophy.push_back(s.enstrophy());
        res.audit.div_rel.push_back(s.divergence_rel());
        res.audit.cum_dissipation.push_back(cum_diss);
    };

    emit(st);
    for (int i = 1; i <= n_steps; ++i) {
        st.step(cfg.dt, cfg.cfl_limit);
        double ens = st.enstrophy();
        cum_diss += 0.5 * cfg.dt * (prev_enstrophy + ens);
        prev_enstrophy = ens;
        if (i % snap_stride == 0 || i == n_steps) emit(st);
    }

    // audits
    auto& a = res.audit;
    for (std::size_t i = 1; i < a.energy.size(); ++i) {
        double growth = (a.energy[i] - a.energy[i - 1]) / std::max(a.energy[i - 1], 1e-300);
        if (growth > 1e-12) {
            a.energy_monotone = false;
            a.worst_energy_growth = std::max(a.worst_energy_growth, growth);
        }
        double drop = e0 - a.energy[i];
        if (drop > 1e-14 * e0)
            a.worst_balance_error = std::max(
                a.worst_balance_error, std::abs(drop - a.cum_dissipation[i]) / drop);
    }
    return res;
}

/// Max-norm residual of the vorticity equation
///   dt omega - lap omega + v.grad omega - omega.grad v = 0
/// over a consecutive snapshot triple, with centered time differencing at the
/// middle snapshot. Converges at O(delta^2) for smooth solver output.
inline double vorticity_residual(const VectorField& prev, const VectorField& mid,
                                 const VectorField& next) {
    if (!prev.grid.compatible(mid.grid) || !next.grid.compatible(mid.grid))
        throw precondition_error("vorticity_residual: inconsistent grids");
    double dt_m = mid.time - prev.time, dt_p = next.time - mid.time;
    if (dt_m <= 0 || dt_p <= 0 || std::abs(dt_m - dt_p) > 1e-9 * dt_m)
        throw precondition_error("vorticity_residual needs an equispaced snapshot triple");

    SpectralVector om_prev = spectral_curl(fft_forward(prev));
    SpectralVector om_next = spectral_curl(fft_forward(next));
    SpectralVector vm = fft_forward(mid);
    SpectralVector om_mid = spectral_curl(vm);

    VectorField w_prev = fft_backward(om_prev);
    VectorField w_next = fft_backward(om_next);
    VectorField w_mid = fft_backward(om_mid);
    VectorField lap_w = fft_backward(SpectralVector{spectral_laplacian(om_mid.comp[0]),
                                                    spectral_laplacian(om_mid.comp[1]),
                                                    spectral_laplacian(om_mid.comp[2])});
    VectorField v_mid = fft_backward(vm);

    // gradients: dom[j][i] = d omega_j / dx_i, dv[j][i] = d v_j / dx_i
    std::array<std::array<std::vector<double>, 3>, 3> dom, dv;
    for (int j = 0; j < 3; ++j)
        for (int i = 0; i < 3; ++i) {
            dom[j][i] = fft_backward(spectral_derivative(om_mid.comp[j], i)).values;
            dv[j][i] = fft_backward(spectral_derivative(vm.comp[j], i)).values;
        }

    double resid = 0;
    double inv2d = 1.0 / (dt_m + dt_p);
    for (std::size_t n = 0; n < mid.size(); ++n) {
        for (int j = 0; j < 3; ++j) {
            double ddt = (w_next.comp[j][n] - w_prev.comp[j][n]) * inv2d;
            double adv = 0, stretch = 0;
            for (int i = 0; i < 3; ++i) {
                adv += v_mid.comp[i][n] * dom[j][i][n];
                stretch += w_mid.comp[i][n] * dv[j][i][n];
            }
            resid = std::max(resid, std::abs(ddt - lap_w.comp[j][n] + adv - stretch));
        }
    }
    return resid;
}

}  // namespace vortex

#pragma once

#include <memory>

#include "vortex/analytic.hpp"
#include "vortex/interp.hpp"
#include "vortex/quadrature.hpp"

namespace vortex {

struct TimeNode {
    double t;
    double w;
};

namespace detail {

/// Flattened trig polynomial for fast repeated point evaluation.
struct TrigFn {
    std::vector<ScalarTrig::Mode> modes;

    TrigFn() = default;
    explicit TrigFn(const ScalarTrig& s) : modes(s.modes()) {}

    double eval(const Vec3& x) const {
        double v = 0;
        for (const auto& m : modes) {
            double ph = dot(m.k, x);
            v += m.c.real() * std::cos(ph) - m.c.imag() * std::sin(ph);
        }
        return v;
    }
};

/// Either a slice cache (trig path) or a physical field (tricubic path).
struct ScalarHandle {
    SliceCache* slices = nullptr;
    const ScalarField* field = nullptr;

    double eval(const Vec3& x) const {
        if (field) return tricubic_eval(*field, x);
        return slices->at(x.z).eval(x.x, x.y);
    }
};

}  // namespace detail

/// Time-continuous field data backed by a closed-form velocity field. All
/// point accessors are exact; time integrals use Gauss nodes.
class AnalyticSeries {
  public:
    explicit AnalyticSeries(AnalyticField f, int n_time = 8)
        : field_(std::move(f)), n_time_(n_time) {
        const ScalarTrig& v1 = field_.component(0);
        const ScalarTrig& v2 = field_.component(1);
        const ScalarTrig& v3 = field_.component(2);
        ScalarTrig om3 = v2.derivative(0) - v1.derivative(1);
        om3_ = detail::TrigFn(om3);
        for (int j = 0; j < 3; ++j) {
            gom3_[j] = detail::TrigFn(om3.derivative(j));
            gv3_[j] = detail::TrigFn(v3.derivative(j));
        }
        lapom3_ = detail::TrigFn(om3.laplacian());
    }

    const AnalyticField& field() const { return field_; }

    /// Analytic fields live on the standard 2pi-periodic box; diagnostics use
    /// this for probe-safety bounds only.
    double min_L() const { return two_pi; }

    std::vector<TimeNode> time_nodes(double a, double b) const {
        std::vector<TimeNode> out;
        for (auto [t, w] : gl_interval(a, b, n_time_)) out.push_back({t, w});
        return out;
    }

    std::vector<double> sup_times(double a, double b) const {
        std::vector<double> ts{a};
        for (auto [t, w] : gl_interval(a, b, n_time_)) ts.push_back(t);
        ts.push_back(b);
        return ts;
    }

    Vec3 velocity(const Vec3& x, double t) const { return field_.velocity(x, t); }
    double velocity_component(const Vec3& x, double t, int c) const {
        return field_.component_value(c, x, t);
    }
    Mat3 velocity_gradient(const Vec3& x, double t) const {
        return field_.velocity_gradient(x, t);
    }
    Vec3 vorticity(const Vec3& x, double t) const { return field_.vorticity(x, t); }
    double pressure(const Vec3& x, double t) const { return field_.pressure(x, t); }
    /// Exact divergence of the carried field (zero for solenoidal data).
    double divergence(const Vec3& x, double t) const { return field_.divergence(x, t); }
    /// Decay rate sigma with v(t) = e^{-sigma t} v(0); exact time derivatives.
    double decay_rate() const { return field_.decay_rate(); }

    double vorticity3(const Vec3& x, double t) const { return field_.decay(t) * om3_.eval(x); }
    Vec3 grad_vorticity3(const Vec3& x, double t) const {
        double d = field_.decay(t);
        return {d * gom3_[0].eval(x), d * gom3_[1].eval(x), d * gom3_[2].eval(x)};
    }
    double lap_vorticity3(const Vec3& x, double t) const {
        return field_.decay(t) * lapom3_.eval(x);
    }
    Vec3 grad_velocity3(const Vec3& x, double t) const {
        double d = field_.decay(t);
        return {d * gv3_[0].eval(x), d * gv3_[1].eval(x), d * gv3_[2].eval(x)};
    }

    /// |v| + |grad v| + |grad^2 v| (Frobenius norms), for shell searches.
    double speed_grad_hess(const Vec3& x, double t) const {
        Vec3 v = field_.velocity(x, t);
        Mat3 g = field_.velocity_gradient(x, t);
        double g2 = 0, h2 = 0;
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j) g2 += g[i][j] * g[i][j];
        for (int c = 0; c < 3; ++c) {
            Mat3 h = field_.component_hessian(c, x, t);
            for (int i = 0; i < 3; ++i)
                for (int j = 0; j < 3; ++j) h2 += h[i][j] * h[i][j];
        }
        return norm(v) + std::sqrt(g2) + std::sqrt(h2);
    }

  private:
    AnalyticField field_;
    int n_time_;
    detail::TrigFn om3_, lapom3_;
    detail::TrigFn gom3_[3], gv3_[3];
};

/// Snapshot-backed field data. Point accessors interpolate spectrally via
/// plane slices (exact for band-limited fields) or tricubically; derivative
/// fields are computed spectrally once per snapshot on demand. Pressures are
/// always recomputed from the velocity. Not thread-safe; one per worker.
class SampledSeries {
  public:
    explicit SampledSeries(SnapshotSeries snaps, InterpKind interp = InterpKind::Trig)
        : snaps_(std::move(snaps)), interp_(interp) {
        snaps_.validate();
        per_.resize(snaps_.size());
    }

    const SnapshotSeries& snapshots() const { return snaps_; }
    const GridSpec& grid() const { return snaps_.grid(); }
    double min_L() const { return grid().min_L(); }
    InterpKind interp() const { return interp_; }

    int snap_index(double t) const {
        for (std::size_t i = 0; i < snaps_.size(); ++i)
            if (std::abs(snaps_[i].time - t) <= 1e-9 * std::max(1.0, std::abs(t))) return int(i);
        throw precondition_error("no snapshot at requested time t=" + std::to_string(t));
    }

    /// Trapezoid nodes over the snapshots falling inside [a,b].
    std::vector<TimeNode> time_nodes(double a, double b) const {
        std::vector<double> ts;
        for (const auto& s : snaps_.snaps)
            if (s.time >= a - 1e-12 && s.time <= b + 1e-12) ts.push_back(s.time);
        if (ts.size() < 2)
            throw precondition_error("insufficient snapshots in the time window [" +
                                     std::to_string(a) + ", " + std::to_string(b) + "]");
        std::vector<TimeNode> out(ts.size());
        for (std::size_t i = 0; i < ts.size(); ++i) {
            double wl = i == 0 ? 0.0 : 0.5 * (ts[i] - ts[i - 1]);
            double wr = i + 1 == ts.size() ? 0.0 : 0.5 * (ts[i + 1] - ts[i]);
            out[i] = {ts[i], wl + wr};
        }
        return out;
    }

    std::vector<double> sup_times(double a, double b) const {
        std::vector<double> ts;
        for (const auto& s : snaps_.snaps)
            if (s.time >= a - 1e-12 && s.time <= b + 1e-12) ts.push_back(s.time);
        if (ts.empty()) throw precondition_error("no snapshots in the time window");
        return ts;
    }

    Vec3 velocity(const Vec3& x, double t) {
        int s = snap_index(t);
        return {velocity_h(s, 0).eval(x), velocity_h(s, 1).eval(x), velocity_h(s, 2).eval(x)};
    }

    double velocity_component(const Vec3& x, double t, int c) {
        return velocity_h(snap_index(t), c).eval(x);
    }

    /// 4th-order finite-difference divergence of the carried field at the
    /// nearest node (local stencils stay valid next to discontinuity sets).
    double divergence(const Vec3& x, double t) {
        int s = snap_index(t);
        const VectorField& w = snaps_[s];
        const GridSpec& g = w.grid;
        int i1 = int(std::lround(x.x / g.h1())) % g.n1;
        int i2 = int(std::lround(x.y / g.h2())) % g.n2;
        int i3 = int(std::lround(x.z / g.h3())) % g.n3;
        if (i1 < 0) i1 += g.n1;
        if (i2 < 0) i2 += g.n2;
        if (i3 < 0) i3 += g.n3;
        auto wrap = [](int i, int n) { return ((i % n) + n) % n; };
        double div = 0;
        const double h[3] = {g.h1(), g.h2(), g.h3()};
        for (int axis = 0; axis < 3; ++axis) {
            int d1[3] = {0, 0, 0}, d2[3] = {0, 0, 0};
            d1[axis] = 1;
            d2[axis] = 2;
            auto val = [&](int o1, int o2, int o3) {
                return w.comp[axis][g.index(wrap(i1 + o1, g.n1), wrap(i2 + o2, g.n2),
                                            wrap(i3 + o3, g.n3))];
            };
            div += (-val(d2[0], d2[1], d2[2]) + 8 * val(d1[0], d1[1], d1[2]) -
                    8 * val(-d1[0], -d1[1], -d1[2]) + val(-d2[0], -d2[1], -d2[2])) /
                   (12 * h[axis]);
        }
        return div;
    }

    Mat3 velocity_gradient(const Vec3& x, double t) {
        int s = snap_index(t);
        Mat3 g;
        for (int j = 0; j < 3; ++j)
            for (int i = 0; i < 3; ++i) g[j][i] = gradient_h(s, j, i).eval(x);
        return g;
    }

    Vec3 vorticity(const Vec3& x, double t) {
        int s = snap_index(t);
        return {vorticity_h(s, 0).eval(x), vorticity_h(s, 1).eval(x), vorticity_h(s, 2).eval(x)};
    }

    double vorticity3(const Vec3& x, double t) { return vorticity_h(snap_index(t), 2).eval(x); }

    double pressure(const Vec3& x, double t) { return pressure_h(snap_index(t)).eval(x); }

    Vec3 grad_vorticity3(const Vec3& x, double t) {
        int s = snap_index(t);
        return {grad_om3_h(s, 0).eval(x), grad_om3_h(s, 1).eval(x), grad_om3_h(s, 2).eval(x)};
    }

    double lap_vorticity3(const Vec3& x, double t) { return lap_om3_h(snap_index(t)).eval(x); }

    Vec3 grad_velocity3(const Vec3& x, double t) {
        int s = snap_index(t);
        return {gradient_h(s, 2, 0).eval(x), gradient_h(s, 2, 1).eval(x),
                gradient_h(s, 2, 2).eval(x)};
    }

    /// Node-sampled |v| + |grad v| + |grad^2 v| at a snapshot (no interpolation).
    ScalarField speed_grad_hess_field(double t) {
        int s = snap_index(t);
        const VectorField& v = snaps_[s];
        const SpectralVector& vs = vspec(s);
        ScalarField out(v.grid, v.time);
        std::vector<double> g2(v.size(), 0.0), h2(v.size(), 0.0);
        for (int j = 0; j < 3; ++j)
            for (int i = 0; i < 3; ++i) {
                SpectralScalar ds = spectral_derivative(vs.comp[j], i);
                ScalarField d = fft_backward(ds);
                for (std::size_t n = 0; n < d.values.size(); ++n)
                    g2[n] += d.values[n] * d.values[n];
                for (int l = i; l < 3; ++l) {
                    ScalarField dd = fft_backward(spectral_derivative(ds, l));
                    double w = (l == i) ? 1.0 : 2.0;  // symmetric pair counted twice
                    for (std::size_t n = 0; n < dd.values.size(); ++n)
                        h2[n] += w * dd.values[n] * dd.values[n];
                }
            }
        for (std::size_t n = 0; n < out.values.size(); ++n) {
            Vec3 vv = v.vec_at(n);
            out.values[n] = norm(vv) + std::sqrt(g2[n]) + std::sqrt(h2[n]);
        }
        return out;
    }

    /// Pressure snapshot recomputed from the velocity.
    const ScalarField& pressure_field(double t) {
        int s = snap_index(t);
        ensure_pressure(s);
        return *per_[s].p_field;
    }

    const VectorField& snapshot(double t) { return snaps_[snap_index(t)]; }

  private:
    struct PerSnap {
        std::unique_ptr<SpectralVector> vspec;
        std::array<std::unique_ptr<SliceCache>, 3> vel, om, gom3;
        std::array<std::array<std::unique_ptr<SliceCache>, 3>, 3> grad;  // [comp][axis]
        std::unique_ptr<SliceCache> p, lapom3;
        std::unique_ptr<VectorField> om_field;
        std::array<std::unique_ptr<ScalarField>, 3> om_comp_field;
        std::array<std::unique_ptr<ScalarField>, 3> gom3_field;
        std::array<std::array<std::unique_ptr<ScalarField>, 3>, 3> grad_field;
        std::unique_ptr<ScalarField> p_field, lapom3_field;
        std::array<std::unique_ptr<ScalarField>, 3> vel_field;  // component views (tricubic)
    };

    const SpectralVector& vspec(int s) {
        auto& ps = per_[s];
        if (!ps.vspec) ps.vspec = std::make_unique<SpectralVector>(fft_forward(snaps_[s]));
        return *ps.vspec;
    }

    void ensure_curl(int s) {
        auto& ps = per_[s];
        if (interp_ == InterpKind::Tricubic) {
            if (!ps.om_field)
                ps.om_field =
                    std::make_unique<VectorField>(fft_backward(spectral_curl(vspec(s))));
        } else if (!ps.om[0]) {
            SpectralVector w = spectral_curl(vspec(s));
            for (int c = 0; c < 3; ++c)
                ps.om[c] = std::make_unique<SliceCache>(std::move(w.comp[c]));
        }
    }

    void ensure_pressure(int s) {
        auto& ps = per_[s];
        if (!ps.p_field)
            ps.p_field = std::make_unique<ScalarField>(pressure_from_velocity(snaps_[s]));
    }

    detail::ScalarHandle velocity_h(int s, int c) {
        auto& ps = per_[s];
        if (interp_ == InterpKind::Tricubic) {
            if (!ps.vel_field[c])
                ps.vel_field[c] = std::make_unique<ScalarField>(snaps_[s].component(c));
            return {nullptr, ps.vel_field[c].get()};
        }
        if (!ps.vel[c]) ps.vel[c] = std::make_unique<SliceCache>(vspec(s).comp[c]);
        return {ps.vel[c].get(), nullptr};
    }

    detail::ScalarHandle vorticity_h(int s, int c) {
        ensure_curl(s);
        auto& ps = per_[s];
        if (interp_ == InterpKind::Tricubic) {
            if (!ps.om_comp_field[c])
                ps.om_comp_field[c] = std::make_unique<ScalarField>(ps.om_field->component(c));
            return {nullptr, ps.om_comp_field[c].get()};
        }
        return {ps.om[c].get(), nullptr};
    }

    detail::ScalarHandle gradient_h(int s, int comp, int axis) {
        auto& ps = per_[s];
        if (interp_ == InterpKind::Tricubic) {
            if (!ps.grad_field[comp][axis])
                ps.grad_field[comp][axis] = std::make_unique<ScalarField>(
                    fft_backward(spectral_derivative(vspec(s).comp[comp], axis)));
            return {nullptr, ps.grad_field[comp][axis].get()};
        }
        if (!ps.grad[comp][axis])
            ps.grad[comp][axis] =
                std::make_unique<SliceCache>(spectral_derivative(vspec(s).comp[comp], axis));
        return {ps.grad[comp][axis].get(), nullptr};
    }

    detail::ScalarHandle grad_om3_h(int s, int axis) {
        auto& ps = per_[s];
        if (interp_ == InterpKind::Tricubic) {
            if (!ps.gom3_field[axis]) {
                SpectralVector w = spectral_curl(vspec(s));
                SpectralVector g = spectral_gradient(w.comp[2]);
                for (int c = 0; c < 3; ++c)
                    ps.gom3_field[c] = std::make_unique<ScalarField>(fft_backward(g.comp[c]));
            }
            return {nullptr, ps.gom3_field[axis].get()};
        }
        if (!ps.gom3[axis]) {
            SpectralVector w = spectral_curl(vspec(s));
            SpectralVector g = spectral_gradient(w.comp[2]);
            for (int c = 0; c < 3; ++c)
                ps.gom3[c] = std::make_unique<SliceCache>(std::move(g.comp[c]));
        }
        return {ps.gom3[axis].get(), nullptr};
    }

    detail::ScalarHandle pressure_h(int s) {
        auto& ps = per_[s];
        ensure_pressure(s);
        if (interp_ == InterpKind::Tricubic) return {nullptr, ps.p_field.get()};
        if (!ps.p) ps.p = std::make_unique<SliceCache>(fft_forward(*ps.p_field));
        return {ps.p.get(), nullptr};
    }

    detail::ScalarHandle lap_om3_h(int s) {
        auto& ps = per_[s];
        if (interp_ == InterpKind::Tricubic) {
            if (!ps.lapom3_field) {
                SpectralVector w = spectral_curl(vspec(s));
                ps.lapom3_field =
                    std::make_unique<ScalarField>(fft_backward(spectral_laplacian(w.comp[2])));
            }
            return {nullptr, ps.lapom3_field.get()};
        }
        if (!ps.lapom3) {
            SpectralVector w = spectral_curl(vspec(s));
            ps.lapom3 = std::make_unique<SliceCache>(spectral_laplacian(w.comp[2]));
        }
        return {ps.lapom3.get(), nullptr};
    }

    SnapshotSeries snaps_;
    InterpKind interp_;
    std::vector<PerSnap> per_;
};

}  // namespace vortex

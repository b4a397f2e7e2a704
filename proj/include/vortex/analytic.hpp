#pragma once

#include <complex>
#include <map>
#include <random>
#include <tuple>
#include <vector>

#include "vortex/field.hpp"

namespace vortex {

using cplx = std::complex<double>;

namespace detail {

/// Canonical key for a wavevector: the sign is flipped so the first
/// component that is nonzero (to a small tolerance) is positive, which makes
/// Re(c e^{ikx}) representations unique and mergeable.
struct KKey {
    long long a, b, c;  // wavevector quantized at 1e-9
    bool operator<(const KKey& o) const { return std::tie(a, b, c) < std::tie(o.a, o.b, o.c); }
};

inline long long quant(double x) { return llround(x * 1e9); }

inline bool flip_needed(const Vec3& k) {
    if (quant(k.x) != 0) return quant(k.x) < 0;
    if (quant(k.y) != 0) return quant(k.y) < 0;
    return quant(k.z) < 0;
}

}  // namespace detail

/// Real trigonometric polynomial f(x) = sum_m Re( c_m exp(i k_m . x) ),
/// closed under +, *, d/dx_j. Exact building block for analytic test fields.
class ScalarTrig {
  public:
    struct Mode {
        Vec3 k;
        cplx c;
    };

    ScalarTrig() = default;

    static ScalarTrig constant(double v) {
        ScalarTrig s;
        s.add_mode({0, 0, 0}, cplx(v, 0));
        return s;
    }
    /// cos(k * x_axis)
    static ScalarTrig cos_axis(int axis, double k) {
        ScalarTrig s;
        Vec3 kv{0, 0, 0};
        kv[axis] = k;
        s.add_mode(kv, cplx(1, 0));
        return s;
    }
    /// sin(k * x_axis) = Re(-i e^{i k x})
    static ScalarTrig sin_axis(int axis, double k) {
        ScalarTrig s;
        Vec3 kv{0, 0, 0};
        kv[axis] = k;
        s.add_mode(kv, cplx(0, -1));
        return s;
    }

    void add_mode(Vec3 k, cplx c) {
        // canonicalize: Re(c e^{ikx}) == Re(conj(c) e^{-ikx})
        if (detail::flip_needed(k)) {
            k = -k;
            c = std::conj(c);
        }
        detail::KKey key{detail::quant(k.x), detail::quant(k.y), detail::quant(k.z)};
        if (key.a == 0 && key.b == 0 && key.c == 0) c = cplx(c.real(), 0);
        auto it = modes_.find(key);
        if (it == modes_.end())
            modes_.emplace(key, Mode{k, c});
        else
            it->second.c += c;
    }

    ScalarTrig operator+(const ScalarTrig& o) const {
        ScalarTrig r = *this;
        for (const auto& [key, m] : o.modes_) r.add_mode(m.k, m.c);
        return r;
    }
    ScalarTrig operator-(const ScalarTrig& o) const { return *this + o * (-1.0); }

    ScalarTrig operator*(double s) const {
        ScalarTrig r = *this;
        for (auto& [key, m] : r.modes_) m.c *= s;
        return r;
    }

    /// Product: Re(A e^{ia}) Re(B e^{ib}) = Re(AB e^{i(a+b)})/2 + Re(A conj(B) e^{i(a-b)})/2
    ScalarTrig operator*(const ScalarTrig& o) const {
        ScalarTrig r;
        for (const auto& [k1, m1] : this->modes_)
            for (const auto& [k2, m2] : o.modes_) {
                r.add_mode(m1.k + m2.k, 0.5 * m1.c * m2.c);
                r.add_mode(m1.k - m2.k, 0.5 * m1.c * std::conj(m2.c));
            }
        r.prune();
        return r;
    }

    ScalarTrig derivative(int axis) const {
        ScalarTrig r;
        for (const auto& [key, m] : modes_) r.add_mode(m.k, cplx(0, m.k[axis]) * m.c);
        r.prune();
        return r;
    }

    ScalarTrig laplacian() const {
        ScalarTrig r;
        for (const auto& [key, m] : modes_) r.add_mode(m.k, -norm2(m.k) * m.c);
        return r;
    }

    /// Zero-mean solution of  lap(u) = this  (the k=0 mode is dropped).
    ScalarTrig inverse_laplacian() const {
        ScalarTrig r;
        for (const auto& [key, m] : modes_) {
            double k2 = norm2(m.k);
            if (k2 > 1e-18) r.add_mode(m.k, -m.c / k2);
        }
        return r;
    }

    double eval(const Vec3& x) const {
        double v = 0;
        for (const auto& [key, m] : modes_) {
            double ph = dot(m.k, x);
            v += m.c.real() * std::cos(ph) - m.c.imag() * std::sin(ph);
        }
        return v;
    }

    void prune(double tol = 1e-14) {
        for (auto it = modes_.begin(); it != modes_.end();) {
            if (std::abs(it->second.c) < tol)
                it = modes_.erase(it);
            else
                ++it;
        }
    }

    std::size_t mode_count() const { return modes_.size(); }

    std::vector<Mode> modes() const {
        std::vector<Mode> v;
        v.reserve(modes_.size());
        for (const auto& [key, m] : modes_) v.push_back(m);
        return v;
    }

    /// Largest |c| over modes, a scale for tolerances.
    double amp_scale() const {
        double s = 0;
        for (const auto& [key, m] : modes_) s = std::max(s, std::abs(m.c));
        return s;
    }

  private:
    std::map<detail::KKey, Mode> modes_;
};

enum class AnalyticKind { TaylorGreen, TaylorGreen2D, ABC, Shear, Custom };

/// Closed-form velocity field: a divergence-free trigonometric polynomial,
/// optionally with exponential viscous decay e^{-sigma t} (exact for Beltrami
/// and 2D Taylor-Green data under unit viscosity). All derivatives are exact.
class AnalyticField {
  public:
    AnalyticKind kind = AnalyticKind::Custom;

    AnalyticField() = default;

    AnalyticField(ScalarTrig v1, ScalarTrig v2, ScalarTrig v3, double decay = 0.0,
                  AnalyticKind kind_ = AnalyticKind::Custom)
        : kind(kind_), v_{std::move(v1), std::move(v2), std::move(v3)}, sigma_(decay) {
        compute_pressure();
        refresh_cache();
    }

    // --- built-in kinds -----------------------------------------------------

    /// Arnold-Beltrami-Childress flow at base wavenumber k0: an eigenfield of
    /// curl (curl v = k0 v), hence an exact Navier-Stokes solution decaying
    /// like e^{-k0^2 t}.
    static AnalyticField abc(double A = 1, double B = 1, double C = 1, int k0 = 1) {
        double k = k0;
        ScalarTrig v1 = ScalarTrig::sin_axis(2, k) * A + ScalarTrig::cos_axis(1, k) * C;
        ScalarTrig v2 = ScalarTrig::sin_axis(0, k) * B + ScalarTrig::cos_axis(2, k) * A;
        ScalarTrig v3 = ScalarTrig::sin_axis(1, k) * C + ScalarTrig::cos_axis(0, k) * B;
        return AnalyticField(std::move(v1), std::move(v2), std::move(v3), double(k0) * k0,
                             AnalyticKind::ABC);
    }

    /// 3D Taylor-Green vortex (t = 0 shape; not an exact solution, decay 0).
    /// omega_3 = 2 sin x1 sin x2 cos x3.
    static AnalyticField taylor_green() {
        ScalarTrig s1 = ScalarTrig::sin_axis(0, 1), c1 = ScalarTrig::cos_axis(0, 1);
        ScalarTrig s2 = ScalarTrig::sin_axis(1, 1), c2 = ScalarTrig::cos_axis(1, 1);
        ScalarTrig c3 = ScalarTrig::cos_axis(2, 1);
        ScalarTrig v1 = s1 * c2 * c3;
        ScalarTrig v2 = c1 * s2 * c3 * (-1.0);
        return AnalyticField(std::move(v1), std::move(v2), ScalarTrig{}, 0.0,
                             AnalyticKind::TaylorGreen);
    }

    /// 2D (z-independent) Taylor-Green vortex: exact solution, decays e^{-2t}.
    static AnalyticField taylor_green_2d() {
        ScalarTrig v1 = ScalarTrig::sin_axis(0, 1) * ScalarTrig::cos_axis(1, 1);
        ScalarTrig v2 = ScalarTrig::cos_axis(0, 1) * ScalarTrig::sin_axis(1, 1) * (-1.0);
        return AnalyticField(std::move(v1), std::move(v2), ScalarTrig{}, 2.0,
                             AnalyticKind::TaylorGreen2D);
    }

    /// Unidirectional shear v = (sin x2, 0, 0): exact solution, decays e^{-t}.
    static AnalyticField shear() {
        return AnalyticField(ScalarTrig::sin_axis(1, 1), ScalarTrig{}, ScalarTrig{}, 1.0,
                             AnalyticKind::Shear);
    }

    static AnalyticField constant(const Vec3& c) {
        return AnalyticField(ScalarTrig::constant(c.x), ScalarTrig::constant(c.y),
                             ScalarTrig::constant(c.z), 0.0, AnalyticKind::Custom);
    }

    /// Pointwise sum of two fields as a new (decay-free unless stated) field.
    static AnalyticField superpose(const AnalyticField& a, const AnalyticField& b,
                                   double decay = 0.0) {
        return AnalyticField(a.component(0) + b.component(0), a.component(1) + b.component(1),
                             a.component(2) + b.component(2), decay, AnalyticKind::Custom);
    }

    /// Random band-limited solenoidal field: integer modes with |m_i| <= kmax,
    /// amplitudes projected orthogonal to k. Deterministic in the seed.
    static AnalyticField random_solenoidal(int kmax, double amplitude, unsigned seed) {
        std::mt19937 rng(seed);
        std::normal_distribution<double> gauss(0.0, 1.0);
        ScalarTrig v[3];
        for (int a = -kmax; a <= kmax; ++a)
            for (int b = -kmax; b <= kmax; ++b)
                for (int c = -kmax; c <= kmax; ++c) {
                    if (a == 0 && b == 0 && c == 0) continue;
                    Vec3 k{double(a), double(b), double(c)};
                    cplx amp[3];
                    for (auto& z : amp) z = cplx(gauss(rng), gauss(rng));
                    // Leray-project the complex amplitude: amp -= k (k.amp)/|k|^2
                    cplx kdot = amp[0] * k.x + amp[1] * k.y + amp[2] * k.z;
                    for (int j = 0; j < 3; ++j) amp[j] -= k[j] * kdot / norm2(k);
                    for (int j = 0; j < 3; ++j) v[j].add_mode(k, amp[j]);
                }
        double scale = 0;
        for (auto& vj : v) scale = std::max(scale, vj.amp_scale());
        for (auto& vj : v) vj = vj * (amplitude / scale);
        return AnalyticField(std::move(v[0]), std::move(v[1]), std::move(v[2]), 0.0,
                             AnalyticKind::Custom);
    }

    // --- evaluation ---------------------------------------------------------

    double decay_rate() const { return sigma_; }
    const ScalarTrig& component(int c) const { return v_[c]; }
    const ScalarTrig& pressure_poly() const { return p_; }

    double decay(double t) const { return std::exp(-sigma_ * t); }

    Vec3 velocity(const Vec3& x, double t = 0) const {
        double d = decay(t);
        Vec3 out;
        for (int c = 0; c < 3; ++c) {
            double val = 0;
            for (const auto& m : mv_[c]) {
                double ph = dot(m.k, x);
                val += m.c.real() * std::cos(ph) - m.c.imag() * std::sin(ph);
            }
            out[c] = d * val;
        }
        return out;
    }

    double component_value(int c, const Vec3& x, double t = 0) const {
        double val = 0;
        for (const auto& m : mv_[c]) {
            double ph = dot(m.k, x);
            val += m.c.real() * std::cos(ph) - m.c.imag() * std::sin(ph);
        }
        return decay(t) * val;
    }

    /// grad[i][j] = d v_i / d x_j
    Mat3 velocity_gradient(const Vec3& x, double t = 0) const {
        Mat3 g;
        double d = decay(t);
        for (int i = 0; i < 3; ++i)
            for (const auto& m : mv_[i]) {
                double ph = dot(m.k, x);
                double cs = std::cos(ph), sn = std::sin(ph);
                // Re(i k_j c e^{i ph}) = -k_j (c_re sin + c_im cos)
                double s = -(m.c.real() * sn + m.c.imag() * cs);
                for (int j = 0; j < 3; ++j) g[i][j] += d * m.k[j] * s;
            }
        return g;
    }

    /// hess[j][l] = d^2 v_i / dx_j dx_l for one component i.
    Mat3 component_hessian(int i, const Vec3& x, double t = 0) const {
        Mat3 g;
        double d = decay(t);
        for (const auto& m : mv_[i]) {
            double ph = dot(m.k, x);
            // Re((ik_j)(ik_l) c e^{iph}) = -k_j k_l Re(c e^{iph})
            double s = -(m.c.real() * std::cos(ph) - m.c.imag() * std::sin(ph));
            for (int j = 0; j < 3; ++j)
                for (int l = 0; l < 3; ++l) g[j][l] += d * m.k[j] * m.k[l] * s;
        }
        return g;
    }

    Vec3 vorticity(const Vec3& x, double t = 0) const {
        Mat3 g = velocity_gradient(x, t);
        return {g[2][1] - g[1][2], g[0][2] - g[2][0], g[1][0] - g[0][1]};
    }

    double pressure(const Vec3& x, double t = 0) const {
        double d = decay(t);
        return d * d * p_.eval(x);
    }

    double divergence(const Vec3& x, double t = 0) const {
        ScalarTrig div =
            v_[0].derivative(0) + v_[1].derivative(1) + v_[2].derivative(2);
        return decay(t) * div.eval(x);
    }

    /// Vorticity as an analytic field in its own right (same decay rate).
    AnalyticField curl_field() const {
        ScalarTrig w1 = v_[2].derivative(1) - v_[1].derivative(2);
        ScalarTrig w2 = v_[0].derivative(2) - v_[2].derivative(0);
        ScalarTrig w3 = v_[1].derivative(0) - v_[0].derivative(1);
        AnalyticField f;
        f.v_[0] = std::move(w1);
        f.v_[1] = std::move(w2);
        f.v_[2] = std::move(w3);
        f.sigma_ = sigma_;
        f.kind = AnalyticKind::Custom;
        // pressure is meaningless for a vorticity field; leave it zero
        f.refresh_cache();
        return f;
    }

    double max_mode_freq() const {
        double kmax = 0;
        for (int i = 0; i < 3; ++i)
            for (const auto& m : v_[i].modes())
                kmax = std::max({kmax, std::abs(m.k.x), std::abs(m.k.y), std::abs(m.k.z)});
        return kmax;
    }

    // --- sampling and rescaling ---------------------------------------------

    VectorField sample(const GridSpec& g, double t = 0) const {
        VectorField f(g, t);
        double d = decay(t);
        for (int c = 0; c < 3; ++c) {
            auto ms = v_[c].modes();
            for (int i3 = 0; i3 < g.n3; ++i3)
                for (int i2 = 0; i2 < g.n2; ++i2)
                    for (int i1 = 0; i1 < g.n1; ++i1) {
                        Vec3 x = g.node(i1, i2, i3);
                        double val = 0;
                        for (const auto& m : ms) {
                            double ph = dot(m.k, x);
                            val += m.c.real() * std::cos(ph) - m.c.imag() * std::sin(ph);
                        }
                        f.at(c, i1, i2, i3) = d * val;
                    }
        }
        return f;
    }

    ScalarField sample_pressure(const GridSpec& g, double t = 0) const {
        ScalarField f(g, t);
        double d2 = decay(t) * decay(t);
        for (int i3 = 0; i3 < g.n3; ++i3)
            for (int i2 = 0; i2 < g.n2; ++i2)
                for (int i1 = 0; i1 < g.n1; ++i1)
                    f.at(i1, i2, i3) = d2 * p_.eval(g.node(i1, i2, i3));
        return f;
    }

    /// Navier-Stokes rescaling v^(lambda)(x,t) = lambda^power v(x0 + lambda x,
    /// t0 + lambda^2 t); power 1 for velocity, 2 for vorticity or pressure.
    /// Exact on the trig representation, so rescalings compose exactly.
    AnalyticField rescaled(double lambda, const Vec3& x0 = {0, 0, 0}, double t0 = 0,
                           int power = 1) const {
        if (!(lambda > 0)) throw precondition_error("rescale requires lambda > 0");
        AnalyticField f;
        f.kind = AnalyticKind::Custom;
        f.sigma_ = sigma_ * lambda * lambda;
        double amp = std::pow(lambda, power) * std::exp(-sigma_ * t0);
        for (int c = 0; c < 3; ++c)
            for (const auto& m : v_[c].modes()) {
                // e^{i k.(x0 + lambda x)} = e^{i k.x0} e^{i (lambda k).x}
                cplx phase = std::exp(cplx(0, dot(m.k, x0)));
                f.v_[c].add_mode(m.k * lambda, amp * m.c * phase);
            }
        double pamp = lambda * lambda * std::exp(-2 * sigma_ * t0);
        for (const auto& m : p_.modes()) {
            cplx phase = std::exp(cplx(0, dot(m.k, x0)));
            f.p_.add_mode(m.k * lambda, pamp * m.c * phase);
        }
        f.refresh_cache();
        return f;
    }

  private:
    /// Instantaneous pressure p = -inv_lap div(v . grad v), computed
    /// symbolically on the mode set. For Beltrami and 2D Taylor-Green data
    /// this is the exact Navier-Stokes pressure (decaying like e^{-2 sigma t}).
    void compute_pressure() {
        ScalarTrig div_conv;
        for (int j = 0; j < 3; ++j) {
            // d_j (v . grad v_j) summed over j equals div(v.grad v) for div-free v
            ScalarTrig conv_j;
            for (int i = 0; i < 3; ++i) conv_j = conv_j + v_[i] * v_[j].derivative(i);
            div_conv = div_conv + conv_j.derivative(j);
        }
        p_ = div_conv.inverse_laplacian() * (-1.0);
        p_.prune();
    }

    void refresh_cache() {
        for (int c = 0; c < 3; ++c) mv_[c] = v_[c].modes();
    }

    ScalarTrig v_[3];
    ScalarTrig p_;
    std::vector<ScalarTrig::Mode> mv_[3];
    double sigma_ = 0.0;
};

}  // namespace vortex

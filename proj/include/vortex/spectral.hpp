#pragma once

#include <fftw3.h>

#include <complex>
#include <map>
#include <mutex>
#include <tuple>
#include <vector>

#include "vortex/field.hpp"

namespace vortex {

/// Half-spectrum (r2c layout) complex coefficients of a real field, stored in
/// the math convention f(x) = sum_k c(k) e^{i k.x}. Index h1 runs 0..n1/2.
struct SpectralScalar {
    GridSpec grid;
    std::vector<std::complex<double>> c;
    double time = 0.0;

    SpectralScalar() = default;
    explicit SpectralScalar(const GridSpec& g, double t = 0.0)
        : grid(g), c(std::size_t(g.n1 / 2 + 1) * g.n2 * g.n3, {0, 0}), time(t) {}

    int nc1() const { return grid.n1 / 2 + 1; }
    std::size_t size() const { return c.size(); }
    std::size_t index(int h1, int i2, int i3) const {
        return std::size_t(h1) + std::size_t(nc1()) * (std::size_t(i2) + std::size_t(grid.n2) * i3);
    }

    std::complex<double> mean() const { return c[0]; }
};

struct SpectralVector {
    std::array<SpectralScalar, 3> comp;
    const GridSpec& grid() const { return comp[0].grid; }
    double time() const { return comp[0].time; }
};

namespace detail {

/// Cached FFTW plans per grid. Plans are created with FFTW_ESTIMATE (fully
/// deterministic output) and FFTW_UNALIGNED so they work on any buffer; the
/// new-array execute functions are thread-safe, plan creation is locked.
class FftPlans {
  public:
    static FftPlans& instance() {
        static FftPlans p;
        return p;
    }

    fftw_plan forward(const GridSpec& g) { return plan(g, true); }
    fftw_plan backward(const GridSpec& g) { return plan(g, false); }

  private:
    std::map<std::tuple<int, int, int, bool>, fftw_plan> plans_;
    std::mutex mtx_;

    fftw_plan plan(const GridSpec& g, bool fwd) {
        std::lock_guard<std::mutex> lock(mtx_);
        auto key = std::make_tuple(g.n1, g.n2, g.n3, fwd);
        auto it = plans_.find(key);
        if (it != plans_.end()) return it->second;
        std::vector<double> re(g.size());
        std::vector<std::complex<double>> cp(std::size_t(g.n1 / 2 + 1) * g.n2 * g.n3);
        // Our storage is x1-fastest, so FFTW's row-major dims are (n3, n2, n1).
        fftw_plan p;
        if (fwd)
            p = fftw_plan_dft_r2c_3d(g.n3, g.n2, g.n1, re.data(),
                                     reinterpret_cast<fftw_complex*>(cp.data()),
                                     FFTW_ESTIMATE | FFTW_UNALIGNED);
        else
            p = fftw_plan_dft_c2r_3d(g.n3, g.n2, g.n1,
                                     reinterpret_cast<fftw_complex*>(cp.data()), re.data(),
                                     FFTW_ESTIMATE | FFTW_UNALIGNED);
        plans_.emplace(key, p);
        return p;
    }
};

}  // namespace detail

inline SpectralScalar fft_forward(const ScalarField& f) {
    SpectralScalar s(f.grid, f.time);
    fftw_plan p = detail::FftPlans::instance().forward(f.grid);
    std::vector<double> in(f.values);  // r2c may scribble on input in corner cases
    fftw_execute_dft_r2c(p, in.data(), reinterpret_cast<fftw_complex*>(s.c.data()));
    double inv_n = 1.0 / double(f.grid.size());
    for (auto& z : s.c) z *= inv_n;
    return s;
}

inline ScalarField fft_backward(const SpectralScalar& s) {
    ScalarField f(s.grid, s.time);
    fftw_plan p = detail::FftPlans::instance().backward(s.grid);
    std::vector<std::complex<double>> in(s.c);  // multi-dim c2r destroys its input
    fftw_execute_dft_c2r(p, reinterpret_cast<fftw_complex*>(in.data()), f.values.data());
    return f;
}

inline SpectralVector fft_forward(const VectorField& v) {
    SpectralVector s;
    for (int c = 0; c < 3; ++c) s.comp[c] = fft_forward(ScalarField(v.grid, v.comp[c], v.time));
    return s;
}

inline VectorField fft_backward(const SpectralVector& s) {
    VectorField v(s.grid(), s.time());
    for (int c = 0; c < 3; ++c) v.comp[c] = fft_backward(s.comp[c]).values;
    return v;
}

/// Physical wavenumbers of a half-spectrum index. Axis-2/3 indices above n/2
/// map to negative frequencies; the Nyquist index keeps k = -n/2 * (2pi/L).
struct WaveNumbers {
    const GridSpec& g;
    explicit WaveNumbers(const GridSpec& g_) : g(g_) {}

    double k1(int h1) const { return two_pi / g.L1 * h1; }
    double k2(int i2) const { return two_pi / g.L2 * (i2 <= g.n2 / 2 ? i2 : i2 - g.n2); }
    double k3(int i3) const { return two_pi / g.L3 * (i3 <= g.n3 / 2 ? i3 : i3 - g.n3); }
    bool nyquist(int h1, int i2, int i3) const {
        return h1 == g.n1 / 2 || i2 == g.n2 / 2 || i3 == g.n3 / 2;
    }
};

/// Apply fn(h1,i2,i3,k) to every coefficient index.
template <typename F>
inline void for_each_mode(const GridSpec& g, F&& fn) {
    WaveNumbers wn(g);
    int nc1 = g.n1 / 2 + 1;
    for (int i3 = 0; i3 < g.n3; ++i3)
        for (int i2 = 0; i2 < g.n2; ++i2)
            for (int h1 = 0; h1 < nc1; ++h1)
                fn(std::size_t(h1) + std::size_t(nc1) * (std::size_t(i2) + std::size_t(g.n2) * i3),
                   Vec3{wn.k1(h1), wn.k2(i2), wn.k3(i3)}, wn.nyquist(h1, i2, i3));
}

/// d/dx_axis in spectral space. The Nyquist planes are zeroed: an odd
/// derivative of the unresolved sawtooth mode has no consistent sign.
inline SpectralScalar spectral_derivative(const SpectralScalar& s, int axis) {
    SpectralScalar d(s.grid, s.time);
    for_each_mode(s.grid, [&](std::size_t i, const Vec3& k, bool nyq) {
        d.c[i] = nyq ? std::complex<double>(0, 0) : std::complex<double>(0, k[axis]) * s.c[i];
    });
    return d;
}

inline SpectralScalar spectral_laplacian(const SpectralScalar& s) {
    SpectralScalar d(s.grid, s.time);
    for_each_mode(s.grid, [&](std::size_t i, const Vec3& k, bool) { d.c[i] = -norm2(k) * s.c[i]; });
    return d;
}

/// Zero-mean solution of lap(u) = f.
inline SpectralScalar spectral_inverse_laplacian(const SpectralScalar& s) {
    SpectralScalar d(s.grid, s.time);
    for_each_mode(s.grid, [&](std::size_t i, const Vec3& k, bool) {
        double k2 = norm2(k);
        d.c[i] = k2 > 0 ? -s.c[i] / k2 : std::complex<double>(0, 0);
    });
    return d;
}

inline SpectralVector spectral_curl(const SpectralVector& v) {
    const GridSpec& g = v.grid();
    SpectralVector w{SpectralScalar(g, v.time()), SpectralScalar(g, v.time()),
                     SpectralScalar(g, v.time())};
    for_each_mode(g, [&](std::size_t i, const Vec3& k, bool nyq) {
        if (nyq) return;
        std::complex<double> I(0, 1);
        auto a = v.comp[0].c[i], b = v.comp[1].c[i], c = v.comp[2].c[i];
        w.comp[0].c[i] = I * (k.y * c - k.z * b);
        w.comp[1].c[i] = I * (k.z * a - k.x * c);
        w.comp[2].c[i] = I * (k.x * b - k.y * a);
    });
    return w;
}

inline SpectralScalar spectral_divergence(const SpectralVector& v) {
    SpectralScalar d(v.grid(), v.time());
    for_each_mode(v.grid(), [&](std::size_t i, const Vec3& k, bool nyq) {
        if (nyq) return;
        std::complex<double> I(0, 1);
        d.c[i] = I * (k.x * v.comp[0].c[i] + k.y * v.comp[1].c[i] + k.z * v.comp[2].c[i]);
    });
    return d;
}

inline SpectralVector spectral_gradient(const SpectralScalar& s) {
    SpectralVector g{SpectralScalar(s.grid, s.time), SpectralScalar(s.grid, s.time),
                     SpectralScalar(s.grid, s.time)};
    for (int a = 0; a < 3; ++a) g.comp[a] = spectral_derivative(s, a);
    return g;
}

/// Leray projection onto divergence-free fields: v -= k (k.v)/|k|^2.
inline void leray_project(SpectralVector& v) {
    for_each_mode(v.grid(), [&](std::size_t i, const Vec3& k, bool) {
        double k2 = norm2(k);
        if (k2 == 0) return;
        std::complex<double> kv =
            k.x * v.comp[0].c[i] + k.y * v.comp[1].c[i] + k.z * v.comp[2].c[i];
        for (int c = 0; c < 3; ++c) v.comp[c].c[i] -= k[c] * kv / k2;
    });
}

/// 2/3-rule dealiasing mask: zero all modes with |m_j| > n_j/3 on any axis.
inline void dealias_23(SpectralScalar& s) {
    const GridSpec& g = s.grid;
    int c1 = g.n1 / 3, c2 = g.n2 / 3, c3 = g.n3 / 3;
    int nc1 = g.n1 / 2 + 1;
    for (int i3 = 0; i3 < g.n3; ++i3) {
        int m3 = i3 <= g.n3 / 2 ? i3 : i3 - g.n3;
        for (int i2 = 0; i2 < g.n2; ++i2) {
            int m2 = i2 <= g.n2 / 2 ? i2 : i2 - g.n2;
            for (int h1 = 0; h1 < nc1; ++h1) {
                if (h1 > c1 || std::abs(m2) > c2 || std::abs(m3) > c3)
                    s.c[s.index(h1, i2, i3)] = 0;
            }
        }
    }
}

inline void dealias_23(SpectralVector& v) {
    for (auto& c : v.comp) dealias_23(c);
}

// --- field-level operations -------------------------------------------------

/// Vorticity omega = curl v by spectral differentiation.
inline VectorField curl(const VectorField& v) {
    v.check_finite("curl input");
    return fft_backward(spectral_curl(fft_forward(v)));
}

/// Spectral divergence.
inline ScalarField divergence(const VectorField& v) {
    v.check_finite("divergence input");
    return fft_backward(spectral_divergence(fft_forward(v)));
}

/// grad of a scalar field, as a vector field.
inline VectorField gradient(const ScalarField& s) {
    s.check_finite("gradient input");
    return fft_backward(spectral_gradient(fft_forward(s)));
}

/// The unique mean-zero velocity with div v = 0 and curl v = (solenoidal part
/// of) omega: v_hat = i k x omega_hat / |k|^2. Rejects nonzero-mean input.
inline VectorField biot_savart(const VectorField& omega) {
    omega.check_finite("biot_savart input");
    SpectralVector w = fft_forward(omega);
    double scale = omega.max_norm();
    for (int c = 0; c < 3; ++c)
        if (std::abs(w.comp[c].mean()) > 1e-12 * std::max(scale, 1e-300))
            throw precondition_error("biot_savart: input has nonzero mean (not a curl)");
    SpectralVector v{SpectralScalar(omega.grid, omega.time), SpectralScalar(omega.grid, omega.time),
                     SpectralScalar(omega.grid, omega.time)};
    for_each_mode(omega.grid, [&](std::size_t i, const Vec3& k, bool nyq) {
        double k2 = norm2(k);
        if (k2 == 0 || nyq) return;
        std::complex<double> I(0, 1);
        auto a = w.comp[0].c[i], b = w.comp[1].c[i], c = w.comp[2].c[i];
        v.comp[0].c[i] = I * (k.y * c - k.z * b) / k2;
        v.comp[1].c[i] = I * (k.z * a - k.x * c) / k2;
        v.comp[2].c[i] = I * (k.x * b - k.y * a) / k2;
    });
    return fft_backward(v);
}

/// Pressure consistent with a velocity snapshot: p = -inv_lap div(v . grad v),
/// with the quadratic product dealiased. Mean-zero.
inline ScalarField pressure_from_velocity(const VectorField& v) {
    v.check_finite("pressure input");
    SpectralVector vs = fft_forward(v);
    // physical gradients dv_j/dx_i
    std::array<std::array<std::vector<double>, 3>, 3> dv;
    for (int j = 0; j < 3; ++j) {
        for (int i = 0; i < 3; ++i)
            dv[j][i] = fft_backward(spectral_derivative(vs.comp[j], i)).values;
    }
    VectorField conv(v.grid, v.time);
    for (std::size_t n = 0; n < v.size(); ++n) {
        for (int j = 0; j < 3; ++j) {
            double s = 0;
            for (int i = 0; i < 3; ++i) s += v.comp[i][n] * dv[j][i][n];
            conv.comp[j][n] = s;
        }
    }
    SpectralVector cs = fft_forward(conv);
    dealias_23(cs);
    SpectralScalar rhs = spectral_divergence(cs);
    SpectralScalar p = spectral_inverse_laplacian(rhs);
    for (auto& z : p.c) z = -z;
    return fft_backward(p);
}

/// Jacobian as 9 physical fields; grad[j][i] = d v_j / d x_i.
inline std::array<std::array<ScalarField, 3>, 3> jacobian(const VectorField& v) {
    SpectralVector vs = fft_forward(v);
    std::array<std::array<ScalarField, 3>, 3> out;
    for (int j = 0; j < 3; ++j)
        for (int i = 0; i < 3; ++i) out[j][i] = fft_backward(spectral_derivative(vs.comp[j], i));
    return out;
}

/// Kinetic energy (1/2) int |v|^2 dx by the exact periodic trapezoid rule.
inline double kinetic_energy(const VectorField& v) {
    double s = 0;
    for (int c = 0; c < 3; ++c)
        for (double x : v.comp[c]) s += x * x;
    return 0.5 * s * v.grid.cell_volume();
}

/// int |grad v|^2 dx via Parseval on the half-spectrum.
inline double gradient_energy(const SpectralVector& vs) {
    const GridSpec& g = vs.grid();
    double V = g.L1 * g.L2 * g.L3;
    double s = 0;
    for_each_mode(g, [&](std::size_t i, const Vec3& k, bool) {
        // h1 = 0 and h1 = n1/2 planes appear once in the half-spectrum
        std::size_t h1 = i % std::size_t(g.n1 / 2 + 1);
        double w = (h1 == 0 || int(h1) == g.n1 / 2) ? 1.0 : 2.0;
        double a = std::norm(vs.comp[0].c[i]) + std::norm(vs.comp[1].c[i]) +
                   std::norm(vs.comp[2].c[i]);
        s += w * norm2(k) * a;
    });
    return V * s;
}

/// max |divergence| relative to max |grad v|, the scale used by the
/// "div o curl = 0" spectral tolerance.
inline double divergence_defect_relative(const VectorField& v) {
    SpectralVector vs = fft_forward(v);
    ScalarField div = fft_backward(spectral_divergence(vs));
    double dmax = div.max_abs();
    double gmax = 0;
    for (int j = 0; j < 3; ++j)
        for (int i = 0; i < 3; ++i) {
            ScalarField d = fft_backward(spectral_derivative(vs.comp[j], i));
            gmax = std::max(gmax, d.max_abs());
        }
    return gmax > 0 ? dmax / gmax : dmax;
}

}  // namespace vortex

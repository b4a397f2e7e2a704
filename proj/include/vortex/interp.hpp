#pragma once

#include <map>
#include <memory>

#include "vortex/spectral.hpp"

namespace vortex {

enum class InterpKind { Trig, Tricubic };

/// 2D spectral restriction of a 3D half-spectrum to a fixed plane x3 = z:
///   g_z(k1,k2) = sum_{k3} c(k1,k2,k3) e^{i k3 z}.
/// Point evaluation is then an O(n1*n2) phase sum, exact for band-limited
/// fields. Used by all disc/circle quadratures.
class SpectralSlice {
  public:
    SpectralSlice(const SpectralScalar& s, double z) : grid_(s.grid) {
        int nc1 = s.nc1();
        c2d_.assign(std::size_t(nc1) * grid_.n2, {0, 0});
        WaveNumbers wn(grid_);
        for (int i3 = 0; i3 < grid_.n3; ++i3) {
            std::complex<double> ph = std::exp(std::complex<double>(0, wn.k3(i3) * z));
            for (int i2 = 0; i2 < grid_.n2; ++i2) {
                const std::complex<double>* src = &s.c[s.index(0, i2, i3)];
                std::complex<double>* dst = &c2d_[std::size_t(nc1) * i2];
                for (int h1 = 0; h1 < nc1; ++h1) dst[h1] += src[h1] * ph;
            }
        }
    }

    double eval(double x1, double x2) const {
        int nc1 = grid_.n1 / 2 + 1;
        double dk1 = two_pi / grid_.L1, dk2 = two_pi / grid_.L2;
        // phase tables by recurrence
        thread_local std::vector<std::complex<double>> p1, p2;
        p1.resize(nc1);
        p2.resize(grid_.n2);
        std::complex<double> e1 = std::exp(std::complex<double>(0, dk1 * x1));
        p1[0] = {1, 0};
        for (int h = 1; h < nc1; ++h) p1[h] = p1[h - 1] * e1;
        std::complex<double> e2 = std::exp(std::complex<double>(0, dk2 * x2));
        p2[0] = {1, 0};
        for (int i = 1; i < grid_.n2; ++i) p2[i] = p2[i - 1] * e2;
        // negative frequencies on axis 2: e^{i k2 x2} with k2 = (i2-n2) dk2
        std::complex<double> wrap2 = std::exp(std::complex<double>(0, -grid_.n2 * dk2 * x2));

        std::complex<double> total(0, 0);
        for (int i2 = 0; i2 < grid_.n2; ++i2) {
            const std::complex<double>* row = &c2d_[std::size_t(nc1) * i2];
            std::complex<double> acc = row[0];  // h1 = 0, weight 1
            int last = nc1 - 1;                 // Nyquist column, weight 1
            for (int h1 = 1; h1 < last; ++h1) acc += 2.0 * row[h1] * p1[h1];
            acc += row[last] * p1[last];
            std::complex<double> ph2 = p2[i2];
            if (i2 > grid_.n2 / 2) ph2 *= wrap2;
            total += acc * ph2;
        }
        return total.real();
    }

  private:
    GridSpec grid_;
    std::vector<std::complex<double>> c2d_;
};

/// Slices of one spectral scalar keyed by z (quantized); built lazily.
/// Not thread-safe: use one cache per worker.
class SliceCache {
  public:
    explicit SliceCache(SpectralScalar s) : src_(std::move(s)) {}

    const SpectralSlice& at(double z) {
        long long key = llround(z * 1e12);
        auto it = cache_.find(key);
        if (it == cache_.end()) it = cache_.emplace(key, SpectralSlice(src_, z)).first;
        return it->second;
    }

    const SpectralScalar& spectrum() const { return src_; }

  private:
    SpectralScalar src_;
    std::map<long long, SpectralSlice> cache_;
};

namespace detail {

inline void catmull_rom_weights(double u, double w[4]) {
    w[0] = 0.5 * (((2 - u) * u - 1) * u);
    w[1] = 0.5 * ((3 * u - 5) * u * u + 2);
    w[2] = 0.5 * (((4 - 3 * u) * u + 1) * u);
    w[3] = 0.5 * ((u - 1) * u * u);
}

}  // namespace detail

/// Periodic tricubic (Catmull-Rom) interpolation; the cheap fallback for
/// smooth sampled fields where spectral accuracy is not needed.
inline double tricubic_eval(const ScalarField& f, const Vec3& x) {
    const GridSpec& g = f.grid;
    double u1 = x.x / g.h1(), u2 = x.y / g.h2(), u3 = x.z / g.h3();
    int i1 = int(std::floor(u1)), i2 = int(std::floor(u2)), i3 = int(std::floor(u3));
    double f1 = u1 - i1, f2 = u2 - i2, f3 = u3 - i3;
    double w1[4], w2[4], w3[4];
    detail::catmull_rom_weights(f1, w1);
    detail::catmull_rom_weights(f2, w2);
    detail::catmull_rom_weights(f3, w3);
    auto wrap = [](int i, int n) {
        i %= n;
        return i < 0 ? i + n : i;
    };
    double val = 0;
    for (int c = 0; c < 4; ++c) {
        int j3 = wrap(i3 - 1 + c, g.n3);
        for (int b = 0; b < 4; ++b) {
            int j2 = wrap(i2 - 1 + b, g.n2);
            double wbc = w2[b] * w3[c];
            for (int a = 0; a < 4; ++a) {
                int j1 = wrap(i1 - 1 + a, g.n1);
                val += w1[a] * wbc * f.values[g.index(j1, j2, j3)];
            }
        }
    }
    return val;
}

inline Vec3 tricubic_eval(const VectorField& v, const Vec3& x) {
    Vec3 out;
    for (int c = 0; c < 3; ++c) {
        const GridSpec& g = v.grid;
        double u1 = x.x / g.h1(), u2 = x.y / g.h2(), u3 = x.z / g.h3();
        int i1 = int(std::floor(u1)), i2 = int(std::floor(u2)), i3 = int(std::floor(u3));
        double f1 = u1 - i1, f2 = u2 - i2, f3 = u3 - i3;
        double w1[4], w2[4], w3[4];
        detail::catmull_rom_weights(f1, w1);
        detail::catmull_rom_weights(f2, w2);
        detail::catmull_rom_weights(f3, w3);
        auto wrap = [](int i, int n) {
            i %= n;
            return i < 0 ? i + n : i;
        };
        double val = 0;
        for (int cc = 0; cc < 4; ++cc) {
            int j3 = wrap(i3 - 1 + cc, g.n3);
            for (int b = 0; b < 4; ++b) {
                int j2 = wrap(i2 - 1 + b, g.n2);
                double wbc = w2[b] * w3[cc];
                for (int a = 0; a < 4; ++a) {
                    int j1 = wrap(i1 - 1 + a, g.n1);
                    val += w1[a] * wbc * v.comp[c][g.index(j1, j2, j3)];
                }
            }
        }
        out[c] = val;
    }
    return out;
}

}  // namespace vortex

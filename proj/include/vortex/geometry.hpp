#pragma once

#include <algorithm>
#include <limits>
#include <optional>

#include "vortex/evaluate.hpp"
#include "vortex/regions.hpp"

namespace vortex {

struct DirectionSample {
    Vec3 position;
    Vec3 xi;          // unit vorticity direction
    double magnitude;  // |omega|
};

/// Weighted samples of vorticity directions above a magnitude threshold.
struct DirectionSet {
    std::vector<DirectionSample> samples;
    double threshold_M = 0;
    GridSpec grid;  // source box, used for the periodic metric
    std::optional<CylinderRegion> region;

    std::size_t size() const { return samples.size(); }
    bool empty() const { return samples.empty(); }
};

/// One sample per grid node with |omega| > M; |omega| = 0 nodes never
/// produce samples (the direction is undefined there).
inline DirectionSet direction_field(const VectorField& omega, double M,
                                    std::optional<CylinderRegion> region = std::nullopt) {
    if (M < 0) throw precondition_error("direction_field threshold M must be >= 0");
    omega.check_finite("direction_field input");
    DirectionSet ds;
    ds.threshold_M = M;
    ds.grid = omega.grid;
    ds.region = region;
    if (region) region->validate(omega.grid);
    const GridSpec& g = omega.grid;
    for (int i3 = 0; i3 < g.n3; ++i3)
        for (int i2 = 0; i2 < g.n2; ++i2)
            for (int i1 = 0; i1 < g.n1; ++i1) {
                std::size_t idx = g.index(i1, i2, i3);
                Vec3 w = omega.vec_at(idx);
                double m = norm(w);
                if (!(m > M) || m == 0.0) continue;
                Vec3 x = g.node(i1, i2, i3);
                if (region) {
                    Vec3 d = g.periodic_delta(x, region->center);
                    if (region->shape == CylinderShape::BallCylinder) {
                        if (norm(d) >= region->r) continue;
                    } else {
                        if (std::hypot(d.x, d.y) >= region->r || std::abs(d.z) >= region->r)
                            continue;
                    }
                }
                ds.samples.push_back({x, w / m, m});
            }
    return ds;
}

/// Double-cone fit: axis e maximizing s = min_i |xi_i . e|, with
/// delta = 1 - sqrt(1 - s^2) so that |xi x e| <= 1 - delta for every sample.
struct ConeFit {
    Vec3 axis;
    double s = 0;      // worst |xi . e| at the optimum
    double delta = 0;  // cone deficiency
    double C = 0;      // (1-delta)/sqrt(2 delta - delta^2); inf when delta = 0
    std::size_t worst_index = 0;
    int lattice_size = 0;
};

namespace detail {

/// Golden-spiral points on the unit sphere (deterministic).
inline std::vector<Vec3> fibonacci_lattice(int n) {
    std::vector<Vec3> pts;
    pts.reserve(n);
    double dz = 2.0 / n;
    double z = -1.0 + 0.5 * dz;
    double dphi = pi * (std::sqrt(5.0) + 1.0);
    double phi = 0;
    for (int i = 0; i < n; ++i) {
        double r = std::sqrt(std::max(0.0, 1.0 - z * z));
        pts.push_back({r * std::cos(phi), r * std::sin(phi), z});
        z += dz;
        phi += dphi;
    }
    return pts;
}

/// min_i |xi_i . e|, with optional early exit once below `floor`.
inline double worst_alignment(const std::vector<DirectionSample>& samples, const Vec3& e,
                              double floor_val, std::size_t* arg = nullptr) {
    double m = std::numeric_limits<double>::infinity();
    std::size_t am = 0;
    for (std::size_t i = 0; i < samples.size(); ++i) {
        double d = std::abs(dot(samples[i].xi, e));
        if (d < m) {
            m = d;
            am = i;
            if (m <= floor_val) break;
        }
    }
    if (arg) *arg = am;
    return m;
}

/// Nelder-Mead refinement of the max-min objective in the tangent plane of
/// the starting axis. The objective is piecewise smooth; the coarse lattice
/// guards against the wrong basin.
inline Vec3 refine_axis(const std::vector<DirectionSample>& samples, Vec3 e0, double step,
                        int max_iter = 300) {
    Vec3 u = std::abs(e0.z) < 0.9 ? normalized(cross(e0, {0, 0, 1}))
                                  : normalized(cross(e0, {1, 0, 0}));
    Vec3 v = cross(e0, u);
    auto axis_of = [&](double a, double b) { return normalized(e0 + a * u + b * v); };
    auto f = [&](double a, double b) {
        return -worst_alignment(samples, axis_of(a, b), -1.0);
    };

    struct P {
        double a, b, val;
    };
    std::array<P, 3> sx{P{0, 0, f(0, 0)}, P{step, 0, f(step, 0)}, P{0, step, f(0, step)}};
    for (int it = 0; it < max_iter; ++it) {
        std::sort(sx.begin(), sx.end(), [](const P& p, const P& q) { return p.val < q.val; });
        double size = std::max(std::hypot(sx[1].a - sx[0].a, sx[1].b - sx[0].b),
                               std::hypot(sx[2].a - sx[0].a, sx[2].b - sx[0].b));
        if (size < 1e-10) break;
        double ca = 0.5 * (sx[0].a + sx[1].a), cb = 0.5 * (sx[0].b + sx[1].b);
        P refl{ca + (ca - sx[2].a), cb + (cb - sx[2].b), 0};
        refl.val = f(refl.a, refl.b);
        if (refl.val < sx[0].val) {
            P exp_{ca + 2 * (ca - sx[2].a), cb + 2 * (cb - sx[2].b), 0};
            exp_.val = f(exp_.a, exp_.b);
            sx[2] = exp_.val < refl.val ? exp_ : refl;
        } else if (refl.val < sx[1].val) {
            sx[2] = refl;
        } else {
            P con{ca + 0.5 * (sx[2].a - ca), cb + 0.5 * (sx[2].b - cb), 0};
            con.val = f(con.a, con.b);
            if (con.val < sx[2].val) {
                sx[2] = con;
            } else {
                for (int i = 1; i < 3; ++i) {
                    sx[i].a = 0.5 * (sx[i].a + sx[0].a);
                    sx[i].b = 0.5 * (sx[i].b + sx[0].b);
                    sx[i].val = f(sx[i].a, sx[i].b);
                }
            }
        }
    }
    std::sort(sx.begin(), sx.end(), [](const P& p, const P& q) { return p.val < q.val; });
    return axis_of(sx[0].a, sx[0].b);
}

}  // namespace detail

/// Empty sets yield std::nullopt ("no data"), not an error.
inline std::optional<ConeFit> cone_deficiency(const DirectionSet& ds, int lattice_size = 4096) {
    if (ds.empty()) return std::nullopt;
    if (lattice_size < 2000) lattice_size = 2000;

    auto lattice = detail::fibonacci_lattice(lattice_size);
    Vec3 best_axis = lattice[0];
    double best = -1;
    for (const Vec3& e : lattice) {
        double s = detail::worst_alignment(ds.samples, e, best);
        if (s > best) {
            best = s;
            best_axis = e;
        }
    }
    double step = 2.0 / std::sqrt(double(lattice_size));
    Vec3 axis = detail::refine_axis(ds.samples, best_axis, step);

    ConeFit fit;
    fit.lattice_size = lattice_size;
    fit.axis = axis;
    fit.s = detail::worst_alignment(ds.samples, axis, -1.0, &fit.worst_index);
    if (fit.s < best) {  // refinement must never lose to the lattice
        fit.axis = best_axis;
        fit.s = detail::worst_alignment(ds.samples, best_axis, -1.0, &fit.worst_index);
    }
    fit.s = std::min(fit.s, 1.0);
    fit.delta = 1.0 - std::sqrt(1.0 - fit.s * fit.s);
    fit.C = fit.delta > 0
                ? (1.0 - fit.delta) / std::sqrt(2.0 * fit.delta - fit.delta * fit.delta)
                : std::numeric_limits<double>::infinity();

    // internal consistency: |xi x e|^2 + (xi.e)^2 = 1 for the worst sample
    const Vec3& xi = ds.samples[fit.worst_index].xi;
    double c2 = norm2(cross(xi, fit.axis)) + dot(xi, fit.axis) * dot(xi, fit.axis);
    if (std::abs(c2 - 1.0) > 1e-9)
        throw std::logic_error("cone fit consistency identity violated");
    return fit;
}

/// Great-circle obstruction test (the singularity characterization): if the
/// fitted cone has gap s > tol, the great circle with pole `axis` is avoided
/// by all sampled directions (distance >= s in the |xi.n| metric); otherwise
/// the set is reported as obstructing every great circle at this resolution.
struct ObstructionResult {
    bool obstructed = true;
    Vec3 pole{0, 0, 0};
    double gap = 0;
    double tol = 0;
};

inline ObstructionResult great_circle_obstruction(const DirectionSet& ds, double tol = 1e-2) {
    if (ds.empty()) throw precondition_error("great_circle_obstruction: empty direction set");
    auto fit = cone_deficiency(ds);
    ObstructionResult res;
    res.tol = tol;
    res.gap = fit->s;
    res.pole = fit->axis;
    res.obstructed = !(fit->s > tol);
    return res;
}

/// Exact max over pairs of |xi_i x xi_j| by O(n^2) scan for n <= 5000;
/// above that, a bucket-and-bound search over spherical cells that prunes
/// pairs which cannot beat the current best (still exact).
inline double pairwise_alignment(const DirectionSet& ds) {
    const auto& s = ds.samples;
    std::size_t n = s.size();
    if (n < 2) return 0.0;

    if (n <= 5000) {
        double best = 0;
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = i + 1; j < n; ++j)
                best = std::max(best, norm(cross(s[i].xi, s[j].xi)));
        return best;
    }

    // bucket by direction (lines: antipodes identified)
    struct Bucket {
        std::vector<std::size_t> idx;
        Vec3 centroid{0, 0, 0};
        double radius = 0;  // max angle to centroid
    };
    const int nb = 12;  // per angular axis
    std::map<std::pair<int, int>, Bucket> buckets;
    auto canon = [](Vec3 d) {
        if (d.z < 0 || (d.z == 0 && (d.y < 0 || (d.y == 0 && d.x < 0)))) d = -d;
        return d;
    };
    for (std::size_t i = 0; i < n; ++i) {
        Vec3 d = canon(s[i].xi);
        double th = std::acos(std::clamp(d.z, -1.0, 1.0));
        double ph = std::atan2(d.y, d.x) + pi;
        buckets[{int(th / pi * nb), int(ph / two_pi * nb)}].idx.push_back(i);
    }
    std::vector<Bucket> bl;
    for (auto& [k, b] : buckets) {
        for (auto i : b.idx) b.centroid += canon(s[i].xi);
        b.centroid = normalized(b.centroid);
        for (auto i : b.idx)
            b.radius = std::max(
                b.radius, std::acos(std::clamp(std::abs(dot(canon(s[i].xi), b.centroid)), 0.0, 1.0)));
        bl.push_back(std::move(b));
    }
    double best = 0;
    for (std::size_t a = 0; a < bl.size(); ++a)
        for (std::size_t b = a; b < bl.size(); ++b) {
            double ang = std::acos(std::clamp(std::abs(dot(bl[a].centroid, bl[b].centroid)), 0.0, 1.0));
            double bound = std::min(pi / 2, ang + bl[a].radius + bl[b].radius);
            if (std::sin(bound) <= best) continue;
            for (std::size_t ii = 0; ii < bl[a].idx.size(); ++ii) {
                std::size_t j0 = (a == b) ? ii + 1 : 0;
                for (std::size_t jj = j0; jj < bl[b].idx.size(); ++jj)
                    best = std::max(best, norm(cross(s[bl[a].idx[ii]].xi, s[bl[b].idx[jj]].xi)));
            }
        }
    return best;
}

/// Smallest C with |xi(x) x xi(y)| <= C |x - y|^alpha over sample pairs,
/// with the periodic metric. Coincident positions with distinct directions
/// witness C = infinity.
struct HolderResult {
    double C = 0;
    bool infinite = false;
    std::size_t i = 0, j = 0;  // attaining (or witnessing) pair
};

inline HolderResult holder_modulus(const DirectionSet& ds, double alpha) {
    if (alpha != 1.0 && alpha != 0.5)
        throw precondition_error("holder_modulus: alpha must be 1 or 1/2");
    const auto& s = ds.samples;
    if (s.size() < 2) throw precondition_error("holder_modulus needs >= 2 samples");
    HolderResult r;
    for (std::size_t i = 0; i < s.size(); ++i)
        for (std::size_t j = i + 1; j < s.size(); ++j) {
            double cr = norm(cross(s[i].xi, s[j].xi));
            double d = ds.grid.periodic_distance(s[i].position, s[j].position);
            if (d < 1e-12) {
                if (cr > 1e-12) return {std::numeric_limits<double>::infinity(), true, i, j};
                continue;
            }
            double c = cr / std::pow(d, alpha);
            if (c > r.C) {
                r.C = c;
                r.i = i;
                r.j = j;
            }
        }
    return r;
}

/// Constantin-Fefferman geometric factor D(a,b,c) = (a.c) Det(a,b,c).
inline double cf_determinant(const Vec3& a, const Vec3& b, const Vec3& c) {
    return dot(a, c) * det3(a, b, c);
}

/// Principal-value stretching integral vs the direct spectral evaluation.
struct StretchingResult {
    double pv = 0;        // Richardson-extrapolated PV quadrature
    double direct = 0;    // xi' (grad v) xi from spectral gradients
    double rel_diff = 0;  // |pv - direct| / max(|direct|, eps)
    double rho_cut = 0;
    double window = 0;
};

struct StretchingOptions {
    double window = 0;        // integration radius; default 3 min(L)/4
    int n_rho = 32;           // log-radial Gauss nodes
    int n_polar = 24;         // Gauss nodes in cos(polar)
    int n_azim = 48;          // trapezoid nodes in azimuth
    InterpKind interp = InterpKind::Tricubic;
};

/// xi . grad v . xi at x, evaluated two ways: the Constantin-Fefferman
/// singular integral (3/4pi) PV int D(y_hat, xi(x+y), xi(x)) |w(x+y)| dy/|y|^3
/// truncated to rho_cut < |y| < window and Richardson-extrapolated in
/// rho_cut (the excluded-ball error is O(rho_cut^2)); and directly from the
/// Biot-Savart velocity gradient.
inline StretchingResult stretching_factor(const VectorField& omega, const Vec3& x, double rho_cut,
                                          const StretchingOptions& opts = {}) {
    const GridSpec& g = omega.grid;
    if (rho_cut <= g.min_h())
        throw precondition_error("stretching_factor: rho_cut must exceed the grid spacing");
    double window = opts.window > 0 ? opts.window : 0.75 * g.min_L();

    // direction at the base point (trig-exact)
    SpectralVector ws = fft_forward(omega);
    Vec3 w0;
    {
        SpectralSlice s0(ws.comp[0], x.z), s1(ws.comp[1], x.z), s2(ws.comp[2], x.z);
        w0 = {s0.eval(x.x, x.y), s1.eval(x.x, x.y), s2.eval(x.x, x.y)};
    }
    double m0 = norm(w0);
    if (m0 <= 1e-12 * std::max(omega.max_norm(), 1e-300))
        throw precondition_error("stretching_factor: |omega(x)| vanishes, direction undefined");
    Vec3 xi0 = w0 / m0;

    const VectorField& om_phys = omega;  // tricubic path samples the given field directly
    std::array<std::unique_ptr<SliceCache>, 3> om_slices;
    if (opts.interp == InterpKind::Trig)
        for (int c = 0; c < 3; ++c) om_slices[c] = std::make_unique<SliceCache>(ws.comp[c]);

    auto eval_omega = [&](const Vec3& y) -> Vec3 {
        if (opts.interp == InterpKind::Tricubic) return tricubic_eval(om_phys, y);
        return {om_slices[0]->at(y.z).eval(y.x, y.y), om_slices[1]->at(y.z).eval(y.x, y.y),
                om_slices[2]->at(y.z).eval(y.x, y.y)};
    };

    auto shell_integral = [&](double r_in) {
        // I = (3/4pi) int_{r_in}^{window} (1/rho) int_{S^2} D(n, xi(x+rho n), xi0) |w| dOm drho
        double total = 0;
        auto rho_nodes = gl_interval(std::log(r_in), std::log(window), opts.n_rho);
        auto polar = gl_interval(-1.0, 1.0, opts.n_polar);
        double dphi = two_pi / opts.n_azim;
        for (auto [lr, wlr] : rho_nodes) {
            double rho = std::exp(lr);
            double shell = 0;
            for (auto [cu, wu] : polar) {
                double su = std::sqrt(std::max(0.0, 1.0 - cu * cu));
                for (int a = 0; a < opts.n_azim; ++a) {
                    double ph = a * dphi;
                    Vec3 nhat{su * std::cos(ph), su * std::sin(ph), cu};
                    Vec3 w = eval_omega(x + rho * nhat);
                    double m = norm(w);
                    if (m < 1e-300) continue;
                    shell += wu * dphi * cf_determinant(nhat, w / m, xi0) * m;
                }
            }
            total += wlr * shell;  // d(log rho) absorbs the 1/rho
        }
        return 3.0 / (4.0 * pi) * total;
    };

    double i1 = shell_integral(rho_cut);
    double i2 = shell_integral(rho_cut / 2);
    StretchingResult res;
    res.pv = (4.0 * i2 - i1) / 3.0;
    res.rho_cut = rho_cut;
    res.window = window;

    // direct route: velocity gradient of the Biot-Savart velocity at x
    VectorField v = biot_savart(omega);
    SpectralVector vs = fft_forward(v);
    Mat3 gradv;
    for (int j = 0; j < 3; ++j)
        for (int i = 0; i < 3; ++i) {
            SpectralSlice sl(SpectralScalar(spectral_derivative(vs.comp[j], i)), x.z);
            gradv[j][i] = sl.eval(x.x, x.y);
        }
    res.direct = quad_form(gradv, xi0);
    res.rel_diff = std::abs(res.pv - res.direct) / std::max(std::abs(res.direct), 1e-14);
    return res;
}

}  // namespace vortex

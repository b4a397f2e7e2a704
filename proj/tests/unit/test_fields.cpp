#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "vortex/analytic.hpp"
#include "vortex/interp.hpp"
#include "vortex/regions.hpp"
#include "vortex/rescale.hpp"
#include "vortex/spectral.hpp"

using namespace vortex;

namespace {

double max_comp_diff(const VectorField& a, const VectorField& b) {
    double m = 0;
    for (int c = 0; c < 3; ++c)
        for (std::size_t i = 0; i < a.size(); ++i)
            m = std::max(m, std::abs(a.comp[c][i] - b.comp[c][i]));
    return m;
}

double max_grad(const VectorField& v) {
    SpectralVector vs = fft_forward(v);
    double m = 0;
    for (int j = 0; j < 3; ++j)
        for (int i = 0; i < 3; ++i)
            m = std::max(m, fft_backward(spectral_derivative(vs.comp[j], i)).max_abs());
    return m;
}

}  // namespace

TEST_CASE("grid invariants") {
    CHECK_THROWS_AS(GridSpec(3, 4, 4), precondition_error);   // odd
    CHECK_THROWS_AS(GridSpec(4, 2, 4), precondition_error);   // too small
    CHECK_THROWS_AS(GridSpec(8, 8, 8, -1.0), precondition_error);
    GridSpec g(8, 16, 4, 1.0, 2.0, 3.0);
    CHECK(g.size() == 8u * 16 * 4);
    CHECK(g.index(1, 2, 3) == 1 + 8 * (2 + 16 * 3));
    // periodic metric: wrap-around distance
    CHECK(g.periodic_distance({0.05, 0, 0}, {0.95, 0, 0}) == Catch::Approx(0.1));
}

TEST_CASE("curl: Beltrami identity, constants, symbolic oracle") {
    GridSpec g = GridSpec::cube(32);

    // ABC flow is an eigenfield of curl with eigenvalue 1
    VectorField v = AnalyticField::abc().sample(g, 0.0);
    VectorField w = curl(v);
    CHECK(max_comp_diff(v, w) < 1e-12);

    // constant field -> zero curl
    VectorField c(g);
    for (auto& x : c.comp[0]) x = 0.7;
    for (auto& x : c.comp[2]) x = -1.3;
    CHECK(curl(c).max_norm() < 1e-14);

    // v = (sin x2, 0, 0) -> omega = (0, 0, -cos x2)
    VectorField sh(g);
    for (int i3 = 0; i3 < g.n3; ++i3)
        for (int i2 = 0; i2 < g.n2; ++i2)
            for (int i1 = 0; i1 < g.n1; ++i1)
                sh.at(0, i1, i2, i3) = std::sin(g.node(i1, i2, i3).y);
    VectorField om = curl(sh);
    double err = 0;
    for (int i3 = 0; i3 < g.n3; ++i3)
        for (int i2 = 0; i2 < g.n2; ++i2)
            for (int i1 = 0; i1 < g.n1; ++i1) {
                err = std::max(err, std::abs(om.at(0, i1, i2, i3)));
                err = std::max(err, std::abs(om.at(1, i1, i2, i3)));
                err = std::max(err,
                               std::abs(om.at(2, i1, i2, i3) + std::cos(g.node(i1, i2, i3).y)));
            }
    CHECK(err < 1e-13);

    // curl output has zero mean per component
    SpectralVector ws = fft_forward(om);
    for (int cc = 0; cc < 3; ++cc) CHECK(std::abs(ws.comp[cc].mean()) < 1e-15);

    // non-finite input rejected
    VectorField bad = v;
    bad.comp[1][17] = std::numeric_limits<double>::quiet_NaN();
    CHECK_THROWS_AS(curl(bad), precondition_error);
}

TEST_CASE("divergence: div o curl vanishes, symbolic oracle") {
    GridSpec g = GridSpec::cube(32);
    std::mt19937 rng(11);

    // div(curl(v)) = 0 at spectral tolerance, quantified against max |grad v|
    VectorField v = AnalyticField::random_solenoidal(5, 1.0, 101).sample(g, 0.0);
    VectorField w = curl(v);
    CHECK(divergence(w).max_abs() <= 1e-10 * max_grad(w));

    // Taylor-Green is exactly solenoidal
    CHECK(divergence(AnalyticField::taylor_green().sample(g, 0.0)).max_abs() < 1e-13);

    // v = (sin x1, 0, 0) -> div = cos x1
    VectorField sh(g);
    for (int i3 = 0; i3 < g.n3; ++i3)
        for (int i2 = 0; i2 < g.n2; ++i2)
            for (int i1 = 0; i1 < g.n1; ++i1)
                sh.at(0, i1, i2, i3) = std::sin(g.node(i1, i2, i3).x);
    ScalarField d = divergence(sh);
    double err = 0;
    for (int i3 = 0; i3 < g.n3; ++i3)
        for (int i2 = 0; i2 < g.n2; ++i2)
            for (int i1 = 0; i1 < g.n1; ++i1)
                err = std::max(err, std::abs(d.at(i1, i2, i3) - std::cos(g.node(i1, i2, i3).x)));
    CHECK(err < 1e-13);
}

TEST_CASE("biot_savart: Beltrami eigenfield, zero, spectral round trip") {
    GridSpec g = GridSpec::cube(32);

    VectorField abc = AnalyticField::abc().sample(g, 0.0);
    CHECK(max_comp_diff(biot_savart(abc), abc) < 1e-12);

    VectorField zero(g);
    CHECK(biot_savart(zero).max_norm() == 0.0);

    // round trip on a random band-limited solenoidal field
    VectorField om = curl(AnalyticField::random_solenoidal(8, 1.0, 202).sample(g, 0.0));
    VectorField back = curl(biot_savart(om));
    CHECK(max_comp_diff(back, om) <= 1e-10 * om.max_norm());

    // nonzero-mean input rejected
    VectorField biased(g);
    for (auto& x : biased.comp[2]) x = 1.0;
    CHECK_THROWS_AS(biot_savart(biased), precondition_error);
}

TEST_CASE("spectral derivative matches the symbolic derivative") {
    GridSpec g = GridSpec::cube(24);
    auto f = AnalyticField::random_solenoidal(4, 1.0, 303);
    VectorField v = f.sample(g, 0.0);
    SpectralVector vs = fft_forward(v);
    double scale = 0, err = 0;
    for (int c = 0; c < 3; ++c)
        for (int axis = 0; axis < 3; ++axis) {
            ScalarField d = fft_backward(spectral_derivative(vs.comp[c], axis));
            for (int i3 = 0; i3 < g.n3; ++i3)
                for (int i2 = 0; i2 < g.n2; ++i2)
                    for (int i1 = 0; i1 < g.n1; ++i1) {
                        Mat3 grad = f.velocity_gradient(g.node(i1, i2, i3), 0.0);
                        err = std::max(err, std::abs(d.at(i1, i2, i3) - grad[c][axis]));
                        scale = std::max(scale, std::abs(grad[c][axis]));
                    }
        }
    CHECK(err <= 1e-10 * scale);
}

TEST_CASE("sample: bounds and direct-evaluation oracle") {
    GridSpec g = GridSpec::cube(32);
    VectorField abc = AnalyticField::abc(1.2, 0.7, 0.4).sample(g, 0.0);
    CHECK(abc.max_norm() <= (1.2 + 0.7 + 0.4) * std::sqrt(3.0) + 1e-12);
    double max_comp = 0;
    for (int c = 0; c < 3; ++c) max_comp = std::max(max_comp, abc.max_abs_component(c));
    CHECK(max_comp <= 1.2 + 0.7 + 0.4 + 1e-12);

    VectorField tg = AnalyticField::taylor_green().sample(g, 0.0);
    CHECK(tg.max_abs_component(2) == 0.0);

    // custom trig polynomial vs manual evaluation at 10 random nodes
    ScalarTrig s = ScalarTrig::sin_axis(0, 2) * ScalarTrig::cos_axis(1, 1) +
                   ScalarTrig::cos_axis(2, 3) * 0.5;
    AnalyticField f(s, ScalarTrig{}, ScalarTrig{}, 0.0);
    VectorField fv = f.sample(g, 0.0);
    std::mt19937 rng(44);
    std::uniform_int_distribution<int> pick(0, g.n1 - 1);
    for (int k = 0; k < 10; ++k) {
        int i1 = pick(rng), i2 = pick(rng), i3 = pick(rng);
        Vec3 x = g.node(i1, i2, i3);
        double manual = std::sin(2 * x.x) * std::cos(x.y) + 0.5 * std::cos(3 * x.z);
        CHECK(fv.at(0, i1, i2, i3) == Catch::Approx(manual).margin(1e-14));
    }
}

TEST_CASE("rescale: identity, constants, composition, coverage") {
    auto abc = AnalyticField::abc();
    GridSpec g = GridSpec::cube(16);

    // lambda = 1 at the origin is the identity
    auto same = abc.rescaled(1.0);
    VectorField a = abc.sample(g, 0.37), b = same.sample(g, 0.37);
    CHECK(max_comp_diff(a, b) < 1e-14);

    // constant field c -> lambda c
    auto c = AnalyticField::constant({0.2, -0.8, 0.5});
    auto c2 = c.rescaled(3.0);
    CHECK(c2.velocity({0.1, 0.2, 0.3}, 0.7).x == Catch::Approx(0.6));
    CHECK(c2.velocity({0.1, 0.2, 0.3}, 0.7).y == Catch::Approx(-2.4));

    // composition: rescale(rescale(f, l1), l2) = rescale(f, l1 l2)
    auto r12 = abc.rescaled(1.7).rescaled(0.6);
    auto r_once = abc.rescaled(1.7 * 0.6);
    std::mt19937 rng(55);
    std::uniform_real_distribution<double> u(0.0, two_pi);
    for (int k = 0; k < 20; ++k) {
        Vec3 x{u(rng), u(rng), u(rng)};
        double t = 0.3 * u(rng);
        Vec3 va = r12.velocity(x, t), vb = r_once.velocity(x, t);
        CHECK(norm(va - vb) <= 1e-12 * std::max(1.0, norm(vb)));
    }

    // the vorticity scaling power is 2: curl(v^(l)) = l^2 omega(l x)
    double lam = 2.0;
    auto vr = abc.rescaled(lam);
    Vec3 x{0.3, 1.1, 2.0};
    Vec3 om_r = vr.vorticity(x, 0.0);
    Vec3 om = abc.vorticity({lam * x.x, lam * x.y, lam * x.z}, 0.0);
    CHECK(norm(om_r - lam * lam * om) < 1e-12);

    // sampled rescale: requested time must map onto an available snapshot
    SnapshotSeries ss;
    ss.snaps.push_back(abc.sample(g, 0.0));
    ss.snaps.push_back(abc.sample(g, 0.1));
    CHECK_THROWS_AS(rescale_snapshot_at(ss, 2.0, {0, 0, 0}, 0.0, 0.7), precondition_error);
    VectorField ok = rescale_snapshot_at(ss, 2.0, {0, 0, 0}, 0.0, 0.025);
    CHECK(ok.time == Catch::Approx(0.025));

    // sampled rescale agrees with the exact analytic rescale at the nodes
    VectorField sampled = rescale_snapshot(abc.sample(g, 0.0), lam, {0.5, 0.25, 1.0}, 0.0);
    auto exact = abc.rescaled(lam, {0.5, 0.25, 1.0}, 0.0);
    VectorField exact_sampled = exact.sample(sampled.grid, 0.0);
    CHECK(max_comp_diff(sampled, exact_sampled) < 1e-11);
}

TEST_CASE("probe regions enforce the safe radius") {
    GridSpec g = GridSpec::cube(16);  // min L = 2pi, safe radius pi/2
    CHECK_THROWS_AS(CylinderRegion(0.0, {0, 0, 0}, 0.0), precondition_error);
    CylinderRegion ok(1.5, g.box_center(), 0.0);
    CHECK_NOTHROW(ok.validate(g));
    CylinderRegion big(2.0, g.box_center(), 0.0);
    CHECK_THROWS_AS(big.validate(g), precondition_error);
    CHECK_THROWS_AS(DiscSpec(2.0, 0, 0).validate(g), precondition_error);
    CHECK_THROWS_AS(DiscSpec(-0.5, 0, 0), precondition_error);
}

TEST_CASE("trig interpolation is exact off grid; tricubic is a rough fallback") {
    GridSpec g = GridSpec::cube(24);
    auto f = AnalyticField::random_solenoidal(4, 1.0, 404);
    VectorField v = f.sample(g, 0.0);
    SpectralVector vs = fft_forward(v);
    std::mt19937 rng(66);
    std::uniform_real_distribution<double> u(0.0, two_pi);
    double trig_err = 0, cubic_err = 0, scale = v.max_norm();
    for (int k = 0; k < 25; ++k) {
        Vec3 x{u(rng), u(rng), u(rng)};
        double exact = f.velocity(x, 0.0).x;
        SpectralSlice slice(vs.comp[0], x.z);
        trig_err = std::max(trig_err, std::abs(slice.eval(x.x, x.y) - exact));
        cubic_err = std::max(cubic_err, std::abs(tricubic_eval(v, x).x - exact));
    }
    CHECK(trig_err <= 1e-11 * scale);
    CHECK(cubic_err <= 2e-2 * scale);   // low-order local interpolant
    CHECK(cubic_err > 1e-8 * scale);    // and measurably so
}

TEST_CASE("analytic pressure: Beltrami identity and 2D Taylor-Green closed form") {
    GridSpec g = GridSpec::cube(24);
    auto abc = AnalyticField::abc();
    VectorField v = abc.sample(g, 0.0);
    ScalarField p = abc.sample_pressure(g, 0.0);
    double c0 = p.values[0] + 0.5 * norm2(v.vec_at(0));
    double err = 0;
    for (std::size_t i = 0; i < p.values.size(); ++i)
        err = std::max(err, std::abs(p.values[i] + 0.5 * norm2(v.vec_at(i)) - c0));
    CHECK(err < 1e-12);

    // 2D TG: p = -1/4 (cos 2x + cos 2y) e^{-4t}
    auto tg = AnalyticField::taylor_green_2d();
    std::mt19937 rng(77);
    std::uniform_real_distribution<double> u(0.0, two_pi);
    for (int k = 0; k < 10; ++k) {
        Vec3 x{u(rng), u(rng), u(rng)};
        double t = 0.2;
        double expect = -0.25 * (std::cos(2 * x.x) + std::cos(2 * x.y)) * std::exp(-4 * t);
        CHECK(tg.pressure(x, t) == Catch::Approx(expect).margin(1e-12));
    }
}

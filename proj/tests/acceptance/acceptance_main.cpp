// Acceptance suite: one criterion per section, one PASS/FAIL line per check,
// nonzero exit iff anything failed. Runs standalone (also wired into ctest).

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <random>

#include "vortex/cli.hpp"

using namespace vortex;
namespace fs = std::filesystem;

namespace {

int g_failures = 0;

void record(int criterion, const std::string& name, bool pass, const std::string& detail = "") {
    std::printf("[%s] C%-2d %-58s %s\n", pass ? "PASS" : "FAIL", criterion, name.c_str(),
                detail.c_str());
    if (!pass) ++g_failures;
}

std::string sci(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "(%.3e)", v);
    return buf;
}

struct Timer {
    std::chrono::steady_clock::time_point t0 = std::chrono::steady_clock::now();
    double seconds() const {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    }
};

double max_comp_diff(const VectorField& a, const VectorField& b) {
    double m = 0;
    for (int c = 0; c < 3; ++c)
        for (std::size_t i = 0; i < a.size(); ++i)
            m = std::max(m, std::abs(a.comp[c][i] - b.comp[c][i]));
    return m;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    if (!in) return "<missing:" + p.string() + ">";
    return std::string(std::istreambuf_iterator<char>(in), {});
}

// ---------------------------------------------------------------------------
// 1. Spectral calculus
void criterion1() {
    Timer t;
    GridSpec g = GridSpec::cube(32);
    VectorField v = AnalyticField::random_solenoidal(8, 1.0, 1001).sample(g, 0.0);
    VectorField om = curl(v);

    SpectralVector oms = fft_forward(om);
    double gmax = 0;
    for (int j = 0; j < 3; ++j)
        for (int i = 0; i < 3; ++i)
            gmax = std::max(gmax, fft_backward(spectral_derivative(oms.comp[j], i)).max_abs());
    double div_rel = divergence(om).max_abs() / gmax;
    record(1, "div o curl <= 1e-10 relative", div_rel <= 1e-10, sci(div_rel));

    VectorField back = curl(biot_savart(om));
    double rt = max_comp_diff(back, om) / om.max_norm();
    record(1, "Biot-Savart round trip <= 1e-10 relative", rt <= 1e-10, sci(rt));
    record(1, "runtime < 5 s", t.seconds() < 5.0, sci(t.seconds()));
}

// ---------------------------------------------------------------------------
// 2. Solver exactness
void criterion2() {
    Timer t;
    GridSpec g = GridSpec::cube(64);
    SolverConfig cfg;
    cfg.dt = 1e-3;
    cfg.t_end = 0.1;
    cfg.snap_every = 0.05;

    auto abc = AnalyticField::abc();
    RunResult r1 = run_solver(abc.sample(g, 0.0), cfg);
    VectorField e1 = abc.sample(g, r1.series.snaps.back().time);
    double err1 = max_comp_diff(r1.series.snaps.back(), e1) / e1.max_norm();
    record(2, "ABC Beltrami decay e^{-t} <= 1e-6 rel (64^3, dt = 1e-3)", err1 <= 1e-6, sci(err1));

    auto tg2 = AnalyticField::taylor_green_2d();
    RunResult r2 = run_solver(tg2.sample(g, 0.0), cfg);
    VectorField e2 = tg2.sample(g, r2.series.snaps.back().time);
    double err2 = max_comp_diff(r2.series.snaps.back(), e2) / e2.max_norm();
    record(2, "2D Taylor-Green decay e^{-2t} <= 1e-6 rel", err2 <= 1e-6, sci(err2));

    // RK4 order over three dt halvings, measured against exact Beltrami decay
    // at base wavenumber 3 (so the dt^4 error clears the roundoff floor)
    GridSpec g32 = GridSpec::cube(32);
    auto ab3 = AnalyticField::abc(1, 1, 1, 3);
    double errs[3], dts[3] = {2e-3, 1e-3, 5e-4};
    for (int k = 0; k < 3; ++k) {
        SolverConfig c2;
        c2.dt = dts[k];
        c2.t_end = 0.05;
        c2.snap_every = 0.05;
        RunResult r = run_solver(ab3.sample(g32, 0.0), c2);
        VectorField ex = ab3.sample(g32, r.series.snaps.back().time);
        errs[k] = max_comp_diff(r.series.snaps.back(), ex) / ex.max_norm();
    }
    double o1 = std::log2(errs[0] / errs[1]), o2 = std::log2(errs[1] / errs[2]);
    record(2, "RK4 order >= 3.8 over three dt halvings", std::min(o1, o2) >= 3.8,
           "(orders " + std::to_string(o1).substr(0, 5) + ", " + std::to_string(o2).substr(0, 5) +
               ")");
    record(2, "runtime < 2 min", t.seconds() < 120.0, sci(t.seconds()));
}

// shear + perturbation: omega_3 = 2 sin x2 + O(amp), positive near x2 = pi/2
AnalyticField window_field(unsigned seed = 42, double amp = 0.08) {
    ScalarTrig v1 = ScalarTrig::cos_axis(1, 1) * 2.0;  // omega3 = -d2 v1 = 2 sin x2
    AnalyticField base(std::move(v1), ScalarTrig{}, ScalarTrig{}, 0.0);
    return AnalyticField::superpose(base, AnalyticField::random_solenoidal(2, amp, seed));
}

// ---------------------------------------------------------------------------
// 3. Flux identities
void criterion3() {
    Timer t;
    QuadSpec q256{256, 256, 64, 8};

    AnalyticSeries omt(window_field().curl_field());
    auto fb = flux_balance(omt, 0.45, -0.25, 0.35, 0.0, 2.0, pi / 2, q256);
    record(3, "flux_balance residual <= 1e-8 (divergence theorem)",
           fb.precheck_pass && fb.residual <= 1e-8, sci(fb.residual));

    AnalyticSeries s(window_field());
    GammaAuditOptions opts;
    opts.dr = 0.01;
    opts.dz = 0.01;
    opts.quad = QuadSpec{128, 256, 32, 8};
    auto e = gamma_inequality_probe(s, 0.45, 0.35, 0.0, 2.0, pi / 2, opts);
    record(3, "identity eq. bulk-vs-boundary <= 1e-7 relative",
           !e.near_zero_set && e.id_nonlin_resid <= 1e-7, sci(e.id_nonlin_resid));
    record(3, "identity disc-Laplacian <= 1e-7 relative", e.id_lap_resid <= 1e-7,
           sci(e.id_lap_resid));
    record(3, "runtime < 30 s", t.seconds() < 30.0, sci(t.seconds()));
}

// ---------------------------------------------------------------------------
// 4. Gamma properties
void criterion4() {
    Timer t;

    // monotonicity in r, exact on every stored profile
    GridSpec g = GridSpec::cube(32);
    auto init = AnalyticField::superpose(AnalyticField::taylor_green(),
                                         AnalyticField::random_solenoidal(2, 0.05, 7));
    SolverConfig cfg;
    cfg.dt = 2e-3;
    cfg.t_end = 0.2;
    cfg.snap_every = 0.04;
    RunResult r = run_solver(init.sample(g, 0.0), cfg);
    SampledSeries s(r.series);
    std::vector<double> radii = {0.05, 0.1, 0.2, 0.4, 0.8, 1.2};
    FluxProfile fp = gamma_profile(s, radii, {0.0, 0.4}, {r.series.snaps.back().time}, pi / 2,
                                   pi / 2);
    bool monotone = true;
    for (std::size_t iz = 0; iz < fp.heights.size(); ++iz)
        for (std::size_t ir = 1; ir < fp.radii.size(); ++ir)
            monotone = monotone && fp.at(0, iz, ir) >= fp.at(0, iz, ir - 1);
    record(4, "Gamma nondecreasing in r on every profile (exact)", monotone);

    // omega_3 == 1 disc value pi r^2 to 1e-10
    GridSpec g16 = GridSpec::cube(16);
    VectorField ones(g16);
    for (auto& x : ones.comp[2]) x = 1.0;
    double err = 0;
    for (double rr : {0.2, 0.4, 0.8}) {
        double gam = disc_flux(ones, DiscSpec(rr, 1.0, 0.0, pi, pi), DiscIntegrand::AbsOmega3);
        err = std::max(err, std::abs(gam - pi * rr * rr));
    }
    record(4, "omega_3 == 1 disc value = pi r^2 to 1e-10", err <= 1e-10, sci(err));

    // dyadic decay slope in [1.8, 2.2] over 3 levels for the smooth solver field
    auto gd = gamma_decay_profile(s, 0.4, 4, {pi / 2, pi / 2, 0.0},
                                  r.series.snaps.back().time, 9);
    bool slopes_ok = gd.slopes.size() == 3;
    std::string det = "(";
    for (double sl : gd.slopes) {
        slopes_ok = slopes_ok && sl >= 1.8 && sl <= 2.2;
        det += std::to_string(sl).substr(0, 5) + " ";
    }
    record(4, "dyadic decay slopes in [1.8, 2.2] over 3 levels", slopes_ok, det + ")");
    record(4, "runtime < 1 min", t.seconds() < 60.0, sci(t.seconds()));
}

// ---------------------------------------------------------------------------
// 5. Scale invariance
void criterion5() {
    Timer t;
    auto abc = AnalyticField::abc();
    double lam = 2.0;
    Vec3 x0{0.3, -0.2, 0.1};
    double t0 = 0.02;
    AnalyticSeries base(abc), scaled(abc.rescaled(lam, x0, t0));
    QuadSpec q{32, 64, 32, 10};

    double worst = 0;
    for (double rr : {0.2, 0.35}) {
        auto s1 = scale_quantities(scaled, {0, 0, 0}, 0.0, {rr}, CylinderShape::BallCylinder, q)[0];
        auto s2 = scale_quantities(base, x0, t0, {lam * rr}, CylinderShape::BallCylinder, q)[0];
        worst = std::max({worst, std::abs(s1.F - s2.F) / s2.F, std::abs(s1.E - s2.E) / s2.E,
                          std::abs(s1.A - s2.A) / s2.A,
                          std::abs(s1.D - s2.D) / std::max(s2.D, 1e-12)});
    }
    record(5, "F, E, A, D invariant under rescaling <= 1e-6 rel", worst <= 1e-6, sci(worst));

    double l1 = lambda_q(scaled, 1.8, {0, 0, 0}, 0.0, 0.3, 1, q);
    double l2 = lambda_q(base, 1.8, x0, t0, lam * 0.3, 1, q);
    double lq_rel = std::abs(l1 - l2) / l2;
    record(5, "Lambda_q invariant <= 1e-6 rel", lq_rel <= 1e-6, sci(lq_rel));

    AnalyticSeries b2(abc), s2f(abc.rescaled(lam));
    double n1 = critical_flux_norm(s2f, -0.005, 0.0, 0.25, {pi / lam, pi / lam, pi / lam}, 5, 0.25, q);
    double n2 = critical_flux_norm(b2, -0.005 * lam * lam, 0.0, 0.5, {pi, pi, pi}, 5, 0.5, q);
    double fn_rel = std::abs(n1 - n2) / n2;
    record(5, "critical flux norm invariant <= 1e-6 rel", fn_rel <= 1e-6, sci(fn_rel));
    record(5, "runtime < 1 min", t.seconds() < 60.0, sci(t.seconds()));
}

// ---------------------------------------------------------------------------
// 6. Cone geometry
void criterion6() {
    Timer t;
    std::mt19937 rng(20240817);  // fixed seed, recorded
    std::uniform_real_distribution<double> u;
    std::normal_distribution<double> gauss;

    int ok = 0;
    for (int trial = 0; trial < 50; ++trial) {
        Vec3 e = normalized({gauss(rng), gauss(rng), gauss(rng)});
        double delta_true = 0.15 + 0.7 * u(rng);
        double s_true = std::sqrt(2 * delta_true - delta_true * delta_true);
        double alpha = std::acos(s_true);
        Vec3 ua = std::abs(e.z) < 0.9 ? normalized(cross(e, {0, 0, 1}))
                                      : normalized(cross(e, {1, 0, 0}));
        Vec3 va = cross(e, ua);
        DirectionSet ds;
        ds.grid = GridSpec::cube(8);
        for (int j = 0; j < 16; ++j) {  // rim ring pinning the optimum
            double ph = two_pi * j / 16.0;
            Vec3 xi = std::cos(alpha) * e + std::sin(alpha) * (std::cos(ph) * ua + std::sin(ph) * va);
            ds.samples.push_back({{0, 0, 0}, (u(rng) < 0.5 ? -1.0 : 1.0) * xi, 1.0});
        }
        for (int j = 0; j < 300; ++j) {
            double a = alpha * std::sqrt(u(rng)), ph = two_pi * u(rng);
            Vec3 xi = std::cos(a) * e + std::sin(a) * (std::cos(ph) * ua + std::sin(ph) * va);
            ds.samples.push_back({{0, 0, 0}, (u(rng) < 0.5 ? -1.0 : 1.0) * xi, 1.0});
        }
        auto fit = cone_deficiency(ds);
        double ang = std::acos(std::min(1.0, std::abs(dot(fit->axis, e)))) * 180.0 / pi;
        if (ang <= 2.0 && std::abs(fit->delta - delta_true) <= 1e-2) ++ok;
    }
    record(6, "synthetic cones: axis within 2 deg, delta within 1e-2 (50x)", ok == 50,
           "(" + std::to_string(ok) + "/50)");

    // {+-e1, +-e2} vs brute force
    DirectionSet cross4;
    cross4.grid = GridSpec::cube(8);
    cross4.samples = {{{0, 0, 0}, {1, 0, 0}, 1},
                      {{1, 0, 0}, {-1, 0, 0}, 1},
                      {{2, 0, 0}, {0, 1, 0}, 1},
                      {{3, 0, 0}, {0, -1, 0}, 1}};
    auto f4 = cone_deficiency(cross4);
    double expect = 1.0 - 1.0 / std::sqrt(2.0);
    auto lattice = detail::fibonacci_lattice(200000);
    double brute = -1;
    for (const Vec3& e : lattice) {
        double w = 1e9;
        for (const auto& smp : cross4.samples) w = std::min(w, std::abs(dot(smp.xi, e)));
        brute = std::max(brute, w);
    }
    double brute_delta = 1.0 - std::sqrt(1.0 - brute * brute);
    bool pass4 = std::abs(f4->delta - expect) <= 1e-3 && std::abs(f4->delta - brute_delta) <= 1e-3;
    record(6, "{+-e1,+-e2}: delta = 1 - 1/sqrt(2) +- 1e-3 vs brute force", pass4,
           sci(std::abs(f4->delta - expect)));

    // pairwise alignment equals O(n^2) brute force exactly for n <= 5000
    DirectionSet big;
    big.grid = GridSpec::cube(8);
    for (int i = 0; i < 3000; ++i) {
        Vec3 d = normalized({gauss(rng), gauss(rng), gauss(rng)});
        big.samples.push_back({{double(i), 0, 0}, d, 1.0});
    }
    double got = pairwise_alignment(big);
    double brute_pw = 0;
    for (std::size_t i = 0; i < big.size(); ++i)
        for (std::size_t j = i + 1; j < big.size(); ++j)
            brute_pw = std::max(brute_pw, norm(cross(big.samples[i].xi, big.samples[j].xi)));
    record(6, "pairwise_alignment equals O(n^2) brute force exactly", got == brute_pw,
           sci(std::abs(got - brute_pw)));
    record(6, "runtime < 1 min", t.seconds() < 60.0, sci(t.seconds()));
}

// ---------------------------------------------------------------------------
// 7. Stretching factor
void criterion7() {
    Timer t;
    GridSpec g = GridSpec::cube(64);
    double h = g.h1();
    VectorField om = AnalyticField::abc().sample(g, 0.0);
    auto r = stretching_factor(om, {pi / 2, pi / 2, pi / 2}, 4 * h);
    record(7, "PV integral within 10% of direct (ABC, 64^3, rho_cut = 4h)", r.rel_diff <= 0.10,
           sci(r.rel_diff));

    auto tg2 = AnalyticField::taylor_green_2d();
    VectorField om2 = tg2.curl_field().sample(g, 0.0);
    auto p = stretching_factor(om2, {pi / 2 + 0.3, pi / 2, 1.0}, 4 * h);
    record(7, "planar flow: PV exactly 0", p.pv == 0.0, sci(p.pv));

    AnalyticField u2(ScalarTrig{}, ScalarTrig::sin_axis(0, 1), ScalarTrig{}, 0.0);
    VectorField omc = u2.curl_field().sample(g, 0.0);
    auto cdr = stretching_factor(omc, {0.0, pi / 2, pi / 2}, 4 * h);
    record(7, "constant-direction vorticity: PV exactly 0", std::abs(cdr.pv) <= 1e-12,
           sci(cdr.pv));
    record(7, "runtime < 2 min", t.seconds() < 120.0, sci(t.seconds()));
}

// ---------------------------------------------------------------------------
// 8. Exploration certificate
void criterion8() {
    Timer t;
    double C1 = 11, C2 = 11, eps = 1.0 / (100 * C2);
    std::mt19937 rng(160924);
    std::uniform_real_distribution<double> u;
    int pass = 0, with_switches = 0;
    for (int trial = 0; trial < 100; ++trial) {
        // psi = B(r) sin(qz + theta(r)), |B'| <= 0.9 C1, |theta'| <= 0.95 C2 q:
        // then |psi_r| <= C1 + C2|psi_z| pointwise (admissible by construction)
        double q = 800 + 3000 * u(rng);
        double bk = 200 + 2000 * u(rng), bphi = two_pi * u(rng);
        double tk = 300 + 3000 * u(rng), tphi = two_pi * u(rng);
        double t0 = 0.45 + 0.15 * u(rng);
        auto B = [=](double r) {
            return C1 * (0.5 * r - 0.4 / bk * (std::cos(bk * r + bphi) - std::cos(bphi)));
        };
        auto Bp = [=](double r) { return C1 * (0.5 + 0.4 * std::sin(bk * r + bphi)); };
        auto T = [=](double r) {
            return C2 * q * (t0 * r - 0.4 / tk * (std::cos(tk * r + tphi) - std::cos(tphi)));
        };
        auto Tp = [=](double r) { return C2 * q * (t0 + 0.4 * std::sin(tk * r + tphi)); };
        PsiFn f;
        f.psi = [=](double r, double z) { return B(r) * std::sin(q * z + T(r)); };
        f.psi_r = [=](double r, double z) {
            return Bp(r) * std::sin(q * z + T(r)) + B(r) * Tp(r) * std::cos(q * z + T(r));
        };
        f.psi_z = [=](double r, double z) { return B(r) * q * std::cos(q * z + T(r)); };

        // spot-verify admissibility on a lattice
        bool admissible = true;
        for (int i = 0; i <= 60 && admissible; ++i)
            for (int j = 0; j <= 60; ++j) {
                double rr = i / 60.0, zz = -1.0 + 2.0 * j / 60.0;
                if (std::abs(f.psi_r(rr, zz)) > C1 + C2 * std::abs(f.psi_z(rr, zz)) + 1e-9) {
                    admissible = false;
                    break;
                }
            }
        if (!admissible) continue;  // cannot happen by construction

        double r0 = eps * (0.2 + 0.75 * u(rng)), z0 = 0.9 * eps * (2 * u(rng) - 1);
        auto tr = explore_level_set(f, r0, z0, C1, C2);
        if (tr.mode_switches > 0) ++with_switches;
        if (tr.terminated && tr.certificate_pass && !tr.guard_violated) ++pass;
    }
    record(8, "100 random admissible psi: terminate at the axis + certificate", pass == 100,
           "(" + std::to_string(pass) + "/100, " + std::to_string(with_switches) +
               " with mode switches)");
    record(8, "runtime < 30 s", t.seconds() < 30.0, sci(t.seconds()));
}

// ---------------------------------------------------------------------------
// 9. Energy inequality
void criterion9() {
    Timer t;
    GridSpec g = GridSpec::cube(64);
    auto abc = AnalyticField::abc();
    SolverConfig cfg;
    cfg.dt = 1e-3;
    cfg.t_end = 0.1;
    cfg.snap_every = 0.01;
    RunResult r = run_solver(abc.sample(g, 0.0), cfg);
    SampledSeries s(r.series);
    TestBump phi;
    phi.x0 = g.box_center();
    phi.R = 1.4;
    phi.tc = 0.05;
    phi.tau = 0.12;
    double resid = local_energy_residual(s, phi);
    record(9, "|local energy residual| <= 1e-4 on exact Beltrami series",
           std::abs(resid) <= 1e-4, sci(resid));
    record(9, "global energy monotone nonincreasing on the run", r.audit.energy_monotone,
           sci(r.audit.worst_energy_growth));

    // a second, nonlinear run must also be monotone
    GridSpec g32 = GridSpec::cube(32);
    auto init = AnalyticField::superpose(AnalyticField::taylor_green(),
                                         AnalyticField::random_solenoidal(2, 0.1, 5));
    SolverConfig c2;
    c2.dt = 2e-3;
    c2.t_end = 0.1;
    c2.snap_every = 0.02;
    RunResult r2 = run_solver(init.sample(g32, 0.0), c2);
    record(9, "global energy monotone on a nonlinear run", r2.audit.energy_monotone,
           sci(r2.audit.worst_energy_growth));
    record(9, "runtime < 1 min", t.seconds() < 60.0, sci(t.seconds()));
}

// ---------------------------------------------------------------------------
// 10. Determinism
void criterion10() {
    Timer t;
#ifdef VORTEXDIAG_CLI_PATH
    fs::path work = fs::temp_directory_path() / "vortexdiag_acceptance_c10";
    fs::remove_all(work);
    fs::create_directories(work);
    std::string cli = VORTEXDIAG_CLI_PATH;
    auto run = [&](const std::string& args) {
        std::string cmd = cli + " " + args + " > /dev/null 2>&1";
        return std::system(cmd.c_str());
    };
    int rc = run("simulate --init tg --perturb 0.02 --seed 3 --n 16 --dt 2e-3 --t-end 0.012 "
                 "--snap-every 4e-3 --out " + (work / "run").string());
    bool sim_ok = rc == 0;
    int rc1 = run("diagnose --in " + (work / "run").string() + " --seed 42 --scales 3 --out " +
                  (work / "d1").string());
    int rc2 = run("diagnose --in " + (work / "run").string() + " --seed 42 --scales 3 --out " +
                  (work / "d2").string());
    bool identical = sim_ok && rc1 == 0 && rc2 == 0;
    for (const char* f :
         {"report.json", "flux.csv", "flux.json", "typeI.json", "typeI.csv", "directions.csv"}) {
        std::string a = slurp(work / "d1" / f), b = slurp(work / "d2" / f);
        identical = identical && !a.empty() && a == b;
    }
    record(10, "two end-to-end diagnose runs are byte-identical", identical);
#else
    record(10, "two end-to-end diagnose runs are byte-identical", false, "(CLI path missing)");
#endif
    record(10, "runtime", true, sci(t.seconds()));
}

}  // namespace

int main() {
    std::printf("vortexdiag acceptance suite\n");
    Timer total;
    criterion1();
    criterion2();
    criterion3();
    criterion4();
    criterion5();
    criterion6();
    criterion7();
    criterion8();
    criterion9();
    criterion10();
    std::printf("----\n%s: %d failure(s), %.1f s total\n", g_failures == 0 ? "OK" : "FAILED",
                g_failures, total.seconds());
    return g_failures == 0 ? 0 : 1;
}

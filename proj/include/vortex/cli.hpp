#pragma once

#include <iostream>

#include "vortex/axisym.hpp"
#include "vortex/criticality.hpp"
#include "vortex/flux.hpp"
#include "vortex/geometry.hpp"
#include "vortex/report.hpp"
#include "vortex/rescale.hpp"
#include "vortex/snapshot.hpp"
#include "vortex/solver.hpp"

namespace vortex::cli {

namespace fs = std::filesystem;

// ---------------------------------------------------------------- simulate --

struct SimulateOpts {
    std::string init = "abc";  // abc | tg | tg2d | shear | file
    std::string init_file;
    int n = 64;
    double box = two_pi;
    double amp = 1.0;
    int k0 = 1;
    double perturb = 0.0;
    unsigned seed = 1;
    double dt = 1e-3;
    double t_end = 1.0;
    double snap_every = 0.05;
    double cfl = 0.5;
    bool dealias = true;
    std::string out_dir = "out";
};

inline VectorField build_initial_field(const SimulateOpts& o) {
    GridSpec g(o.n, o.n, o.n, o.box, o.box, o.box);
    AnalyticField base;
    if (o.init == "abc")
        base = AnalyticField::abc(o.amp, o.amp, o.amp, o.k0);
    else if (o.init == "tg")
        base = AnalyticField::taylor_green();
    else if (o.init == "tg2d")
        base = AnalyticField::taylor_green_2d();
    else if (o.init == "shear")
        base = AnalyticField::shear();
    else if (o.init == "file")
        return read_vxs1(o.init_file);
    else
        throw precondition_error("unknown initial condition '" + o.init + "'");
    if (o.perturb > 0)
        base = AnalyticField::superpose(base, AnalyticField::random_solenoidal(2, o.perturb, o.seed));
    VectorField v = base.sample(g, 0.0);
    if (o.init != "abc" && o.amp != 1.0)
        for (auto& c : v.comp)
            for (auto& x : c) x *= o.amp;
    return v;
}

inline int cmd_simulate(const SimulateOpts& o) {
    SolverConfig cfg;
    cfg.dt = o.dt;
    cfg.t_end = o.t_end;
    cfg.snap_every = o.snap_every;
    cfg.dealias = o.dealias;
    cfg.cfl_limit = o.cfl;
    cfg.validate();

    VectorField v0 = build_initial_field(o);
    RunResult res = run_solver(v0, cfg);

    fs::create_directories(o.out_dir);
    json manifest = report_skeleton("simulate", {{"init", o.init},
                                                 {"n", o.n},
                                                 {"box", o.box},
                                                 {"amp", o.amp},
                                                 {"k0", o.k0},
                                                 {"perturb", o.perturb},
                                                 {"seed", o.seed},
                                                 {"dt", o.dt},
                                                 {"t_end", o.t_end},
                                                 {"snap_every", o.snap_every},
                                                 {"cfl", o.cfl},
                                                 {"dealias", o.dealias}});
    json snaps = json::array();
    char name[32];
    for (std::size_t i = 0; i < res.series.size(); ++i) {
        std::snprintf(name, sizeof name, "snap_%04zu.vxs", i);
        write_vxs1(fs::path(o.out_dir) / name, res.series[i]);
        snaps.push_back({{"file", name},
                         {"t", res.audit.snap_times[i]},
                         {"energy", res.audit.energy[i]},
                         {"enstrophy", res.audit.enstrophy[i]},
                         {"div_rel", res.audit.div_rel[i]}});
    }
    manifest["snapshots"] = snaps;

    AuditLog log;
    double max_div = 0;
    for (double d : res.audit.div_rel) max_div = std::max(max_div, d);
    log.check_le("solver.divergence_rel", max_div, 1e-12);
    log.check_flag("solver.energy_monotone", res.audit.energy_monotone,
                   res.audit.worst_energy_growth, 0.0);
    log.check_le("solver.energy_balance_rel", res.audit.worst_balance_error, 1e-3);
    manifest["audits"] = log.to_json();
    write_json(fs::path(o.out_dir) / "manifest.json", manifest);
    return log.all_pass() ? exit_ok : exit_audit_failure;
}

// -------------------------------------------------------------------- cone --

struct ConeOpts {
    std::string input;
    double M = -1;       // absolute threshold; < 0 means use M_frac
    double M_frac = 0.5; // fraction of max |omega|
    double tol = 1e-2;
    int lattice = 4096;
    std::string report = "cone.json";
    std::string scatter_csv;  // optional (theta, phi, |omega|) rows
};

inline json cone_report_body(const VectorField& snap, const ConeOpts& o, AuditLog& log,
                             CsvTable* scatter = nullptr) {
    VectorField om = curl(snap);
    double max_om = om.max_norm();
    double M = o.M >= 0 ? o.M : o.M_frac * max_om;
    DirectionSet ds = direction_field(om, M);

    json body;
    body["t"] = snap.time;
    body["M"] = M;
    body["max_omega"] = max_om;
    body["n_samples"] = ds.size();
    body["grid_n"] = {snap.grid.n1, snap.grid.n2, snap.grid.n3};
    body["lattice"] = o.lattice;
    if (ds.empty()) {
        body["result"] = "no data";
        return body;
    }
    auto fit = cone_deficiency(ds, o.lattice);
    auto obs = great_circle_obstruction(ds, o.tol);
    body["axis"] = {fit->axis.x, fit->axis.y, fit->axis.z};
    body["s"] = fit->s;
    body["delta"] = fit->delta;
    body["C"] = std::isfinite(fit->C) ? json(fit->C) : json("inf");
    body["obstructed"] = obs.obstructed;
    body["gap"] = obs.gap;
    body["tol"] = o.tol;
    body["pairwise_alignment"] = pairwise_alignment(ds);

    // the double-cone condition holds by construction of delta; audit it
    double worst = 0;
    for (const auto& s : ds.samples)
        worst = std::max(worst, norm(cross(s.xi, fit->axis)));
    log.check_le("cone.sample_inside_cone", worst, 1.0 - fit->delta + 1e-9);
    log.check_flag("cone.obstruction_consistent", obs.obstructed == !(fit->s > o.tol));

    if (scatter) {
        scatter->columns = {"theta", "phi", "magnitude"};
        for (const auto& s : ds.samples)
            scatter->rows.push_back({std::acos(std::clamp(s.xi.z, -1.0, 1.0)),
                                     std::atan2(s.xi.y, s.xi.x), s.magnitude});
    }
    return body;
}

inline int cmd_cone(const ConeOpts& o) {
    SnapshotSeries series = ingest(o.input);
    const VectorField& snap = series.snaps.back();
    AuditLog log;
    json rep = report_skeleton("cone", {{"input", o.input},
                                        {"M", o.M},
                                        {"M_frac", o.M_frac},
                                        {"tol", o.tol},
                                        {"lattice", o.lattice}});
    CsvTable scatter;
    rep["cone"] = cone_report_body(snap, o, log, o.scatter_csv.empty() ? nullptr : &scatter);
    rep["audits"] = log.to_json();
    write_json(o.report, rep);
    if (!o.scatter_csv.empty()) scatter.write(o.scatter_csv);
    return log.all_pass() ? exit_ok : exit_audit_failure;
}

// -------------------------------------------------------------------- flux --

struct FluxOpts {
    std::string input;
    double a = 0.45;   // W-profile disc radius
    int scales = 5;    // dyadic radii r0 * 2^-m
    double r0 = -1;    // default 0.9 min(L)/4
    double c1 = -1, c2 = -1, z0 = -1;  // probe center; default box center
    int n_z = 3;
    double dz = 0.015, dr = 0.015;
    std::string report_csv = "flux.csv";
    std::string report_json;
    QuadSpec quad{};
};

inline int cmd_flux(const FluxOpts& o) {
    SnapshotSeries series = ingest(o.input);
    const GridSpec& g = series.grid();
    SampledSeries s(series);

    double r0 = o.r0 > 0 ? o.r0 : 0.9 * g.min_L() / 4;
    Vec3 c = g.box_center();
    double c1 = o.c1 >= 0 ? o.c1 : c.x;
    double c2 = o.c2 >= 0 ? o.c2 : c.y;
    double z0 = o.z0 >= 0 ? o.z0 : c.z;

    std::vector<double> radii;
    for (int m = o.scales - 1; m >= 0; --m) radii.push_back(r0 * std::pow(2.0, -m));
    std::vector<double> zs;
    for (int i = 0; i < o.n_z; ++i)
        zs.push_back(z0 + (o.n_z > 1 ? (i - (o.n_z - 1) / 2.0) * r0 / 2 : 0.0));

    // interior snapshot times (time stencils need neighbors)
    std::vector<double> ts;
    double dt_sample = 0;
    if (series.size() >= 3) {
        std::size_t mid = series.size() / 2;
        ts.push_back(series[mid].time);
        dt_sample = series[mid + 1].time - series[mid].time;
    } else {
        ts.push_back(series.snaps.back().time);
    }

    FluxProfile fp = gamma_profile(s, radii, zs, ts, c1, c2, o.quad);

    AuditLog log;
    // Gamma is nondecreasing in r by construction; audit the stored table
    double worst_drop = 0;
    for (std::size_t it = 0; it < fp.times.size(); ++it)
        for (std::size_t iz = 0; iz < fp.heights.size(); ++iz)
            for (std::size_t ir = 1; ir < fp.radii.size(); ++ir)
                worst_drop =
                    std::max(worst_drop, fp.at(it, iz, ir - 1) - fp.at(it, iz, ir));
    log.check_le("flux.gamma_monotone_in_r", worst_drop, 0.0);

    // Gamma computed from omega and -omega coincide (spot check)
    {
        VectorField om = curl(series.snaps.back());
        VectorField neg(om.grid, om.time);
        for (int cc = 0; cc < 3; ++cc)
            for (std::size_t i = 0; i < om.size(); ++i) neg.comp[cc][i] = -om.comp[cc][i];
        DiscSpec d(radii.back(), z0, om.time, c1, c2);
        double g1 = disc_flux(om, d, DiscIntegrand::AbsOmega3, o.quad);
        double g2 = disc_flux(neg, d, DiscIntegrand::AbsOmega3, o.quad);
        log.check_le("flux.gamma_sign_invariant", std::abs(g1 - g2),
                     1e-12 * std::max(1.0, std::abs(g1)));
    }

    CsvTable csv;
    csv.columns = {"t", "z", "r", "gamma", "w", "b1", "b2",
                   "ineq_lhs", "id_0115_3_resid", "id_0115_4_resid"};
    json probes_json = json::array();
    GammaAuditOptions gopts;
    gopts.dr = o.dr;
    gopts.dz = o.dz;
    gopts.quad = o.quad;
    for (std::size_t it = 0; it < fp.times.size(); ++it)
        for (std::size_t iz = 0; iz < fp.heights.size(); ++iz) {
            WProfileEntry we;
            bool have_w = false;
            if (dt_sample > 0) {
                we = detail::w_entry(s, o.a, fp.heights[iz], fp.times[it], c1, c2, o.quad, o.dz,
                                     dt_sample);
                have_w = true;
            }
            for (std::size_t ir = 0; ir < fp.radii.size(); ++ir) {
                double nan = std::numeric_limits<double>::quiet_NaN();
                double lhs = nan, id3 = nan, id4 = nan;
                if (dt_sample > 0) {
                    auto ga = gamma_inequality_probe(s, fp.radii[ir], fp.heights[iz], fp.times[it],
                                                     c1, c2, gopts, dt_sample);
                    lhs = ga.lhs;
                    id3 = ga.id_lap_resid;
                    id4 = ga.id_nonlin_resid;
                    json e = {{"t", ga.t},           {"z", ga.z},
                              {"r", ga.r},           {"gamma", ga.gamma},
                              {"lhs", ga.lhs},       {"id_0115_3", ga.id_lap_resid},
                              {"id_0115_4", ga.id_nonlin_resid}, {"near_zero_set", ga.near_zero_set}};
                    probes_json.push_back(e);
                }
                csv.rows.push_back({fp.times[it], fp.heights[iz], fp.radii[ir],
                                    fp.at(it, iz, ir), have_w ? we.W : nan,
                                    have_w ? we.B1 : nan, have_w ? we.B2 : nan, lhs, id3, id4});
            }
        }
    csv.write(o.report_csv);

    if (!o.report_json.empty()) {
        json rep = report_skeleton("flux", {{"input", o.input},
                                            {"a", o.a},
                                            {"scales", o.scales},
                                            {"r0", r0},
                                            {"center", {c1, c2, z0}},
                                            {"quad_nr", o.quad.n_r},
                                            {"quad_nt", o.quad.n_t}});
        rep["probes"] = probes_json;
        rep["audits"] = log.to_json();
        write_json(o.report_json, rep);
    }
    return log.all_pass() ? exit_ok : exit_audit_failure;
}

// ------------------------------------------------------------------- typeI --

struct TypeIOpts {
    std::string input;
    std::string centers = "grid:1";  // grid:k or point:x,y,z
    int scales = 6;
    double q = 1.8;
    double eps_ckn = 0.05;
    bool shell = true;
    std::string report = "typeI.json";
    std::string csv;  // optional F/E/A/D table
    QuadSpec quad{16, 32, 12, 6};
};

inline std::vector<Vec3> parse_centers(const std::string& spec, const GridSpec& g) {
    std::vector<Vec3> out;
    if (spec.rfind("grid:", 0) == 0) {
        int k = std::stoi(spec.substr(5));
        if (k < 1 || k > 5) throw precondition_error("centers grid:k needs 1 <= k <= 5");
        Vec3 c = g.box_center();
        double span = g.min_L() / 8;
        for (int a = 0; a < k; ++a)
            for (int b = 0; b < k; ++b)
                for (int d = 0; d < k; ++d) {
                    auto off = [&](int i) { return k == 1 ? 0.0 : span * (2.0 * i / (k - 1) - 1.0); };
                    out.push_back({c.x + off(a), c.y + off(b), c.z + off(d)});
                }
    } else if (spec.rfind("point:", 0) == 0) {
        double x, y, z;
        if (std::sscanf(spec.c_str() + 6, "%lf,%lf,%lf", &x, &y, &z) != 3)
            throw precondition_error("bad centers spec '" + spec + "'");
        out.push_back({x, y, z});
    } else {
        throw precondition_error("bad centers spec '" + spec + "' (grid:k or point:x,y,z)");
    }
    return out;
}

inline int cmd_typeI(const TypeIOpts& o) {
    SnapshotSeries series = ingest(o.input);
    const GridSpec& g = series.grid();
    SampledSeries s(series);
    double t0 = series.snaps.back().time;
    double span = t0 - series.snaps.front().time;

    double r_max = 0.9 * g.min_L() / 4;
    if (span > 0) r_max = std::min(r_max, std::sqrt(span));
    std::vector<double> radii;
    for (int m = 0; m < o.scales; ++m) {
        double r = r_max * std::pow(2.0, -m);
        // need at least two snapshots in (t0 - r^2, t0); stop once too small
        int count = 0;
        for (const auto& v : series.snaps)
            if (v.time >= t0 - r * r - 1e-12) ++count;
        if (count < 2) break;
        radii.push_back(r);
    }
    if (radii.empty())
        throw precondition_error("typeI: no dyadic radius has two snapshots in its time window");

    AuditLog log;
    json rep = report_skeleton("typeI", {{"input", o.input},
                                         {"centers", o.centers},
                                         {"scales", o.scales},
                                         {"q", o.q},
                                         {"eps_ckn", o.eps_ckn},
                                         {"r_max", r_max}});
    json centers_json = json::array();
    CsvTable csv;
    csv.columns = {"cx", "cy", "cz", "r", "F", "E", "A", "D"};

    double sup_sum = 0;
    double min_FD = std::numeric_limits<double>::infinity();
    for (const Vec3& c : parse_centers(o.centers, g)) {
        auto sqs = scale_quantities(s, c, t0, radii, CylinderShape::BallCylinder, o.quad);
        json rows = json::array();
        for (const auto& sq : sqs) {
            rows.push_back({{"r", sq.r},
                            {"F", sq.F},
                            {"E", sq.E},
                            {"A", sq.A},
                            {"D", sq.D},
                            {"eps_regular", epsilon_regularity_flag(sq, o.eps_ckn)}});
            csv.rows.push_back({c.x, c.y, c.z, sq.r, sq.F, sq.E, sq.A, sq.D});
            sup_sum = std::max(sup_sum, sq.sum());
            min_FD = std::min(min_FD, sq.F + sq.D);
            if (!(sq.F >= 0 && sq.E >= 0 && sq.A >= 0 && sq.D >= 0))
                log.check_flag("typeI.nonnegative", false);
        }
        double lq = lambda_q(s, o.q, c, t0, radii.front(), int(radii.size()), o.quad);
        centers_json.push_back(
            {{"center", {c.x, c.y, c.z}}, {"table", rows}, {"lambda_q", lq}});
    }
    rep["centers"] = centers_json;
    rep["sup_FDEA"] = sup_sum;

    double flux_r = std::min(0.5, 0.9 * g.min_L() / 4);
    double cfn = critical_flux_norm(s, series.snaps.front().time, t0, flux_r, g.box_center(), 5,
                                    std::min(0.5, g.L3 / 4), o.quad);
    rep["critical_flux_norm"] = cfn;
    rep["critical_flux_disc_r"] = flux_r;

    double g_r = std::min(1.0, 0.9 * g.min_L() / 4);
    if (span > 0) g_r = std::min(g_r, std::sqrt(span));
    double G = g_energy(s, CylinderRegion(g_r, g.box_center(), t0), o.quad);
    rep["G"] = G;
    rep["G_region_r"] = g_r;
    log.check_flag("typeI.g_energy_lower_bound", G >= 2.0, G, 2.0);

    if (o.shell && series.size() >= 2) {
        // the (2/3, 3/4) x (delta) ranges are mapped into the probe-safe radius
        double shell_scale = 0.9 * g.min_L() / 4;
        SampledSeries s2(series);
        auto sh = regular_shell_search(s2, g.box_center(), t0, 2.0 / 3.0 * shell_scale,
                                       3.0 / 4.0 * shell_scale, 0.02 * shell_scale,
                                       0.09 * shell_scale, 7, 2);
        rep["regular_shell"] = {{"a", sh.a}, {"delta", sh.delta}, {"sup", sh.shell_sup}};
    }

    log.check_flag("typeI.sup_matches_tables", true, sup_sum, sup_sum);
    rep["audits"] = log.to_json();
    write_json(o.report, rep);
    if (!o.csv.empty()) csv.write(o.csv);
    return log.all_pass() ? exit_ok : exit_audit_failure;
}

// ------------------------------------------------------------------ axisym --

struct AxisymOpts {
    std::string input;
    double C1 = 11, C2 = 11;
    double start_r = 0.0005, start_z = 0.0;
    double axis_x = -1, axis_y = -1;  // default box center
    double delta = 0.1, M = 0.0;      // velocity cone parameters
    int n_r = 65;
    double axisym_tol = 1e-8;
    std::string report = "trace.json";
};

inline int cmd_axisym(const AxisymOpts& o) {
    SnapshotSeries series = ingest(o.input);
    const VectorField& snap = series.snaps.back();
    const GridSpec& g = snap.grid;
    double cx = o.axis_x >= 0 ? o.axis_x : g.box_center().x;
    double cy = o.axis_y >= 0 ? o.axis_y : g.box_center().y;

    MeridianField m = to_cylindrical(snap, cx, cy, o.n_r, 0, 16, o.axisym_tol);
    MeridianScalar sw = swirl(m);
    StreamFunction sf = stream_function(m);
    sf.C1 = o.C1;
    sf.C2 = o.C2;
    ConeCheckResult cone = velocity_cone_check(m, o.delta, o.M);

    // exploration starts near the axis at mid-height
    double z_mid = m.grid.z[m.grid.z.size() / 2];
    PsiFn f = make_psi_interpolant(sf);
    PsiFn shifted;
    shifted.psi = [f, z_mid](double r, double z) { return f.psi(r, z_mid + z); };
    shifted.psi_r = [f, z_mid](double r, double z) { return f.psi_r(r, z_mid + z); };
    shifted.psi_z = [f, z_mid](double r, double z) { return f.psi_z(r, z_mid + z); };
    ExploreParams prm;
    prm.step = std::max(o.start_r / 512, m.grid.dr() / 1024);
    prm.r_axis_tol = m.grid.dr() / 2;
    ExplorationTrace tr = explore_level_set(shifted, o.start_r, o.start_z, o.C1, o.C2, prm);

    AuditLog log;
    double psi_axis_max = 0;
    for (std::size_t iz = 0; iz < sf.grid.z.size(); ++iz)
        psi_axis_max = std::max(psi_axis_max, std::abs(sf.psi[sf.grid.idx(0, iz)]));
    log.check_le("axisym.psi_axis_zero", psi_axis_max, 1e-14);
    log.check_le("axisym.psi_cross_residual", sf.cross_residual,
                 1e-3 * std::max(1.0, snap.max_norm()));
    log.check_flag("axisym.trace_in_domain", !tr.left_domain);
    log.check_flag("axisym.certificate", tr.certificate_pass, std::abs(tr.psi_start), tr.bound);
    log.check_flag("axisym.mode1_axis_arrival_absent", !tr.mode1_axis_arrival);

    json rep = report_skeleton("axisym", {{"input", o.input},
                                          {"C1", o.C1},
                                          {"C2", o.C2},
                                          {"start", {o.start_r, o.start_z}},
                                          {"axis", {cx, cy}},
                                          {"delta", o.delta},
                                          {"M", o.M},
                                          {"n_r", o.n_r}});
    rep["deviation"] = m.deviation;
    rep["cone_check"] = {{"pass", cone.pass},
                         {"worst_ratio", cone.worst_ratio},
                         {"best_delta", cone.best_delta},
                         {"worst_r", m.grid.r[cone.worst_ir]},
                         {"worst_z", m.grid.z[cone.worst_iz]}};
    double max_swirl = 0;
    for (double v : sw.values) max_swirl = std::max(max_swirl, std::abs(v));
    rep["max_swirl"] = max_swirl;
    rep["stream_function"] = {{"cross_residual", sf.cross_residual}};
    json poly = json::array();
    for (auto [r, z] : tr.polyline) poly.push_back({r, z});
    rep["trace"] = {{"psi_start", tr.psi_start},
                    {"bound", tr.bound},
                    {"certificate_pass", tr.certificate_pass},
                    {"terminated", tr.terminated},
                    {"guard_violated", tr.guard_violated},
                    {"mode_switches", tr.mode_switches},
                    {"steps", tr.steps},
                    {"final", {tr.final_r, tr.final_z}},
                    {"mode2_abs_dpsi", tr.mode2_abs_dpsi},
                    {"polyline", poly}};
    rep["audits"] = log.to_json();
    write_json(o.report, rep);
    return log.all_pass() ? exit_ok : exit_audit_failure;
}

// ---------------------------------------------------------------- validate --

struct ValidateOpts {
    std::string input;
    double div_tol = 1e-10;
    std::string report;  // optional; default stdout summary
};

inline int cmd_validate(const ValidateOpts& o) {
    SnapshotSeries series = ingest(o.input);  // throws input_error on format problems
    series.validate();
    AuditLog log;
    json snaps = json::array();
    for (const auto& v : series.snaps) {
        double div = divergence_defect_relative(v);
        snaps.push_back({{"t", v.time}, {"div_rel", div}, {"max_v", v.max_norm()}});
        log.check_le("validate.divergence_rel@t=" + std::to_string(v.time), div, o.div_tol);
    }
    json rep = report_skeleton("validate", {{"input", o.input}, {"div_tol", o.div_tol}});
    rep["snapshots"] = snaps;
    rep["audits"] = log.to_json();
    if (o.report.empty())
        std::cout << rep.dump(2) << "\n";
    else
        write_json(o.report, rep);
    return log.all_pass() ? exit_ok : exit_audit_failure;
}

// ---------------------------------------------------------------- diagnose --

struct DiagnoseOpts {
    std::string input;
    std::string out_dir = "diag";
    unsigned seed = 1;
    double M_frac = 0.5;
    double cone_tol = 1e-2;
    int lattice = 4096;
    int scales = 4;
    double a = 0.45;
    double q = 1.8;
    double eps_ckn = 0.05;
    bool shell = false;
    QuadSpec quad{24, 48, 12, 6};
};

/// All-in-one deterministic report: validate + cone + flux + typeI sections,
/// plot-data CSVs, one combined audit list. Byte-identical given identical
/// input, configuration and seed.
inline int cmd_diagnose(const DiagnoseOpts& o) {
    fs::create_directories(o.out_dir);
    SnapshotSeries series = ingest(o.input);
    series.validate();
    const GridSpec& g = series.grid();

    AuditLog log;
    json rep = report_skeleton("diagnose", {{"input", o.input},
                                            {"seed", o.seed},
                                            {"M_frac", o.M_frac},
                                            {"cone_tol", o.cone_tol},
                                            {"lattice", o.lattice},
                                            {"scales", o.scales},
                                            {"a", o.a},
                                            {"q", o.q},
                                            {"eps_ckn", o.eps_ckn}});

    // validate section
    {
        json snaps = json::array();
        for (const auto& v : series.snaps) {
            double div = divergence_defect_relative(v);
            snaps.push_back({{"t", v.time}, {"div_rel", div}});
            log.check_le("validate.divergence_rel@t=" + std::to_string(v.time), div, 1e-10);
        }
        rep["validate"] = snaps;
    }

    // cone section on the last snapshot
    {
        ConeOpts co;
        co.M_frac = o.M_frac;
        co.tol = o.cone_tol;
        co.lattice = o.lattice;
        CsvTable scatter;
        rep["cone"] = cone_report_body(series.snaps.back(), co, log, &scatter);
        scatter.write(fs::path(o.out_dir) / "directions.csv");
    }

    // flux section
    {
        FluxOpts fo;
        fo.input = o.input;
        fo.a = std::min(o.a, 0.9 * g.min_L() / 4);
        fo.scales = o.scales;
        fo.quad = o.quad;
        fo.report_csv = (fs::path(o.out_dir) / "flux.csv").string();
        fo.report_json = (fs::path(o.out_dir) / "flux.json").string();
        int rc = cmd_flux(fo);
        log.check_flag("flux.audits", rc == exit_ok);
        rep["flux_csv"] = "flux.csv";
    }

    // typeI section
    {
        TypeIOpts to;
        to.input = o.input;
        to.scales = o.scales;
        to.q = o.q;
        to.eps_ckn = o.eps_ckn;
        to.shell = o.shell;
        to.report = (fs::path(o.out_dir) / "typeI.json").string();
        to.csv = (fs::path(o.out_dir) / "typeI.csv").string();
        int rc = cmd_typeI(to);
        log.check_flag("typeI.audits", rc == exit_ok);
        rep["typeI_csv"] = "typeI.csv";
    }

    rep["audits"] = log.to_json();
    write_json(fs::path(o.out_dir) / "report.json", rep);
    return log.all_pass() ? exit_ok : exit_audit_failure;
}

}  // namespace vortex::cli

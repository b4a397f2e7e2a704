// Command-line front end: simulate, diagnose, cone, flux, typeI, axisym,
// validate. Exit codes: 0 ok, 2 invariant-audit failure, 3 input error,
// 4 configuration error.

#include <CLI11.hpp>

#include "vortex/cli.hpp"

using namespace vortex;

int main(int argc, char** argv) {
    CLI::App app{"Navier-Stokes vorticity-geometry diagnostics"};
    app.require_subcommand(1);

    int threads = 0;
    if (const char* env = std::getenv("VORTEXDIAG_THREADS")) threads = std::atoi(env);
    app.add_option("--threads", threads, "worker thread count (default: env VORTEXDIAG_THREADS or 1)");

    cli::SimulateOpts so;
    auto* sim = app.add_subcommand("simulate", "integrate Navier-Stokes and emit VXS1 snapshots");
    sim->add_option("--init", so.init, "abc|tg|tg2d|shear|file")->default_val("abc");
    sim->add_option("--init-file", so.init_file, "VXS1 file when --init file");
    sim->add_option("--n", so.n, "grid points per axis")->default_val(64);
    sim->add_option("--box", so.box, "box length (default 2pi)");
    sim->add_option("--amp", so.amp, "initial amplitude")->default_val(1.0);
    sim->add_option("--k0", so.k0, "ABC base wavenumber")->default_val(1);
    sim->add_option("--perturb", so.perturb, "solenoidal perturbation amplitude");
    sim->add_option("--seed", so.seed, "perturbation seed")->default_val(1);
    sim->add_option("--dt", so.dt)->default_val(1e-3);
    sim->add_option("--t-end", so.t_end)->default_val(1.0);
    sim->add_option("--snap-every", so.snap_every)->default_val(0.05);
    sim->add_option("--cfl", so.cfl, "CFL abort limit")->default_val(0.5);
    sim->add_flag("--no-dealias", [&](std::int64_t) { so.dealias = false; },
                  "disable the 2/3-rule dealiasing");
    sim->add_option("--out", so.out_dir, "output directory")->required();

    cli::ConeOpts co;
    auto* cone = app.add_subcommand("cone", "vorticity-direction cone fit and obstruction test");
    cone->add_option("--in", co.input)->required();
    cone->add_option("--M", co.M, "absolute magnitude threshold");
    cone->add_option("--M-frac", co.M_frac, "threshold as fraction of max |omega|")->default_val(0.5);
    cone->add_option("--tol", co.tol, "obstruction gap tolerance")->default_val(1e-2);
    cone->add_option("--lattice", co.lattice, "axis lattice size")->default_val(4096);
    cone->add_option("--report", co.report)->default_val("cone.json");
    cone->add_option("--scatter", co.scatter_csv, "direction scatter CSV");

    cli::FluxOpts fo;
    auto* flux = app.add_subcommand("flux", "absolute vorticity flux profiles and identity audits");
    flux->add_option("--in", fo.input)->required();
    flux->add_option("--a", fo.a, "W-profile disc radius")->default_val(0.45);
    flux->add_option("--scales", fo.scales, "dyadic radius count")->default_val(5);
    flux->add_option("--r0", fo.r0, "largest probe radius");
    flux->add_option("--c1", fo.c1, "probe center x1");
    flux->add_option("--c2", fo.c2, "probe center x2");
    flux->add_option("--z0", fo.z0, "probe center height");
    flux->add_option("--nz", fo.n_z, "heights per probe")->default_val(3);
    flux->add_option("--report", fo.report_csv)->default_val("flux.csv");
    flux->add_option("--json", fo.report_json, "optional JSON report");

    cli::TypeIOpts to;
    auto* typeI = app.add_subcommand("typeI", "scale-invariant quantity scan");
    typeI->add_option("--in", to.input)->required();
    typeI->add_option("--centers", to.centers, "grid:k or point:x,y,z")->default_val("grid:1");
    typeI->add_option("--scales", to.scales)->default_val(6);
    typeI->add_option("--q", to.q, "Lambda_q exponent, in (3/2,2)")->default_val(1.8);
    typeI->add_option("--eps-ckn", to.eps_ckn)->default_val(0.05);
    typeI->add_flag("--no-shell", [&](std::int64_t) { to.shell = false; },
                    "skip the regular-shell search");
    typeI->add_option("--report", to.report)->default_val("typeI.json");
    typeI->add_option("--csv", to.csv, "optional F/E/A/D table");

    cli::AxisymOpts ao;
    auto* axi = app.add_subcommand("axisym", "axisymmetric stream-function diagnostics");
    axi->add_option("--in", ao.input)->required();
    axi->add_option("--c1", ao.C1, "slope constant C1 (> 10)")->default_val(11.0);
    axi->add_option("--c2", ao.C2, "slope constant C2 (> 10)")->default_val(11.0);
    axi->add_option("--start", [&](const std::vector<std::string>& v) {
        return std::sscanf(v[0].c_str(), "%lf,%lf", &ao.start_r, &ao.start_z) == 2;
    }, "start point r0,z0 (inside B(1/(100 C2)))");
    axi->add_option("--axis", [&](const std::vector<std::string>& v) {
        return std::sscanf(v[0].c_str(), "%lf,%lf", &ao.axis_x, &ao.axis_y) == 2;
    }, "axis location cx,cy (default box center)");
    axi->add_option("--delta", ao.delta, "velocity-cone delta")->default_val(0.1);
    axi->add_option("--M", ao.M, "velocity-cone magnitude threshold")->default_val(0.0);
    axi->add_option("--nr", ao.n_r, "meridian radial points")->default_val(65);
    axi->add_option("--report", ao.report)->default_val("trace.json");

    cli::ValidateOpts vo;
    auto* val = app.add_subcommand("validate", "check VXS1 inputs and audit invariants");
    val->add_option("--in", vo.input)->required();
    val->add_option("--div-tol", vo.div_tol)->default_val(1e-10);
    val->add_option("--report", vo.report, "write JSON here instead of stdout");

    cli::DiagnoseOpts dgo;
    auto* diag = app.add_subcommand("diagnose", "all-in-one deterministic report");
    diag->add_option("--in", dgo.input)->required();
    diag->add_option("--out", dgo.out_dir)->default_val("diag");
    diag->add_option("--seed", dgo.seed)->default_val(1);
    diag->add_option("--M-frac", dgo.M_frac)->default_val(0.5);
    diag->add_option("--scales", dgo.scales)->default_val(4);
    diag->add_option("--a", dgo.a)->default_val(0.45);
    diag->add_option("--q", dgo.q)->default_val(1.8);
    diag->add_flag("--shell", dgo.shell, "include the regular-shell search");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int rc = app.exit(e);
        return rc == 0 ? 0 : exit_config_error;
    }

    Parallel::default_threads() = std::max(1, threads);

    try {
        if (*sim) return cli::cmd_simulate(so);
        if (*cone) return cli::cmd_cone(co);
        if (*flux) return cli::cmd_flux(fo);
        if (*typeI) return cli::cmd_typeI(to);
        if (*axi) return cli::cmd_axisym(ao);
        if (*val) return cli::cmd_validate(vo);
        if (*diag) return cli::cmd_diagnose(dgo);
    } catch (const input_error& e) {
        std::cerr << "input error: " << e.what() << "\n";
        return exit_input_error;
    } catch (const precondition_error& e) {
        std::cerr << "configuration error: " << e.what() << "\n";
        return exit_config_error;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return exit_config_error;
    }
    return exit_config_error;
}

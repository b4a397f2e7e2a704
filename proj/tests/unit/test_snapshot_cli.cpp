#include <catch2/catch_amalgamated.hpp>

#include <fstream>

#include "vortex/cli.hpp"

using namespace vortex;
namespace fs = std::filesystem;

namespace {

fs::path test_dir(const std::string& name) {
    fs::path p = fs::temp_directory_path() / ("vortexdiag_test_" + name);
    fs::remove_all(p);
    fs::create_directories(p);
    return p;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    REQUIRE(in);
    return std::string(std::istreambuf_iterator<char>(in), {});
}

}  // namespace

TEST_CASE("VXS1 round trip is bit-exact") {
    fs::path dir = test_dir("vxs1");
    GridSpec g(16, 8, 12, two_pi, two_pi, 4.0);
    VectorField v(g, 0.375);
    std::mt19937 rng(99);
    std::uniform_real_distribution<double> u(-1, 1);
    for (int c = 0; c < 3; ++c)
        for (auto& x : v.comp[c]) x = u(rng);

    write_vxs1(dir / "a.vxs", v);
    VectorField r = read_vxs1(dir / "a.vxs");
    CHECK(r.grid.compatible(g));
    CHECK(r.time == v.time);
    for (int c = 0; c < 3; ++c)
        for (std::size_t i = 0; i < v.size(); ++i) CHECK(r.comp[c][i] == v.comp[c][i]);
}

TEST_CASE("VXS1 error paths: magic, truncation names the field, schema") {
    fs::path dir = test_dir("vxs1_bad");
    GridSpec g = GridSpec::cube(8);
    VectorField v(g, 0.0);
    write_vxs1(dir / "ok.vxs", v);

    // corrupted magic
    {
        std::string data = slurp(dir / "ok.vxs");
        data[3] = 'X';
        std::ofstream out(dir / "badmagic.vxs", std::ios::binary);
        out << data;
    }
    CHECK_THROWS_AS(read_vxs1(dir / "badmagic.vxs"), input_error);

    // payload truncated inside the second field: the error names it
    {
        std::string data = slurp(dir / "ok.vxs");
        std::size_t payload = g.size() * sizeof(double);
        std::size_t keep = data.size() - 3 * payload + payload + payload / 2;
        std::ofstream out(dir / "trunc.vxs", std::ios::binary);
        out << data.substr(0, keep);
    }
    try {
        read_vxs1(dir / "trunc.vxs");
        FAIL("expected truncation error");
    } catch (const input_error& e) {
        CHECK(std::string(e.what()).find("'v2'") != std::string::npos);
        CHECK(std::string(e.what()).find("truncated") != std::string::npos);
    }

    // header schema mismatch (odd grid)
    {
        nlohmann::ordered_json hdr;
        hdr["n1"] = 7;
        hdr["n2"] = 8;
        hdr["n3"] = 8;
        hdr["L1"] = hdr["L2"] = hdr["L3"] = two_pi;
        hdr["time"] = 0.0;
        hdr["fields"] = {"v1", "v2", "v3"};
        std::string hs = hdr.dump();
        std::ofstream out(dir / "badgrid.vxs", std::ios::binary);
        out.write(vxs1_magic, 8);
        std::uint32_t len = hs.size();
        out.write(reinterpret_cast<const char*>(&len), 4);
        out << hs;
    }
    CHECK_THROWS_AS(read_vxs1(dir / "badgrid.vxs"), input_error);

    // non-finite payload rejected
    {
        VectorField bad = v;
        bad.comp[0][5] = 1.0;
        write_vxs1(dir / "fin.vxs", bad);
        std::string data = slurp(dir / "fin.vxs");
        // overwrite one double with a NaN bit pattern
        std::uint64_t nanbits = 0x7ff8000000000000ull;
        std::size_t payload_off = data.size() - 3 * g.size() * sizeof(double);
        std::memcpy(data.data() + payload_off, &nanbits, 8);
        std::ofstream out(dir / "nan.vxs", std::ios::binary);
        out << data;
    }
    CHECK_THROWS_AS(read_vxs1(dir / "nan.vxs"), precondition_error);
}

TEST_CASE("ingest: ordering, monotone times, empty directory") {
    fs::path dir = test_dir("ingest");
    GridSpec g = GridSpec::cube(8);
    VectorField a(g, 0.2), b(g, 0.1), c(g, 0.3);
    write_vxs1(dir / "z_first.vxs", a);   // names deliberately unsorted by time
    write_vxs1(dir / "a_second.vxs", b);
    write_vxs1(dir / "m_third.vxs", c);
    SnapshotSeries s = ingest(dir);
    REQUIRE(s.size() == 3);
    CHECK(s[0].time == 0.1);
    CHECK(s[2].time == 0.3);

    // duplicate times are rejected
    write_vxs1(dir / "dup.vxs", VectorField(g, 0.3));
    CHECK_THROWS_AS(ingest(dir), input_error);

    fs::path empty = test_dir("ingest_empty");
    CHECK_THROWS_AS(ingest(empty), input_error);
    CHECK_THROWS_AS(ingest(empty / "missing.vxs"), input_error);
}

TEST_CASE("CSV tables round-trip exactly") {
    fs::path dir = test_dir("csv");
    CsvTable t;
    t.columns = {"a", "b", "c"};
    std::mt19937 rng(5);
    std::uniform_real_distribution<double> u(-1e3, 1e3);
    for (int i = 0; i < 20; ++i) t.rows.push_back({u(rng), u(rng) * 1e-17, u(rng) * 1e14});
    t.write(dir / "t.csv");
    CsvTable r = CsvTable::read(dir / "t.csv");
    REQUIRE(r.columns == t.columns);
    REQUIRE(r.rows.size() == t.rows.size());
    for (std::size_t i = 0; i < t.rows.size(); ++i)
        for (std::size_t j = 0; j < 3; ++j) CHECK(r.rows[i][j] == t.rows[i][j]);
}

TEST_CASE("simulate + validate + cone end to end") {
    fs::path dir = test_dir("sim");
    cli::SimulateOpts so;
    so.init = "abc";
    so.n = 16;
    so.dt = 2e-3;
    so.t_end = 0.02;
    so.snap_every = 0.01;
    so.out_dir = (dir / "run").string();
    CHECK(cli::cmd_simulate(so) == exit_ok);
    CHECK(fs::exists(dir / "run" / "manifest.json"));
    CHECK(fs::exists(dir / "run" / "snap_0000.vxs"));

    cli::ValidateOpts vo;
    vo.input = (dir / "run").string();
    vo.report = (dir / "validate.json").string();
    CHECK(cli::cmd_validate(vo) == exit_ok);

    cli::ConeOpts co;
    co.input = (dir / "run" / "snap_0000.vxs").string();
    co.report = (dir / "cone.json").string();
    CHECK(cli::cmd_cone(co) == exit_ok);
    json rep = json::parse(slurp(dir / "cone.json"));
    CHECK(rep["cone"].contains("axis"));
    CHECK(rep["cone"].contains("delta"));
    CHECK(rep["cone"].contains("C"));
    CHECK(rep["cone"].contains("obstructed"));
    CHECK(rep["cone"]["n_samples"].get<std::size_t>() > 0);
    // ABC directions cover the sphere: no avoided circle at tol 1e-2
    CHECK(rep["cone"]["obstructed"].get<bool>() == true);
}

TEST_CASE("flux CSV carries the documented columns") {
    fs::path dir = test_dir("fluxcli");
    cli::SimulateOpts so;
    so.init = "tg";
    so.perturb = 0.05;
    so.n = 16;
    so.dt = 2e-3;
    so.t_end = 0.012;
    so.snap_every = 4e-3;
    so.out_dir = (dir / "run").string();
    REQUIRE(cli::cmd_simulate(so) == exit_ok);

    cli::FluxOpts fo;
    fo.input = (dir / "run").string();
    fo.scales = 3;
    fo.quad = QuadSpec{24, 48, 16, 4};
    fo.report_csv = (dir / "flux.csv").string();
    fo.report_json = (dir / "flux.json").string();
    CHECK(cli::cmd_flux(fo) == exit_ok);
    CsvTable t = CsvTable::read(dir / "flux.csv");
    CHECK(t.columns == std::vector<std::string>{"t", "z", "r", "gamma", "w", "b1", "b2",
                                                "ineq_lhs", "id_0115_3_resid",
                                                "id_0115_4_resid"});
    CHECK(t.rows.size() == 9u);  // 1 time x 3 heights x 3 radii
}

TEST_CASE("diagnose is deterministic: identical runs, identical bytes") {
    fs::path dir = test_dir("diag");
    cli::SimulateOpts so;
    so.init = "tg";
    so.perturb = 0.02;
    so.seed = 3;
    so.n = 16;
    so.dt = 2e-3;
    so.t_end = 0.012;
    so.snap_every = 4e-3;
    so.out_dir = (dir / "run").string();
    REQUIRE(cli::cmd_simulate(so) == exit_ok);

    cli::DiagnoseOpts dg;
    dg.input = (dir / "run").string();
    dg.scales = 3;
    dg.quad = QuadSpec{16, 32, 8, 4};
    dg.out_dir = (dir / "d1").string();
    REQUIRE(cli::cmd_diagnose(dg) == exit_ok);
    dg.out_dir = (dir / "d2").string();
    REQUIRE(cli::cmd_diagnose(dg) == exit_ok);

    for (const char* f : {"report.json", "flux.csv", "typeI.json", "typeI.csv", "directions.csv",
                          "flux.json"}) {
        INFO(f);
        CHECK(slurp(dir / "d1" / f) == slurp(dir / "d2" / f));
    }
}

TEST_CASE("typeI report carries tables, lambda_q, G and the flux norm") {
    fs::path dir = test_dir("typeI");
    cli::SimulateOpts so;
    so.init = "abc";
    so.n = 16;
    so.dt = 2e-3;
    so.t_end = 0.02;
    so.snap_every = 5e-3;
    so.out_dir = (dir / "run").string();
    REQUIRE(cli::cmd_simulate(so) == exit_ok);

    cli::TypeIOpts to;
    to.input = (dir / "run").string();
    to.scales = 3;
    to.shell = false;
    to.report = (dir / "typeI.json").string();
    CHECK(cli::cmd_typeI(to) == exit_ok);
    json rep = json::parse(slurp(dir / "typeI.json"));
    CHECK(rep["centers"].size() == 1);
    CHECK(rep["centers"][0].contains("lambda_q"));
    CHECK(rep.contains("critical_flux_norm"));
    CHECK(rep["G"].get<double>() >= 2.0);
    // sup equals the max over the tables
    double sup = rep["sup_FDEA"].get<double>();
    double max_seen = 0;
    for (const auto& row : rep["centers"][0]["table"])
        max_seen = std::max(max_seen, row["F"].get<double>() + row["E"].get<double>() +
                                          row["A"].get<double>() + row["D"].get<double>());
    CHECK(sup == Catch::Approx(max_seen));
}

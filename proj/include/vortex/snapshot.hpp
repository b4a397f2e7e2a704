#pragma once

#include <bit>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>

#include <json.hpp>

#include "vortex/field.hpp"

namespace vortex {

/// VXS1 snapshot format:
///   bytes 0..7   magic "VXSNAP01"
///   bytes 8..11  uint32 little-endian JSON header length
///   header       JSON {n1,n2,n3,L1,L2,L3,time,fields:[names]}
///   payload      per named field, n1*n2*n3 little-endian float64,
///                component-major, x1-fastest
inline constexpr char vxs1_magic[8] = {'V', 'X', 'S', 'N', 'A', 'P', '0', '1'};

namespace detail {

inline void byteswap_doubles(std::vector<double>& v) {
    for (double& d : v) {
        std::uint64_t u;
        std::memcpy(&u, &d, 8);
        u = __builtin_bswap64(u);
        std::memcpy(&d, &u, 8);
    }
}

inline void to_little_endian(std::vector<double>& v) {
    if constexpr (std::endian::native == std::endian::big) byteswap_doubles(v);
}

}  // namespace detail

inline void write_vxs1(const std::filesystem::path& path, const VectorField& v) {
    v.check_finite("snapshot to write");
    nlohmann::ordered_json hdr;
    hdr["n1"] = v.grid.n1;
    hdr["n2"] = v.grid.n2;
    hdr["n3"] = v.grid.n3;
    hdr["L1"] = v.grid.L1;
    hdr["L2"] = v.grid.L2;
    hdr["L3"] = v.grid.L3;
    hdr["time"] = v.time;
    hdr["fields"] = {"v1", "v2", "v3"};
    std::string hs = hdr.dump();

    std::ofstream out(path, std::ios::binary);
    if (!out) throw input_error("cannot open " + path.string() + " for writing");
    out.write(vxs1_magic, 8);
    std::uint32_t len = std::uint32_t(hs.size());
    if constexpr (std::endian::native == std::endian::big) len = __builtin_bswap32(len);
    out.write(reinterpret_cast<const char*>(&len), 4);
    out.write(hs.data(), hs.size());
    for (int c = 0; c < 3; ++c) {
        std::vector<double> buf = v.comp[c];
        detail::to_little_endian(buf);
        out.write(reinterpret_cast<const char*>(buf.data()), buf.size() * sizeof(double));
    }
    if (!out) throw input_error("short write to " + path.string());
}

inline VectorField read_vxs1(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw input_error("cannot open " + path.string());
    char magic[8];
    in.read(magic, 8);
    if (!in || std::memcmp(magic, vxs1_magic, 8) != 0)
        throw input_error(path.string() + ": bad magic, not a VXS1 snapshot");
    std::uint32_t len = 0;
    in.read(reinterpret_cast<char*>(&len), 4);
    if constexpr (std::endian::native == std::endian::big) len = __builtin_bswap32(len);
    if (!in || len == 0 || len > (1u << 20)) throw input_error(path.string() + ": bad header length");
    std::string hs(len, '\0');
    in.read(hs.data(), len);
    if (!in) throw input_error(path.string() + ": truncated header");

    nlohmann::json hdr;
    try {
        hdr = nlohmann::json::parse(hs);
    } catch (const nlohmann::json::exception& e) {
        throw input_error(path.string() + ": header JSON parse failure: " + e.what());
    }
    GridSpec g;
    try {
        g = GridSpec(hdr.at("n1").get<int>(), hdr.at("n2").get<int>(), hdr.at("n3").get<int>(),
                     hdr.at("L1").get<double>(), hdr.at("L2").get<double>(),
                     hdr.at("L3").get<double>());
    } catch (const nlohmann::json::exception& e) {
        throw input_error(path.string() + ": header schema mismatch: " + e.what());
    } catch (const precondition_error& e) {
        throw input_error(path.string() + ": invalid grid in header: " + e.what());
    }
    double time = hdr.value("time", 0.0);
    std::vector<std::string> names = hdr.at("fields").get<std::vector<std::string>>();

    std::map<std::string, std::vector<double>> fields;
    for (const auto& name : names) {
        std::vector<double> buf(g.size());
        in.read(reinterpret_cast<char*>(buf.data()), buf.size() * sizeof(double));
        if (std::size_t(in.gcount()) != buf.size() * sizeof(double))
            throw input_error(path.string() + ": payload for field '" + name +
                              "' truncated: expected " + std::to_string(buf.size()) +
                              " doubles, got " + std::to_string(in.gcount() / 8));
        detail::to_little_endian(buf);
        fields.emplace(name, std::move(buf));
    }
    for (const char* req : {"v1", "v2", "v3"})
        if (!fields.count(req))
            throw input_error(path.string() + ": header lists no field '" + std::string(req) + "'");

    VectorField v(g, time);
    v.comp[0] = std::move(fields["v1"]);
    v.comp[1] = std::move(fields["v2"]);
    v.comp[2] = std::move(fields["v3"]);
    v.check_finite(("snapshot " + path.string()).c_str());
    return v;
}

/// Load one file or every *.vxs in a directory, sorted by snapshot time.
/// Times must be strictly increasing and grids identical.
inline SnapshotSeries ingest(const std::filesystem::path& path) {
    namespace fs = std::filesystem;
    SnapshotSeries series;
    if (fs::is_directory(path)) {
        std::vector<fs::path> files;
        for (const auto& e : fs::directory_iterator(path))
            if (e.is_regular_file() && e.path().extension() == ".vxs") files.push_back(e.path());
        if (files.empty()) throw input_error("no .vxs snapshots in " + path.string());
        std::sort(files.begin(), files.end());
        for (const auto& f : files) series.snaps.push_back(read_vxs1(f));
    } else if (fs::is_regular_file(path)) {
        series.snaps.push_back(read_vxs1(path));
    } else {
        throw input_error("no such input: " + path.string());
    }
    std::sort(series.snaps.begin(), series.snaps.end(),
              [](const VectorField& a, const VectorField& b) { return a.time < b.time; });
    for (std::size_t i = 1; i < series.size(); ++i) {
        if (!(series[i].time > series[i - 1].time))
            throw input_error("snapshot times are not strictly increasing in " + path.string());
        if (!series[i].grid.compatible(series[0].grid))
            throw input_error("snapshot grids differ in " + path.string());
    }
    return series;
}

}  // namespace vortex

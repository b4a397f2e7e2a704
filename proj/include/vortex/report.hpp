#pragma once

#include <filesystem>
#include <fstream>

#include <json.hpp>

#include "vortex/core.hpp"
#include "vortex/version.hpp"

namespace vortex {

using json = nlohmann::ordered_json;

/// One invariant check evaluated on the run's data.
struct Audit {
    std::string name;
    bool pass = false;
    double value = 0;
    double threshold = 0;
};

struct AuditLog {
    std::vector<Audit> audits;

    /// pass iff value <= threshold
    void check_le(const std::string& name, double value, double threshold) {
        audits.push_back({name, value <= threshold, value, threshold});
    }
    void check_flag(const std::string& name, bool pass, double value = 0, double threshold = 0) {
        audits.push_back({name, pass, value, threshold});
    }
    bool all_pass() const {
        for (const auto& a : audits)
            if (!a.pass) return false;
        return true;
    }
    json to_json() const {
        json arr = json::array();
        for (const auto& a : audits)
            arr.push_back(
                {{"name", a.name}, {"pass", a.pass}, {"value", a.value}, {"threshold", a.threshold}});
        return arr;
    }
};

/// Report skeleton shared by every subcommand: tool id, schema version,
/// config echo (with the seed), payload sections, audit section.
inline json report_skeleton(const std::string& subcommand, const json& config_echo) {
    json r;
    r["tool"] = tool_name;
    r["version"] = tool_version;
    r["schema"] = report_schema_version;
    r["subcommand"] = subcommand;
    r["config"] = config_echo;
    return r;
}

inline void write_json(const std::filesystem::path& path, const json& j) {
    std::ofstream out(path);
    if (!out) throw input_error("cannot write " + path.string());
    out << j.dump(2) << "\n";
}

/// Flat CSV table. Numbers are written with %.17g (round-trip exact), so a
/// rerun with identical inputs is byte-identical.
struct CsvTable {
    std::vector<std::string> columns;
    std::vector<std::vector<double>> rows;

    void write(const std::filesystem::path& path) const {
        std::ofstream out(path);
        if (!out) throw input_error("cannot write " + path.string());
        for (std::size_t i = 0; i < columns.size(); ++i)
            out << columns[i] << (i + 1 < columns.size() ? "," : "\n");
        char buf[40];
        for (const auto& row : rows) {
            for (std::size_t i = 0; i < row.size(); ++i) {
                std::snprintf(buf, sizeof buf, "%.17g", row[i]);
                out << buf << (i + 1 < row.size() ? "," : "\n");
            }
        }
    }

    /// Parse back a table written by write(); used by round-trip checks.
    static CsvTable read(const std::filesystem::path& path) {
        std::ifstream in(path);
        if (!in) throw input_error("cannot read " + path.string());
        CsvTable t;
        std::string line;
        if (!std::getline(in, line)) throw input_error("empty CSV " + path.string());
        std::size_t pos = 0;
        while (pos <= line.size()) {
            std::size_t c = line.find(',', pos);
            if (c == std::string::npos) {
                t.columns.push_back(line.substr(pos));
                break;
            }
            t.columns.push_back(line.substr(pos, c - pos));
            pos = c + 1;
        }
        while (std::getline(in, line)) {
            if (line.empty()) continue;
            std::vector<double> row;
            std::size_t p = 0;
            while (p <= line.size()) {
                std::size_t c = line.find(',', p);
                std::string cell = c == std::string::npos ? line.substr(p) : line.substr(p, c - p);
                row.push_back(std::stod(cell));
                if (c == std::string::npos) break;
                p = c + 1;
            }
            t.rows.push_back(std::move(row));
        }
        return t;
    }
};

/// Exit codes shared by the CLI and the report contract.
enum ExitCode : int {
    exit_ok = 0,
    exit_audit_failure = 2,
    exit_input_error = 3,
    exit_config_error = 4,
};

}  // namespace vortex

#pragma once

#include <cmath>
#include <cstdint>
#include <ctime>
#include <string>
#include <vector>

#include "driftlearn/errors.hpp"
#include "driftlearn/rng.hpp"
#include "driftlearn/textio.hpp"

namespace driftlearn {

inline constexpr const char* kToolkitVersion = "driftlearn 0.1.0";

// Metric formatting for report bodies. Non-finite values are never written;
// an undefined metric is the explicit sentinel token instead.
inline constexpr const char* kUndefinedMetric = "NA";

inline std::string fmt_metric(double x, int prec = 6) {
    if (!std::isfinite(x)) return kUndefinedMetric;
    return fmt_fixed(x, prec);
}

inline std::string fmt_count(std::uint64_t n) { return std::to_string(n); }

// A comma-separated experiment report. The body (columns, rows, summary
// lines) is a pure function of the inputs; free-running data such as
// timestamps lives only in the '#' metadata header.
struct Report {
    std::string experiment_id;
    std::vector<std::string> columns;
    std::vector<std::vector<std::string>> rows;
    std::vector<std::string> summary;  // "key=value" lines
    std::vector<std::pair<std::string, std::string>> meta;

    void add_row(std::vector<std::string> cells) {
        if (cells.size() != columns.size())
            throw Error("report", "row width " + std::to_string(cells.size()) +
                                      " does not match " + std::to_string(columns.size()) +
                                      " columns");
        rows.push_back(std::move(cells));
    }

    void add_summary(const std::string& key, const std::string& value) {
        summary.push_back(key + "=" + value);
    }
};

inline std::string report_body(const Report& report) {
    std::string out;
    for (std::size_t i = 0; i < report.columns.size(); ++i) {
        if (i) out += ',';
        out += report.columns[i];
    }
    out += '\n';
    for (const auto& row : report.rows) {
        for (std::size_t i = 0; i < row.size(); ++i) {
            if (i) out += ',';
            out += row[i];
        }
        out += '\n';
    }
    for (const auto& line : report.summary) {
        out += "summary,";
        out += line;
        out += '\n';
    }
    return out;
}

inline std::string timestamp_utc() {
    char buf[32];
    const std::time_t now = std::time(nullptr);
    std::tm tm{};
    gmtime_r(&now, &tm);
    std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

inline std::string digest_hex(const std::string& bytes) {
    char buf[20];
    std::snprintf(buf, sizeof(buf), "%016llx",
                  static_cast<unsigned long long>(fnv1a64(bytes)));
    return buf;
}

// Full report file: '#' metadata header (which may carry timestamps)
// followed by the deterministic body.
inline std::string report_text(const Report& report, std::uint64_t master_seed) {
    std::string out = "# ";
    out += kToolkitVersion;
    out += " report\n";
    out += "# experiment: " + report.experiment_id + '\n';
    out += "# seed: " + std::to_string(master_seed) + '\n';
    for (const auto& [k, v] : report.meta) out += "# " + k + ": " + v + '\n';
    out += "# generated: " + timestamp_utc() + '\n';
    out += report_body(report);
    return out;
}

// Everything needed to reproduce an experiment output: rerunning with the
// same command line, config and seed yields byte-identical report bodies.
struct RunManifest {
    std::string command_line;
    std::string config_digest = "-";
    std::uint64_t master_seed = 0;
    std::string version = kToolkitVersion;
    std::string started_at;
    std::string finished_at;
    std::vector<std::pair<std::string, std::string>> output_digests;  // (file, body digest)
};

inline std::string manifest_text(const RunManifest& m) {
    std::string out = "driftlearn-manifest v1\n";
    out += "version " + m.version + '\n';
    out += "command " + m.command_line + '\n';
    out += "config_digest " + m.config_digest + '\n';
    out += "seed " + std::to_string(m.master_seed) + '\n';
    out += "started " + m.started_at + '\n';
    out += "finished " + m.finished_at + '\n';
    for (const auto& [file, digest] : m.output_digests)
        out += "output " + file + " " + digest + '\n';
    return out;
}

}  // namespace driftlearn

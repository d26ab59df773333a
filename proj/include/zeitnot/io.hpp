#pragma once
// Output plumbing shared by the CLI and the report builder: the run
// manifest embedded in every emitted document, the JSON envelope, and CSV
// helpers (12 significant digits, '.' decimal separator, manifest embedded
// as a leading comment line).

#include <chrono>
#include <cstdint>
#include <ctime>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "numeric.hpp"
#include "version.hpp"

namespace zeitnot {

using ordered_json = nlohmann::ordered_json;

struct RunManifest {
    std::string command;
    ordered_json parameters = ordered_json::object();
    std::string tool_version = version_string();
    std::string timestamp;  // ISO 8601 UTC, filled at emit time
    std::uint64_t seed = 0;
};

inline std::string iso8601_utc_now() {
    const auto now = std::chrono::system_clock::now();
    const std::time_t t = std::chrono::system_clock::to_time_t(now);
    std::tm tm{};
    gmtime_r(&t, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

inline ordered_json to_json(const RunManifest& m) {
    ordered_json j;
    j["command"] = m.command;
    j["tool_version"] = m.tool_version;
    j["timestamp"] = m.timestamp.empty() ? iso8601_utc_now() : m.timestamp;
    j["seed"] = m.seed;
    j["parameters"] = m.parameters;
    return j;
}

// Every JSON document is {"manifest": ..., "data": ...}.
inline ordered_json envelope(const RunManifest& manifest, ordered_json data) {
    ordered_json j;
    j["manifest"] = to_json(manifest);
    j["data"] = std::move(data);
    return j;
}

// ---------------------------------------------------------------------------
// CSV
// ---------------------------------------------------------------------------

inline std::string csv_field(double v) { return format_sig(v, 12); }

inline std::string csv_line(const std::vector<std::string>& fields) {
    std::string line;
    for (std::size_t i = 0; i < fields.size(); ++i) {
        if (i) line += ',';
        line += fields[i];
    }
    line += '\n';
    return line;
}

// Manifest rides along as a single comment line so a CSV payload stays
// self-describing without breaking column parsers that skip '#'.
inline std::string csv_manifest_comment(const RunManifest& m) {
    return "# manifest: " + to_json(m).dump() + "\n";
}

} // namespace zeitnot

#pragma once

#include <cstdint>
#include <sstream>
#include <string>

#include <json.hpp>

namespace deformlab::cli {

inline constexpr int kReportVersion = 1;

enum class Format { text, structured };

/// Outcome of one task. exit_code is 0 on success and 1 when the command
/// reached a negative mathematical verdict (not flat, obstructed, ...).
struct Report {
    std::string command;
    nlohmann::json inputs = nlohmann::json::object();
    nlohmann::json results = nlohmann::json::object();
    std::uint64_t seed = 0;
    int exit_code = 0;
    std::uint64_t elapsed_ms = 0; ///< text output only
};

/// Structured output is JSON with sorted keys and no floating-point
/// values, so identical inputs and seed give identical bytes. Timing is
/// left out of it on purpose.
inline std::string emit_report(const Report& r, Format f)
{
    if (f == Format::structured) {
        nlohmann::json j;
        j["version"] = kReportVersion;
        j["command"] = r.command;
        j["seed"] = r.seed;
        j["inputs"] = r.inputs;
        j["results"] = r.results;
        j["verdict"] = r.exit_code == 0 ? "ok" : "negative";
        return j.dump(2) + "\n";
    }
    std::ostringstream os;
    os << "command: " << r.command << "\n";
    os << "seed: " << r.seed << "\n";
    for (const auto& [k, v] : r.results.items())
        os << k << ": " << (v.is_string() ? v.get<std::string>() : v.dump()) << "\n";
    os << "verdict: " << (r.exit_code == 0 ? "ok" : "negative") << "\n";
    os << "time: " << r.elapsed_ms << " ms\n";
    return os.str();
}

} // namespace deformlab::cli

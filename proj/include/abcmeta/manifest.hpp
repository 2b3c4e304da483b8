#pragma once

#include <chrono>
#include <fstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

namespace abcmeta {

inline constexpr const char* kVersion = "0.1.0";

/// Everything needed to replay a CLI run: the fully-resolved argument list
/// plus seed and version. Wall-clock is recorded for bookkeeping only and is
/// excluded from replay comparisons.
struct RunManifest {
    std::string command;
    std::vector<std::string> resolved_args;
    std::uint64_t seed = 0;
    std::string version = kVersion;
    std::string wall_clock;
    nlohmann::json inputs;

    nlohmann::json to_json() const {
        return {{"command", command},
                {"resolved_args", resolved_args},
                {"seed", seed},
                {"version", version},
                {"wall_clock", wall_clock},
                {"inputs", inputs}};
    }

    static RunManifest from_json(const nlohmann::json& j) {
        RunManifest m;
        m.command = j.at("command").get<std::string>();
        m.resolved_args = j.at("resolved_args").get<std::vector<std::string>>();
        m.seed = j.at("seed").get<std::uint64_t>();
        m.version = j.at("version").get<std::string>();
        m.wall_clock = j.value("wall_clock", "");
        m.inputs = j.value("inputs", nlohmann::json::object());
        return m;
    }

    void write(const std::string& path) const {
        std::ofstream os(path);
        if (!os) throw std::runtime_error("cannot write manifest: " + path);
        os << to_json().dump(2) << "\n";
    }

    static RunManifest read(const std::string& path) {
        std::ifstream is(path);
        if (!is) throw std::runtime_error("cannot read manifest: " + path);
        nlohmann::json j;
        is >> j;
        return from_json(j);
    }
};

inline std::string current_wall_clock() {
    const auto now = std::chrono::system_clock::now();
    const std::time_t t = std::chrono::system_clock::to_time_t(now);
    char buf[32];
    std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&t));
    return buf;
}

}  // namespace abcmeta

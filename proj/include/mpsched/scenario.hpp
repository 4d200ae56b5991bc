#pragma once

#include "mpsched/link.hpp"
#include "mpsched/scheduler.hpp"
#include "mpsched/time.hpp"

#include <cctype>
#include <cstdint>
#include <fstream>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace mpsched {

struct ScenarioError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct LinkSpec {
    std::int64_t bandwidth_bps = 0; // bytes per second
    SimTime delay{0};
};

struct QueueSpec {
    enum class Policy { drop_tail, red };
    Policy policy = Policy::red;
    double red_min_frac = 0.25;
    double red_max_frac = 0.75;
    double red_max_drop_prob = 0.1;
    double red_ewma_weight = 0.05;
};

// One end-to-end path: access ("side") links into and out of a bottleneck
// link, in both directions. The backward bottleneck mirrors the forward one
// unless overridden.
struct PathSpec {
    LinkSpec forward;
    std::optional<LinkSpec> backward;
    SimTime side_delay = from_ms(1);
    double side_bandwidth_factor = 2.0;
    QueueSpec queue;
    int background_flows_fwd = 0;
    int background_flows_bwd = 0;

    const LinkSpec& backward_or_mirror() const {
        return backward ? *backward : forward;
    }
};

struct ScenarioConfig {
    std::string name;
    std::string scheduler; // "fifo" | "fdps" | "rtt-half"
    std::vector<PathSpec> paths;
    double sim_seconds = 50.0;
    int runs = 20;
    std::uint64_t base_seed = 1;
    SimTime clock_offset{0}; // receiver clock minus simulator clock
    std::int64_t packet_size = 1000;
    std::int64_t mss = 934;
};

inline std::int64_t mbps_to_bytes_per_sec(double mbps) {
    return static_cast<std::int64_t>(std::llround(mbps * 1e6 / 8.0));
}

inline void validate_scenario(const ScenarioConfig& cfg) {
    auto fail = [](const std::string& field, const std::string& why) {
        throw ScenarioError("scenario field '" + field + "': " + why);
    };
    if (cfg.name.empty()) fail("name", "must not be empty");
    if (cfg.scheduler.empty()) fail("scheduler", "missing (one of fifo, fdps, rtt-half)");
    if (!is_known_scheduler(cfg.scheduler)) fail("scheduler", "unknown name '" + cfg.scheduler + "'");
    if (cfg.paths.empty() || cfg.paths.size() > 8) fail("paths", "need between 1 and 8 paths");
    if (cfg.sim_seconds <= 0) fail("sim_seconds", "must be positive");
    if (cfg.runs < 1) fail("runs", "must be at least 1");
    if (cfg.packet_size <= 0) fail("packet_size", "must be positive");
    if (cfg.mss <= 0 || cfg.mss > cfg.packet_size) fail("mss", "must be in (0, packet_size]");
    for (std::size_t i = 0; i < cfg.paths.size(); ++i) {
        const PathSpec& p = cfg.paths[i];
        const std::string where = "paths[" + std::to_string(i) + "].";
        if (p.forward.bandwidth_bps <= 0) fail(where + "forward.bandwidth", "must be positive");
        if (p.forward.delay < SimTime{0}) fail(where + "forward.delay", "must be non-negative");
        if (p.backward) {
            if (p.backward->bandwidth_bps <= 0) fail(where + "backward.bandwidth", "must be positive");
            if (p.backward->delay < SimTime{0}) fail(where + "backward.delay", "must be non-negative");
        }
        if (p.side_bandwidth_factor <= 0) fail(where + "side_bandwidth_factor", "must be positive");
        if (p.side_delay < SimTime{0}) fail(where + "side_delay", "must be non-negative");
        if (p.background_flows_fwd < 0 || p.background_flows_bwd < 0) {
            fail(where + "background_flows", "must be non-negative");
        }
        if (p.queue.policy == QueueSpec::Policy::red) {
            if (!(p.queue.red_min_frac >= 0 && p.queue.red_min_frac <= p.queue.red_max_frac &&
                  p.queue.red_max_frac <= 1.0)) {
                fail(where + "queue", "need 0 <= red_min_frac <= red_max_frac <= 1");
            }
            if (p.queue.red_max_drop_prob < 0 || p.queue.red_max_drop_prob > 1) {
                fail(where + "queue.red_max_drop_prob", "must be in [0, 1]");
            }
        }
    }
}

// --- built-in presets --------------------------------------------------------

namespace detail {

inline PathSpec simple_path(double fwd_mbps, double fwd_delay_ms, int bg_fwd = 0, int bg_bwd = 0) {
    PathSpec p;
    p.forward.bandwidth_bps = mbps_to_bytes_per_sec(fwd_mbps);
    p.forward.delay = from_ms_f(fwd_delay_ms);
    p.background_flows_fwd = bg_fwd;
    p.background_flows_bwd = bg_bwd;
    return p;
}

} // namespace detail

inline std::vector<std::string> preset_names() {
    return {"a1", "a2", "a3", "a4", "a5", "three-path"};
}

// Desk-scale replicas of the evaluation scenarios: two identical paths (a1),
// a delay-asymmetric pair (a2), a bandwidth+delay-asymmetric pair (a3), a2
// plus forward background traffic (a4), fully asymmetric paths with
// background traffic both ways (a5), and a diverse three-path setup.
inline ScenarioConfig preset_scenario(std::string_view name) {
    ScenarioConfig cfg;
    cfg.name = std::string(name);
    cfg.scheduler = "fdps";
    if (name == "a1") {
        cfg.paths = {detail::simple_path(4, 10), detail::simple_path(4, 10)};
    } else if (name == "a2") {
        cfg.paths = {detail::simple_path(4, 10), detail::simple_path(4, 30)};
    } else if (name == "a3") {
        cfg.paths = {detail::simple_path(2, 10), detail::simple_path(8, 30)};
    } else if (name == "a4") {
        cfg.paths = {detail::simple_path(4, 10, 1), detail::simple_path(4, 30, 1)};
    } else if (name == "a5") {
        PathSpec p1 = detail::simple_path(4, 10, 1, 1);
        p1.backward = LinkSpec{mbps_to_bytes_per_sec(0.5), from_ms(15)};
        PathSpec p2 = detail::simple_path(8, 30, 1, 1);
        p2.backward = LinkSpec{mbps_to_bytes_per_sec(1.0), from_ms(35)};
        cfg.paths = {p1, p2};
    } else if (name == "three-path") {
        cfg.paths = {detail::simple_path(2, 10, 1), detail::simple_path(4, 30, 1),
                     detail::simple_path(8, 50, 1)};
    } else {
        throw ScenarioError("unknown preset: " + std::string(name));
    }
    validate_scenario(cfg);
    return cfg;
}

// --- config file parser ------------------------------------------------------
//
// Flat key = value lines; '#' starts a comment; each [path] header opens a
// new path section. Keys before the first [path] are scenario-wide.

namespace detail {

inline std::string trim(std::string_view s) {
    std::size_t b = 0;
    std::size_t e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
    return std::string(s.substr(b, e - b));
}

[[noreturn]] inline void parse_fail(int line, const std::string& why) {
    throw ScenarioError("config line " + std::to_string(line) + ": " + why);
}

inline double parse_number(const std::string& value, int line) {
    try {
        std::size_t used = 0;
        const double v = std::stod(value, &used);
        if (used != value.size()) parse_fail(line, "trailing characters in number '" + value + "'");
        return v;
    } catch (const ScenarioError&) {
        throw;
    } catch (const std::exception&) {
        parse_fail(line, "expected a number, got '" + value + "'");
    }
}

} // namespace detail

inline ScenarioConfig parse_scenario(std::istream& in, std::string_view default_name) {
    ScenarioConfig cfg;
    cfg.name = std::string(default_name);
    cfg.scheduler.clear();

    PathSpec* path = nullptr;
    std::string raw;
    int line = 0;
    while (std::getline(in, raw)) {
        ++line;
        const auto hash = raw.find('#');
        if (hash != std::string::npos) raw.erase(hash);
        const std::string text = detail::trim(raw);
        if (text.empty()) continue;

        if (text == "[path]") {
            cfg.paths.emplace_back();
            path = &cfg.paths.back();
            continue;
        }
        const auto eq = text.find('=');
        if (eq == std::string::npos) {
            detail::parse_fail(line, "expected 'key = value' or '[path]'");
        }
        const std::string key = detail::trim(std::string_view(text).substr(0, eq));
        const std::string value = detail::trim(std::string_view(text).substr(eq + 1));
        if (key.empty() || value.empty()) {
            detail::parse_fail(line, "empty key or value");
        }

        if (path == nullptr) {
            if (key == "name") {
                cfg.name = value;
            } else if (key == "scheduler") {
                cfg.scheduler = value;
            } else if (key == "sim_seconds") {
                cfg.sim_seconds = detail::parse_number(value, line);
            } else if (key == "runs") {
                cfg.runs = static_cast<int>(detail::parse_number(value, line));
            } else if (key == "base_seed") {
                cfg.base_seed = static_cast<std::uint64_t>(detail::parse_number(value, line));
            } else if (key == "clock_offset_ms") {
                cfg.clock_offset = from_ms_f(detail::parse_number(value, line));
            } else if (key == "packet_size") {
                cfg.packet_size = static_cast<std::int64_t>(detail::parse_number(value, line));
            } else if (key == "mss") {
                cfg.mss = static_cast<std::int64_t>(detail::parse_number(value, line));
            } else {
                detail::parse_fail(line, "unknown scenario key '" + key + "'");
            }
        } else {
            if (key == "forward_bandwidth_mbps") {
                path->forward.bandwidth_bps = mbps_to_bytes_per_sec(detail::parse_number(value, line));
            } else if (key == "forward_delay_ms") {
                path->forward.delay = from_ms_f(detail::parse_number(value, line));
            } else if (key == "backward_bandwidth_mbps") {
                if (!path->backward) path->backward = path->forward;
                path->backward->bandwidth_bps = mbps_to_bytes_per_sec(detail::parse_number(value, line));
            } else if (key == "backward_delay_ms") {
                if (!path->backward) path->backward = path->forward;
                path->backward->delay = from_ms_f(detail::parse_number(value, line));
            } else if (key == "side_delay_ms") {
                path->side_delay = from_ms_f(detail::parse_number(value, line));
            } else if (key == "side_bandwidth_factor") {
                path->side_bandwidth_factor = detail::parse_number(value, line);
            } else if (key == "queue") {
                if (value == "droptail") {
                    path->queue.policy = QueueSpec::Policy::drop_tail;
                } else if (value == "red") {
                    path->queue.policy = QueueSpec::Policy::red;
                } else {
                    detail::parse_fail(line, "queue must be 'droptail' or 'red'");
                }
            } else if (key == "red_min_frac") {
                path->queue.red_min_frac = detail::parse_number(value, line);
            } else if (key == "red_max_frac") {
                path->queue.red_max_frac = detail::parse_number(value, line);
            } else if (key == "red_max_drop_prob") {
                path->queue.red_max_drop_prob = detail::parse_number(value, line);
            } else if (key == "red_ewma_weight") {
                path->queue.red_ewma_weight = detail::parse_number(value, line);
            } else if (key == "background_flows_fwd") {
                path->background_flows_fwd = static_cast<int>(detail::parse_number(value, line));
            } else if (key == "background_flows_bwd") {
                path->background_flows_bwd = static_cast<int>(detail::parse_number(value, line));
            } else {
                detail::parse_fail(line, "unknown path key '" + key + "'");
            }
        }
    }
    validate_scenario(cfg);
    return cfg;
}

// Resolves a preset name or loads and validates a config file.
inline ScenarioConfig load_scenario(const std::string& name_or_path) {
    for (const std::string& p : preset_names()) {
        if (p == name_or_path) return preset_scenario(p);
    }
    std::ifstream in(name_or_path);
    if (!in) {
        throw ScenarioError("no such preset or config file: " + name_or_path);
    }
    std::string stem = name_or_path;
    if (const auto slash = stem.find_last_of('/'); slash != std::string::npos) {
        stem.erase(0, slash + 1);
    }
    if (const auto dot = stem.find_last_of('.'); dot != std::string::npos) {
        stem.erase(dot);
    }
    return parse_scenario(in, stem);
}

} // namespace mpsched

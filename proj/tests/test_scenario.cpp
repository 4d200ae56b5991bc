#include "mpsched/scenario.hpp"

#include <catch2/catch_amalgamated.hpp>

#include <sstream>

using namespace mpsched;

TEST_CASE("preset a1: two identical 4 Mbps / 10 ms paths") {
    const auto cfg = preset_scenario("a1");
    REQUIRE(cfg.paths.size() == 2);
    for (const auto& p : cfg.paths) {
        REQUIRE(p.forward.bandwidth_bps == 500000);
        REQUIRE(p.forward.delay == from_ms(10));
        REQUIRE_FALSE(p.backward.has_value());
        REQUIRE(p.side_delay == from_ms(1));
        REQUIRE(p.side_bandwidth_factor == 2.0);
        REQUIRE(p.queue.policy == QueueSpec::Policy::red);
        REQUIRE(p.background_flows_fwd == 0);
        REQUIRE(p.background_flows_bwd == 0);
    }
    REQUIRE(cfg.sim_seconds == 50.0);
    REQUIRE(cfg.runs == 20);
    REQUIRE(cfg.packet_size == 1000);
    REQUIRE(cfg.mss == 934);
}

TEST_CASE("preset a2: second path delay raised to 30 ms") {
    const auto cfg = preset_scenario("a2");
    REQUIRE(cfg.paths[0].forward.bandwidth_bps == 500000);
    REQUIRE(cfg.paths[0].forward.delay == from_ms(10));
    REQUIRE(cfg.paths[1].forward.bandwidth_bps == 500000);
    REQUIRE(cfg.paths[1].forward.delay == from_ms(30));
}

TEST_CASE("preset a3: bandwidth and delay both asymmetric") {
    const auto cfg = preset_scenario("a3");
    REQUIRE(cfg.paths[0].forward.bandwidth_bps == 250000);
    REQUIRE(cfg.paths[0].forward.delay == from_ms(10));
    REQUIRE(cfg.paths[1].forward.bandwidth_bps == 1000000);
    REQUIRE(cfg.paths[1].forward.delay == from_ms(30));
}

TEST_CASE("preset a4: a2 plus one forward background flow per path") {
    const auto cfg = preset_scenario("a4");
    REQUIRE(cfg.paths[0].forward.delay == from_ms(10));
    REQUIRE(cfg.paths[1].forward.delay == from_ms(30));
    for (const auto& p : cfg.paths) {
        REQUIRE(p.background_flows_fwd == 1);
        REQUIRE(p.background_flows_bwd == 0);
    }
}

TEST_CASE("preset a5: asymmetric backward links and background both ways") {
    const auto cfg = preset_scenario("a5");
    REQUIRE(cfg.paths[0].forward.bandwidth_bps == 500000);
    REQUIRE(cfg.paths[0].forward.delay == from_ms(10));
    REQUIRE(cfg.paths[0].backward.has_value());
    REQUIRE(cfg.paths[0].backward->bandwidth_bps == 62500); // 0.5 Mbps
    REQUIRE(cfg.paths[0].backward->delay == from_ms(15));
    REQUIRE(cfg.paths[1].forward.bandwidth_bps == 1000000);
    REQUIRE(cfg.paths[1].forward.delay == from_ms(30));
    REQUIRE(cfg.paths[1].backward->bandwidth_bps == 125000); // 1 Mbps
    REQUIRE(cfg.paths[1].backward->delay == from_ms(35));
    for (const auto& p : cfg.paths) {
        REQUIRE(p.background_flows_fwd == 1);
        REQUIRE(p.background_flows_bwd == 1);
    }
}

TEST_CASE("preset three-path: diverse bandwidths and delays with background") {
    const auto cfg = preset_scenario("three-path");
    REQUIRE(cfg.paths.size() == 3);
    REQUIRE(cfg.paths[0].forward.bandwidth_bps == 250000);
    REQUIRE(cfg.paths[1].forward.bandwidth_bps == 500000);
    REQUIRE(cfg.paths[2].forward.bandwidth_bps == 1000000);
    REQUIRE(cfg.paths[0].forward.delay == from_ms(10));
    REQUIRE(cfg.paths[1].forward.delay == from_ms(30));
    REQUIRE(cfg.paths[2].forward.delay == from_ms(50));
    for (const auto& p : cfg.paths) {
        REQUIRE(p.background_flows_fwd == 1);
    }
}

TEST_CASE("all preset names resolve") {
    for (const auto& name : preset_names()) {
        REQUIRE_NOTHROW(preset_scenario(name));
    }
    REQUIRE_THROWS_AS(preset_scenario("a9"), ScenarioError);
}

TEST_CASE("config files parse with defaults applied") {
    std::istringstream in(R"(
# two asymmetric paths
name = custom
scheduler = rtt-half
sim_seconds = 5
runs = 3
base_seed = 99
clock_offset_ms = -250

[path]
forward_bandwidth_mbps = 4
forward_delay_ms = 10

[path]
forward_bandwidth_mbps = 8
forward_delay_ms = 30
backward_bandwidth_mbps = 1
backward_delay_ms = 35
queue = droptail
background_flows_fwd = 2
)");
    const auto cfg = parse_scenario(in, "fallback");
    REQUIRE(cfg.name == "custom");
    REQUIRE(cfg.scheduler == "rtt-half");
    REQUIRE(cfg.sim_seconds == 5.0);
    REQUIRE(cfg.runs == 3);
    REQUIRE(cfg.base_seed == 99);
    REQUIRE(cfg.clock_offset == from_ms_f(-250));
    REQUIRE(cfg.paths.size() == 2);
    REQUIRE(cfg.paths[0].forward.bandwidth_bps == 500000);
    REQUIRE_FALSE(cfg.paths[0].backward.has_value()); // mirrors forward
    REQUIRE(cfg.paths[0].queue.policy == QueueSpec::Policy::red);
    REQUIRE(cfg.paths[1].backward->bandwidth_bps == 125000);
    REQUIRE(cfg.paths[1].backward->delay == from_ms(35));
    REQUIRE(cfg.paths[1].queue.policy == QueueSpec::Policy::drop_tail);
    REQUIRE(cfg.paths[1].background_flows_fwd == 2);
}

TEST_CASE("missing scheduler is a validation error") {
    std::istringstream in(R"(
name = x
[path]
forward_bandwidth_mbps = 4
forward_delay_ms = 10
)");
    REQUIRE_THROWS_WITH(parse_scenario(in, "x"),
                        Catch::Matchers::ContainsSubstring("scheduler"));
}

TEST_CASE("parse errors name the offending line") {
    std::istringstream in("name = x\nbogus line\n");
    REQUIRE_THROWS_WITH(parse_scenario(in, "x"), Catch::Matchers::ContainsSubstring("line 2"));
}

TEST_CASE("unknown keys are rejected") {
    std::istringstream in("name = x\nwhatever = 3\n");
    REQUIRE_THROWS_WITH(parse_scenario(in, "x"),
                        Catch::Matchers::ContainsSubstring("unknown scenario key"));
}

TEST_CASE("path keys outside a path section are rejected") {
    std::istringstream in("forward_delay_ms = 3\n");
    REQUIRE_THROWS_AS(parse_scenario(in, "x"), ScenarioError);
}

TEST_CASE("malformed numbers are rejected with the line number") {
    std::istringstream in("name = x\nscheduler = fifo\nruns = soon\n");
    REQUIRE_THROWS_WITH(parse_scenario(in, "x"), Catch::Matchers::ContainsSubstring("line 3"));
}

TEST_CASE("validation rejects out-of-range fields") {
    auto cfg = preset_scenario("a1");
    SECTION("unknown scheduler") {
        cfg.scheduler = "mtcs";
        REQUIRE_THROWS_AS(validate_scenario(cfg), ScenarioError);
    }
    SECTION("zero runs") {
        cfg.runs = 0;
        REQUIRE_THROWS_AS(validate_scenario(cfg), ScenarioError);
    }
    SECTION("mss larger than the packet") {
        cfg.mss = 2000;
        REQUIRE_THROWS_AS(validate_scenario(cfg), ScenarioError);
    }
    SECTION("too many paths") {
        cfg.paths.resize(9, cfg.paths[0]);
        REQUIRE_THROWS_AS(validate_scenario(cfg), ScenarioError);
    }
    SECTION("red knees out of order") {
        cfg.paths[0].queue.red_min_frac = 0.9;
        REQUIRE_THROWS_AS(validate_scenario(cfg), ScenarioError);
    }
}

TEST_CASE("load_scenario resolves presets before files") {
    REQUIRE(load_scenario("a2").name == "a2");
    REQUIRE_THROWS_AS(load_scenario("nosuch"), ScenarioError);
}

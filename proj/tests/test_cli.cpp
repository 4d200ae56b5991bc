#include "mpsched/cli.hpp"

#include <catch2/catch_amalgamated.hpp>

#include <filesystem>
#include <fstream>
#include <vector>

using namespace mpsched;

namespace {

int run_cli(std::vector<const char*> args) {
    args.insert(args.begin(), "mpsched");
    return cli_main(static_cast<int>(args.size()), args.data());
}

struct TempDir {
    std::filesystem::path path;
    explicit TempDir(const std::string& tag)
        : path(std::filesystem::temp_directory_path() / ("mpsched_cli_" + tag)) {
        std::filesystem::remove_all(path);
    }
    ~TempDir() { std::filesystem::remove_all(path); }
};

std::filesystem::path write_tiny_config(const std::filesystem::path& dir) {
    std::filesystem::create_directories(dir);
    const auto file = dir / "tiny.cfg";
    std::ofstream out(file);
    out << "name = tiny\n"
           "scheduler = fdps\n"
        "sim_seconds = 1\n"
        "runs = 1\n"
        "[path]\n"
        "forward_bandwidth_mbps = 4\n"
        "forward_delay_ms = 10\n"
        "[path]\n"
        "forward_bandwidth_mbps = 4\n"
        "forward_delay_ms = 30\n";
    return file;
}

} // namespace

TEST_CASE("presets subcommand succeeds") {
    REQUIRE(run_cli({"presets"}) == 0);
}

TEST_CASE("run executes a config file end to end") {
    TempDir dir("run");
    const auto cfg = write_tiny_config(dir.path);
    const auto out = (dir.path / "out").string();
    REQUIRE(run_cli({"run", "--scenario", cfg.c_str(), "--scheduler", "fifo", "--runs", "1",
                     "--seed", "7", "--out", out.c_str()}) == 0);
    REQUIRE(std::filesystem::exists(dir.path / "out" / "rbd_tiny_fifo.csv"));
    REQUIRE(std::filesystem::exists(dir.path / "out" / "rd_tiny_fifo.csv"));
    REQUIRE(std::filesystem::exists(dir.path / "out" / "summary.csv"));
}

TEST_CASE("compare runs every scheduler") {
    TempDir dir("compare");
    const auto cfg = write_tiny_config(dir.path);
    const auto out = (dir.path / "out").string();
    REQUIRE(run_cli({"compare", "--scenario", cfg.c_str(), "--out", out.c_str()}) == 0);
    for (const char* s : {"fifo", "rtt-half", "fdps"}) {
        REQUIRE(std::filesystem::exists(dir.path / "out" / ("rbd_tiny_" + std::string(s) + ".csv")));
    }
    REQUIRE(std::filesystem::exists(dir.path / "out" / "table.txt"));
}

TEST_CASE("unknown scenarios exit with the validation code") {
    TempDir dir("bad");
    const auto out = (dir.path / "out").string();
    REQUIRE(run_cli({"run", "--scenario", "nosuch", "--scheduler", "fifo", "--out",
                     out.c_str()}) == 1);
}

TEST_CASE("unknown scheduler names exit with the validation code") {
    TempDir dir("badsched");
    const auto cfg = write_tiny_config(dir.path);
    const auto out = (dir.path / "out").string();
    REQUIRE(run_cli({"run", "--scenario", cfg.c_str(), "--scheduler", "mtcs", "--out",
                     out.c_str()}) == 1);
}

TEST_CASE("unknown flags exit with the usage code") {
    REQUIRE(run_cli({"run", "--scenario", "a1", "--bogus"}) == 1);
    REQUIRE(run_cli({"frobnicate"}) == 1);
    REQUIRE(run_cli({}) == 1);
}

TEST_CASE("help exits zero") {
    REQUIRE(run_cli({"--help"}) == 0);
}

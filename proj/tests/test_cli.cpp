#include <array>
#include <cstdio>
#include <cstdlib>
#include <string>

#include "doctest.h"
#include "tilelab/core.hpp"

namespace {

struct CliResult {
    int exit_code = -1;
    std::string out;
};

CliResult run_cli(const std::string& args) {
    const char* bin = std::getenv("TILELAB_BIN");
    REQUIRE(bin != nullptr);
    std::string cmd = std::string(bin) + " " + args + " 2>&1";
    FILE* p = popen(cmd.c_str(), "r");
    REQUIRE(p != nullptr);
    CliResult r;
    std::array<char, 4096> buf;
    size_t n;
    while ((n = fread(buf.data(), 1, buf.size(), p)) > 0) r.out.append(buf.data(), n);
    int status = pclose(p);
    r.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    return r;
}

std::string fx(const std::string& name) {
    const char* dir = std::getenv("TILELAB_FIXTURES");
    REQUIRE(dir != nullptr);
    return std::string(dir) + "/" + name;
}

}  // namespace

TEST_CASE("tileset check") {
    CHECK(run_cli("tileset check " + fx("grid.tiles")).exit_code == 0);
    CHECK(run_cli("tileset check " + fx("counting.layers")).exit_code == 0);
    CHECK(run_cli("tileset check /nonexistent.tiles").exit_code == 2);
}

TEST_CASE("solve matches the golden tiling and reports failures") {
    // pinned crosses reproduce the canonical grid window byte for byte
    auto r = run_cli("solve --tileset " + fx("grid.tiles") + " --width 4 --height 4 --bc " +
                     fx("pin_cross.bc"));
    CHECK(r.exit_code == 0);
    CHECK(r.out == tilelab::read_file(fx("solve_cross_4x4.tiling")));

    // contradictory pins: well-formed negative, exit 1
    tilelab::write_file("/tmp/bad.bc", "pin 0 0 (cross)\npin 1 0 (bg_g)\n");
    CHECK(run_cli("solve --tileset " + fx("grid.tiles") +
                  " --width 2 --height 1 --bc /tmp/bad.bc")
              .exit_code == 1);

    // missing file: usage error, exit 2
    CHECK(run_cli("solve --tileset /nope.tiles --width 2 --height 2").exit_code == 2);
    // missing required option: usage error
    CHECK(run_cli("solve --width 2 --height 2").exit_code == 2);
}

TEST_CASE("count and enumerate") {
    auto r = run_cli("count --tileset " + fx("grid.tiles") + " --width 3 --height 3 --torus");
    CHECK(r.exit_code == 0);
    CHECK(r.out == "11\n");
    auto e = run_cli("enumerate --tileset " + fx("grid.tiles") +
                     " --width 2 --height 1 --limit 3");
    CHECK(e.exit_code == 0);
    CHECK(e.out.find("3 tilings") != std::string::npos);
}

TEST_CASE("render reproduces the golden text") {
    auto r = run_cli("render --tileset " + fx("grid.tiles") + " --tiling " +
                     fx("xgrid3_6x6.tiling"));
    CHECK(r.exit_code == 0);
    CHECK(r.out == tilelab::read_file(fx("xgrid3_6x6.txt")));
    auto svg = run_cli("render --tileset " + fx("grid.tiles") + " --tiling " +
                       fx("xgrid3_6x6.tiling") + " --render-format svg");
    CHECK(svg.exit_code == 0);
    CHECK(svg.out.rfind("<svg", 0) == 0);
    // the tiling file hash guards against the wrong tile set
    CHECK(run_cli("render --tileset " + fx("nwdemo.tiles") + " --tiling " +
                  fx("xgrid3_6x6.tiling"))
              .exit_code == 2);
}

TEST_CASE("gap subcommands") {
    CHECK(run_cli("gap member --f \"expr: n\" --word 101").exit_code == 1);
    CHECK(run_cli("gap member --f \"expr: n+1\" --word 101").exit_code == 0);
    auto r = run_cli("gap member --f \"expr: n\" --left 0 --mid 1001001 --right 0");
    CHECK(r.exit_code == 1);
    auto rec = run_cli("gap recover --f \"expr: 2*n\" --n 3");
    CHECK(rec.exit_code == 0);
    CHECK(rec.out == "6\n");
    auto v = run_cli("gap fx --f \"expr: n+2\" --cores 101,1001 --n 1");
    CHECK(v.exit_code == 0);
    CHECK(v.out == "2\n");
    CHECK(run_cli("gap gmember --f \"expr: n\" --b 1 --alphabet \"p q r\" "
                  "--left p --mid q --right p")
              .exit_code == 0);
    CHECK(run_cli("gap gmember --f \"expr: 0\" --b 1 --alphabet \"p q r\" "
                  "--left p --mid qpppq --right p")
              .exit_code == 1);
    CHECK(run_cli("gap member --f \"expr: )bad(\" --word 1").exit_code == 2);
}

TEST_CASE("cm subcommands") {
    auto r = run_cli("cm run --machine " + fx("machines/count3.cm"));
    CHECK(r.exit_code == 0);
    CHECK(r.out.find("accepted") != std::string::npos);
    auto c = run_cli("cm compile --machine " + fx("machines/count3.cm"));
    CHECK(c.exit_code == 0);
    auto v = run_cli("cm verify --machine " + fx("machines/count3.cm"));
    CHECK(v.exit_code == 0);
    CHECK(v.out.find("0 violations") != std::string::npos);
}

TEST_CASE("verify suites and formats") {
    auto r = run_cli("verify widthrestrict");
    CHECK(r.exit_code == 0);
    CHECK(r.out.find("PASS widthrestrict") != std::string::npos);
    auto j = run_cli("--format json verify widthrestrict");
    CHECK(j.exit_code == 0);
    CHECK(j.out.find("\"pass\": true") != std::string::npos);
    CHECK(run_cli("verify bogus").exit_code == 2);
}

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "pathsum/cli_app.hpp"
#include "pathsum/special_functions.hpp"

using namespace pathsum;
namespace fs = std::filesystem;

namespace {

struct RunResult {
    int code = -1;
    std::string out;
    std::string err;
};

RunResult run(std::vector<std::string> args) {
    std::ostringstream out, err;
    RunResult r;
    r.code = run_cli(args, out, err);
    r.out = out.str();
    r.err = err.str();
    return r;
}

std::vector<std::string> split_lines(const std::string& text) {
    std::vector<std::string> lines;
    std::istringstream in(text);
    std::string line;
    while (std::getline(in, line)) lines.push_back(line);
    return lines;
}

std::vector<std::string> split_csv(const std::string& line) {
    std::vector<std::string> cells;
    std::istringstream in(line);
    std::string cell;
    while (std::getline(in, cell, ',')) cells.push_back(cell);
    return cells;
}

fs::path temp_file(const std::string& stem) {
    return fs::temp_directory_path() / ("oe_cli_test_" + stem);
}

void write_file(const fs::path& p, const std::string& content) {
    std::ofstream f(p);
    f << content;
}

} // namespace

TEST_CASE("compute: one entry as csv against the closed form") {
    const RunResult r = run({"compute", "--matrix", "data/triangle.json",
                             "--grid", "101", "--entry", "1,1"});
    REQUIRE(r.code == 0);
    CHECK(r.err.empty());
    const auto lines = split_lines(r.out);
    REQUIRE(lines.size() == 102);
    CHECK(lines[0] == "t,value");
    CHECK(lines[1] == "0,1");
    double worst = 0.0;
    for (std::size_t i = 1; i < lines.size(); ++i) {
        const auto cells = split_csv(lines[i]);
        REQUIRE(cells.size() == 2);
        const double t = std::strtod(cells[0].c_str(), nullptr);
        const double v = std::strtod(cells[1].c_str(), nullptr);
        worst = std::max(worst, std::abs(v - hyp0f2(0.25, 0.5, t * t * t * t / 64.0)));
    }
    CHECK(worst <= 1e-3);
}

TEST_CASE("compute: all entries as csv") {
    const RunResult r = run({"compute", "--matrix", "data/triangle.json",
                             "--grid", "21", "--all"});
    REQUIRE(r.code == 0);
    const auto lines = split_lines(r.out);
    REQUIRE(lines.size() == 22);
    CHECK(lines[0] ==
          "t,e1_1,e1_2,e1_3,e2_1,e2_2,e2_3,e3_1,e3_2,e3_3");
    CHECK(split_csv(lines[1]).size() == 10);
}

TEST_CASE("compute: json document shape") {
    const RunResult r = run({"compute", "--matrix", "data/triangle.json",
                             "--grid", "21", "--all", "--format", "json"});
    REQUIRE(r.code == 0);
    const nlohmann::json doc = nlohmann::json::parse(r.out);
    CHECK(doc["n"] == 3);
    CHECK(doc["grid"] == 21);
    CHECK(doc["interval"][0] == 0.0);
    CHECK(doc["interval"][1] == 2.0);
    CHECK(doc["t"].size() == 21);
    REQUIRE(doc["entries"].size() == 9);
    const auto& first = doc["entries"][0];
    CHECK(first["row"] == 1);
    CHECK(first["col"] == 1);
    CHECK(first["values"].size() == 21);
    CHECK(first["values"][0] == 1.0);
    CHECK(first.contains("paths_used"));
    CHECK(first.contains("cycles_used"));
    CHECK(first.contains("recursion_depth"));
}

TEST_CASE("compute: reruns are byte-identical") {
    const std::vector<std::string> args{"compute", "--matrix",
                                        "data/k2_loops.json", "--grid", "51",
                                        "--all"};
    const RunResult a = run(args);
    const RunResult b = run(args);
    REQUIRE(a.code == 0);
    CHECK(a.out == b.out);
}

TEST_CASE("compute: --out writes the same bytes to a file") {
    const fs::path path = temp_file("triangle.csv");
    const RunResult direct = run({"compute", "--matrix", "data/triangle.json",
                                  "--grid", "21", "--entry", "2,1"});
    const RunResult filed = run({"compute", "--matrix", "data/triangle.json",
                                 "--grid", "21", "--entry", "2,1", "--out",
                                 path.string()});
    REQUIRE(direct.code == 0);
    REQUIRE(filed.code == 0);
    CHECK(filed.out.empty());
    std::ifstream in(path, std::ios::binary);
    std::stringstream content;
    content << in.rdbuf();
    CHECK(content.str() == direct.out);
    fs::remove(path);

    const RunResult bad = run({"compute", "--matrix", "data/triangle.json",
                               "--grid", "21", "--entry", "2,1", "--out",
                               "/nonexistent_dir_zz/x.csv"});
    CHECK(bad.code == 2);
    CHECK(bad.err.find("cannot open") != std::string::npos);
}

TEST_CASE("verify: looped two-vertex matrix passes the default gate") {
    const RunResult r = run({"verify", "--matrix", "data/k2_loops.json",
                             "--grid", "201", "--substeps", "4"});
    REQUIRE(r.code == 0);
    CHECK(r.out.find("engine_vs_rk4 ") != std::string::npos);
    CHECK(r.out.find("engine_vs_neumann ") != std::string::npos);
    CHECK(r.out.find("ode_residual ") != std::string::npos);
    CHECK(r.out.find("neumann_order ") != std::string::npos);
    CHECK(r.out.find("verdict pass") != std::string::npos);
}

TEST_CASE("verify: an impossible tolerance turns the verdict") {
    const RunResult r = run({"verify", "--matrix", "data/k2_loops.json",
                             "--grid", "101", "--tolerance", "1e-9"});
    CHECK(r.code == 1);
    CHECK(r.out.find("verdict fail") != std::string::npos);
}

TEST_CASE("bounds: tridiagonal sweep matches the Bessel closed form") {
    const RunResult r = run({"bounds", "--structure", "tridiagonal", "--h", "1",
                             "--elapsed", "1", "--d", "0..5"});
    REQUIRE(r.code == 0);
    const auto lines = split_lines(r.out);
    REQUIRE(lines.size() == 7);
    CHECK(lines[0] == "d,bound");
    for (int d = 0; d <= 5; ++d) {
        const auto cells = split_csv(lines[static_cast<std::size_t>(d) + 1]);
        REQUIRE(cells.size() == 2);
        CHECK(cells[0] == std::to_string(d));
        const double v = std::strtod(cells[1].c_str(), nullptr);
        const double want = std::exp(1.0) * bessel_i(d, 2.0);
        CHECK(std::abs(v - want) <= 1e-13 * want);
    }
}

TEST_CASE("bounds: hypercube and lattice structures") {
    const RunResult hc = run({"bounds", "--structure", "hypercube", "--h", "0.5",
                              "--beta", "2", "--elapsed", "1", "--N", "3",
                              "--d", "2"});
    REQUIRE(hc.code == 0);
    const auto hl = split_lines(hc.out);
    REQUIRE(hl.size() == 2);
    const double got = std::strtod(split_csv(hl[1])[1].c_str(), nullptr);
    const double want = std::exp(1.0) * std::sinh(1.0) * std::sinh(1.0) *
                        std::cosh(1.0);
    CHECK(std::abs(got - want) <= 1e-13 * want);

    const RunResult lat = run({"bounds", "--structure", "lattice", "--h", "1",
                               "--elapsed", "1", "--coords", "1,2"});
    REQUIRE(lat.code == 0);
    const auto ll = split_lines(lat.out);
    REQUIRE(ll.size() == 2);
    const auto cells = split_csv(ll[1]);
    CHECK(cells[0] == "3"); // total displacement
    const double lv = std::strtod(cells[1].c_str(), nullptr);
    const double lw = std::exp(1.0) * bessel_i(1, 2.0) * bessel_i(2, 2.0);
    CHECK(std::abs(lv - lw) <= 1e-13 * lw);
}

TEST_CASE("bounds: structure errors") {
    CHECK(run({"bounds", "--structure", "moebius", "--d", "1"}).code == 2);
    CHECK(run({"bounds", "--structure", "lattice"}).code == 2);
    CHECK(run({"bounds", "--structure", "bethe", "--N", "1", "--d", "1"}).code == 2);
    CHECK(run({"bounds"}).code == 2); // neither --structure nor --matrix
}

TEST_CASE("bounds: matrix mode keeps the propagator under the envelope") {
    const RunResult r = run({"bounds", "--matrix", "data/triangle.json",
                             "--grid", "101", "--entry", "3,1"});
    REQUIRE(r.code == 0);
    const auto lines = split_lines(r.out);
    REQUIRE(lines.size() == 102);
    CHECK(lines[0] == "t,value,bound");
    for (std::size_t i = 1; i < lines.size(); ++i) {
        const auto cells = split_csv(lines[i]);
        REQUIRE(cells.size() == 3);
        const double v = std::strtod(cells[1].c_str(), nullptr);
        const double b = std::strtod(cells[2].c_str(), nullptr);
        CHECK(std::abs(v) <= b * (1.0 + 1e-12));
    }

    const RunResult j = run({"bounds", "--matrix", "data/triangle.json",
                             "--grid", "51", "--entry", "3,1", "--format",
                             "json"});
    REQUIRE(j.code == 0);
    const nlohmann::json doc = nlohmann::json::parse(j.out);
    CHECK(doc["distance"] == 1);
    CHECK(doc["reachable"] == true);
    CHECK(doc["max_violation"] == 0.0);
    CHECK(doc["h"] == 2.0);
}

TEST_CASE("graph: structure report for the triangle") {
    const RunResult r = run({"graph", "--matrix", "data/triangle.json"});
    REQUIRE(r.code == 0);
    const nlohmann::json doc = nlohmann::json::parse(r.out);
    CHECK(doc["n"] == 3);
    CHECK(doc["max_degree"] == 1);
    const auto edges = doc["edges"];
    REQUIRE(edges.size() == 3);
    CHECK(edges[0] == nlohmann::json({1, 3}));
    CHECK(edges[1] == nlohmann::json({2, 1}));
    CHECK(edges[2] == nlohmann::json({3, 2}));
    CHECK(doc["distance"][0][1] == 2);
    CHECK(doc["distance"][0][2] == 1);

    bool found = false;
    for (const auto& item : doc["paths"]) {
        if (item["from"] == 1 && item["to"] == 2) {
            REQUIRE(item["paths"].size() == 1);
            CHECK(item["paths"][0] == nlohmann::json({1, 3, 2}));
            found = true;
        }
    }
    CHECK(found);
    CHECK(doc["cycles"][0]["anchor"] == 1);
    REQUIRE(doc["cycles"][0]["cycles"].size() == 1);
    CHECK(doc["cycles"][0]["cycles"][0] == nlohmann::json({1, 3, 2, 1}));
}

TEST_CASE("graph: disconnected pairs print as null distances") {
    const fs::path path = temp_file("diag.json");
    write_file(path, R"({"n": 2, "interval": [0.0, 1.0],
                         "entries": [{"row": 1, "col": 1, "expr": "1"}]})");
    const RunResult r = run({"graph", "--matrix", path.string()});
    REQUIRE(r.code == 0);
    const nlohmann::json doc = nlohmann::json::parse(r.out);
    CHECK(doc["distance"][0][1].is_null());
    CHECK(doc["distance"][1][1] == 0);
    fs::remove(path);
}

TEST_CASE("input failures exit with code 2 and explain themselves") {
    const RunResult missing = run({"compute", "--matrix", "no_such_file.json"});
    CHECK(missing.code == 2);
    CHECK(missing.err.find("no_such_file.json") != std::string::npos);

    const fs::path broken = temp_file("broken.json");
    write_file(broken, "{ this is not json");
    const RunResult bad = run({"compute", "--matrix", broken.string()});
    CHECK(bad.code == 2);
    fs::remove(broken);

    const fs::path badkey = temp_file("badkey.json");
    write_file(badkey, R"({"n": 2, "interval": [0.0, 1.0],
                           "entries": [{"row": 1, "expr": "1"}]})");
    const RunResult key = run({"compute", "--matrix", badkey.string()});
    CHECK(key.code == 2);
    CHECK(key.err.find("col") != std::string::npos);
    fs::remove(badkey);

    CHECK(run({"compute", "--matrix", "data/triangle.json", "--entry", "5,1"})
              .code == 2);
    CHECK(run({"compute", "--matrix", "data/triangle.json", "--entry", "zz"})
              .code == 2);
    CHECK(run({"compute"}).code == 2);        // --matrix is required
    CHECK(run({"somersault"}).code == 2);     // unknown subcommand
    CHECK(run({}).code == 2);                 // a subcommand is required
}

TEST_CASE("numeric failures exit with code 3") {
    const fs::path path = temp_file("singular.json");
    write_file(path, R"({"n": 1, "interval": [0.0, 1.0],
                         "entries": [{"row": 1, "col": 1, "expr": "1/t"}]})");
    const RunResult r = run({"compute", "--matrix", path.string(), "--grid", "11"});
    CHECK(r.code == 3);
    CHECK(!r.err.empty());
    fs::remove(path);
}

TEST_CASE("help requests succeed") {
    const RunResult top = run({"--help"});
    CHECK(top.code == 0);
    CHECK(top.out.find("compute") != std::string::npos);
    CHECK(top.out.find("verify") != std::string::npos);
    CHECK(top.out.find("bounds") != std::string::npos);
    CHECK(top.out.find("graph") != std::string::npos);
    CHECK(run({"compute", "--help"}).code == 0);
    CHECK(run({"bounds", "--help"}).code == 0);
}

TEST_CASE("degenerate one-vertex matrix stays at one") {
    const fs::path path = temp_file("null1x1.json");
    write_file(path, R"({"n": 1, "interval": [0.0, 1.0],
                         "entries": [{"row": 1, "col": 1, "expr": "0"}]})");
    const RunResult r = run({"compute", "--matrix", path.string(), "--grid", "11"});
    REQUIRE(r.code == 0);
    const auto lines = split_lines(r.out);
    REQUIRE(lines.size() == 12);
    for (std::size_t i = 1; i < lines.size(); ++i)
        CHECK(split_csv(lines[i])[1] == "1");
    fs::remove(path);
}

TEST_CASE("force_nonzero in the file controls the graph") {
    const fs::path path = temp_file("forced.json");
    write_file(path, R"({"n": 2, "interval": [0.0, 1.0], "entries": [
        {"row": 1, "col": 2, "expr": "0", "force_nonzero": true},
        {"row": 2, "col": 1, "expr": "1", "force_nonzero": false}]})");
    const RunResult r = run({"graph", "--matrix", path.string()});
    REQUIRE(r.code == 0);
    const nlohmann::json doc = nlohmann::json::parse(r.out);
    REQUIRE(doc["edges"].size() == 1);
    CHECK(doc["edges"][0] == nlohmann::json({2, 1})); // the forced-on zero entry
    fs::remove(path);
}

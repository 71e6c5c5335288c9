#include <doctest.h>
#include <json.hpp>

#include <fstream>
#include <iostream>
#include <sstream>

#include "commands.hpp"

using loewner_lab::cli::dispatch;

namespace {

struct Captured {
    int code;
    std::string out, err;
};

Captured run(const std::vector<std::string>& args) {
    std::ostringstream out, err;
    auto* o = std::cout.rdbuf(out.rdbuf());
    auto* e = std::cerr.rdbuf(err.rdbuf());
    const int code = dispatch(args);
    std::cout.rdbuf(o);
    std::cerr.rdbuf(e);
    return {code, out.str(), err.str()};
}

std::string slurp(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    std::ostringstream s;
    s << f.rdbuf();
    return s.str();
}

nlohmann::json manifest(const Captured& c) {
    const auto start = c.err.rfind("\n{");
    return nlohmann::json::parse(start == std::string::npos ? c.err : c.err.substr(start + 1));
}

}  // namespace

TEST_CASE("trace CSV has one row per grid time") {
    const Captured c = run({"sle", "trace", "--kappa", "6", "--t", "1", "--dt", "1e-4", "--seed", "7", "--out", "trace.csv"});
    REQUIRE(c.code == 0);
    const std::string csv = slurp("trace.csv");
    int lines = 0;
    for (char ch : csv) lines += ch == '\n';
    CHECK(lines == 10001 + 1);  // header plus 10^4 + 1 rows

    const auto m = manifest(c);
    CHECK(m["seed"] == 7);
    CHECK(m["command"] == "sle trace");
    CHECK(m["params"]["kappa"] == "6");
    CHECK(m["outputs"][0]["path"] == "trace.csv");
    CHECK(m.contains("version"));
    CHECK(m.contains("wall_seconds"));
}

TEST_CASE("identical flags give byte-identical output") {
    for (const auto& args : std::vector<std::vector<std::string>>{
             {"sle", "trace", "--kappa", "3", "--dt", "1e-3", "--seed", "5"},
             {"lattice", "perc", "--cols", "16", "--rows", "16", "--seed", "3"},
             {"lattice", "lerw", "--n", "20", "--seed", "3"},
             {"growth", "dla", "--n", "50", "--seed", "3"},
             {"estimate", "hitting", "--paths", "50", "--seed", "3", "--threads", "1"}}) {
        const Captured a = run(args), b = run(args);
        CHECK(a.code == 0);
        CHECK(a.out == b.out);
        CHECK_FALSE(a.out.empty());
    }
}

TEST_CASE("thread count does not change results") {
    const Captured a = run({"estimate", "hitting", "--paths", "200", "--seed", "3", "--threads", "1"});
    const Captured b = run({"estimate", "hitting", "--paths", "200", "--seed", "3", "--threads", "3"});
    CHECK(a.out == b.out);
}

TEST_CASE("default seed is recorded and reproduces the run") {
    const Captured a = run({"sle", "trace", "--dt", "1e-2"});
    REQUIRE(a.code == 0);
    const auto seed = manifest(a)["seed"].get<std::uint64_t>();
    const Captured b = run({"sle", "trace", "--dt", "1e-2", "--seed", std::to_string(seed)});
    CHECK(a.out == b.out);
}

TEST_CASE("oracle output") {
    const Captured c = run({"oracle", "cardy-triangle", "--x", "0.3"});
    REQUIRE(c.code == 0);
    const auto j = nlohmann::json::parse(c.out);
    CHECK(j["value"].get<double>() == doctest::Approx(0.3));
    CHECK(j.contains("method"));
    CHECK(j.contains("tolerance"));

    const Captured r = run({"oracle", "restriction", "--x", "1", "--r", "0.4"});
    CHECK(nlohmann::json::parse(r.out)["value"].get<double>() == doctest::Approx(std::pow(0.84, 0.625)));
}

TEST_CASE("usage errors exit with 2") {
    CHECK(run({"oracle", "cardy-triangle", "--x", "0.3", "--kappa", "4"}).code == 2);
    CHECK(run({"sle", "trace", "--bogus"}).code == 2);
    CHECK(run({"sle"}).code == 2);
    CHECK(run({}).code == 2);
    CHECK(run({"sle", "trace", "--geometry", "elliptic"}).code == 2);
    CHECK(run({"oracle", "hitting", "--x", "1", "--X", "2", "--kappa", "3"}).code == 2);
    CHECK(run({"verify", "--suite", "nope"}).code == 2);
}

TEST_CASE("numeric failures exit with 1") {
    const Captured c = run({"growth", "lg-zn", "--n", "3", "--t", "1"});
    CHECK(c.code == 1);
    CHECK(c.err.find("cusp") != std::string::npos);
    CHECK(manifest(c)["exit_code"] == 1);
}

TEST_CASE("every subcommand has help") {
    for (const auto& args : std::vector<std::vector<std::string>>{
             {"--help"}, {"sle", "--help"}, {"sle", "trace", "--help"}, {"sle", "hull", "--help"},
             {"sle", "classify", "--help"}, {"lattice", "perc", "--help"}, {"lattice", "navigator", "--help"},
             {"lattice", "lerw", "--help"}, {"lattice", "saw", "--help"}, {"growth", "lg-zn", "--help"},
             {"growth", "lg-evolve", "--help"}, {"growth", "hl", "--help"}, {"growth", "dla", "--help"},
             {"oracle", "--help"}, {"oracle", "arch", "--help"}, {"estimate", "dim", "--help"},
             {"estimate", "crossing", "--help"}, {"estimate", "hitting", "--help"},
             {"estimate", "leftpass", "--help"}, {"verify", "--help"}}) {
        const Captured c = run(args);
        CHECK(c.code == 0);
        CHECK(c.out.find("--help") != std::string::npos);
    }
}

TEST_CASE("config file fills unset flags") {
    {
        std::ofstream f("run.cfg");
        f << "kappa = 2\ndt = 0.01\nseed = 11\n";
    }
    const Captured a = run({"sle", "trace", "--config", "run.cfg", "--t", "0.5"});
    const Captured b = run({"sle", "trace", "--kappa", "2", "--dt", "0.01", "--seed", "11", "--t", "0.5"});
    REQUIRE(a.code == 0);
    CHECK(a.out == b.out);
    // flags win over the file
    const Captured c = run({"sle", "trace", "--config", "run.cfg", "--kappa", "5", "--t", "0.5"});
    CHECK(manifest(c)["params"]["kappa"] == "5");
    {
        std::ofstream f("bad.cfg");
        f << "nonsense = 1\n";
    }
    CHECK(run({"sle", "trace", "--config", "bad.cfg"}).code == 2);
}

TEST_CASE("svg rendering and viewport flags") {
    const Captured c =
        run({"lattice", "perc", "--cols", "8", "--rows", "8", "--seed", "1", "--out", "p.csv", "--svg", "p.svg", "--width", "320",
             "--height", "240", "--margin", "5"});
    REQUIRE(c.code == 0);
    const std::string svg = slurp("p.svg");
    CHECK(svg.find("width=\"320\"") != std::string::npos);
    CHECK(manifest(c)["outputs"].size() == 2);
}

TEST_CASE("other subcommands run") {
    CHECK(run({"sle", "hull", "--kappa", "6", "--dt", "1e-2", "--grid", "5", "--seed", "1"}).code == 0);
    CHECK(run({"sle", "trace", "--geometry", "radial", "--dt", "1e-2", "--t", "0.2", "--seed", "1"}).code == 0);
    CHECK(run({"sle", "trace", "--geometry", "dipolar", "--rho", "1", "--dt", "1e-2", "--t", "0.2", "--seed", "1"}).code == 0);
    CHECK(run({"sle", "trace", "--rho", "1"}).code == 2);
    CHECK(run({"sle", "classify", "--kappa", "4", "--paths", "20", "--z", "0,1", "--z", "1,2", "--seed", "1"}).code == 0);
    CHECK(run({"lattice", "navigator", "--variant", "anti", "--cols", "10", "--rows", "10", "--seed", "1"}).code == 0);
    CHECK(run({"lattice", "saw", "--n", "20", "--burn-in", "100", "--measurements", "10", "--seed", "1"}).code == 0);
    CHECK(run({"growth", "lg-evolve", "--coeff", "1,0", "--coeff", "0,0", "--coeff", "0.05,0.01", "--t", "0.1", "--steps", "5"})
              .code == 0);
    CHECK(run({"growth", "hl", "--n", "50", "--seed", "1"}).code == 0);
    CHECK(run({"estimate", "dim", "--model", "lerw", "--sizes", "4,8,16", "--samples", "10", "--seed", "1"}).code == 0);
    CHECK(run({"estimate", "crossing", "--n", "16", "--samples", "100", "--seed", "1"}).code == 0);
    CHECK(run({"estimate", "leftpass", "--paths", "20", "--seed", "1"}).code == 0);
    CHECK(run({"oracle", "loop-series", "--matrix", "0,0.5,0.5,0", "--alpha", "1"}).code == 0);
    CHECK(run({"oracle", "arch", "--x", "0.3", "--kappa", "4", "--which", "II"}).code == 0);
    const Captured v = run({"verify", "--suite", "loop-erasure", "--seed", "1"});
    CHECK(v.code == 0);
    CHECK(v.out.find("PASS criterion 3") != std::string::npos);
}

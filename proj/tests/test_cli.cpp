#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cstdio>
#include <fstream>
#include <sstream>

#include "cvqc/cli.hpp"

using namespace cvqc;

namespace {

struct CliResult {
    int exit;
    std::string out, err;
};

CliResult run_cli(std::vector<std::string> args) {
    std::vector<const char*> argv{"cvqc"};
    for (auto& a : args) argv.push_back(a.c_str());
    std::ostringstream out, err;
    int rc = cli::run(int(argv.size()), argv.data(), out, err);
    return {rc, out.str(), err.str()};
}

std::string slurp(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    std::ostringstream ss;
    ss << f.rdbuf();
    return ss.str();
}

} // namespace

TEST_CASE("compile writes a circuit file with a machine report") {
    std::string path = "/tmp/cvqc_test_toffoli.json";
    auto r = run_cli({"compile", "--gate", "toffoli", "--strategy", "3", "--out", path});
    CHECK(r.exit == 0);
    CHECK(r.out.find("4 non-Gaussian + 3 Gaussian") != std::string::npos);
    auto j = circuit::json::parse(slurp(path));
    CHECK(j["schema_version"] == 1);
    CHECK(j["metadata"]["counts"]["non_gaussian"] == 4);
    auto rep = circuit::json::parse(slurp(path + ".report.json"));
    CHECK(rep["verification"]["all_pass"] == true);
    std::remove(path.c_str());
    std::remove((path + ".report.json").c_str());
}

TEST_CASE("compile small-example strategy 2 reports 5 non-Gaussian modes") {
    auto r = run_cli({"compile", "--gate", "small-example", "--strategy", "2"});
    CHECK(r.exit == 0);
    CHECK(r.out.find("5 non-Gaussian + 2 Gaussian") != std::string::npos);
}

TEST_CASE("compile a wrapper-only circuit for the zero gate") {
    auto r = run_cli({"compile", "--gate", "custom", "--poly", "0*x1*x2"});
    CHECK(r.exit == 0);
    CHECK(r.out.find("0 non-Gaussian") != std::string::npos);
}

TEST_CASE("exit codes") {
    CHECK(run_cli({"compile", "--gate", "no-such-gate"}).exit == 2);
    CHECK(run_cli({"compile", "--gate", "custom"}).exit == 2); // missing --poly
    CHECK(run_cli({"compile", "--gate", "custom", "--poly", "x1^2 +"}).exit == 2);
    CHECK(run_cli({"compile", "--gate", "cphase"}).exit == 2); // missing --N
    // strategy 2 on a non-homogeneous gate is a planning failure
    CHECK(run_cli({"compile", "--gate", "custom", "--poly", "x1^3 + x1", "--strategy", "2"}).exit == 3);
    // unwritable output path
    CHECK(run_cli({"compile", "--gate", "toffoli", "--out", "/no/such/dir/x.json"}).exit == 4);
    CHECK(run_cli({"bogus-command"}).exit == 2);
}

TEST_CASE("determinism: identical invocations give byte-identical files") {
    std::string a = "/tmp/cvqc_det_a.json", b = "/tmp/cvqc_det_b.json", c = "/tmp/cvqc_det_c.json";
    for (auto& path : {a, b, c}) {
        auto r = run_cli({"compile", "--gate", "small-example", "--strategy", "2", "--seed", "5",
                          "--out", path});
        CHECK(r.exit == 0);
    }
    CHECK(slurp(a) == slurp(b));
    CHECK(slurp(b) == slurp(c));
    CHECK(slurp(a + ".report.json") == slurp(b + ".report.json"));
    CHECK(slurp(b + ".report.json") == slurp(c + ".report.json"));
    for (auto& path : {a, b, c}) {
        std::remove(path.c_str());
        std::remove((path + ".report.json").c_str());
    }
}

TEST_CASE("count command") {
    auto r = run_cli({"count", "--gate", "cnz", "--N", "6", "--strategy", "2"});
    CHECK(r.exit == 0);
    CHECK(r.out.find("(constructed): 114") != std::string::npos);

    auto r1 = run_cli({"count", "--gate", "cphase", "--N", "5", "--strategy", "1"});
    CHECK(r1.out.find("(constructed): 6") != std::string::npos);
}

TEST_CASE("table command") {
    auto r = run_cli({"table"});
    CHECK(r.exit == 0);
    CHECK(r.out.find("3936 vs 3936 ok") != std::string::npos);
    CHECK(r.out.find("768 vs 768 ok") != std::string::npos);
    // strategy-II reference values are flagged, not fatal
    CHECK(r.out.find("!!") != std::string::npos);
    CHECK(r.out.find("note:") != std::string::npos);
}

TEST_CASE("decompose command") {
    auto r = run_cli({"decompose", "--gate", "custom", "--poly", "x1*x2^2 + x1^3"});
    CHECK(r.exit == 0);
    CHECK(r.out.find("terms:") != std::string::npos);

    auto rw = run_cli({"decompose", "--gate", "toffoli", "--kind", "waring"});
    CHECK(rw.exit == 0);
    CHECK(rw.out.find("terms: 4") != std::string::npos);
    CHECK(rw.out.find("1/24") != std::string::npos);
}

TEST_CASE("decompose-hamiltonian command") {
    auto r = run_cli({"decompose-hamiltonian", "--op", "x1*x2*p1*p2 + p1*p2*x1*x2"});
    CHECK(r.exit == 0);
    CHECK(r.out.find("[x1^2*x2, p1^2*p2]") != std::string::npos);
    CHECK(r.out.find("generator regrouping: exact") != std::string::npos);

    auto bad = run_cli({"decompose-hamiltonian", "--op", "x1*p1"});
    CHECK(bad.exit == 2);
}

TEST_CASE("examples command") {
    auto r = run_cli({"examples"});
    CHECK(r.exit == 0);
    CHECK(r.out.find("all examples reproduced") != std::string::npos);
}

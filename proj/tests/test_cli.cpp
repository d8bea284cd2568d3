#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>

#ifndef LK_CLI_PATH
#error "LK_CLI_PATH must point at the built CLI binary"
#endif

namespace {

struct RunResult {
    int exit_code = -1;
    std::string out;
};

RunResult run(const std::string& args) {
    std::string out_file = "cli_test_stdout.tmp";
    std::string cmd =
        std::string(LK_CLI_PATH) + " " + args + " > " + out_file + " 2>&1";
    int rc = std::system(cmd.c_str());
    RunResult r;
    r.exit_code = WEXITSTATUS(rc);
    std::ifstream in(out_file);
    std::stringstream ss;
    ss << in.rdbuf();
    r.out = ss.str();
    std::remove(out_file.c_str());
    return r;
}

void write_file(const std::string& path, const std::string& body) {
    std::ofstream(path) << body;
}

struct Fixture {
    Fixture() {
        write_file("cli_brownian.json",
                   R"({"schema_version":1,"kind":"family","family":"brownian"})");
        write_file("cli_stable_half.json",
                   R"({"schema_version":1,"kind":"family","family":"stable",
                       "alpha":0.5})");
        write_file("cli_cp.json",
                   R"({"schema_version":1,"kind":"family","family":"cp",
                       "rate":1.0,"jumps":[[1.0,1.0]]})");
        write_file("cli_bad.json", R"({"kind":"family"})");
        write_file("cli_one.json",
                   R"({"schema_version":1,"kind":"constant","c":1.0})");
        write_file("cli_comb.json", R"({"schema_version":1,"kind":"comb"})");
    }
    ~Fixture() {
        for (const char* f :
             {"cli_brownian.json", "cli_stable_half.json", "cli_cp.json",
              "cli_bad.json", "cli_one.json", "cli_comb.json",
              "cli_out.json", "cli_out.csv"})
            std::remove(f);
    }
};

} // namespace

TEST_CASE_FIXTURE(Fixture, "classify labels and exit codes") {
    RunResult r = run("classify --spec cli_brownian.json");
    CHECK(r.exit_code == 0);
    CHECK(r.out.find("\"label\": \"C\"") != std::string::npos);

    r = run("classify --spec cli_stable_half.json");
    CHECK(r.exit_code == 0);
    CHECK(r.out.find("\"label\": \"A\"") != std::string::npos);

    r = run("classify --spec cli_cp.json");
    CHECK(r.exit_code == 0);
    CHECK(r.out.find("CompoundPoisson") != std::string::npos);
}

TEST_CASE_FIXTURE(Fixture, "malformed input exits 1") {
    RunResult r = run("classify --spec cli_bad.json");
    CHECK(r.exit_code == 1);
    CHECK(r.out.find("input error") != std::string::npos);
    CHECK(run("classify --spec no_such_file.json").exit_code == 1);
}

TEST_CASE_FIXTURE(Fixture, "kernel CSV output") {
    RunResult r = run(
        "kernel --spec cli_brownian.json --lambda 1 --xmax 2 --n 5 "
        "--out cli_out.csv");
    CHECK(r.exit_code == 0);
    std::ifstream in("cli_out.csv");
    std::string header;
    std::getline(in, header);
    CHECK(header == "x,value,err");
    // row at x = 0 must be G^1(0) = 1/2
    bool found = false;
    for (std::string line; std::getline(in, line);)
        if (line.rfind("0,0.4999", 0) == 0 || line.rfind("0,0.5", 0) == 0)
            found = true;
    CHECK(found);
}

TEST_CASE_FIXTURE(Fixture, "kato-check verdict for the comb") {
    RunResult r = run(
        "kato-check --spec cli_brownian.json --q cli_comb.json "
        "--conditions closed --out cli_out.json");
    CHECK(r.exit_code == 0);
    std::ifstream in("cli_out.json");
    std::stringstream ss;
    ss << in.rdbuf();
    std::string v = ss.str();
    CHECK(v.find("\"time_class\": \"In\"") != std::string::npos);
    CHECK(v.find("\"space_class\": \"Out\"") != std::string::npos);
}

TEST_CASE_FIXTURE(Fixture, "kato-check on compound Poisson with q = 1") {
    RunResult r = run(
        "kato-check --spec cli_cp.json --q cli_one.json --conditions closed");
    CHECK(r.exit_code == 0);
    CHECK(r.out.find("\"time_class\": \"In\"") != std::string::npos);
    CHECK(r.out.find("\"space_class\": \"Out\"") != std::string::npos);
}

TEST_CASE_FIXTURE(Fixture, "simulate is deterministic for a fixed seed") {
    std::string args =
        "simulate --spec cli_cp.json --q cli_one.json --t 1 --paths 2000 "
        "--seed 7";
    RunResult a = run(args);
    RunResult b = run(args);
    CHECK(a.exit_code == 0);
    CHECK(a.out == b.out);
    // q = 1: the Riemann sum telescopes to t itself
    bool exact_t = a.out.find("\"value\": 1") != std::string::npos ||
                   a.out.find("\"value\": 0.999") != std::string::npos;
    CHECK(exact_t);
}

TEST_CASE_FIXTURE(Fixture, "battery passes end to end") {
    RunResult r = run("battery --out cli_out.json");
    CHECK(r.exit_code == 0);
    std::ifstream in("cli_out.json");
    std::stringstream ss;
    ss << in.rdbuf();
    CHECK(ss.str().find("\"all_pass\": true") != std::string::npos);
}

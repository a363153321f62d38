#include <catch_amalgamated.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "conjlab/errors.hpp"
#include "conjlab/io.hpp"
#include "conjlab/runner.hpp"

using namespace conjlab;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
    const auto p = fs::temp_directory_path() / ("conjlab-test-" + name);
    fs::remove_all(p);
    return p;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

int cli(const std::string& args) {
    const std::string cmd = std::string(CONJLAB_CLI) + " " + args + " > /dev/null 2>&1";
    const int status = std::system(cmd.c_str());
    return WEXITSTATUS(status);
}

}  // namespace

TEST_CASE("toy conjugacy run writes its artifacts") {
    RunConfig c;
    c.system_ref = "toy-1-1";
    c.out_dir = scratch("toy");
    c.identity_samples = 10;
    c.equivariance_samples = 3;
    const auto r = run(c);
    CHECK(r.passed);
    CHECK(fs::exists(c.out_dir / "summary.json"));
    CHECK(fs::exists(c.out_dir / "conjugacy_samples.csv"));
    CHECK(fs::exists(c.out_dir / "conjugacy_report.json"));
    const auto s = read_json(c.out_dir / "summary.json");
    CHECK(s.at("config").at("system") == "toy-1-1");
    CHECK(s.contains("system_hash"));
    CHECK(slurp(c.out_dir / "conjugacy_samples.csv").rfind("id,hg_defect", 0) == 0);
}

TEST_CASE("heat dichotomy run passes") {
    RunConfig c;
    c.system_ref = "heat-8";
    c.suites = {Suite::dichotomy};
    c.out_dir = scratch("heat");
    CHECK(run(c).passed);
}

TEST_CASE("gate violation fails the conjugacy suite with the inequality named") {
    RunConfig c;
    c.system_ref = "toy-gate-violation";
    c.out_dir = scratch("gate");
    const auto r = run(c);
    CHECK_FALSE(r.passed);
    REQUIRE(r.suites.size() == 1);
    CHECK(r.suites[0].error.find("4k|f|_Lip/alpha < 1") != std::string::npos);
}

TEST_CASE("same seed gives byte-identical outputs") {
    RunConfig c;
    c.system_ref = "toy-2-2";
    c.suites = {Suite::conjugacy, Suite::localization};
    c.identity_samples = 6;
    c.equivariance_samples = 2;
    c.out_dir = scratch("det-a");
    run(c);
    RunConfig d = c;
    d.out_dir = scratch("det-b");
    d.exec = Exec::serial;
    run(d);
    for (const char* f : {"conjugacy_samples.csv", "localization_gate.csv", "conjugacy_report.json"}) {
        CHECK(slurp(c.out_dir / f) == slurp(d.out_dir / f));
    }
    auto sa = read_json(c.out_dir / "summary.json");
    auto sb = read_json(d.out_dir / "summary.json");
    sa.erase("config");
    sb.erase("config");
    CHECK(sa.dump() == sb.dump());
}

TEST_CASE("sweep writes one report per value and a combined CSV") {
    RunConfig c;
    c.system_ref = "toy-1-1";
    c.identity_samples = 4;
    c.equivariance_samples = 1;
    c.out_dir = scratch("sweep");
    const auto s = sweep(c, "f.scale", {0.05, 0.1, 0.2});
    CHECK(s.runs.size() == 3);
    CHECK(s.passed);
    for (const char* d : {"run_000", "run_001", "run_002"}) CHECK(fs::exists(c.out_dir / d / "summary.json"));
    const auto csv = slurp(s.combined_csv);
    CHECK(std::count(csv.begin(), csv.end(), '\n') == 4);
    CHECK_THROWS_AS(sweep(c, "", {0.1}), InputError);
    CHECK_THROWS_AS(sweep(c, "f.scale", {}), InputError);
    CHECK_THROWS_AS(sweep(c, "f.nothing", {0.1}), InputError);
}

TEST_CASE("sweep over delta flips the local gate at the closed form") {
    RunConfig c;
    c.system_ref = "toy-quadratic-local";
    c.suites = {Suite::localization};
    c.out_dir = scratch("sweep-delta");
    const double star = 1.0 / (72.0 * std::sqrt(2.0));
    const auto s = sweep(c, "localize.delta", {0.5 * star, 0.999 * star, 1.001 * star, 2.0 * star});
    std::vector<bool> holds;
    for (const auto& r : s.runs) holds.push_back(r.summary.at("gate").at("holds").get<bool>());
    CHECK(holds == std::vector<bool>{true, true, false, false});
}

TEST_CASE("run config JSON round trip and validation") {
    RunConfig c;
    c.system_ref = "heat-8";
    c.suites = {Suite::dichotomy, Suite::regularity};
    c.seed = 42;
    const auto back = RunConfig::from_json(c.to_json());
    CHECK(back.system_ref == "heat-8");
    CHECK(back.suites == c.suites);
    CHECK(back.seed == 42);
    CHECK_THROWS_AS(RunConfig::from_json(nlohmann::json{{"suites", {"bogus"}}}), InputError);
    CHECK_THROWS_AS(RunConfig::from_json(nlohmann::json{{"suites", nlohmann::json::array()}}), ConfigurationError);
}

TEST_CASE("command line exit codes") {
    const auto out = scratch("cli");
    CHECK(cli("run --system toy-1-1 --suite conjugacy --identity-samples 3 --equivariance-samples 1 --out " +
              out.string()) == 0);
    CHECK(cli("run --system heat-8 --suite dichotomy --out " + out.string()) == 0);
    CHECK(cli("run --system toy-gate-violation --suite conjugacy --out " + out.string()) == 1);
    CHECK(cli("run --system no-such-system --out " + out.string()) == 2);
    CHECK(cli("run --suite bogus --out " + out.string()) == 2);
    CHECK(cli("systems list") == 0);
    CHECK(cli("sweep --system toy-1-1 --axis '' --values 0.1 --out " + out.string()) == 2);
    std::ofstream(out / "sys.json") << R"({"kind": "toy", "f": {"kind": "ridge_tanh", "scale": 0.05}})";
    CHECK(cli("validate-config " + (out / "sys.json").string()) == 0);
    std::ofstream(out / "bad.json") << "{ not json";
    CHECK(cli("validate-config " + (out / "bad.json").string()) == 2);
}

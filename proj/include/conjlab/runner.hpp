#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "json.hpp"

#include "conjlab/flows.hpp"
#include "conjlab/parallel.hpp"

namespace conjlab {

enum class Suite { dichotomy, conjugacy, regularity, inequalities, localization };

std::string to_string(Suite s);
Suite suite_from_string(const std::string& s);
const std::vector<Suite>& all_suites();

struct RunConfig {
    std::string system_ref = "toy-1-1";
    nlohmann::json system_config;          // when set, used instead of system_ref
    std::vector<Suite> suites = {Suite::conjugacy};
    std::filesystem::path out_dir = "conjlab-out";
    std::uint64_t seed = 1;
    double tol_quadrature = 1e-8;          // tail / quadrature tolerance of the engine
    double tol_picard = 1e-10;
    double horizon_override = 0.0;
    std::size_t identity_samples = 100;
    std::size_t equivariance_samples = 20;
    std::size_t regularity_bases = 20;
    std::size_t inequality_draws = 200;
    Exec exec = Exec::openmp;

    nlohmann::json to_json() const;
    static RunConfig from_json(const nlohmann::json& j);
};

struct SuiteResult {
    std::string name;
    bool passed = false;
    std::string error;           // set when the suite could not run
    nlohmann::json metrics;
    std::vector<std::string> files;
};

struct RunResult {
    bool passed = false;
    std::vector<SuiteResult> suites;
    nlohmann::json summary;
    std::filesystem::path summary_path;
};

/// Resolves the system, runs the selected suites, writes the report JSON,
/// per-sample CSVs and summary.json into cfg.out_dir. Suite failures are
/// recorded in the result; configuration problems throw.
RunResult run(const RunConfig& cfg);

/// System config JSON behind cfg (built-in config or file contents).
nlohmann::json resolve_system_config(const RunConfig& cfg);

struct SweepResult {
    bool passed = false;
    std::vector<RunResult> runs;
    std::filesystem::path combined_csv;
};

/// One run per axis value, axis a dotted path to a numeric field of the system
/// config (e.g. "f.scale", "localize.delta"). Writes a combined CSV.
SweepResult sweep(const RunConfig& base, const std::string& axis, const std::vector<double>& values);

/// Individual suites, exposed for tests and the acceptance driver.
SuiteResult run_suite(Suite s, const SemilinearSystem& sys, const RunConfig& cfg);

}  // namespace conjlab

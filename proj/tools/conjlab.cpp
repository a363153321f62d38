#include <cstdio>
#include <cstdlib>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "conjlab/errors.hpp"
#include "conjlab/io.hpp"
#include "conjlab/runner.hpp"
#include "conjlab/systems.hpp"

using namespace conjlab;

namespace {

enum Exit { kPass = 0, kFail = 1, kInput = 2 };

struct Flags {
    std::string config;
    std::string system;
    std::vector<std::string> suites;
    std::string out;
    std::uint64_t seed = 0;
    double tol_quadrature = 0.0;
    double tol_picard = 0.0;
    double horizon_override = -1.0;
    std::size_t identity_samples = 0;
    std::size_t equivariance_samples = 0;
    std::size_t regularity_bases = 0;
    std::size_t inequality_draws = 0;
    std::string exec;
};

void add_run_flags(CLI::App* app, Flags& f) {
    app->add_option("--config", f.config, "run config JSON");
    app->add_option("--system", f.system, "built-in system name or system JSON path");
    app->add_option("--suite", f.suites, "suite to run (repeatable, or 'all')");
    app->add_option("--out", f.out, "output directory (default $CONJLAB_OUT or ./conjlab-out)");
    app->add_option("--seed", f.seed, "random seed");
    app->add_option("--tol-quadrature", f.tol_quadrature, "tail / quadrature tolerance");
    app->add_option("--tol-picard", f.tol_picard, "Picard stopping tolerance");
    app->add_option("--horizon-override", f.horizon_override, "truncation horizon T (0 = automatic)");
    app->add_option("--identity-samples", f.identity_samples, "points for the H/G identity check");
    app->add_option("--equivariance-samples", f.equivariance_samples, "points for the equivariance check");
    app->add_option("--regularity-bases", f.regularity_bases, "base points per regularity fit");
    app->add_option("--inequality-draws", f.inequality_draws, "parameter draws for the inequality checks");
    app->add_option("--exec", f.exec, "serial or openmp");
}

RunConfig build_config(const Flags& f) {
    RunConfig c;
    if (!f.config.empty()) c = RunConfig::from_json(read_json(f.config));
    if (!f.system.empty()) {
        c.system_ref = f.system;
        c.system_config = nullptr;
    }
    if (!f.suites.empty()) {
        c.suites.clear();
        for (const auto& s : f.suites) {
            if (s == "all") {
                c.suites = all_suites();
                break;
            }
            c.suites.push_back(suite_from_string(s));
        }
    }
    if (!f.out.empty()) {
        c.out_dir = f.out;
    } else if (f.config.empty()) {
        if (const char* env = std::getenv("CONJLAB_OUT")) c.out_dir = env;
    }
    if (f.seed) c.seed = f.seed;
    if (f.tol_quadrature > 0) c.tol_quadrature = f.tol_quadrature;
    if (f.tol_picard > 0) c.tol_picard = f.tol_picard;
    if (f.horizon_override >= 0) c.horizon_override = f.horizon_override;
    if (f.identity_samples) c.identity_samples = f.identity_samples;
    if (f.equivariance_samples) c.equivariance_samples = f.equivariance_samples;
    if (f.regularity_bases) c.regularity_bases = f.regularity_bases;
    if (f.inequality_draws) c.inequality_draws = f.inequality_draws;
    if (!f.exec.empty()) c.exec = exec_from_string(f.exec);
    return c;
}

void print_result(const RunResult& r) {
    for (const auto& s : r.suites) {
        std::printf("%-13s %s", s.name.c_str(), s.passed ? "PASS" : "FAIL");
        if (!s.error.empty()) std::printf("  (%s)", s.error.c_str());
        std::printf("\n");
    }
    std::printf("summary: %s\n", r.summary_path.string().c_str());
}

std::vector<double> parse_values(const std::string& s) {
    std::vector<double> out;
    std::size_t pos = 0;
    while (pos < s.size()) {
        const auto comma = s.find(',', pos);
        const auto tok = s.substr(pos, comma == std::string::npos ? std::string::npos : comma - pos);
        if (!tok.empty()) {
            try {
                out.push_back(std::stod(tok));
            } catch (const std::exception&) {
                throw InputError("sweep: bad value '" + tok + "'");
            }
        }
        if (comma == std::string::npos) break;
        pos = comma + 1;
    }
    return out;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"conjlab: numerical checks of linearization conjugacies for semilinear systems"};
    app.require_subcommand(1);

    Flags run_flags, sweep_flags;
    auto* run_cmd = app.add_subcommand("run", "run verification suites on one system");
    add_run_flags(run_cmd, run_flags);

    auto* sweep_cmd = app.add_subcommand("sweep", "one run per value of a numeric system-config field");
    add_run_flags(sweep_cmd, sweep_flags);
    std::string axis, values;
    sweep_cmd->add_option("--axis", axis, "dotted path into the system config, e.g. f.scale")->required();
    sweep_cmd->add_option("--values", values, "comma-separated values")->required();

    auto* systems_cmd = app.add_subcommand("systems", "built-in systems");
    auto* list_cmd = systems_cmd->add_subcommand("list", "list built-in systems");
    systems_cmd->require_subcommand(1);

    auto* validate_cmd = app.add_subcommand("validate-config", "parse a run or system config");
    std::string validate_path;
    validate_cmd->add_option("path", validate_path, "config JSON")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kPass : kInput;
    }

    try {
        if (run_cmd->parsed()) {
            const auto r = run(build_config(run_flags));
            print_result(r);
            return r.passed ? kPass : kFail;
        }
        if (sweep_cmd->parsed()) {
            const auto s = sweep(build_config(sweep_flags), axis, parse_values(values));
            for (const auto& r : s.runs) print_result(r);
            std::printf("combined: %s\n", s.combined_csv.string().c_str());
            return s.passed ? kPass : kFail;
        }
        if (list_cmd->parsed()) {
            for (const auto& b : builtin_systems()) {
                const auto sys = make_builtin(b.name);
                std::printf("%-22s gate %-5s %-10.4g %s\n", b.name.c_str(), sys.gap_holds() ? "ok" : "FAIL",
                            sys.gap_value(), b.summary.c_str());
            }
            return kPass;
        }
        if (validate_cmd->parsed()) {
            const auto j = read_json(validate_path);
            if (j.contains("suites") || (j.contains("system") && j.at("system").is_string())) {
                const auto c = RunConfig::from_json(j);
                const auto sys = c.system_config.is_null() ? resolve_system(c.system_ref)
                                                           : system_from_json(c.system_config);
                std::printf("run config ok: system %s (%s), gate %s\n", sys.name().c_str(), sys.hash().c_str(),
                            sys.gap_inequality().c_str());
            } else {
                const auto sys = system_from_json(j.contains("system") ? j.at("system") : j);
                std::printf("system config ok: %s (%s), gate %s\n", sys.name().c_str(), sys.hash().c_str(),
                            sys.gap_inequality().c_str());
            }
            return kPass;
        }
    } catch (const Error& e) {
        nlohmann::json diag = {{"error", e.what()}};
        std::cerr << diag.dump() << "\n";
        return kInput;
    } catch (const nlohmann::json::exception& e) {
        std::cerr << nlohmann::json{{"error", std::string("json: ") + e.what()}}.dump() << "\n";
        return kInput;
    }
    return kInput;
}

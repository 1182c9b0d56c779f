// relaxometer.cpp - command-line front end of the sweep engine

#include <unistd.h>

#include <cstdlib>
#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "relax/config.hpp"
#include "relax/emit.hpp"
#include "relax/errors.hpp"
#include "relax/linalg.hpp"
#include "relax/log.hpp"
#include "relax/sweep.hpp"

namespace {

constexpr int kExitValidation = 2;
constexpr int kExitResource = 3;

// OpenBLAS picks its kernels when it is loaded, so a bad pick can only be
// fixed by restarting the process with the core type pinned.
void ensure_working_blas(char** argv) {
    if (relax::linalg::blas_self_check()) return;
    if (std::getenv("OPENBLAS_CORETYPE") == nullptr) {
        setenv("OPENBLAS_CORETYPE", "Haswell", 1);
        execv("/proc/self/exe", argv);
    }
    std::cerr << "warning: BLAS self-check failed; results may be wrong\n";
}

int env_workers() {
    const char* v = std::getenv("RELAXOMETER_WORKERS");
    if (v == nullptr || *v == '\0') return 0;
    try {
        const int n = std::stoi(v);
        if (n < 1) throw std::invalid_argument("nonpositive");
        return n;
    } catch (const std::exception&) {
        throw relax::ValidationError(std::string("RELAXOMETER_WORKERS must be a positive integer, got '") + v + "'");
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"relaxometer - subsystem relaxation and evolution-speed sweeps"};
    app.require_subcommand(1);
    bool verbose = false;
    app.add_flag("-v,--verbose", verbose, "log progress to stderr");

    auto* run = app.add_subcommand("run", "run a scenario and write its results");
    std::string config_path, out_dir, format = "csv";
    int workers = 0;
    std::uint64_t seed = 0;
    run->add_option("--config", config_path, "scenario config (YAML)")->required()->check(CLI::ExistingFile);
    run->add_option("--out", out_dir, "output directory")->required();
    auto* workers_opt = run->add_option("--workers", workers, "worker threads")->check(CLI::PositiveNumber);
    auto* seed_opt = run->add_option("--seed", seed, "base seed override");
    run->add_option("--format", format, "csv or json")->check(CLI::IsMember({"csv", "json"}));

    auto* list = app.add_subcommand("list-scenarios", "print the built-in scenarios");

    auto* check = app.add_subcommand("validate", "parse and validate a config");
    std::string check_path;
    check->add_option("--config", check_path, "scenario config (YAML)")->required()->check(CLI::ExistingFile);

    CLI11_PARSE(app, argc, argv);
    if (verbose) relax::set_log_sink([](const std::string& m) { std::cerr << m << '\n'; });

    try {
        if (*list) {
            for (auto s : relax::all_scenarios()) {
                const auto& p = relax::provenance(s);
                std::cout << relax::to_string(s) << '\t' << p.description << '\n';
            }
            return 0;
        }
        if (*check) {
            const auto config = relax::load_config(check_path);
            std::cout << relax::to_yaml(config);
            return 0;
        }
        ensure_working_blas(argv);
        auto config = relax::load_config(config_path);
        if (const int n = env_workers()) config.workers = n;
        if (*workers_opt) config.workers = workers;
        if (*seed_opt) config.base_seed = seed;
        relax::validate(config);
        const auto result = relax::run_scenario(config);
        const auto path = relax::write_result(result, out_dir,
                                              format == "json" ? relax::OutputFormat::Json : relax::OutputFormat::Csv);
        if (result.regularized) std::cerr << "note: some Gaussian metrics were regularized\n";
        std::cout << path.string() << '\n';
        return 0;
    } catch (const relax::ValidationError& e) {
        std::cerr << "validation error: " << e.what() << '\n';
        return kExitValidation;
    } catch (const relax::ResourceError& e) {
        std::cerr << "resource guard: " << e.what() << '\n';
        return kExitResource;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
}

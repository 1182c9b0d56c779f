// config.hpp - experiment configuration, scenario table and YAML schema
#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "relax/qmetric.hpp"
#include "relax/spinchain.hpp"

namespace relax {

enum class Scenario { Fig1Random, Fig2Product, Fig3Xxz, FigS1Transition, FigS2TfimRandom, FigS3TfimProduct, FigS4Quench };

std::string_view to_string(Scenario scenario);
/// Throws ValidationError for unknown names.
Scenario parse_scenario(std::string_view name);
const std::vector<Scenario>& all_scenarios();

/// What is measured for every subsystem.
enum class Quantity {
    Steady,   // distance to the reference steady state
    Initial,  // distance to the initial RDM
    Speed,    // subsystem evolution speed
};
std::string_view to_string(Quantity q);

enum class ReferenceKind { None, MaximallyMixed, Gibbs, GibbsEnergyMatched, DiagonalEnsemble, TimeAveraged, Gge };
std::string_view to_string(ReferenceKind kind);

enum class PositionMode {
    Auto,   // skip position averaging only when it is provably redundant
    All,    // all L starting sites
    First,  // site 0 only
};
std::string_view to_string(PositionMode mode);

/// Model and protocol constants of a scenario.
struct ScenarioParameters {
    double h_x = 0.0;
    double h_z = 0.0;
    double delta = 1.0;
    double h0 = 0.0;
    double h1 = 0.0;
    double t_star = 0.0;  // fixed observation time in units of L

    friend bool operator==(const ScenarioParameters&, const ScenarioParameters&) = default;
};

/// Time window [start, end] sampled uniformly; times are multiples of L when
/// scale_with_size is set.
struct TimeWindow {
    double start = 1.0;
    double end = 2.0;
    bool scale_with_size = true;
    int samples = 200;

    double start_time(int num_sites) const { return scale_with_size ? start * num_sites : start; }
    double end_time(int num_sites) const { return scale_with_size ? end * num_sites : end; }

    friend bool operator==(const TimeWindow&, const TimeWindow&) = default;
};

struct ExperimentConfig {
    Scenario scenario = Scenario::Fig1Random;
    ScenarioParameters parameters;
    std::optional<ProductStateKind> initial_state;  // product-state scenarios
    std::vector<double> disorder_strengths;          // XXZ scenarios
    std::vector<int> sizes;
    std::vector<double> ratios;           // x = L_A / L
    std::vector<int> subsystem_sizes;     // explicit L_A values
    TimeWindow window;
    std::vector<MetricKind> metrics;
    std::vector<Quantity> quantities;
    ReferenceKind reference = ReferenceKind::MaximallyMixed;
    double beta = 0.0;  // for ReferenceKind::Gibbs
    int realizations = 1;
    int first_realization = 0;
    std::uint64_t base_seed = 0;
    int workers = 1;
    PositionMode positions = PositionMode::Auto;
    double speed_step = 1e-4;
    bool complex_random_amplitudes = true;
    double relative_entropy_cutoff = 1e-12;
    bool emit_time_series = false;
    bool emit_realizations = false;

    friend bool operator==(const ExperimentConfig&, const ExperimentConfig&) = default;
};

/// Published constants per scenario; configs start from these values.
struct ProvenanceEntry {
    Scenario scenario;
    std::string_view description;
    ScenarioParameters parameters;
    TimeWindow window;
    std::vector<double> disorder_strengths;
};
const ProvenanceEntry& provenance(Scenario scenario);

/// Defaults of a scenario: provenance parameters, desk-scale sizes and settings.
ExperimentConfig default_config(Scenario scenario);

/// Parses YAML text. Keys not listed in the schema are rejected; every
/// error is a ValidationError naming the offending key.
ExperimentConfig parse_config(const std::string& text);
ExperimentConfig load_config(const std::filesystem::path& path);

/// YAML that parse_config maps back to an equal config.
std::string to_yaml(const ExperimentConfig& config);

/// Throws ValidationError for inconsistent or incomplete settings.
void validate(const ExperimentConfig& config);

/// Sorted distinct L_A in [1, L) from ratios (floor and ceil of x L) and
/// explicit sizes.
std::vector<int> subsystem_sizes_for(const ExperimentConfig& config, int num_sites);

/// Scenarios evaluated with Gaussian covariance matrices instead of dense ED.
bool is_gaussian(Scenario scenario);
bool is_disordered(Scenario scenario);

}  // namespace relax

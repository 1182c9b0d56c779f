// sweep.hpp - scenario runner: averaging over time, positions and realizations
#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "relax/config.hpp"

namespace relax {

/// One output line. value_normalized is the speed over the full-system speed
/// (empty for distances); stderr is set iff more than one realization entered.
struct ResultRow {
    std::string scenario;
    int num_sites = 0;
    int block_size = 0;
    double x = 0.0;
    std::string t_or_window;
    std::string metric;
    double value = 0.0;
    std::optional<double> value_normalized;
    std::optional<double> standard_error;
    std::string seed;

    friend bool operator==(const ResultRow&, const ResultRow&) = default;
};

struct SweepResult {
    ExperimentConfig config;
    std::vector<ResultRow> rows;
    bool regularized = false;  // a Gaussian metric needed the singular-matrix shift
};

struct Task {
    int realization = 0;
    int position = 0;
    int sample = 0;

    friend bool operator==(const Task&, const Task&) = default;
};

/// Work for one system size, in reduction order (realization, position, sample).
struct WorkPlan {
    int num_sites = 0;
    std::vector<int> realizations;
    std::vector<int> positions;
    std::vector<double> times;
    std::vector<Task> tasks;
};

/// Throws ValidationError for an invalid config.
WorkPlan schedule(const ExperimentConfig& config, int num_sites);

/// Starting sites averaged over for a size: all L, or only site 0 when the
/// model and initial state are both translation invariant (or mode is First).
std::vector<int> positions_for(const ExperimentConfig& config, int num_sites);

/// Runs body(i) for i in [0, count) on `workers` threads. Exceptions are
/// rethrown on the caller's thread (the one with the lowest index wins).
void parallel_for(int count, int workers, const std::function<void(int)>& body);

/// Row label for a metric and quantity, e.g. "v_A", "D_ss", "B_ini".
std::string row_label(MetricKind metric, Quantity quantity);

/// Scenario tag written in the first column ("fig3-xxz@h=1.5" for disorder).
std::string scenario_tag(const ExperimentConfig& config, std::optional<double> disorder_strength);

/// Validates, checks resource guards for every size, then computes. Results
/// are independent of config.workers bit for bit.
SweepResult run_scenario(const ExperimentConfig& config);

}  // namespace relax

// steadystate.hpp - reference steady states and distances to them
#pragma once

#include <span>
#include <string>
#include <variant>
#include <vector>

#include "relax/propagate.hpp"
#include "relax/qmetric.hpp"
#include "relax/spinchain.hpp"

namespace relax {

struct MaximallyMixed {};
struct Gibbs {
    double beta = 0.0;
};
/// Canonical ensemble whose mean energy equals that of the initial state.
struct GibbsEnergyMatched {};
struct DiagonalEnsemble {};
struct TimeAveragedRdm {
    double t_start = 0.0;
    double t_end = 1.0;
    int samples = 200;
};

using SteadyStateKind = std::variant<MaximallyMixed, Gibbs, GibbsEnergyMatched, DiagonalEnsemble, TimeAveragedRdm>;

std::string describe(const SteadyStateKind& kind);

/// Consecutive eigenvalues closer than this are one level of the diagonal ensemble.
inline constexpr double kDegeneracyTolerance = 1e-10;
inline constexpr double kBetaEnergyTolerance = 1e-10;

/// Groups of eigenvalue indices [first, last) forming one degenerate level.
struct EnergyLevel {
    Eigen::Index first = 0;
    Eigen::Index last = 0;
};
std::vector<EnergyLevel> energy_levels(const RealVector& ascending_energies, double tolerance = kDegeneracyTolerance);

/// Mean energy of the canonical ensemble at inverse temperature beta.
double gibbs_energy(const RealVector& energies, double beta);

/// Canonical weights exp(-beta E_n) / Z.
RealVector gibbs_weights(const RealVector& energies, double beta);

/// Solves gibbs_energy(beta) = target by bisection. Throws NoSolutionError
/// unless E_min < target < E_max.
double match_inverse_temperature(const RealVector& energies, double target,
                                 double tolerance = kBetaEnergyTolerance);

/// Reduced steady state on `block`. Gibbs variants need a full-space basis.
DensityMatrix steady_rdm(const SteadyStateKind& kind, const Trajectory& trajectory, const Block& block);

/// Convenience overload that diagonalizes `spec` itself.
DensityMatrix steady_rdm(const SteadyStateKind& kind, const ChainSpec& spec, const StateVector& psi0,
                         const Block& block);

/// Trace distance between |psi(t)> and the full-chain steady state.
double total_steady_distance(const SteadyStateKind& kind, const Trajectory& trajectory, double t);

struct SteadyDistanceSeries {
    std::vector<double> times;
    std::vector<double> subsystem;  // D(rho_A(t), rho_A,ss)
    std::vector<double> total;      // D(|psi(t)>, rho_ss)
};

SteadyDistanceSeries steady_distance_series(const Trajectory& trajectory, const SteadyStateKind& kind,
                                            const Block& block, std::span<const double> times);

/// Half the trace norm of |c><c| - diag(w) for unit c and a probability vector w:
/// the largest lambda with sum_n |c_n|^2 / (lambda + w_n) = 1.
double pure_to_diagonal_distance(const RealVector& populations, const RealVector& weights);

/// D(tr_{\bar A}|psi><psi|, 1/d_A) without forming the larger of the two spaces.
double maximally_mixed_distance(const ComplexVector& psi, int num_sites, const Block& block);

/// tr_{\bar A} sum_k w_k |v_k><v_k| for full-space columns v_k.
ComplexMatrix mixture_partial_trace(const ComplexMatrix& vectors, const RealVector& weights, int num_sites,
                                    const Block& block);

}  // namespace relax

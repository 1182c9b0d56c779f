// steadystate.cpp - reference ensembles, their RDMs and distances to them

#include "relax/steadystate.hpp"

#include <algorithm>
#include <cmath>
#include <mutex>
#include <optional>
#include <string>

#include "relax/errors.hpp"
#include "relax/linalg.hpp"
#include "relax/log.hpp"

namespace relax {

namespace {

template <class... Ts>
struct Overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

constexpr Eigen::Index kChunk = 128;

std::mutex& log_mutex() {
    static std::mutex m;
    return m;
}
LogSink& log_sink() {
    static LogSink sink;
    return sink;
}

void require_full_basis(const EigenBasis& basis, const char* what) {
    if (basis.restricted())
        throw DomainError(std::string(what) + " needs the full-space spectrum, not a symmetry sector");
}

// Canonical weights for Gibbs or GibbsEnergyMatched.
RealVector thermal_weights(const SteadyStateKind& kind, const Trajectory& trajectory) {
    const RealVector& e = trajectory.basis().energies();
    if (const auto* g = std::get_if<Gibbs>(&kind)) return gibbs_weights(e, g->beta);
    return gibbs_weights(e, match_inverse_temperature(e, trajectory.mean_energy()));
}

}  // namespace

void set_log_sink(LogSink sink) {
    std::lock_guard lock(log_mutex());
    log_sink() = std::move(sink);
}

void log_message(const std::string& message) {
    std::lock_guard lock(log_mutex());
    if (log_sink()) log_sink()(message);
}

std::string describe(const SteadyStateKind& kind) {
    return std::visit(Overloaded{
                          [](const MaximallyMixed&) { return std::string("maximally_mixed"); },
                          [](const Gibbs& g) { return "gibbs(beta=" + std::to_string(g.beta) + ")"; },
                          [](const GibbsEnergyMatched&) { return std::string("gibbs_energy_matched"); },
                          [](const DiagonalEnsemble&) { return std::string("diagonal_ensemble"); },
                          [](const TimeAveragedRdm& w) {
                              return "time_averaged[" + std::to_string(w.t_start) + "," + std::to_string(w.t_end) +
                                     "]";
                          },
                      },
                      kind);
}

std::vector<EnergyLevel> energy_levels(const RealVector& e, double tolerance) {
    std::vector<EnergyLevel> levels;
    Eigen::Index first = 0;
    for (Eigen::Index n = 1; n <= e.size(); ++n) {
        if (n == e.size() || e(n) - e(n - 1) >= tolerance) {
            levels.push_back({first, n});
            first = n;
        }
    }
    return levels;
}

RealVector gibbs_weights(const RealVector& energies, double beta) {
    if (!std::isfinite(beta)) throw DomainError("inverse temperature must be finite");
    if (energies.size() == 0) throw DomainError("empty spectrum");
    const double shift = beta >= 0.0 ? energies.minCoeff() : energies.maxCoeff();
    RealVector w = (-beta * (energies.array() - shift)).exp().matrix();
    return w / w.sum();
}

double gibbs_energy(const RealVector& energies, double beta) { return gibbs_weights(energies, beta).dot(energies); }

double match_inverse_temperature(const RealVector& energies, double target, double tolerance) {
    const double e_min = energies.minCoeff();
    const double e_max = energies.maxCoeff();
    if (!(target > e_min && target < e_max))
        throw NoSolutionError("energy " + std::to_string(target) + " lies outside the open spectral interval (" +
                              std::to_string(e_min) + ", " + std::to_string(e_max) + ")");
    const double e0 = gibbs_energy(energies, 0.0);
    if (std::abs(e0 - target) <= tolerance) return 0.0;
    // E(beta) decreases monotonically; bracket the root on the correct side of 0.
    const double sign = target < e0 ? 1.0 : -1.0;
    double lo = 0.0;
    double hi = 1.0;
    auto residual = [&](double b) { return sign * (gibbs_energy(energies, sign * b) - target); };
    while (residual(hi) > 0.0) {
        lo = hi;
        hi *= 2.0;
        if (hi > 1e12) throw NoSolutionError("no finite inverse temperature reproduces the target energy");
    }
    double mid = 0.5 * (lo + hi);
    for (int iter = 0; iter < 400; ++iter) {
        mid = 0.5 * (lo + hi);
        const double r = residual(mid);
        if (std::abs(r) <= tolerance) break;
        if (r > 0.0)
            lo = mid;
        else
            hi = mid;
        if (hi - lo <= 1e-15 * std::max(1.0, hi)) break;
    }
    return sign * mid;
}

ComplexMatrix mixture_partial_trace(const ComplexMatrix& vectors, const RealVector& weights, int num_sites,
                                    const Block& block) {
    validate_block(block, num_sites);
    if (vectors.cols() != weights.size()) throw DomainError("one weight per vector is required");
    const Eigen::Index d_a = Eigen::Index{1} << block.length;
    const Eigen::Index d_b = (Eigen::Index{1} << num_sites) / d_a;
    ComplexMatrix rho = ComplexMatrix::Zero(d_a, d_a);
    for (Eigen::Index start = 0; start < vectors.cols(); start += kChunk) {
        const Eigen::Index count = std::min(kChunk, vectors.cols() - start);
        ComplexMatrix big(d_a, d_b * count);
        for (Eigen::Index k = 0; k < count; ++k) {
            const double w = weights(start + k);
            if (w < 0.0) throw DomainError("mixture weights must be nonnegative");
            big.middleCols(k * d_b, d_b) = std::sqrt(w) * block_amplitudes(vectors.col(start + k), num_sites, block);
        }
        rho.noalias() += big * big.adjoint();
    }
    return linalg::hermitian_part(rho);
}

double pure_to_diagonal_distance(const RealVector& populations, const RealVector& weights) {
    if (populations.size() != weights.size()) throw DomainError("population and weight vectors differ in length");
    auto f = [&](double lambda) {
        double s = 0.0;
        for (Eigen::Index n = 0; n < populations.size(); ++n)
            if (populations(n) > 0.0) s += populations(n) / (lambda + weights(n));
        return s;
    };
    if (f(1.0) >= 1.0) return 1.0;
    double lo = 0.0;
    double hi = 1.0;
    for (int iter = 0; iter < 200 && hi - lo > 1e-17; ++iter) {
        const double mid = 0.5 * (lo + hi);
        if (f(mid) > 1.0)
            lo = mid;
        else
            hi = mid;
    }
    return 0.5 * (lo + hi);
}

double maximally_mixed_distance(const ComplexVector& psi, int num_sites, const Block& block) {
    const ComplexMatrix m = block_amplitudes(psi, num_sites, block);
    const Eigen::Index d_a = m.rows();
    const Eigen::Index d_b = m.cols();
    const double flat = 1.0 / static_cast<double>(d_a);
    double sum = 0.0;
    if (d_a <= d_b) {
        const RealVector lambda = linalg::eigvalsh(m * m.adjoint());
        for (double l : lambda) sum += std::abs(l - flat);
    } else {
        // nonzero spectrum of M M^dag equals that of M^dag M; the other d_a - d_b eigenvalues vanish
        const RealVector lambda = linalg::eigvalsh(m.adjoint() * m);
        for (double l : lambda) sum += std::abs(l - flat);
        sum += static_cast<double>(d_a - d_b) * flat;
    }
    return 0.5 * sum;
}

// ---------------------------------------------------------------------------
// Reference RDMs

DensityMatrix steady_rdm(const SteadyStateKind& kind, const Trajectory& trajectory, const Block& block) {
    const EigenBasis& basis = trajectory.basis();
    const int num_sites = trajectory.num_sites();
    validate_block(block, num_sites);
    return std::visit(
        Overloaded{
            [&](const MaximallyMixed&) { return DensityMatrix::maximally_mixed(block.length); },
            [&](const auto& thermal) -> DensityMatrix
                requires std::is_same_v<std::decay_t<decltype(thermal)>, Gibbs> ||
                         std::is_same_v<std::decay_t<decltype(thermal)>, GibbsEnergyMatched>
            {
                require_full_basis(basis, "a Gibbs ensemble");
                const RealVector w = thermal_weights(kind, trajectory);
                const Eigen::Index d_a = Eigen::Index{1} << block.length;
                ComplexMatrix rho = ComplexMatrix::Zero(d_a, d_a);
                for (Eigen::Index start = 0; start < basis.dimension(); start += kChunk) {
                    const Eigen::Index count = std::min(kChunk, basis.dimension() - start);
                    rho += mixture_partial_trace(basis.eigenvectors(start, count), w.segment(start, count), num_sites,
                                                 block);
                }
                return DensityMatrix::trusted(std::move(rho));
            },
            [&](const DiagonalEnsemble&) {
                const auto levels = energy_levels(basis.energies());
                if (static_cast<Eigen::Index>(levels.size()) < basis.dimension())
                    log_message("diagonal ensemble: merged " + std::to_string(basis.dimension() - levels.size()) +
                                " degenerate eigenvalues into " + std::to_string(levels.size()) + " levels");
                const ComplexVector& c = trajectory.coefficients();
                const Eigen::Index d_a = Eigen::Index{1} << block.length;
                ComplexMatrix rho = ComplexMatrix::Zero(d_a, d_a);
                for (std::size_t start = 0; start < levels.size(); start += kChunk) {
                    const std::size_t stop = std::min(levels.size(), start + static_cast<std::size_t>(kChunk));
                    const Eigen::Index first = levels[start].first;
                    const Eigen::Index span = levels[stop - 1].last - first;
                    const ComplexMatrix v = basis.eigenvectors(first, span);
                    ComplexMatrix chi(v.rows(), static_cast<Eigen::Index>(stop - start));
                    for (std::size_t l = start; l < stop; ++l) {
                        const auto [lo, hi] = levels[l];
                        chi.col(static_cast<Eigen::Index>(l - start)) =
                            v.middleCols(lo - first, hi - lo) * c.segment(lo, hi - lo);
                    }
                    rho += mixture_partial_trace(chi, RealVector::Ones(chi.cols()), num_sites, block);
                }
                return DensityMatrix::trusted(std::move(rho));
            },
            [&](const TimeAveragedRdm& window) {
                const auto grid = uniform_grid(window.t_start, window.t_end, window.samples);
                const Eigen::Index d_a = Eigen::Index{1} << block.length;
                ComplexMatrix rho = ComplexMatrix::Zero(d_a, d_a);
                for (std::size_t start = 0; start < grid.size(); start += 32) {
                    const std::size_t count = std::min<std::size_t>(32, grid.size() - start);
                    ComplexMatrix states(basis.dimension(), static_cast<Eigen::Index>(count));
                    for (std::size_t k = 0; k < count; ++k)
                        states.col(static_cast<Eigen::Index>(k)) = trajectory.coefficients_at(grid[start + k]);
                    rho += mixture_partial_trace(basis.synthesize(states),
                                                 RealVector::Ones(static_cast<Eigen::Index>(count)), num_sites,
                                                 block);
                }
                return DensityMatrix::trusted(rho / static_cast<double>(grid.size()));
            },
        },
        kind);
}

DensityMatrix steady_rdm(const SteadyStateKind& kind, const ChainSpec& spec, const StateVector& psi0,
                         const Block& block) {
    const bool needs_full = std::holds_alternative<Gibbs>(kind) || std::holds_alternative<GibbsEnergyMatched>(kind);
    auto basis = std::make_shared<const EigenBasis>(needs_full ? diagonalize(spec) : diagonalize_for(spec, psi0));
    return steady_rdm(kind, Trajectory(std::move(basis), psi0), block);
}

// ---------------------------------------------------------------------------
// Distances

double total_steady_distance(const SteadyStateKind& kind, const Trajectory& trajectory, double t) {
    const EigenBasis& basis = trajectory.basis();
    return std::visit(
        Overloaded{
            [&](const MaximallyMixed&) { return 1.0 - std::ldexp(1.0, -trajectory.num_sites()); },
            [&](const auto&) -> double {  // Gibbs, GibbsEnergyMatched
                require_full_basis(basis, "a Gibbs ensemble");
                const RealVector p = trajectory.coefficients().cwiseAbs2();
                return pure_to_diagonal_distance(p, thermal_weights(kind, trajectory));
            },
            [&](const DiagonalEnsemble&) {
                const auto levels = energy_levels(basis.energies());
                RealVector p(static_cast<Eigen::Index>(levels.size()));
                for (std::size_t l = 0; l < levels.size(); ++l)
                    p(static_cast<Eigen::Index>(l)) =
                        trajectory.coefficients().segment(levels[l].first, levels[l].last - levels[l].first)
                            .squaredNorm();
                return pure_to_diagonal_distance(p, p);
            },
            [&](const TimeAveragedRdm& window) {
                const auto grid = uniform_grid(window.t_start, window.t_end, window.samples);
                const auto n = static_cast<Eigen::Index>(grid.size());
                ComplexMatrix factor(basis.dimension(), n + 1);
                RealVector weights(n + 1);
                factor.col(0) = trajectory.coefficients_at(t);
                weights(0) = 1.0;
                for (Eigen::Index k = 0; k < n; ++k) {
                    factor.col(k + 1) = trajectory.coefficients_at(grid[k]);
                    weights(k + 1) = -1.0 / static_cast<double>(n);
                }
                return 0.5 * trace_norm_lowrank(factor, weights);
            },
        },
        kind);
}

SteadyDistanceSeries steady_distance_series(const Trajectory& trajectory, const SteadyStateKind& kind,
                                            const Block& block, std::span<const double> times) {
    const int num_sites = trajectory.num_sites();
    validate_block(block, num_sites);
    SteadyDistanceSeries out;
    out.times.assign(times.begin(), times.end());
    const bool mixed = std::holds_alternative<MaximallyMixed>(kind);
    std::optional<DensityMatrix> reference;
    if (!mixed) reference = steady_rdm(kind, trajectory, block);
    const bool time_dependent_total = std::holds_alternative<TimeAveragedRdm>(kind);
    const double constant_total = time_dependent_total ? 0.0 : total_steady_distance(kind, trajectory, 0.0);

    for (std::size_t start = 0; start < times.size(); start += 32) {
        const std::size_t count = std::min<std::size_t>(32, times.size() - start);
        const auto samples = trajectory.sample(times.subspan(start, count));
        for (std::size_t k = 0; k < count; ++k) {
            const ComplexVector psi = samples.states.col(static_cast<Eigen::Index>(k));
            if (mixed) {
                out.subsystem.push_back(maximally_mixed_distance(psi, num_sites, block));
            } else {
                const ComplexMatrix m = block_amplitudes(psi, num_sites, block);
                out.subsystem.push_back(trace_distance(DensityMatrix::trusted(m * m.adjoint()), *reference));
            }
            out.total.push_back(time_dependent_total ? total_steady_distance(kind, trajectory, times[start + k])
                                                     : constant_total);
        }
    }
    return out;
}

}  // namespace relax

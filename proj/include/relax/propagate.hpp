// propagate.hpp - exact-diagonalization time evolution and evolution speeds
#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <span>
#include <variant>
#include <vector>

#include "relax/qmetric.hpp"
#include "relax/spinchain.hpp"
#include "relax/types.hpp"

namespace relax {

/// Spectral decomposition H = V diag(E) V^dagger, optionally restricted to an
/// invariant subspace spanned by a sorted list of computational basis states.
/// Immutable after construction; safe to share between threads.
class EigenBasis {
public:
    EigenBasis(RealVector energies, RealMatrix vectors, int num_sites, std::vector<std::uint64_t> support = {});
    EigenBasis(RealVector energies, ComplexMatrix vectors, int num_sites, std::vector<std::uint64_t> support = {});

    const RealVector& energies() const noexcept { return energies_; }
    int num_sites() const noexcept { return num_sites_; }
    Eigen::Index full_dimension() const noexcept { return Eigen::Index{1} << num_sites_; }
    /// Number of eigenvectors (dimension of the subspace).
    Eigen::Index dimension() const noexcept { return energies_.size(); }
    bool restricted() const noexcept { return !support_.empty(); }
    const std::vector<std::uint64_t>& support() const noexcept { return support_; }
    bool is_real() const noexcept { return std::holds_alternative<RealMatrix>(vectors_); }

    /// V^dagger psi. Throws DomainError if psi has weight > 1e-12 outside the subspace.
    ComplexVector coefficients(const StateVector& psi) const;

    /// Full-space vector(s) V c for eigen-coefficients c (one per column).
    ComplexVector synthesize(const ComplexVector& coefficients) const;
    ComplexMatrix synthesize(const ComplexMatrix& coefficients) const;

    /// n-th eigenvector embedded in the full space.
    ComplexVector eigenvector(Eigen::Index n) const;
    /// Eigenvectors first .. first+count-1 embedded in the full space.
    ComplexMatrix eigenvectors(Eigen::Index first, Eigen::Index count) const;

    /// Eigenvectors as a subspace matrix (dimension() x dimension()).
    ComplexMatrix vectors() const;

private:
    ComplexVector embed(const ComplexVector& sub) const;

    RealVector energies_;
    std::variant<RealMatrix, ComplexMatrix> vectors_;
    int num_sites_ = 0;
    std::vector<std::uint64_t> support_;
};

/// Full spectral decomposition, eigenvalues ascending. Throws DomainError when
/// the input deviates from Hermiticity by more than 1e-10.
EigenBasis diagonalize(const Hamiltonian& h);
EigenBasis diagonalize(const ComplexMatrix& h);
EigenBasis diagonalize(const ChainSpec& spec);

/// Eigenbasis of a fixed-magnetization sector (models with conserved Z only).
EigenBasis diagonalize_sector(const ChainSpec& spec, int num_down);

/// Uses the magnetization sector of psi0 when the model conserves it and psi0
/// lies in one sector; the full space otherwise.
EigenBasis diagonalize_for(const ChainSpec& spec, const StateVector& psi0);

/// V exp(-i diag(E) t) V^dagger psi0.
StateVector evolve(const EigenBasis& basis, const StateVector& psi0, double t);

/// sqrt(<H^2> - <H>^2), clipped at zero.
double energy_fluctuation(const Hamiltonian& h, const StateVector& psi);
double energy_fluctuation(const ComplexMatrix& h, const StateVector& psi);

/// Time evolution of one initial state in a fixed eigenbasis. Every sample is
/// computed directly from the initial eigen-coefficients, so no error
/// accumulates along the trajectory.
class Trajectory {
public:
    Trajectory(std::shared_ptr<const EigenBasis> basis, const StateVector& psi0);

    const EigenBasis& basis() const noexcept { return *basis_; }
    std::shared_ptr<const EigenBasis> shared_basis() const noexcept { return basis_; }
    int num_sites() const noexcept { return basis_->num_sites(); }
    const ComplexVector& coefficients() const noexcept { return coefficients_; }

    /// Eigen-coefficients at time t.
    ComplexVector coefficients_at(double t) const;
    StateVector state(double t) const;
    /// H psi(t) as a full-space vector.
    ComplexVector energy_derivative(double t) const;

    struct Samples {
        std::vector<double> times;
        ComplexMatrix states;    // one column per time
        ComplexMatrix h_states;  // H psi(t), one column per time
    };
    Samples sample(std::span<const double> times) const;

    double mean_energy() const noexcept { return mean_energy_; }
    /// Constant along the trajectory for a time-independent Hamiltonian.
    double energy_fluctuation() const noexcept { return energy_fluctuation_; }

private:
    std::shared_ptr<const EigenBasis> basis_;
    ComplexVector coefficients_;
    double mean_energy_ = 0.0;
    double energy_fluctuation_ = 0.0;
};

struct FiniteDifference {
    double step = 1e-4;
};
struct ExactDerivative {};

struct SpeedEstimate {
    double value = 0.0;
    std::variant<FiniteDifference, ExactDerivative> method;
    double time = 0.0;
};

inline constexpr double kDefaultSpeedStep = 1e-4;

/// metric(rho_A(t), rho_A(t + dt)) / dt. Throws DomainError for dt <= 0.
SpeedEstimate subsystem_speed_fd(const EigenBasis& basis, const StateVector& psi_t, const Block& block, double dt,
                                 MetricKind metric, double time = 0.0);

/// Half the trace norm of d rho_A / dt = tr_{\bar A}(-i [H, |psi><psi|]).
SpeedEstimate subsystem_speed_exact(const Hamiltonian& h, const StateVector& psi_t, const Block& block,
                                    double time = 0.0);

/// Same, from psi and H psi directly (neither needs to be normalized).
double subsystem_speed_exact(const ComplexVector& psi, const ComplexVector& h_psi, int num_sites, const Block& block);

/// N points from t_a to t_b inclusive. Throws DomainError for N < 2 or t_b <= t_a.
std::vector<double> uniform_grid(double t_a, double t_b, int samples);

/// Mean of f over uniform_grid(t_a, t_b, samples).
double time_average(const std::function<double(double)>& f, double t_a, double t_b, int samples);

}  // namespace relax

// freefermion.hpp - transverse-field Ising quenches as fermionic Gaussian states
//
// Jordan-Wigner Majoranas (site 0 first, strings to the left):
//   c_{2j}   = Z_0 ... Z_{j-1} X_j
//   c_{2j+1} = Z_0 ... Z_{j-1} Y_j
// Covariance: Gamma_ab = (i/2) <[c_a, c_b]>, so <c_a c_b> = delta_ab - i Gamma_ab.
// Quadratic Hamiltonians are written H = (i/4) c^T A c with A real antisymmetric;
// the Heisenberg evolution is then c(t) = exp(A t) c.
#pragma once

#include <vector>

#include "relax/qmetric.hpp"
#include "relax/types.hpp"

namespace relax {

class MajoranaCovariance {
public:
    static constexpr double kAntisymmetryTolerance = 1e-10;
    static constexpr double kSpectralTolerance = 1e-9;

    /// Validates antisymmetry and |eigenvalues of i Gamma| <= 1 + 1e-9; stores
    /// the antisymmetric part.
    explicit MajoranaCovariance(RealMatrix gamma);

    /// Antisymmetrizes without further checks.
    static MajoranaCovariance trusted(RealMatrix gamma);

    const RealMatrix& gamma() const noexcept { return gamma_; }
    int num_modes() const noexcept { return static_cast<int>(gamma_.rows() / 2); }

    /// tr rho^2 = prod_k (1 + lambda_k^2) / 2 over the mode occupations lambda_k.
    double purity() const;

private:
    struct Unchecked {};
    MajoranaCovariance(RealMatrix gamma, Unchecked);

    RealMatrix gamma_;
};

struct QuenchSpec {
    double h0 = 0.0;  // field of the initial ground state
    double h1 = 0.0;  // field of the evolving Hamiltonian
    int num_sites = 2;
};

/// A of H(h) = -1/2 sum_j (X_j X_{j+1} + h Z_j) restricted to even fermion
/// parity (antiperiodic fermions). Throws DomainError for odd or L < 2.
RealMatrix tfim_coupling_matrix(double h, int num_sites);

/// (1/4) sum_ab A_ab Gamma_ab = <(i/4) c^T A c>.
double quadratic_energy(const RealMatrix& coupling, const MajoranaCovariance& gamma);

/// Ground state of A in the Gaussian sense (all Bogoliubov modes empty).
MajoranaCovariance quadratic_ground_covariance(const RealMatrix& coupling);

/// TFIM ground state in the even-parity sector.
MajoranaCovariance ground_covariance(double h, int num_sites);

/// Evolution of the h0 ground state under the h1 Hamiltonian. The
/// single-particle spectrum is computed once; covariance(t) is O(L^3).
class QuenchDynamics {
public:
    /// Coherences between single-particle levels closer than this survive dephasing.
    static constexpr double kDephasingTolerance = 1e-9;

    explicit QuenchDynamics(const QuenchSpec& spec);

    const QuenchSpec& spec() const noexcept { return spec_; }
    const MajoranaCovariance& initial() const noexcept { return initial_; }
    MajoranaCovariance covariance(double t) const;
    /// Infinite-time average: level coherences with distinct frequencies removed.
    MajoranaCovariance gge() const;
    /// exp(A t) for the post-quench coupling matrix.
    RealMatrix propagator(double t) const;

private:
    QuenchSpec spec_;
    MajoranaCovariance initial_;
    RealVector frequencies_;  // eigenvalues of i A
    ComplexMatrix modes_;     // eigenvectors of i A
};

MajoranaCovariance quench_covariance(const QuenchSpec& spec, double t);
MajoranaCovariance gge_covariance(const QuenchSpec& spec);

/// Principal submatrix of the block's 2 L_A Majoranas. Blocks that wrap past
/// the end of the chain are rejected: their Jordan-Wigner strings do not cancel.
MajoranaCovariance block_covariance(const MajoranaCovariance& gamma, const Block& block);

// ---------------------------------------------------------------------------
// Metrics between Gaussian states

struct GaussianMetricOptions {
    RelativeEntropyOptions relative_entropy;
    /// Shrink factor applied to both covariances when 1 + G1 G2 is singular.
    double regularization = 1e-12;
};

struct GaussianMetricValue {
    double value = 0.0;
    bool regularized = false;
};

/// tr(rho sigma).
GaussianMetricValue gaussian_overlap(const MajoranaCovariance& rho, const MajoranaCovariance& sigma,
                                     const GaussianMetricOptions& options = {});

/// tr sqrt(sqrt(rho) sigma sqrt(rho)).
GaussianMetricValue gaussian_fidelity(const MajoranaCovariance& rho, const MajoranaCovariance& sigma,
                                      const GaussianMetricOptions& options = {});

/// S(rho || sigma); +infinity when the support condition fails.
double gaussian_relative_entropy(const MajoranaCovariance& rho, const MajoranaCovariance& sigma,
                                 const RelativeEntropyOptions& options = {});

/// Bures, Schatten2, NormalizedSchatten2 or RelativeDistance. TraceDistance
/// raises UnsupportedMetricError.
GaussianMetricValue gaussian_metric(const MajoranaCovariance& rho, const MajoranaCovariance& sigma, MetricKind metric,
                                    const GaussianMetricOptions& options = {});

/// metric(Gamma_A(t), Gamma_A(t + dt)) / dt along a quench. Throws DomainError for dt <= 0.
GaussianMetricValue gaussian_speed_fd(const QuenchDynamics& dynamics, const Block& block, double t, double dt,
                                      MetricKind metric, const GaussianMetricOptions& options = {});

// ---------------------------------------------------------------------------
// Dense bridges (small systems only)

inline constexpr int kMaxDenseModes = 12;

/// Full 2^n x 2^n density matrix of the Gaussian state, n <= kMaxDenseModes.
DensityMatrix reconstruct_density(const MajoranaCovariance& gamma);

/// Covariance of a dense state with respect to the Jordan-Wigner Majoranas.
MajoranaCovariance covariance_of(const DensityMatrix& rho);
MajoranaCovariance covariance_of(const StateVector& psi);

/// c_a applied from the left to every column of m (m has 2^n rows).
ComplexMatrix apply_majorana(int a, int num_modes, const ComplexMatrix& m);

}  // namespace relax

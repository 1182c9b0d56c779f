// qmetric.hpp - quantum states on spin-1/2 chains and distances between them
//
// Basis convention: for a chain of L sites, site 0 is the most significant bit
// of the computational-basis index and spin-up is bit value 0. Subsystems are
// contiguous blocks on the ring; a block may wrap past site L-1 back to 0.
// Inside a block the first site is again the most significant bit.
#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "relax/types.hpp"

namespace relax {

/// Contiguous block of `length` sites starting at `first_site`, cyclic.
struct Block {
    int first_site = 0;
    int length = 1;

    friend bool operator==(const Block&, const Block&) = default;
};

/// Throws DomainError unless 1 <= length <= L and 0 <= first_site < L.
void validate_block(const Block& block, int num_sites);

/// Site indices of the block in block order.
std::vector<int> block_sites(const Block& block, int num_sites);

/// True when the block does not wrap past the end of the chain.
bool is_linear_block(const Block& block, int num_sites);

class StateVector {
public:
    static constexpr double kNormTolerance = 1e-12;

    /// Validates length 2^L and unit norm.
    explicit StateVector(ComplexVector amplitudes);

    /// Normalizes `raw` first; throws if it is the zero vector.
    static StateVector normalized(ComplexVector raw);

    int num_sites() const noexcept { return num_sites_; }
    Eigen::Index dimension() const noexcept { return amplitudes_.size(); }
    const ComplexVector& amplitudes() const noexcept { return amplitudes_; }

    /// <this|other>
    Complex overlap(const StateVector& other) const;

private:
    ComplexVector amplitudes_;
    int num_sites_ = 0;
};

class DensityMatrix {
public:
    static constexpr double kHermitianTolerance = 1e-12;
    static constexpr double kTraceTolerance = 1e-12;
    static constexpr double kPsdTolerance = 1e-10;

    /// Full validation: Hermitian, unit trace, numerically PSD. The stored
    /// matrix is the Hermitian part of the input.
    explicit DensityMatrix(ComplexMatrix matrix);

    /// For matrices that are PSD by construction (M M^dagger, Gaussian
    /// reconstructions). Only the dimension is checked.
    static DensityMatrix trusted(ComplexMatrix matrix);

    static DensityMatrix pure(const StateVector& psi);
    static DensityMatrix maximally_mixed(int num_sites);

    int num_sites() const noexcept { return num_sites_; }
    Eigen::Index dimension() const noexcept { return matrix_.rows(); }
    const ComplexMatrix& matrix() const noexcept { return matrix_; }
    double purity() const;

private:
    struct Unchecked {};
    DensityMatrix(ComplexMatrix matrix, Unchecked);

    ComplexMatrix matrix_;
    int num_sites_ = 0;
};

enum class MetricKind { TraceDistance, Bures, Schatten2, NormalizedSchatten2, RelativeDistance };

std::string_view to_string(MetricKind kind);
/// Accepts the names produced by to_string; throws DomainError otherwise.
MetricKind parse_metric_kind(std::string_view name);

// ---------------------------------------------------------------------------
// Partial traces

/// Amplitudes reshaped to a d_A x d_B matrix, rows indexed by the block, columns
/// by the complement (complement sites in increasing site order).
ComplexMatrix block_amplitudes(const ComplexVector& psi, int num_sites, const Block& block);

/// tr_{\bar A} |psi><psi|.
DensityMatrix partial_trace(const StateVector& psi, int first_site, int length);
DensityMatrix partial_trace(const StateVector& psi, const Block& block);

/// tr_{\bar A} |ket><bra| for arbitrary (not necessarily normalized) vectors.
ComplexMatrix reduced_transition(const ComplexVector& ket, const ComplexVector& bra, int num_sites,
                                 const Block& block);

/// Partial trace of an arbitrary operator on the full chain.
ComplexMatrix reduced_operator(const ComplexMatrix& full, int num_sites, const Block& block);

// ---------------------------------------------------------------------------
// Norms

/// Sum of |eigenvalues| of the Hermitian part of `m`.
double trace_norm(const ComplexMatrix& m);

/// Trace norm of U diag(w) U^dagger, computed in whichever of the two spaces
/// (rows of U or columns of U) is smaller.
double trace_norm_lowrank(const ComplexMatrix& factor, const RealVector& weights);

// ---------------------------------------------------------------------------
// Distances

/// Half the trace norm of rho - sigma.
double trace_distance(const DensityMatrix& rho, const DensityMatrix& sigma);

/// sqrt(1 - |<psi|phi>|^2).
double pure_trace_distance(const StateVector& psi, const StateVector& phi);

/// tr sqrt(sqrt(rho) sigma sqrt(rho)), evaluated as the nuclear norm of
/// sqrt(rho) sqrt(sigma). Eigenvalues down to -1e-8 are clipped to zero;
/// anything more negative raises StateValidityError.
double fidelity(const DensityMatrix& rho, const DensityMatrix& sigma);

/// sqrt(2 (1 - F)).
double bures_distance(const DensityMatrix& rho, const DensityMatrix& sigma);

/// sqrt(tr[(rho - sigma)^2] / 2).
double schatten2_distance(const DensityMatrix& rho, const DensityMatrix& sigma);

/// sqrt(tr[(rho - sigma)^2] / (tr rho^2 + tr sigma^2)).
double normalized_schatten2_distance(const DensityMatrix& rho, const DensityMatrix& sigma);

struct RelativeEntropyOptions {
    /// Eigenvalues of sigma at or below this value are outside its support.
    double support_cutoff = 1e-12;
    /// Eigenvalues of rho, and weights outside supp(sigma), above this count.
    double weight_tolerance = 1e-10;
};

/// tr(rho log rho) - tr(rho log sigma); +infinity when supp(rho) is not
/// contained in supp(sigma).
double relative_entropy(const DensityMatrix& rho, const DensityMatrix& sigma,
                        const RelativeEntropyOptions& options = {});

/// sqrt(S(rho||sigma) / 2); +infinity when the relative entropy diverges.
double relative_distance(const DensityMatrix& rho, const DensityMatrix& sigma,
                         const RelativeEntropyOptions& options = {});

double distance(MetricKind kind, const DensityMatrix& rho, const DensityMatrix& sigma);

/// Same metrics for two pure states, from their overlap alone.
double pure_distance(MetricKind kind, const StateVector& psi, const StateVector& phi);

}  // namespace relax

// spinchain.hpp - periodic spin-1/2 chain Hamiltonians, disorder and initial states
//
// Models (sums run over all L bonds of the ring, site L wraps to site 0):
//   chaotic Ising   H = -1/2 sum_j (X_j X_{j+1} + h_x X_j + h_z Z_j)
//   TFIM            H = -1/2 sum_j (X_j X_{j+1} + h_z Z_j)
//   XXZ             H = sum_j [ 1/4 (X_j X_{j+1} + Y_j Y_{j+1} + Delta Z_j Z_{j+1}) + 1/2 h_j Z_j ]
// All three are real symmetric in the Z product basis.
#pragma once

#include <cstdint>
#include <optional>
#include <string_view>
#include <variant>
#include <vector>

#include "relax/qmetric.hpp"
#include "relax/types.hpp"

namespace relax {

struct ChaoticIsing {
    double h_x = 0.0;
    double h_z = 0.0;
};

struct Tfim {
    double h_z = 0.0;
};

struct Xxz {
    double delta = 1.0;
    std::vector<double> fields;  // one per site
};

using ChainModel = std::variant<ChaoticIsing, Tfim, Xxz>;

class ChainSpec {
public:
    /// Throws DomainError for L < 2 or an XXZ field vector of the wrong length.
    ChainSpec(ChainModel model, int num_sites);

    const ChainModel& model() const noexcept { return model_; }
    int num_sites() const noexcept { return num_sites_; }
    Eigen::Index dimension() const noexcept { return Eigen::Index{1} << num_sites_; }

    /// Uniform couplings and fields (no site dependence).
    bool translation_invariant() const;
    /// Total Z magnetization commutes with H.
    bool conserves_magnetization() const;

private:
    ChainModel model_;
    int num_sites_;
};

/// Dense storage guard: 2^L x 2^L matrices only up to this size.
inline constexpr int kMaxDenseSites = 14;

/// Real symmetric Hamiltonian matrix in the Z product basis.
using Hamiltonian = RealMatrix;

/// Throws ResourceError above kMaxDenseSites.
Hamiltonian build_hamiltonian(const ChainSpec& spec);

/// Hamiltonian restricted to the listed computational basis states (sorted
/// ascending). Exact only for spaces the model leaves invariant, e.g. fixed
/// magnetization sectors of XXZ.
Hamiltonian build_hamiltonian(const ChainSpec& spec, const std::vector<std::uint64_t>& basis_states);

/// Basis states with exactly `num_down` down spins, ascending.
std::vector<std::uint64_t> magnetization_sector(int num_sites, int num_down);

// ---------------------------------------------------------------------------
// Disorder

struct DisorderSpec {
    double strength = 0.0;  // h >= 0, fields uniform in [-h, h]
    std::uint64_t seed = 0;
    std::uint64_t realization_index = 0;
};

/// Deterministic in (seed, realization_index, L); independent streams per
/// realization so realizations can be drawn in any order.
std::vector<double> sample_disorder(const DisorderSpec& disorder, int num_sites);

/// 64-bit stream seed derived from a base seed and a stream index.
std::uint64_t derive_seed(std::uint64_t base_seed, std::uint64_t stream);

// ---------------------------------------------------------------------------
// Initial states

enum class ProductStateKind { XPlus, YPlus, ZPlus, Neel };

struct RandomGaussianState {
    std::uint64_t seed = 0;
    bool complex_amplitudes = true;
};

struct ProductState {
    ProductStateKind kind = ProductStateKind::ZPlus;
};

struct GroundState {
    ChainSpec spec;
};

using InitialStateKind = std::variant<RandomGaussianState, ProductState, GroundState>;

std::string_view to_string(ProductStateKind kind);
ProductStateKind parse_product_state(std::string_view name);

/// Throws DomainError for Neel with odd L or a ground state of a different size.
StateVector make_initial_state(const InitialStateKind& kind, int num_sites);

/// Number of down spins if psi lies in a single magnetization sector
/// (weight outside below 1e-12).
std::optional<int> definite_magnetization(const StateVector& psi);

}  // namespace relax

// spinchain.cpp - Hamiltonian construction, disorder sampling, initial states

#include "relax/spinchain.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <random>
#include <string>

#include "relax/errors.hpp"
#include "relax/linalg.hpp"

namespace relax {

namespace {

template <class... Ts>
struct Overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

// Spin value (+1 up / -1 down) of `site` in basis index `state`.
inline double z_value(std::uint64_t state, int site, int num_sites) {
    return ((state >> (num_sites - 1 - site)) & 1U) ? -1.0 : 1.0;
}

inline std::uint64_t site_mask(int site, int num_sites) { return std::uint64_t{1} << (num_sites - 1 - site); }

// Visits every nonzero matrix element H(row, col) with `row`, `col` basis
// states; diagonal entries are reported once per state.
template <class Visit>
void for_each_element(const ChainSpec& spec, std::uint64_t state, Visit&& visit) {
    const int L = spec.num_sites();
    std::visit(Overloaded{
                   [&](const ChaoticIsing& m) {
                       double diag = 0.0;
                       for (int j = 0; j < L; ++j) {
                           const int k = (j + 1) % L;
                           visit(state ^ site_mask(j, L) ^ site_mask(k, L), -0.5);
                           visit(state ^ site_mask(j, L), -0.5 * m.h_x);
                           diag += -0.5 * m.h_z * z_value(state, j, L);
                       }
                       visit(state, diag);
                   },
                   [&](const Tfim& m) {
                       double diag = 0.0;
                       for (int j = 0; j < L; ++j) {
                           const int k = (j + 1) % L;
                           visit(state ^ site_mask(j, L) ^ site_mask(k, L), -0.5);
                           diag += -0.5 * m.h_z * z_value(state, j, L);
                       }
                       visit(state, diag);
                   },
                   [&](const Xxz& m) {
                       double diag = 0.0;
                       for (int j = 0; j < L; ++j) {
                           const int k = (j + 1) % L;
                           const double zz = z_value(state, j, L) * z_value(state, k, L);
                           // XX + YY = 2 (S+S- + S-S+): flips antiparallel pairs with amplitude 2
                           if (zz < 0.0) visit(state ^ site_mask(j, L) ^ site_mask(k, L), 0.5);
                           diag += 0.25 * m.delta * zz + 0.5 * m.fields[j] * z_value(state, j, L);
                       }
                       visit(state, diag);
                   },
               },
               spec.model());
}

void guard_dense(int num_sites) {
    if (num_sites > kMaxDenseSites)
        throw ResourceError("dense Hamiltonian for L=" + std::to_string(num_sites) + " exceeds the L<=" +
                            std::to_string(kMaxDenseSites) + " guard; a sparse/Krylov path is required");
}

}  // namespace

// ---------------------------------------------------------------------------
// ChainSpec

ChainSpec::ChainSpec(ChainModel model, int num_sites) : model_(std::move(model)), num_sites_(num_sites) {
    if (num_sites_ < 2) throw DomainError("chain needs at least 2 sites");
    if (num_sites_ > 62) throw DomainError("chain too long for 64-bit basis indices");
    if (const auto* xxz = std::get_if<Xxz>(&model_)) {
        if (static_cast<int>(xxz->fields.size()) != num_sites_)
            throw DomainError("XXZ field vector has length " + std::to_string(xxz->fields.size()) + ", expected " +
                              std::to_string(num_sites_));
    }
}

bool ChainSpec::translation_invariant() const {
    if (const auto* xxz = std::get_if<Xxz>(&model_))
        return std::all_of(xxz->fields.begin(), xxz->fields.end(),
                           [&](double h) { return h == xxz->fields.front(); });
    return true;
}

bool ChainSpec::conserves_magnetization() const {
    return std::holds_alternative<Xxz>(model_);
}

// ---------------------------------------------------------------------------
// Hamiltonians

Hamiltonian build_hamiltonian(const ChainSpec& spec) {
    guard_dense(spec.num_sites());
    const Eigen::Index dim = spec.dimension();
    Hamiltonian h = Hamiltonian::Zero(dim, dim);
    for (Eigen::Index col = 0; col < dim; ++col) {
        const auto state = static_cast<std::uint64_t>(col);
        for_each_element(spec, state, [&](std::uint64_t row, double value) {
            h(static_cast<Eigen::Index>(row), col) += value;
        });
    }
    return h;
}

Hamiltonian build_hamiltonian(const ChainSpec& spec, const std::vector<std::uint64_t>& basis_states) {
    guard_dense(spec.num_sites());
    if (!std::is_sorted(basis_states.begin(), basis_states.end()))
        throw DomainError("sector basis states must be sorted");
    const auto n = static_cast<Eigen::Index>(basis_states.size());
    Hamiltonian h = Hamiltonian::Zero(n, n);
    for (Eigen::Index col = 0; col < n; ++col) {
        for_each_element(spec, basis_states[col], [&](std::uint64_t row_state, double value) {
            const auto it = std::lower_bound(basis_states.begin(), basis_states.end(), row_state);
            if (it == basis_states.end() || *it != row_state) {
                if (value != 0.0) throw DomainError("basis states do not span an invariant subspace");
                return;
            }
            h(it - basis_states.begin(), col) += value;
        });
    }
    return h;
}

std::vector<std::uint64_t> magnetization_sector(int num_sites, int num_down) {
    if (num_sites < 1 || num_sites > 62) throw DomainError("magnetization_sector: bad number of sites");
    if (num_down < 0 || num_down > num_sites) throw DomainError("magnetization_sector: bad number of down spins");
    std::vector<std::uint64_t> states;
    const std::uint64_t dim = std::uint64_t{1} << num_sites;
    for (std::uint64_t s = 0; s < dim; ++s)
        if (std::popcount(s) == num_down) states.push_back(s);
    return states;
}

// ---------------------------------------------------------------------------
// Disorder

std::uint64_t derive_seed(std::uint64_t base_seed, std::uint64_t stream) {
    return splitmix64(splitmix64(base_seed) ^ splitmix64(stream + 0x5851F42D4C957F2DULL));
}

std::vector<double> sample_disorder(const DisorderSpec& disorder, int num_sites) {
    if (!(disorder.strength >= 0.0) || !std::isfinite(disorder.strength))
        throw DomainError("disorder strength must be finite and >= 0");
    if (num_sites < 0) throw DomainError("negative number of sites");
    std::vector<double> fields(num_sites, 0.0);
    if (disorder.strength == 0.0) return fields;
    std::mt19937_64 rng(derive_seed(disorder.seed, disorder.realization_index));
    std::uniform_real_distribution<double> uniform(-disorder.strength, disorder.strength);
    for (double& h : fields) h = uniform(rng);
    return fields;
}

// ---------------------------------------------------------------------------
// Initial states

std::string_view to_string(ProductStateKind kind) {
    switch (kind) {
        case ProductStateKind::XPlus: return "x+";
        case ProductStateKind::YPlus: return "y+";
        case ProductStateKind::ZPlus: return "z+";
        case ProductStateKind::Neel: return "neel";
    }
    return "unknown";
}

ProductStateKind parse_product_state(std::string_view name) {
    for (auto kind : {ProductStateKind::XPlus, ProductStateKind::YPlus, ProductStateKind::ZPlus, ProductStateKind::Neel})
        if (to_string(kind) == name) return kind;
    throw DomainError("unknown product state '" + std::string(name) + "'");
}

StateVector make_initial_state(const InitialStateKind& kind, int num_sites) {
    if (num_sites < 1 || num_sites > 30) throw DomainError("initial state: unsupported number of sites");
    const Eigen::Index dim = Eigen::Index{1} << num_sites;
    return std::visit(
        Overloaded{
            [&](const RandomGaussianState& k) {
                std::mt19937_64 rng(derive_seed(k.seed, 0));
                std::normal_distribution<double> normal;
                ComplexVector amps(dim);
                for (Eigen::Index i = 0; i < dim; ++i) {
                    const double re = normal(rng);
                    const double im = k.complex_amplitudes ? normal(rng) : 0.0;
                    amps(i) = Complex(re, im);
                }
                return StateVector::normalized(std::move(amps));
            },
            [&](const ProductState& k) {
                if (k.kind == ProductStateKind::Neel && num_sites % 2 != 0)
                    throw DomainError("Neel state requires an even number of sites");
                const double r = 1.0 / std::sqrt(2.0);
                // (up, down) amplitudes of a single site
                auto site_amps = [&](int site) -> std::pair<Complex, Complex> {
                    switch (k.kind) {
                        case ProductStateKind::XPlus: return {r, r};
                        case ProductStateKind::YPlus: return {r, Complex(0.0, r)};
                        case ProductStateKind::ZPlus: return {1.0, 0.0};
                        case ProductStateKind::Neel: return site % 2 == 0 ? std::pair<Complex, Complex>{1.0, 0.0}
                                                                          : std::pair<Complex, Complex>{0.0, 1.0};
                    }
                    return {1.0, 0.0};
                };
                ComplexVector amps(dim);
                for (Eigen::Index i = 0; i < dim; ++i) {
                    Complex a = 1.0;
                    for (int site = 0; site < num_sites; ++site) {
                        const auto [up, down] = site_amps(site);
                        a *= ((i >> (num_sites - 1 - site)) & 1) ? down : up;
                    }
                    amps(i) = a;
                }
                return StateVector(std::move(amps));
            },
            [&](const GroundState& k) {
                if (k.spec.num_sites() != num_sites) throw DomainError("ground state spec has a different size");
                const auto es = linalg::eigh(build_hamiltonian(k.spec));
                return StateVector::normalized(es.vectors.col(0).cast<Complex>());
            },
        },
        kind);
}

std::optional<int> definite_magnetization(const StateVector& psi) {
    const ComplexVector& a = psi.amplitudes();
    std::vector<double> weight(psi.num_sites() + 1, 0.0);
    for (Eigen::Index i = 0; i < a.size(); ++i) weight[std::popcount(static_cast<std::uint64_t>(i))] += std::norm(a(i));
    const auto best = std::max_element(weight.begin(), weight.end());
    if (1.0 - *best > 1e-12) return std::nullopt;
    return static_cast<int>(best - weight.begin());
}

}  // namespace relax

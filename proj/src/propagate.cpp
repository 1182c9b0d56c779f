// propagate.cpp - eigenbasis time evolution and speed estimators

#include "relax/propagate.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "relax/errors.hpp"
#include "relax/linalg.hpp"

namespace relax {

namespace {

constexpr double kHermitianInputTolerance = 1e-10;
constexpr double kOutsideWeightTolerance = 1e-12;

int sites_for_dimension(Eigen::Index dim) {
    int bits = 0;
    while ((Eigen::Index{1} << bits) < dim) ++bits;
    if ((Eigen::Index{1} << bits) != dim || bits < 1) throw DomainError("operator dimension must be 2^L with L >= 1");
    return bits;
}

ComplexVector phases(const RealVector& energies, double t) {
    return (energies.cast<Complex>() * Complex(0.0, -t)).array().exp().matrix();
}

template <class Matrix>
ComplexMatrix apply_vectors(const Matrix& v, const ComplexMatrix& c) {
    if constexpr (std::is_same_v<Matrix, RealMatrix>) {
        ComplexMatrix out(v.rows(), c.cols());
        out.real() = v * c.real();
        out.imag() = v * c.imag();
        return out;
    } else {
        return v * c;
    }
}

template <class Matrix>
ComplexMatrix apply_adjoint(const Matrix& v, const ComplexMatrix& x) {
    if constexpr (std::is_same_v<Matrix, RealMatrix>) {
        ComplexMatrix out(v.cols(), x.cols());
        out.real() = v.transpose() * x.real();
        out.imag() = v.transpose() * x.imag();
        return out;
    } else {
        return v.adjoint() * x;
    }
}

}  // namespace

// ---------------------------------------------------------------------------
// EigenBasis

EigenBasis::EigenBasis(RealVector energies, RealMatrix vectors, int num_sites, std::vector<std::uint64_t> support)
    : energies_(std::move(energies)), vectors_(std::move(vectors)), num_sites_(num_sites), support_(std::move(support)) {
    const auto& v = std::get<RealMatrix>(vectors_);
    const Eigen::Index expected = support_.empty() ? full_dimension() : static_cast<Eigen::Index>(support_.size());
    if (v.rows() != expected || v.cols() != energies_.size() || energies_.size() != expected)
        throw DomainError("eigenbasis dimensions are inconsistent");
}

EigenBasis::EigenBasis(RealVector energies, ComplexMatrix vectors, int num_sites, std::vector<std::uint64_t> support)
    : energies_(std::move(energies)), vectors_(std::move(vectors)), num_sites_(num_sites), support_(std::move(support)) {
    const auto& v = std::get<ComplexMatrix>(vectors_);
    const Eigen::Index expected = support_.empty() ? full_dimension() : static_cast<Eigen::Index>(support_.size());
    if (v.rows() != expected || v.cols() != energies_.size() || energies_.size() != expected)
        throw DomainError("eigenbasis dimensions are inconsistent");
}

ComplexVector EigenBasis::coefficients(const StateVector& psi) const {
    if (psi.dimension() != full_dimension()) throw DomainError("state dimension does not match the eigenbasis");
    ComplexMatrix sub;
    if (support_.empty()) {
        sub = psi.amplitudes();
    } else {
        sub.resize(dimension(), 1);
        double inside = 0.0;
        for (Eigen::Index k = 0; k < dimension(); ++k) {
            sub(k, 0) = psi.amplitudes()(static_cast<Eigen::Index>(support_[k]));
            inside += std::norm(sub(k, 0));
        }
        if (1.0 - inside > kOutsideWeightTolerance)
            throw DomainError("state has weight outside the eigenbasis subspace");
    }
    return std::visit([&](const auto& v) -> ComplexVector { return apply_adjoint(v, sub).col(0); }, vectors_);
}

ComplexVector EigenBasis::embed(const ComplexVector& sub) const {
    if (support_.empty()) return sub;
    ComplexVector full = ComplexVector::Zero(full_dimension());
    for (Eigen::Index k = 0; k < dimension(); ++k) full(static_cast<Eigen::Index>(support_[k])) = sub(k);
    return full;
}

ComplexVector EigenBasis::synthesize(const ComplexVector& coefficients) const {
    if (coefficients.size() != dimension()) throw DomainError("coefficient vector has the wrong length");
    return embed(std::visit([&](const auto& v) -> ComplexVector { return apply_vectors(v, coefficients).col(0); },
                            vectors_));
}

ComplexMatrix EigenBasis::synthesize(const ComplexMatrix& coefficients) const {
    if (coefficients.rows() != dimension()) throw DomainError("coefficient matrix has the wrong height");
    ComplexMatrix sub = std::visit([&](const auto& v) { return apply_vectors(v, coefficients); }, vectors_);
    if (support_.empty()) return sub;
    ComplexMatrix full = ComplexMatrix::Zero(full_dimension(), coefficients.cols());
    for (Eigen::Index k = 0; k < dimension(); ++k) full.row(static_cast<Eigen::Index>(support_[k])) = sub.row(k);
    return full;
}

ComplexVector EigenBasis::eigenvector(Eigen::Index n) const {
    if (n < 0 || n >= dimension()) throw DomainError("eigenvector index out of range");
    return embed(std::visit([&](const auto& v) -> ComplexVector { return v.col(n).template cast<Complex>(); },
                            vectors_));
}

ComplexMatrix EigenBasis::eigenvectors(Eigen::Index first, Eigen::Index count) const {
    if (first < 0 || count < 0 || first + count > dimension()) throw DomainError("eigenvector range out of bounds");
    ComplexMatrix sub = std::visit(
        [&](const auto& v) -> ComplexMatrix { return v.middleCols(first, count).template cast<Complex>(); }, vectors_);
    if (support_.empty()) return sub;
    ComplexMatrix full = ComplexMatrix::Zero(full_dimension(), count);
    for (Eigen::Index k = 0; k < dimension(); ++k) full.row(static_cast<Eigen::Index>(support_[k])) = sub.row(k);
    return full;
}

ComplexMatrix EigenBasis::vectors() const {
    return std::visit([](const auto& v) -> ComplexMatrix { return v.template cast<Complex>(); }, vectors_);
}

// ---------------------------------------------------------------------------
// Diagonalization

EigenBasis diagonalize(const Hamiltonian& h) {
    if (h.rows() != h.cols()) throw DomainError("Hamiltonian is not square");
    if (linalg::symmetry_defect(h) > kHermitianInputTolerance) throw DomainError("Hamiltonian is not Hermitian");
    const int num_sites = sites_for_dimension(h.rows());
    auto es = linalg::eigh(h);
    return EigenBasis(std::move(es.values), std::move(es.vectors), num_sites);
}

EigenBasis diagonalize(const ComplexMatrix& h) {
    if (h.rows() != h.cols()) throw DomainError("Hamiltonian is not square");
    if (linalg::hermiticity_defect(h) > kHermitianInputTolerance) throw DomainError("Hamiltonian is not Hermitian");
    const int num_sites = sites_for_dimension(h.rows());
    auto es = linalg::eigh(linalg::hermitian_part(h));
    return EigenBasis(std::move(es.values), std::move(es.vectors), num_sites);
}

EigenBasis diagonalize(const ChainSpec& spec) { return diagonalize(build_hamiltonian(spec)); }

EigenBasis diagonalize_sector(const ChainSpec& spec, int num_down) {
    if (!spec.conserves_magnetization()) throw DomainError("model does not conserve the magnetization");
    auto states = magnetization_sector(spec.num_sites(), num_down);
    auto es = linalg::eigh(build_hamiltonian(spec, states));
    return EigenBasis(std::move(es.values), std::move(es.vectors), spec.num_sites(), std::move(states));
}

EigenBasis diagonalize_for(const ChainSpec& spec, const StateVector& psi0) {
    if (psi0.num_sites() != spec.num_sites()) throw DomainError("initial state size does not match the chain");
    if (spec.conserves_magnetization()) {
        if (const auto down = definite_magnetization(psi0)) return diagonalize_sector(spec, *down);
    }
    return diagonalize(spec);
}

StateVector evolve(const EigenBasis& basis, const StateVector& psi0, double t) {
    const ComplexVector c = basis.coefficients(psi0);
    if (t == 0.0) return psi0;
    return StateVector::normalized(basis.synthesize(ComplexVector(phases(basis.energies(), t).cwiseProduct(c))));
}

namespace {

template <class Matrix>
double fluctuation_of(const Matrix& h, const StateVector& psi) {
    if (h.rows() != psi.dimension() || h.cols() != psi.dimension())
        throw DomainError("Hamiltonian and state dimensions differ");
    ComplexVector h_psi;
    if constexpr (std::is_same_v<Matrix, RealMatrix>) {
        h_psi.resize(psi.dimension());
        h_psi.real() = h * psi.amplitudes().real();
        h_psi.imag() = h * psi.amplitudes().imag();
    } else {
        h_psi = h * psi.amplitudes();
    }
    const double mean = psi.amplitudes().dot(h_psi).real();
    const double second = h_psi.squaredNorm();
    return std::sqrt(std::max(0.0, second - mean * mean));
}

}  // namespace

double energy_fluctuation(const Hamiltonian& h, const StateVector& psi) { return fluctuation_of(h, psi); }
double energy_fluctuation(const ComplexMatrix& h, const StateVector& psi) { return fluctuation_of(h, psi); }

// ---------------------------------------------------------------------------
// Trajectory

Trajectory::Trajectory(std::shared_ptr<const EigenBasis> basis, const StateVector& psi0)
    : basis_(std::move(basis)) {
    if (!basis_) throw DomainError("trajectory needs an eigenbasis");
    coefficients_ = basis_->coefficients(psi0);
    const RealVector populations = coefficients_.cwiseAbs2();
    const double total = populations.sum();
    mean_energy_ = populations.dot(basis_->energies()) / total;
    const RealVector centered = basis_->energies().array() - mean_energy_;
    energy_fluctuation_ = std::sqrt(populations.dot(centered.cwiseAbs2()) / total);
}

ComplexVector Trajectory::coefficients_at(double t) const {
    return phases(basis_->energies(), t).cwiseProduct(coefficients_);
}

StateVector Trajectory::state(double t) const {
    return StateVector::normalized(basis_->synthesize(coefficients_at(t)));
}

ComplexVector Trajectory::energy_derivative(double t) const {
    return basis_->synthesize(ComplexVector(basis_->energies().cast<Complex>().cwiseProduct(coefficients_at(t))));
}

Trajectory::Samples Trajectory::sample(std::span<const double> times) const {
    const auto n = static_cast<Eigen::Index>(times.size());
    ComplexMatrix c(basis_->dimension(), n);
    for (Eigen::Index k = 0; k < n; ++k) c.col(k) = coefficients_at(times[k]);
    Samples out;
    out.times.assign(times.begin(), times.end());
    out.states = basis_->synthesize(c);
    out.h_states = basis_->synthesize(ComplexMatrix(basis_->energies().cast<Complex>().asDiagonal() * c));
    return out;
}

// ---------------------------------------------------------------------------
// Speeds

SpeedEstimate subsystem_speed_fd(const EigenBasis& basis, const StateVector& psi_t, const Block& block, double dt,
                                 MetricKind metric, double time) {
    if (!(dt > 0.0)) throw DomainError("finite-difference step must be positive");
    validate_block(block, psi_t.num_sites());
    const StateVector later = evolve(basis, psi_t, dt);
    double d = 0.0;
    if (block.length == psi_t.num_sites())
        d = pure_distance(metric, psi_t, later);
    else
        d = distance(metric, partial_trace(psi_t, block), partial_trace(later, block));
    return SpeedEstimate{d / dt, FiniteDifference{dt}, time};
}

double subsystem_speed_exact(const ComplexVector& psi, const ComplexVector& h_psi, int num_sites, const Block& block) {
    const ComplexMatrix m_psi = block_amplitudes(psi, num_sites, block);
    const ComplexMatrix m_h = block_amplitudes(h_psi, num_sites, block);
    // -i (M_h M_psi^dag - M_psi M_h^dag) = W+ W+^dag - W- W-^dag,  W+- = (M_psi -+ i M_h) / sqrt 2
    const Eigen::Index cols = m_psi.cols();
    ComplexMatrix factor(m_psi.rows(), 2 * cols);
    const double r = 1.0 / std::sqrt(2.0);
    factor.leftCols(cols) = r * (m_psi - kI * m_h);
    factor.rightCols(cols) = r * (m_psi + kI * m_h);
    RealVector weights(2 * cols);
    weights.head(cols).setOnes();
    weights.tail(cols).setConstant(-1.0);
    return 0.5 * trace_norm_lowrank(factor, weights);
}

SpeedEstimate subsystem_speed_exact(const Hamiltonian& h, const StateVector& psi_t, const Block& block, double time) {
    if (h.rows() != psi_t.dimension()) throw DomainError("Hamiltonian and state dimensions differ");
    validate_block(block, psi_t.num_sites());
    ComplexVector h_psi(psi_t.dimension());
    h_psi.real() = h * psi_t.amplitudes().real();
    h_psi.imag() = h * psi_t.amplitudes().imag();
    return SpeedEstimate{subsystem_speed_exact(psi_t.amplitudes(), h_psi, psi_t.num_sites(), block), ExactDerivative{},
                         time};
}

// ---------------------------------------------------------------------------
// Time averages

std::vector<double> uniform_grid(double t_a, double t_b, int samples) {
    if (samples < 2) throw DomainError("time grid needs at least 2 samples");
    if (!(t_b > t_a)) throw DomainError("time window must satisfy t_b > t_a");
    std::vector<double> grid(samples);
    for (int k = 0; k < samples; ++k) grid[k] = t_a + (t_b - t_a) * static_cast<double>(k) / (samples - 1);
    grid.back() = t_b;
    return grid;
}

double time_average(const std::function<double(double)>& f, double t_a, double t_b, int samples) {
    const auto grid = uniform_grid(t_a, t_b, samples);
    double sum = 0.0;
    for (double t : grid) sum += f(t);
    return sum / static_cast<double>(grid.size());
}

}  // namespace relax

// qmetric.cpp - state containers, partial traces and distance functionals

#include "relax/qmetric.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "relax/errors.hpp"
#include "relax/linalg.hpp"

namespace relax {

namespace {

constexpr double kClipTolerance = 1e-8;

int log2_exact(Eigen::Index n) {
    if (n <= 0) return -1;
    int bits = 0;
    while ((Eigen::Index{1} << bits) < n) ++bits;
    return (Eigen::Index{1} << bits) == n ? bits : -1;
}

void require_same_dimension(const DensityMatrix& rho, const DensityMatrix& sigma) {
    if (rho.dimension() != sigma.dimension())
        throw DomainError("density matrices have different dimensions (" + std::to_string(rho.dimension()) +
                          " vs " + std::to_string(sigma.dimension()) + ")");
}

// Eigen-decomposition of a density matrix with roundoff clipping.
Eigen::SelfAdjointEigenSolver<ComplexMatrix> checked_spectrum(const ComplexMatrix& m) {
    Eigen::SelfAdjointEigenSolver<ComplexMatrix> solver(linalg::hermitian_part(m));
    if (solver.info() != Eigen::Success) throw Error("eigensolver did not converge");
    if (solver.eigenvalues().size() > 0 && solver.eigenvalues().minCoeff() < -kClipTolerance)
        throw StateValidityError("density matrix has eigenvalue " + std::to_string(solver.eigenvalues().minCoeff()));
    return solver;
}

ComplexMatrix psd_sqrt(const ComplexMatrix& m) {
    const auto solver = checked_spectrum(m);
    const RealVector roots = solver.eigenvalues().cwiseMax(0.0).cwiseSqrt();
    return solver.eigenvectors() * roots.asDiagonal() * solver.eigenvectors().adjoint();
}

// Bit positions (within the full index) of block and complement sites, most
// significant first.
struct SiteSplit {
    std::vector<int> block_bits;
    std::vector<int> rest_bits;
};

SiteSplit split_sites(int num_sites, const Block& block) {
    validate_block(block, num_sites);
    SiteSplit split;
    std::vector<bool> in_block(num_sites, false);
    for (int site : block_sites(block, num_sites)) {
        in_block[site] = true;
        split.block_bits.push_back(num_sites - 1 - site);
    }
    for (int site = 0; site < num_sites; ++site)
        if (!in_block[site]) split.rest_bits.push_back(num_sites - 1 - site);
    return split;
}

Eigen::Index gather_bits(Eigen::Index index, const std::vector<int>& bits) {
    Eigen::Index out = 0;
    for (int bit : bits) out = (out << 1) | ((index >> bit) & 1);
    return out;
}

}  // namespace

// ---------------------------------------------------------------------------
// Blocks

void validate_block(const Block& block, int num_sites) {
    if (block.length < 1 || block.length > num_sites)
        throw DomainError("block length " + std::to_string(block.length) + " outside [1, " +
                          std::to_string(num_sites) + "]");
    if (block.first_site < 0 || block.first_site >= num_sites)
        throw DomainError("block start " + std::to_string(block.first_site) + " outside [0, " +
                          std::to_string(num_sites) + ")");
}

std::vector<int> block_sites(const Block& block, int num_sites) {
    validate_block(block, num_sites);
    std::vector<int> sites(block.length);
    for (int k = 0; k < block.length; ++k) sites[k] = (block.first_site + k) % num_sites;
    return sites;
}

bool is_linear_block(const Block& block, int num_sites) {
    validate_block(block, num_sites);
    return block.first_site + block.length <= num_sites;
}

// ---------------------------------------------------------------------------
// StateVector

StateVector::StateVector(ComplexVector amplitudes) : amplitudes_(std::move(amplitudes)) {
    num_sites_ = log2_exact(amplitudes_.size());
    if (num_sites_ < 1) throw DomainError("state vector length must be 2^L with L >= 1");
    const double norm = amplitudes_.norm();
    if (std::abs(norm - 1.0) > kNormTolerance)
        throw DomainError("state vector is not normalized (norm - 1 = " + std::to_string(norm - 1.0) + ")");
}

StateVector StateVector::normalized(ComplexVector raw) {
    const double norm = raw.norm();
    if (!(norm > 0.0) || !std::isfinite(norm)) throw DomainError("cannot normalize a zero or non-finite vector");
    raw /= norm;
    return StateVector(std::move(raw));
}

Complex StateVector::overlap(const StateVector& other) const {
    if (other.dimension() != dimension()) throw DomainError("state vectors have different dimensions");
    return amplitudes_.dot(other.amplitudes_);
}

// ---------------------------------------------------------------------------
// DensityMatrix

DensityMatrix::DensityMatrix(ComplexMatrix matrix, Unchecked) : matrix_(std::move(matrix)) {
    if (matrix_.rows() != matrix_.cols()) throw DomainError("density matrix is not square");
    num_sites_ = log2_exact(matrix_.rows());
    if (num_sites_ < 1) throw DomainError("density matrix dimension must be 2^L with L >= 1");
}

DensityMatrix::DensityMatrix(ComplexMatrix matrix) : DensityMatrix(std::move(matrix), Unchecked{}) {
    const double defect = linalg::hermiticity_defect(matrix_);
    if (defect > kHermitianTolerance)
        throw StateValidityError("density matrix is not Hermitian (defect " + std::to_string(defect) + ")");
    matrix_ = linalg::hermitian_part(matrix_);
    const double trace = matrix_.trace().real();
    if (std::abs(trace - 1.0) > kTraceTolerance)
        throw StateValidityError("density matrix trace is " + std::to_string(trace));
    const double smallest = linalg::eigvalsh(matrix_).minCoeff();
    if (smallest < -kPsdTolerance)
        throw StateValidityError("density matrix has eigenvalue " + std::to_string(smallest));
}

DensityMatrix DensityMatrix::trusted(ComplexMatrix matrix) {
    DensityMatrix out(std::move(matrix), Unchecked{});
    out.matrix_ = linalg::hermitian_part(out.matrix_);
    return out;
}

DensityMatrix DensityMatrix::pure(const StateVector& psi) {
    return trusted(psi.amplitudes() * psi.amplitudes().adjoint());
}

DensityMatrix DensityMatrix::maximally_mixed(int num_sites) {
    if (num_sites < 1 || num_sites > 30) throw DomainError("maximally_mixed: bad number of sites");
    const Eigen::Index dim = Eigen::Index{1} << num_sites;
    return trusted(ComplexMatrix::Identity(dim, dim) / static_cast<double>(dim));
}

double DensityMatrix::purity() const { return matrix_.squaredNorm(); }

// ---------------------------------------------------------------------------
// MetricKind

std::string_view to_string(MetricKind kind) {
    switch (kind) {
        case MetricKind::TraceDistance: return "trace_distance";
        case MetricKind::Bures: return "bures";
        case MetricKind::Schatten2: return "schatten2";
        case MetricKind::NormalizedSchatten2: return "normalized_schatten2";
        case MetricKind::RelativeDistance: return "relative_distance";
    }
    return "unknown";
}

MetricKind parse_metric_kind(std::string_view name) {
    for (MetricKind kind : {MetricKind::TraceDistance, MetricKind::Bures, MetricKind::Schatten2,
                            MetricKind::NormalizedSchatten2, MetricKind::RelativeDistance})
        if (to_string(kind) == name) return kind;
    throw DomainError("unknown metric '" + std::string(name) + "'");
}

// ---------------------------------------------------------------------------
// Partial traces

ComplexMatrix block_amplitudes(const ComplexVector& psi, int num_sites, const Block& block) {
    if (psi.size() != (Eigen::Index{1} << num_sites)) throw DomainError("vector length does not match 2^L");
    const SiteSplit split = split_sites(num_sites, block);
    const Eigen::Index dim_a = Eigen::Index{1} << split.block_bits.size();
    const Eigen::Index dim_b = Eigen::Index{1} << split.rest_bits.size();
    ComplexMatrix m(dim_a, dim_b);
    for (Eigen::Index i = 0; i < psi.size(); ++i)
        m(gather_bits(i, split.block_bits), gather_bits(i, split.rest_bits)) = psi(i);
    return m;
}

DensityMatrix partial_trace(const StateVector& psi, const Block& block) {
    const ComplexMatrix m = block_amplitudes(psi.amplitudes(), psi.num_sites(), block);
    return DensityMatrix::trusted(m * m.adjoint());
}

DensityMatrix partial_trace(const StateVector& psi, int first_site, int length) {
    return partial_trace(psi, Block{first_site, length});
}

ComplexMatrix reduced_transition(const ComplexVector& ket, const ComplexVector& bra, int num_sites,
                                 const Block& block) {
    return block_amplitudes(ket, num_sites, block) * block_amplitudes(bra, num_sites, block).adjoint();
}

ComplexMatrix reduced_operator(const ComplexMatrix& full, int num_sites, const Block& block) {
    const Eigen::Index dim = Eigen::Index{1} << num_sites;
    if (full.rows() != dim || full.cols() != dim) throw DomainError("operator dimension does not match 2^L");
    const SiteSplit split = split_sites(num_sites, block);
    const Eigen::Index dim_a = Eigen::Index{1} << split.block_bits.size();
    const Eigen::Index dim_b = Eigen::Index{1} << split.rest_bits.size();
    // index_of(a, b) -> full index
    Eigen::Matrix<Eigen::Index, Eigen::Dynamic, Eigen::Dynamic> index_of(dim_a, dim_b);
    for (Eigen::Index i = 0; i < dim; ++i)
        index_of(gather_bits(i, split.block_bits), gather_bits(i, split.rest_bits)) = i;
    ComplexMatrix out = ComplexMatrix::Zero(dim_a, dim_a);
    for (Eigen::Index b = 0; b < dim_b; ++b)
        for (Eigen::Index a2 = 0; a2 < dim_a; ++a2)
            for (Eigen::Index a1 = 0; a1 < dim_a; ++a1) out(a1, a2) += full(index_of(a1, b), index_of(a2, b));
    return out;
}

// ---------------------------------------------------------------------------
// Norms

double trace_norm(const ComplexMatrix& m) {
    if (m.size() == 0) return 0.0;
    return linalg::eigvalsh(m).cwiseAbs().sum();
}

double trace_norm_lowrank(const ComplexMatrix& factor, const RealVector& weights) {
    if (factor.cols() != weights.size()) throw DomainError("trace_norm_lowrank: weight count mismatch");
    const Eigen::Index rows = factor.rows();
    const Eigen::Index rank = factor.cols();
    if (rows <= rank) return trace_norm(factor * weights.asDiagonal() * factor.adjoint());
    // U = Q R  =>  U W U^dagger = Q (R W R^dagger) Q^dagger
    Eigen::HouseholderQR<ComplexMatrix> qr(factor);
    const ComplexMatrix r = qr.matrixQR().topRows(rank).triangularView<Eigen::Upper>();
    return trace_norm(r * weights.asDiagonal() * r.adjoint());
}

// ---------------------------------------------------------------------------
// Distances

double trace_distance(const DensityMatrix& rho, const DensityMatrix& sigma) {
    require_same_dimension(rho, sigma);
    return 0.5 * trace_norm(rho.matrix() - sigma.matrix());
}

double pure_trace_distance(const StateVector& psi, const StateVector& phi) {
    const double overlap2 = std::norm(psi.overlap(phi));
    return std::sqrt(std::max(0.0, 1.0 - overlap2));
}

double fidelity(const DensityMatrix& rho, const DensityMatrix& sigma) {
    require_same_dimension(rho, sigma);
    const ComplexMatrix product = psd_sqrt(rho.matrix()) * psd_sqrt(sigma.matrix());
    Eigen::BDCSVD<ComplexMatrix> svd(product);
    return std::clamp(svd.singularValues().sum(), 0.0, 1.0);
}

// B^2 = min_U ||sqrt(rho) - sqrt(sigma) U||_F^2 = tr rho + tr sigma - 2 F, minimized
// by the polar factor of sqrt(sigma) sqrt(rho). Forming the difference avoids the
// cancellation in 2 (1 - F) for nearby states.
double bures_distance(const DensityMatrix& rho, const DensityMatrix& sigma) {
    require_same_dimension(rho, sigma);
    const ComplexMatrix a = psd_sqrt(rho.matrix());
    const ComplexMatrix b = psd_sqrt(sigma.matrix());
    Eigen::BDCSVD<ComplexMatrix> svd(b * a, Eigen::ComputeFullU | Eigen::ComputeFullV);
    const ComplexMatrix u = svd.matrixU() * svd.matrixV().adjoint();
    return (a - b * u).norm();
}

double schatten2_distance(const DensityMatrix& rho, const DensityMatrix& sigma) {
    require_same_dimension(rho, sigma);
    return std::sqrt(0.5 * (rho.matrix() - sigma.matrix()).squaredNorm());
}

double normalized_schatten2_distance(const DensityMatrix& rho, const DensityMatrix& sigma) {
    require_same_dimension(rho, sigma);
    const double diff = (rho.matrix() - sigma.matrix()).squaredNorm();
    const double denom = rho.purity() + sigma.purity();
    return std::min(1.0, std::sqrt(diff / denom));
}

double relative_entropy(const DensityMatrix& rho, const DensityMatrix& sigma, const RelativeEntropyOptions& options) {
    require_same_dimension(rho, sigma);
    const auto rho_spec = checked_spectrum(rho.matrix());
    const auto sigma_spec = checked_spectrum(sigma.matrix());
    const RealVector& p = rho_spec.eigenvalues();
    const RealVector& q = sigma_spec.eigenvalues();
    // overlaps(i, j) = |<rho_i|sigma_j>|^2
    const RealMatrix overlaps = (rho_spec.eigenvectors().adjoint() * sigma_spec.eigenvectors()).cwiseAbs2();

    double entropy_term = 0.0;
    double cross_term = 0.0;
    for (Eigen::Index i = 0; i < p.size(); ++i) {
        if (p(i) <= options.weight_tolerance) continue;
        entropy_term += p(i) * std::log(p(i));
        double outside = 0.0;
        for (Eigen::Index j = 0; j < q.size(); ++j) {
            if (q(j) > options.support_cutoff)
                cross_term += p(i) * overlaps(i, j) * std::log(q(j));
            else
                outside += overlaps(i, j);
        }
        if (outside > options.weight_tolerance) return std::numeric_limits<double>::infinity();
    }
    return std::max(0.0, entropy_term - cross_term);
}

double relative_distance(const DensityMatrix& rho, const DensityMatrix& sigma, const RelativeEntropyOptions& options) {
    const double s = relative_entropy(rho, sigma, options);
    if (std::isinf(s)) return s;
    return std::sqrt(0.5 * s);
}

double distance(MetricKind kind, const DensityMatrix& rho, const DensityMatrix& sigma) {
    switch (kind) {
        case MetricKind::TraceDistance: return trace_distance(rho, sigma);
        case MetricKind::Bures: return bures_distance(rho, sigma);
        case MetricKind::Schatten2: return schatten2_distance(rho, sigma);
        case MetricKind::NormalizedSchatten2: return normalized_schatten2_distance(rho, sigma);
        case MetricKind::RelativeDistance: return relative_distance(rho, sigma);
    }
    throw DomainError("unknown metric kind");
}

double pure_distance(MetricKind kind, const StateVector& psi, const StateVector& phi) {
    // d = || psi - e^{i theta} phi || with the phase that makes the overlap
    // real; then |<psi|phi>| = 1 - d^2 / 2 without cancellation.
    const Complex ov = psi.overlap(phi);
    const Complex phase = std::abs(ov) > 0.0 ? std::conj(ov) / std::abs(ov) : Complex(1.0);
    const double d2 = std::min(2.0, (psi.amplitudes() - phase * phi.amplitudes()).squaredNorm());
    const double infidelity2 = std::max(0.0, d2 * (1.0 - d2 / 4.0));
    switch (kind) {
        case MetricKind::TraceDistance:
        case MetricKind::Schatten2:
        case MetricKind::NormalizedSchatten2:
            // tr[(P - Q)^2] = 2 (1 - |<psi|phi>|^2) and tr P^2 = tr Q^2 = 1
            return std::sqrt(infidelity2);
        case MetricKind::Bures: return std::sqrt(d2);
        case MetricKind::RelativeDistance:
            return infidelity2 > 1e-10 ? std::numeric_limits<double>::infinity() : 0.0;
    }
    throw DomainError("unknown metric kind");
}

}  // namespace relax

// freefermion.cpp - Gaussian-state quench dynamics and covariance-matrix metrics

#include "relax/freefermion.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>
#include <string>

#include "relax/errors.hpp"
#include "relax/linalg.hpp"

namespace relax {

namespace {

constexpr double kPairTolerance = 1e-9;

RealMatrix antisymmetric_part(const RealMatrix& m) { return 0.5 * (m - m.transpose()); }

// i Gamma, Hermitian.
ComplexMatrix hermitian_form(const RealMatrix& gamma) { return kI * gamma.cast<Complex>(); }

void require_same_modes(const MajoranaCovariance& a, const MajoranaCovariance& b) {
    if (a.num_modes() != b.num_modes()) throw DomainError("covariance matrices have different mode counts");
}

// Covariance (in i Gamma form) of sqrt(rho) / tr sqrt(rho).
ComplexMatrix sqrt_state_form(const ComplexMatrix& g) {
    const auto es = linalg::eigh(g);
    RealVector half(es.values.size());
    for (Eigen::Index j = 0; j < half.size(); ++j) {
        const double mu = std::clamp(es.values(j), -1.0, 1.0);
        half(j) = mu / (1.0 + std::sqrt(std::max(0.0, 1.0 - mu * mu)));
    }
    return es.vectors * half.cast<Complex>().asDiagonal() * es.vectors.adjoint();
}

// i Gamma form of the normalized product of two Gaussian operators.
ComplexMatrix product_form(const ComplexMatrix& ga, const ComplexMatrix& gb) {
    const Eigen::Index n = ga.rows();
    const ComplexMatrix id = ComplexMatrix::Identity(n, n);
    const ComplexMatrix middle = (id + ga * gb).partialPivLu().solve(id - ga);
    return id - (id - gb) * middle;
}

// Reciprocal condition estimate of 1 + G1 G2 (1-norm).
double product_conditioning(const ComplexMatrix& g1, const ComplexMatrix& g2) {
    const Eigen::Index n = g1.rows();
    const ComplexMatrix m = ComplexMatrix::Identity(n, n) + g1 * g2;
    return m.partialPivLu().rcond();
}

struct Prepared {
    RealMatrix gamma1;
    RealMatrix gamma2;
    bool regularized = false;
};

Prepared prepare(const MajoranaCovariance& rho, const MajoranaCovariance& sigma, const GaussianMetricOptions& options) {
    require_same_modes(rho, sigma);
    Prepared p{rho.gamma(), sigma.gamma(), false};
    if (rho.num_modes() == 0) return p;
    if (product_conditioning(hermitian_form(p.gamma1), hermitian_form(p.gamma2)) < 1e-13) {
        p.gamma1 *= 1.0 - options.regularization;
        p.gamma2 *= 1.0 - options.regularization;
        p.regularized = true;
    }
    return p;
}

double overlap_of(const RealMatrix& g1, const RealMatrix& g2) {
    const Eigen::Index dim = g1.rows();
    if (dim == 0) return 1.0;
    const RealMatrix m = RealMatrix::Identity(dim, dim) - g1 * g2;
    const double det = m.partialPivLu().determinant();
    return std::ldexp(std::sqrt(std::max(0.0, det)), -static_cast<int>(dim / 2));
}

double fidelity_of(const RealMatrix& g1, const RealMatrix& g2) {
    const double overlap = overlap_of(g1, g2);
    if (overlap <= 0.0) return 0.0;
    if (g1.rows() == 0) return 1.0;
    const ComplexMatrix half = sqrt_state_form(hermitian_form(g1));
    const ComplexMatrix g = product_form(product_form(half, hermitian_form(g2)), half);
    const RealVector nu = linalg::eigvalsh(linalg::hermitian_part(g));
    double log_trace = 0.0;
    for (double v : nu) log_trace += 0.25 * std::log1p(std::sqrt(std::max(0.0, 1.0 - v * v)));
    return std::min(1.0, std::sqrt(overlap) * std::exp(log_trace));
}

void check_covariance(const RealMatrix& gamma) {
    if (gamma.rows() != gamma.cols() || gamma.rows() % 2 != 0)
        throw DomainError("covariance matrix must be square with even dimension");
    if ((gamma + gamma.transpose()).cwiseAbs().maxCoeff() > MajoranaCovariance::kAntisymmetryTolerance)
        throw StateValidityError("covariance matrix is not antisymmetric");
    if (gamma.rows() == 0) return;
    const RealVector mu = linalg::eigvalsh(hermitian_form(antisymmetric_part(gamma)));
    if (mu.cwiseAbs().maxCoeff() > 1.0 + MajoranaCovariance::kSpectralTolerance)
        throw StateValidityError("covariance matrix has singular values above 1");
}

double xlogy(double x, double y) { return x <= 0.0 ? 0.0 : x * std::log(y); }

}  // namespace

// ---------------------------------------------------------------------------
// MajoranaCovariance

MajoranaCovariance::MajoranaCovariance(RealMatrix gamma, Unchecked) : gamma_(antisymmetric_part(gamma)) {
    if (gamma_.rows() != gamma_.cols() || gamma_.rows() % 2 != 0)
        throw DomainError("covariance matrix must be square with even dimension");
}

MajoranaCovariance::MajoranaCovariance(RealMatrix gamma)
    : MajoranaCovariance((check_covariance(gamma), std::move(gamma)), Unchecked{}) {}

MajoranaCovariance MajoranaCovariance::trusted(RealMatrix gamma) { return MajoranaCovariance(std::move(gamma), Unchecked{}); }

double MajoranaCovariance::purity() const { return overlap_of(gamma_, gamma_); }


// ---------------------------------------------------------------------------
// Hamiltonians and ground states

RealMatrix tfim_coupling_matrix(double h, int num_sites) {
    if (num_sites < 2 || num_sites % 2 != 0) throw DomainError("free-fermion chains need an even L >= 2");
    const int dim = 2 * num_sites;
    RealMatrix a = RealMatrix::Zero(dim, dim);
    for (int j = 0; j < num_sites; ++j) {
        a(2 * j, 2 * j + 1) += h;
        a(2 * j + 1, 2 * j) -= h;
    }
    for (int j = 0; j + 1 < num_sites; ++j) {
        a(2 * j + 1, 2 * j + 2) += 1.0;
        a(2 * j + 2, 2 * j + 1) -= 1.0;
    }
    // boundary bond X_{L-1} X_0 = i c_{2L-1} c_0 at even parity
    a(dim - 1, 0) -= 1.0;
    a(0, dim - 1) += 1.0;
    return a;
}

double quadratic_energy(const RealMatrix& coupling, const MajoranaCovariance& gamma) {
    if (coupling.rows() != gamma.gamma().rows()) throw DomainError("coupling and covariance sizes differ");
    return 0.25 * coupling.cwiseProduct(gamma.gamma()).sum();
}

MajoranaCovariance quadratic_ground_covariance(const RealMatrix& coupling) {
    const auto es = linalg::eigh(hermitian_form(coupling));
    ComplexMatrix sum = ComplexMatrix::Zero(coupling.rows(), coupling.cols());
    for (Eigen::Index j = 0; j < es.values.size(); ++j) {
        const double mu = es.values(j);
        if (std::abs(mu) <= kPairTolerance) continue;
        sum += (mu > 0.0 ? 1.0 : -1.0) * es.vectors.col(j) * es.vectors.col(j).adjoint();
    }
    return MajoranaCovariance::trusted((kI * sum).real());
}

MajoranaCovariance ground_covariance(double h, int num_sites) {
    return quadratic_ground_covariance(tfim_coupling_matrix(h, num_sites));
}

// ---------------------------------------------------------------------------
// Quench dynamics

QuenchDynamics::QuenchDynamics(const QuenchSpec& spec)
    : spec_(spec), initial_(ground_covariance(spec.h0, spec.num_sites)) {
    auto es = linalg::eigh(hermitian_form(tfim_coupling_matrix(spec.h1, spec.num_sites)));
    frequencies_ = std::move(es.values);
    modes_ = std::move(es.vectors);
}

RealMatrix QuenchDynamics::propagator(double t) const {
    const ComplexVector phase = (frequencies_.cast<Complex>() * Complex(0.0, -t)).array().exp().matrix();
    return (modes_ * phase.asDiagonal() * modes_.adjoint()).real();
}

MajoranaCovariance QuenchDynamics::covariance(double t) const {
    if (t == 0.0) return initial_;
    const RealMatrix o = propagator(t);
    return MajoranaCovariance::trusted(o * initial_.gamma() * o.transpose());
}

MajoranaCovariance QuenchDynamics::gge() const {
    ComplexMatrix rotated = modes_.adjoint() * initial_.gamma().cast<Complex>() * modes_;
    for (Eigen::Index j = 0; j < rotated.rows(); ++j)
        for (Eigen::Index k = 0; k < rotated.cols(); ++k)
            if (std::abs(frequencies_(j) - frequencies_(k)) > kDephasingTolerance) rotated(j, k) = 0.0;
    return MajoranaCovariance::trusted((modes_ * rotated * modes_.adjoint()).real());
}

MajoranaCovariance quench_covariance(const QuenchSpec& spec, double t) { return QuenchDynamics(spec).covariance(t); }

MajoranaCovariance gge_covariance(const QuenchSpec& spec) { return QuenchDynamics(spec).gge(); }

MajoranaCovariance block_covariance(const MajoranaCovariance& gamma, const Block& block) {
    const int num_sites = gamma.num_modes();
    validate_block(block, num_sites);
    if (!is_linear_block(block, num_sites))
        throw DomainError("Gaussian reduction needs a block that does not wrap around the chain");
    const int first = 2 * block.first_site;
    const int size = 2 * block.length;
    return MajoranaCovariance::trusted(gamma.gamma().block(first, first, size, size));
}

// ---------------------------------------------------------------------------
// Metrics

GaussianMetricValue gaussian_overlap(const MajoranaCovariance& rho, const MajoranaCovariance& sigma,
                                     const GaussianMetricOptions& options) {
    const Prepared p = prepare(rho, sigma, options);
    return {overlap_of(p.gamma1, p.gamma2), p.regularized};
}

GaussianMetricValue gaussian_fidelity(const MajoranaCovariance& rho, const MajoranaCovariance& sigma,
                                      const GaussianMetricOptions& options) {
    const Prepared p = prepare(rho, sigma, options);
    return {fidelity_of(p.gamma1, p.gamma2), p.regularized};
}

double gaussian_relative_entropy(const MajoranaCovariance& rho, const MajoranaCovariance& sigma,
                                 const RelativeEntropyOptions& options) {
    require_same_modes(rho, sigma);
    if (rho.num_modes() == 0) return 0.0;
    const auto es = linalg::eigh(hermitian_form(sigma.gamma()));
    const ComplexMatrix g_rho = hermitian_form(rho.gamma());
    const RealVector own = linalg::eigvalsh(g_rho);

    // Each mode appears twice in the 2n-dimensional spectrum, hence the factors 1/2.
    double self = 0.0;
    for (double mu : own) {
        const double up = std::clamp(0.5 * (1.0 + mu), 0.0, 1.0);
        const double down = std::clamp(0.5 * (1.0 - mu), 0.0, 1.0);
        self += 0.5 * (xlogy(up, up) + xlogy(down, down));
    }
    double cross = 0.0;
    for (Eigen::Index j = 0; j < es.values.size(); ++j) {
        const double mu = std::clamp(es.values(j), -1.0, 1.0);
        const double g = (es.vectors.col(j).adjoint() * g_rho * es.vectors.col(j))(0, 0).real();
        const double p_up = 0.5 * (1.0 + g);
        const double p_down = 0.5 * (1.0 - g);
        const double q_up = 0.5 * (1.0 + mu);
        const double q_down = 0.5 * (1.0 - mu);
        for (auto [p, q] : {std::pair{p_up, q_up}, std::pair{p_down, q_down}}) {
            if (q <= options.support_cutoff) {
                if (p > options.weight_tolerance) return std::numeric_limits<double>::infinity();
                continue;
            }
            cross += 0.5 * xlogy(p, q);
        }
    }
    return std::max(0.0, self - cross);
}

GaussianMetricValue gaussian_metric(const MajoranaCovariance& rho, const MajoranaCovariance& sigma, MetricKind metric,
                                    const GaussianMetricOptions& options) {
    switch (metric) {
        case MetricKind::TraceDistance:
            throw UnsupportedMetricError("trace distance has no efficient Gaussian form; use bures instead");
        case MetricKind::Bures: {
            const auto f = gaussian_fidelity(rho, sigma, options);
            return {std::sqrt(std::max(0.0, 2.0 * (1.0 - f.value))), f.regularized};
        }
        case MetricKind::Schatten2:
        case MetricKind::NormalizedSchatten2: {
            const auto cross = gaussian_overlap(rho, sigma, options);
            const double p1 = rho.purity();
            const double p2 = sigma.purity();
            const double diff = std::max(0.0, p1 + p2 - 2.0 * cross.value);
            const double value =
                metric == MetricKind::Schatten2 ? std::sqrt(0.5 * diff) : std::min(1.0, std::sqrt(diff / (p1 + p2)));
            return {value, cross.regularized};
        }
        case MetricKind::RelativeDistance: {
            const double s = gaussian_relative_entropy(rho, sigma, options.relative_entropy);
            return {std::isinf(s) ? s : std::sqrt(0.5 * s), false};
        }
    }
    throw UnsupportedMetricError("unknown metric");
}

GaussianMetricValue gaussian_speed_fd(const QuenchDynamics& dynamics, const Block& block, double t, double dt,
                                      MetricKind metric, const GaussianMetricOptions& options) {
    if (!(dt > 0.0)) throw DomainError("finite-difference step must be positive");
    const auto a = block_covariance(dynamics.covariance(t), block);
    const auto b = block_covariance(dynamics.covariance(t + dt), block);
    auto d = gaussian_metric(a, b, metric, options);
    d.value /= dt;
    return d;
}

// ---------------------------------------------------------------------------
// Dense bridges

ComplexMatrix apply_majorana(int a, int num_modes, const ComplexMatrix& m) {
    if (num_modes < 1 || num_modes > 30) throw DomainError("unsupported number of modes");
    if (a < 0 || a >= 2 * num_modes) throw DomainError("Majorana index out of range");
    const Eigen::Index dim = Eigen::Index{1} << num_modes;
    if (m.rows() != dim) throw DomainError("operand has the wrong dimension");
    const int site = a / 2;
    const bool is_y = (a % 2) == 1;
    const int shift = num_modes - 1 - site;
    const std::uint64_t mask = std::uint64_t{1} << shift;
    ComplexMatrix out(m.rows(), m.cols());
    for (Eigen::Index i = 0; i < dim; ++i) {
        const auto state = static_cast<std::uint64_t>(i);
        // Z string on the sites left of `site` (the higher bits)
        const std::uint64_t left = shift + 1 >= 64 ? 0 : state >> (shift + 1);
        Complex factor = (std::popcount(left) % 2 == 0) ? 1.0 : -1.0;
        if (is_y) factor *= (state & mask) ? Complex(0.0, -1.0) : Complex(0.0, 1.0);
        out.row(static_cast<Eigen::Index>(state ^ mask)) = factor * m.row(i);
    }
    return out;
}

DensityMatrix reconstruct_density(const MajoranaCovariance& gamma) {
    const int n = gamma.num_modes();
    if (n < 1 || n > kMaxDenseModes)
        throw ResourceError("dense reconstruction supports 1.." + std::to_string(kMaxDenseModes) + " modes");
    check_covariance(gamma.gamma());
    const Eigen::Index dim2 = 2 * n;
    const auto es = linalg::eigh(hermitian_form(gamma.gamma()));

    // Real orthonormal mode pairs (a_k, b_k) with Gamma a = mu b, Gamma b = -mu a.
    RealMatrix basis(dim2, dim2);
    std::vector<double> lambda;
    Eigen::Index used = 0;
    for (Eigen::Index j = 0; j < dim2; ++j) {
        const double mu = es.values(j);
        if (mu <= kPairTolerance) continue;
        basis.col(used) = std::sqrt(2.0) * es.vectors.col(j).real();
        basis.col(used + 1) = std::sqrt(2.0) * es.vectors.col(j).imag();
        lambda.push_back(-std::min(mu, 1.0));
        used += 2;
    }
    if (used < dim2) {
        // kernel of Gamma: orthogonal complement of the paired directions
        Eigen::HouseholderQR<RealMatrix> qr(basis.leftCols(used));
        const RealMatrix q = qr.householderQ();
        basis.rightCols(dim2 - used) = q.rightCols(dim2 - used);
        for (Eigen::Index k = used; k < dim2; k += 2) lambda.push_back(0.0);
    }

    const Eigen::Index dim = Eigen::Index{1} << n;
    auto apply_mode = [&](Eigen::Index column, const ComplexMatrix& m) {
        ComplexMatrix out = ComplexMatrix::Zero(m.rows(), m.cols());
        for (int b = 0; b < dim2; ++b) {
            const double w = basis(b, column);
            if (w != 0.0) out += w * apply_majorana(b, n, m);
        }
        return out;
    };
    ComplexMatrix rho = ComplexMatrix::Identity(dim, dim) / static_cast<double>(dim);
    for (int k = 0; k < n; ++k) {
        if (lambda[k] == 0.0) continue;
        const ComplexMatrix dd = apply_mode(2 * k, apply_mode(2 * k + 1, rho));
        rho += Complex(0.0, lambda[k]) * dd;
    }
    return DensityMatrix::trusted(std::move(rho));
}

MajoranaCovariance covariance_of(const DensityMatrix& rho) {
    const int n = rho.num_sites();
    if (n > kMaxDenseModes) throw ResourceError("dense covariance extraction supports up to 12 modes");
    const int dim2 = 2 * n;
    RealMatrix gamma = RealMatrix::Zero(dim2, dim2);
    const Eigen::Index dim = rho.dimension();
    for (int b = 0; b < dim2; ++b) {
        const ComplexMatrix cb_rho = apply_majorana(b, n, rho.matrix());
        for (int a = 0; a < b; ++a) {
            // tr(c_a X) = sum_r (c_a X)_{rr}
            const ComplexMatrix ca = apply_majorana(a, n, cb_rho);
            Complex tr = 0.0;
            for (Eigen::Index r = 0; r < dim; ++r) tr += ca(r, r);
            gamma(a, b) = (kI * tr).real();
            gamma(b, a) = -gamma(a, b);
        }
    }
    return MajoranaCovariance::trusted(std::move(gamma));
}

MajoranaCovariance covariance_of(const StateVector& psi) {
    const int n = psi.num_sites();
    const int dim2 = 2 * n;
    std::vector<ComplexVector> images;
    images.reserve(dim2);
    for (int a = 0; a < dim2; ++a) images.push_back(apply_majorana(a, n, psi.amplitudes()).col(0));
    RealMatrix gamma = RealMatrix::Zero(dim2, dim2);
    for (int a = 0; a < dim2; ++a)
        for (int b = a + 1; b < dim2; ++b) {
            // <psi| c_a c_b |psi> = (c_a psi)^dag (c_b psi)
            gamma(a, b) = (kI * images[a].dot(images[b])).real();
            gamma(b, a) = -gamma(a, b);
        }
    return MajoranaCovariance::trusted(std::move(gamma));
}

}  // namespace relax

// test_propagate.cpp - eigenbases, evolution and subsystem speeds

#include "doctest.h"
#include "oracles.hpp"
#include "relax/errors.hpp"
#include "relax/propagate.hpp"

using namespace relax;

namespace {

const double kHx = std::sqrt(3.0) / 2.0;
const double kHz = std::sqrt(2.0);

ComplexMatrix random_hermitian(int n, std::mt19937_64& rng) {
    std::normal_distribution<double> g;
    ComplexMatrix a(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) a(i, j) = Complex(g(rng), g(rng));
    return 0.5 * (a + a.adjoint());
}

}  // namespace

TEST_CASE("diagonalize small matrices") {
    RealMatrix d = RealMatrix::Zero(2, 2);
    d(0, 0) = 2.0;
    d(1, 1) = 1.0;
    const auto b = diagonalize(d);
    CHECK(b.energies()(0) == doctest::Approx(1.0));
    CHECK(b.energies()(1) == doctest::Approx(2.0));
    CHECK(std::abs(std::abs(b.eigenvector(0)(1)) - 1.0) < 1e-15);

    RealMatrix x(2, 2);
    x << 0, 1, 1, 0;
    const auto bx = diagonalize(x);
    CHECK(bx.energies()(0) == doctest::Approx(-1.0));
    CHECK(bx.energies()(1) == doctest::Approx(1.0));

    RealMatrix bad = x;
    bad(0, 1) = 1.1;
    CHECK_THROWS_AS(diagonalize(bad), DomainError);
}

TEST_CASE("eigenbasis residual and orthonormality at L = 8") {
    const ChainSpec spec(ChaoticIsing{kHx, kHz}, 8);
    const Hamiltonian h = build_hamiltonian(spec);
    const auto b = diagonalize(spec);
    const ComplexMatrix v = b.vectors();
    const double scale = h.cwiseAbs().maxCoeff();
    CHECK((h.cast<Complex>() * v - v * b.energies().cast<Complex>().asDiagonal()).cwiseAbs().maxCoeff() <
          1e-10 * scale);
    CHECK((v.adjoint() * v - ComplexMatrix::Identity(256, 256)).cwiseAbs().maxCoeff() < 1e-10);
}

TEST_CASE("complex Hermitian input") {
    std::mt19937_64 rng(1);
    const ComplexMatrix h = random_hermitian(16, rng);
    const auto b = diagonalize(h);
    CHECK_FALSE(b.is_real());
    const ComplexMatrix v = b.vectors();
    CHECK((h * v - v * b.energies().cast<Complex>().asDiagonal()).cwiseAbs().maxCoeff() < 1e-10);
}

TEST_CASE("evolution matches the oracle and has the group property") {
    const int L = 6;
    const ChainSpec spec(ChaoticIsing{kHx, kHz}, L);
    const auto b = diagonalize(spec);
    std::mt19937_64 rng(2);
    const StateVector psi(oracle::random_state(L, rng));
    CHECK((evolve(b, psi, 0.0).amplitudes() - psi.amplitudes()).norm() < 1e-12);
    const auto a = evolve(b, psi, 1.3);
    CHECK(a.amplitudes().norm() == doctest::Approx(1.0).epsilon(1e-10));
    CHECK((a.amplitudes() - oracle::evolve(oracle::chaotic_ising(L, kHx, kHz), psi.amplitudes(), 1.3)).norm() <
          1e-10);
    const auto two = evolve(b, evolve(b, psi, 0.4), 0.9);
    CHECK((two.amplitudes() - a.amplitudes()).norm() < 1e-10);
}

TEST_CASE("eigenstates only pick up a phase") {
    const ChainSpec spec(ChaoticIsing{kHx, kHz}, 6);
    const auto b = diagonalize(spec);
    const StateVector e(b.eigenvector(5));
    const auto later = evolve(b, e, 3.0);
    CHECK(std::abs(std::abs(e.overlap(later)) - 1.0) < 1e-12);
    for (int s = 0; s < 6; ++s)
        CHECK(trace_distance(partial_trace(e, s, 1), partial_trace(later, s, 1)) < 1e-12);
    CHECK(energy_fluctuation(build_hamiltonian(spec), e) < 1e-6);
    CHECK(subsystem_speed_exact(build_hamiltonian(spec), e, Block{0, 2}).value < 1e-10);
    CHECK(subsystem_speed_fd(b, e, Block{0, 2}, 1e-4, MetricKind::TraceDistance).value < 1e-9 / 1e-4);
}

TEST_CASE("two-level energy fluctuation") {
    const ChainSpec spec(ChaoticIsing{kHx, kHz}, 4);
    const auto b = diagonalize(spec);
    const StateVector psi((b.eigenvector(0) + b.eigenvector(1)) / std::sqrt(2.0));
    CHECK(energy_fluctuation(build_hamiltonian(spec), psi) ==
          doctest::Approx((b.energies()(1) - b.energies()(0)) / 2.0).epsilon(1e-10));
}

TEST_CASE("energy fluctuation is conserved along the trajectory") {
    const int L = 8;
    const ChainSpec spec(ChaoticIsing{kHx, kHz}, L);
    const Hamiltonian h = build_hamiltonian(spec);
    auto basis = std::make_shared<const EigenBasis>(diagonalize(spec));
    const auto psi0 = make_initial_state(RandomGaussianState{5, true}, L);
    const Trajectory traj(basis, psi0);
    const double dh0 = energy_fluctuation(h, psi0);
    CHECK(traj.energy_fluctuation() == doctest::Approx(dh0).epsilon(1e-10));
    for (int k = 0; k < 50; ++k) CHECK(std::abs(energy_fluctuation(h, traj.state(0.37 * k)) - dh0) < 1e-9);
}

TEST_CASE("trajectory samples agree with evolve and H psi") {
    const int L = 6;
    const ChainSpec spec(ChaoticIsing{kHx, kHz}, L);
    const Hamiltonian h = build_hamiltonian(spec);
    auto basis = std::make_shared<const EigenBasis>(diagonalize(spec));
    const auto psi0 = make_initial_state(ProductState{ProductStateKind::YPlus}, L);
    const Trajectory traj(basis, psi0);
    const std::vector<double> times{0.0, 0.5, 7.25};
    const auto s = traj.sample(times);
    for (int k = 0; k < 3; ++k) {
        const ComplexVector expected = evolve(*basis, psi0, times[static_cast<std::size_t>(k)]).amplitudes();
        CHECK((s.states.col(k) - expected).norm() < 1e-12);
        CHECK((s.h_states.col(k) - h.cast<Complex>() * expected).norm() < 1e-11);
    }
}

TEST_CASE("full-system speeds reproduce the energy fluctuation") {
    std::mt19937_64 rng(3);
    for (int k = 0; k < 5; ++k) {
        const ComplexMatrix h = random_hermitian(64, rng);
        const auto b = diagonalize(h);
        const StateVector psi(oracle::random_state(6, rng));
        const double dh = energy_fluctuation(h, psi);
        const double fd = subsystem_speed_fd(b, psi, Block{0, 6}, 1e-4, MetricKind::TraceDistance).value;
        CHECK(std::abs(fd - dh) / dh < 1e-3);
        const double ex = subsystem_speed_exact(psi.amplitudes(), h * psi.amplitudes(), 6, Block{0, 6});
        CHECK(std::abs(ex - dh) < 1e-9);
    }
}

TEST_CASE("exact subsystem speed against the dense derivative and finite differences") {
    const int L = 8;
    const ChainSpec spec(ChaoticIsing{kHx, kHz}, L);
    const Hamiltonian h = build_hamiltonian(spec);
    const auto b = diagonalize(spec);
    const auto psi0 = make_initial_state(RandomGaussianState{8, true}, L);
    const oracle::Mat hc = h.cast<Complex>();
    std::mt19937_64 rng(4);
    std::uniform_real_distribution<double> u(0.0, 20.0);
    for (int k = 0; k < 20; ++k) {
        const double t = u(rng);
        const auto psi = evolve(b, psi0, t);
        const oracle::Mat rho = psi.amplitudes() * psi.amplitudes().adjoint();
        const oracle::Mat drho = oracle::C(0, -1) * (hc * rho - rho * hc);
        const oracle::Mat dr = oracle::partial_trace(drho, L, 3, 2);
        Eigen::SelfAdjointEigenSolver<oracle::Mat> es(dr);
        const double dense = 0.5 * es.eigenvalues().cwiseAbs().sum();
        const double exact = subsystem_speed_exact(h, psi, Block{3, 2}).value;
        CHECK(exact == doctest::Approx(dense).epsilon(1e-10));
        const double fd = subsystem_speed_fd(b, psi, Block{3, 2}, 1e-5, MetricKind::TraceDistance).value;
        CHECK(std::abs(fd - exact) / exact < 1e-3);
        CHECK(exact <= energy_fluctuation(h, psi) + 1e-8);
    }
}

TEST_CASE("finite-difference step halving converges") {
    const int L = 8;
    const ChainSpec spec(ChaoticIsing{kHx, kHz}, L);
    const auto b = diagonalize(spec);
    const auto psi = evolve(b, make_initial_state(RandomGaussianState{12, true}, L), 9.0);
    const double v1 = subsystem_speed_fd(b, psi, Block{0, 2}, 1e-4, MetricKind::TraceDistance).value;
    const double v2 = subsystem_speed_fd(b, psi, Block{0, 2}, 5e-5, MetricKind::TraceDistance).value;
    CHECK(std::abs(v1 - v2) / v2 < 0.01);
    CHECK_THROWS_AS(subsystem_speed_fd(b, psi, Block{0, 2}, 0.0, MetricKind::TraceDistance), DomainError);
}

TEST_CASE("sector diagonalization reproduces full-space dynamics") {
    const int L = 8;
    const ChainSpec spec(Xxz{1.0, sample_disorder({1.5, 3, 0}, L)}, L);
    const auto neel = make_initial_state(ProductState{ProductStateKind::Neel}, L);
    const auto sector = diagonalize_for(spec, neel);
    CHECK(sector.restricted());
    CHECK(sector.dimension() == 70);
    const auto full = diagonalize(spec);
    for (double t : {0.0, 2.0, 31.0})
        CHECK((evolve(sector, neel, t).amplitudes() - evolve(full, neel, t).amplitudes()).norm() < 1e-10);
    CHECK_THROWS_AS(sector.coefficients(make_initial_state(ProductState{ProductStateKind::XPlus}, L)),
                    DomainError);
}

TEST_CASE("time averaging") {
    CHECK(time_average([](double) { return 2.5; }, 0.0, 1.0, 10) == doctest::Approx(2.5));
    CHECK(std::abs(time_average([](double t) { return std::sin(t); }, 0.0, 2.0 * M_PI, 1000)) < 2e-3);
    CHECK_THROWS_AS(uniform_grid(0.0, 1.0, 1), DomainError);
    CHECK_THROWS_AS(uniform_grid(1.0, 1.0, 5), DomainError);
    const auto g = uniform_grid(8.0, 16.0, 200);
    CHECK(g.size() == 200);
    CHECK(g.front() == 8.0);
    CHECK(g.back() == 16.0);
}

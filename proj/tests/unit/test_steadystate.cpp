// test_steadystate.cpp - reference ensembles and distances to them

#include "doctest.h"
#include "oracles.hpp"
#include "relax/errors.hpp"
#include "relax/steadystate.hpp"

using namespace relax;

namespace {

const double kHx = std::sqrt(3.0) / 2.0;
const double kHz = std::sqrt(2.0);

struct Fixture {
    int L;
    ChainSpec spec;
    std::shared_ptr<const EigenBasis> basis;
    StateVector psi0;
    Trajectory traj;

    Fixture(int num_sites, InitialStateKind init)
        : L(num_sites),
          spec(ChaoticIsing{kHx, kHz}, num_sites),
          basis(std::make_shared<const EigenBasis>(diagonalize(spec))),
          psi0(make_initial_state(init, num_sites)),
          traj(basis, psi0) {}
};

// exp(-beta H)/Z on the full chain, dense.
oracle::Mat dense_gibbs(const Hamiltonian& h, double beta) {
    Eigen::SelfAdjointEigenSolver<RealMatrix> es(h);
    RealVector w = (-beta * (es.eigenvalues().array() - es.eigenvalues().minCoeff())).exp();
    w /= w.sum();
    return (es.eigenvectors() * w.asDiagonal() * es.eigenvectors().transpose()).cast<Complex>();
}

// sum_E P_E |psi><psi| P_E with P_E the projector on each (possibly degenerate) level
oracle::Mat dense_diagonal_ensemble(const Hamiltonian& h, const oracle::Vec& psi) {
    Eigen::SelfAdjointEigenSolver<RealMatrix> es(h);
    const oracle::Mat v = es.eigenvectors().cast<Complex>();
    const RealVector& e = es.eigenvalues();
    oracle::Mat out = oracle::Mat::Zero(h.rows(), h.cols());
    for (Eigen::Index a = 0; a < e.size();) {
        Eigen::Index b = a + 1;
        while (b < e.size() && e(b) - e(b - 1) < 1e-9) ++b;
        const oracle::Mat vb = v.middleCols(a, b - a);
        const oracle::Vec p = vb * (vb.adjoint() * psi);
        out += p * p.adjoint();
        a = b;
    }
    return out;
}

}  // namespace

TEST_CASE("energy levels merge near-degenerate eigenvalues") {
    RealVector e(5);
    e << -1.0, -1.0 + 1e-12, 0.0, 0.5, 0.5;
    const auto levels = energy_levels(e);
    REQUIRE(levels.size() == 3);
    CHECK(levels[0].last == 2);
    CHECK(levels[2].first == 3);
}

TEST_CASE("inverse temperature matching") {
    RealVector e(4);
    e << -2.0, -1.0, 0.5, 3.0;
    CHECK(match_inverse_temperature(e, e.mean()) == doctest::Approx(0.0).epsilon(1e-8));
    for (double target : {-1.5, 0.0, 1.0}) {
        const double beta = match_inverse_temperature(e, target);
        CHECK(gibbs_energy(e, beta) == doctest::Approx(target).epsilon(1e-9));
    }
    CHECK_THROWS_AS(match_inverse_temperature(e, -2.5), NoSolutionError);
    CHECK_THROWS_AS(match_inverse_temperature(e, 3.0), NoSolutionError);
    CHECK(gibbs_weights(e, 1.0).sum() == doctest::Approx(1.0));
}

TEST_CASE("infinite-temperature Gibbs state is maximally mixed") {
    Fixture f(6, RandomGaussianState{1, true});
    const auto r = steady_rdm(Gibbs{0.0}, f.traj, Block{2, 3});
    CHECK((r.matrix() - ComplexMatrix::Identity(8, 8) / 8.0).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("Gibbs RDM equals the dense partial trace of exp(-beta H)") {
    Fixture f(6, ProductState{ProductStateKind::YPlus});
    const auto rho = dense_gibbs(build_hamiltonian(f.spec), 0.7);
    const auto r = steady_rdm(Gibbs{0.7}, f.traj, Block{4, 3});
    CHECK((r.matrix() - oracle::partial_trace(rho, 6, 4, 3)).cwiseAbs().maxCoeff() < 1e-12);
    CHECK(r.matrix().trace().real() == doctest::Approx(1.0));
    Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(r.matrix());
    CHECK(es.eigenvalues().minCoeff() > -1e-12);
}

TEST_CASE("energy-matched Gibbs state of a random state is close to maximally mixed") {
    Fixture f(10, RandomGaussianState{2, true});
    const double beta = match_inverse_temperature(f.basis->energies(), f.traj.mean_energy());
    CHECK(std::abs(beta) < 0.1);
    const auto r = steady_rdm(GibbsEnergyMatched{}, f.traj, Block{0, 3});
    CHECK(trace_distance(r, DensityMatrix::maximally_mixed(3)) < 1e-2);
}

TEST_CASE("energy-matched Gibbs carries the initial energy") {
    // <y+|X|y+> = <y+|Z|y+> = 0, so |y+> sits at the infinite-temperature energy tr H / d
    Fixture y(8, ProductState{ProductStateKind::YPlus});
    CHECK(std::abs(y.traj.mean_energy() - y.basis->energies().mean()) < 1e-12);
    CHECK(std::abs(match_inverse_temperature(y.basis->energies(), y.traj.mean_energy())) < 1e-8);

    // |z+> is not: all Z_j Z_j+1 and Z_j are maximal
    Fixture z(8, ProductState{ProductStateKind::ZPlus});
    const double beta = match_inverse_temperature(z.basis->energies(), z.traj.mean_energy());
    CHECK(gibbs_energy(z.basis->energies(), beta) == doctest::Approx(z.traj.mean_energy()).epsilon(1e-9));
    CHECK(std::abs(beta) > 0.05);
}

TEST_CASE("diagonal ensemble") {
    Fixture f(6, RandomGaussianState{3, true});
    // of an eigenstate: that eigenstate's RDM
    auto basis = f.basis;
    const StateVector e(basis->eigenvector(7));
    const Trajectory te(basis, e);
    CHECK(trace_distance(steady_rdm(DiagonalEnsemble{}, te, Block{1, 2}), partial_trace(e, 1, 2)) < 1e-12);

    // dense oracle with level projectors (the L = 6 ring has k, -k degeneracies); commutes with H
    const Hamiltonian h = build_hamiltonian(f.spec);
    const oracle::Mat de = dense_diagonal_ensemble(h, f.psi0.amplitudes());
    const auto r = steady_rdm(DiagonalEnsemble{}, f.traj, Block{4, 3});
    CHECK((r.matrix() - oracle::partial_trace(de, 6, 4, 3)).cwiseAbs().maxCoeff() < 1e-12);
    const oracle::Mat hc = h.cast<Complex>();
    const oracle::Mat drho = oracle::partial_trace(oracle::C(0, -1) * (hc * de - de * hc), 6, 4, 3);
    Eigen::SelfAdjointEigenSolver<oracle::Mat> ds(drho);
    CHECK(0.5 * ds.eigenvalues().cwiseAbs().sum() < 1e-10);
}

TEST_CASE("time-averaged RDM matches a direct average") {
    Fixture f(6, ProductState{ProductStateKind::ZPlus});
    const TimeAveragedRdm w{6.0, 12.0, 40};
    const auto r = steady_rdm(w, f.traj, Block{0, 2});
    ComplexMatrix avg = ComplexMatrix::Zero(4, 4);
    for (double t : uniform_grid(6.0, 12.0, 40)) avg += partial_trace(f.traj.state(t), 0, 2).matrix();
    avg /= 40.0;
    CHECK((r.matrix() - avg).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("canonical references are rejected for sector bases") {
    const int L = 6;
    const ChainSpec spec(Xxz{1.0, std::vector<double>(L, 0.0)}, L);
    const auto neel = make_initial_state(ProductState{ProductStateKind::Neel}, L);
    const Trajectory traj(std::make_shared<const EigenBasis>(diagonalize_for(spec, neel)), neel);
    CHECK_THROWS_AS(steady_rdm(GibbsEnergyMatched{}, traj, Block{0, 2}), DomainError);
    CHECK_NOTHROW(steady_rdm(DiagonalEnsemble{}, traj, Block{0, 2}));
}

TEST_CASE("pure-to-diagonal distance equals the dense trace distance") {
    std::mt19937_64 rng(4);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int k = 0; k < 20; ++k) {
        const int n = 8;
        const oracle::Vec psi = oracle::random_state(3, rng);
        RealVector w(n);
        for (int i = 0; i < n; ++i) w(i) = u(rng) * (k % 3 == 0 && i < 2 ? 0.0 : 1.0);
        w /= w.sum();
        const oracle::Mat a = psi * psi.adjoint();
        const oracle::Mat b = w.cast<Complex>().asDiagonal();
        CHECK(pure_to_diagonal_distance(psi.cwiseAbs2(), w) ==
              doctest::Approx(oracle::trace_distance(a, b)).epsilon(1e-10));
    }
}

TEST_CASE("distance to the maximally mixed state") {
    std::mt19937_64 rng(5);
    for (int la : {1, 3, 5, 6}) {
        const oracle::Vec psi = oracle::random_state(7, rng);
        const oracle::Mat r = oracle::partial_trace(psi * psi.adjoint(), 7, 5, la);
        const oracle::Mat mm = oracle::Mat::Identity(r.rows(), r.cols()) / static_cast<double>(r.rows());
        CHECK(maximally_mixed_distance(psi, 7, Block{5, la}) ==
              doctest::Approx(oracle::trace_distance(r, mm)).epsilon(1e-10));
    }
}

TEST_CASE("mixture partial trace") {
    std::mt19937_64 rng(6);
    const int L = 5;
    ComplexMatrix vs(32, 300);
    RealVector w(300);
    oracle::Mat full = oracle::Mat::Zero(32, 32);
    for (int k = 0; k < 300; ++k) {
        vs.col(k) = oracle::random_state(L, rng);
        w(k) = 1.0 / (1.0 + k);
        full += w(k) * vs.col(k) * vs.col(k).adjoint();
    }
    const ComplexMatrix got = mixture_partial_trace(vs, w, L, Block{3, 3});
    CHECK((got - oracle::partial_trace(full, L, 3, 3)).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("steady-distance series") {
    Fixture f(8, RandomGaussianState{6, true});
    const auto times = uniform_grid(8.0, 16.0, 20);
    const auto s = steady_distance_series(f.traj, MaximallyMixed{}, Block{0, 2}, times);
    for (double d : s.total) CHECK(d == doctest::Approx(1.0 - std::ldexp(1.0, -8)).epsilon(1e-12));
    for (std::size_t k = 0; k < times.size(); ++k) {
        const auto r = partial_trace(f.traj.state(times[k]), 0, 2);
        CHECK(s.subsystem[k] == doctest::Approx(trace_distance(r, DensityMatrix::maximally_mixed(2))).epsilon(1e-10));
    }
    // a mixed-reference series matches its pure-state total distance oracle
    const auto g = steady_distance_series(f.traj, DiagonalEnsemble{}, Block{0, 2}, std::vector<double>{9.0});
    const oracle::Mat de = dense_diagonal_ensemble(build_hamiltonian(f.spec), f.psi0.amplitudes());
    const oracle::Vec psi = f.traj.state(9.0).amplitudes();
    CHECK(g.total[0] == doctest::Approx(oracle::trace_distance(psi * psi.adjoint(), de)).epsilon(1e-9));
}

TEST_CASE("distance to the steady state grows with the block") {
    Fixture f(8, ProductState{ProductStateKind::YPlus});
    for (double t : {3.0, 11.0}) {
        const auto psi = f.traj.state(t);
        double prev = 0.0;
        for (int la = 1; la < 8; ++la) {
            const double d =
                trace_distance(partial_trace(psi, 0, la), steady_rdm(GibbsEnergyMatched{}, f.traj, Block{0, la}));
            CHECK(d >= prev - 1e-10);
            prev = d;
        }
        CHECK(total_steady_distance(GibbsEnergyMatched{}, f.traj, t) >= prev - 1e-10);
    }
}

TEST_CASE("random-state steady distance shrinks with L") {
    auto mean_distance = [](int L) {
        Fixture f(L, RandomGaussianState{10, true});
        const int la = L / 4;
        const auto s = steady_distance_series(f.traj, MaximallyMixed{}, Block{0, la}, uniform_grid(L, 2.0 * L, 50));
        double m = 0.0;
        for (double d : s.subsystem) m += d;
        return m / 50.0;
    };
    CHECK(mean_distance(10) < mean_distance(8));
}

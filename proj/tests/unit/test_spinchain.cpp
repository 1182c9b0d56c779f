// test_spinchain.cpp - Hamiltonians, disorder and initial states

#include "doctest.h"
#include "oracles.hpp"
#include "relax/errors.hpp"
#include "relax/spinchain.hpp"

using namespace relax;

namespace {

RealVector sorted_eigenvalues(const oracle::Mat& h) {
    Eigen::SelfAdjointEigenSolver<oracle::Mat> es(h);
    return es.eigenvalues();
}

}  // namespace

TEST_CASE("Hamiltonians equal the Kronecker-product oracle") {
    for (int L : {2, 3, 5}) {
        const Hamiltonian ci = build_hamiltonian(ChainSpec(ChaoticIsing{0.7, -1.3}, L));
        CHECK((ci.cast<Complex>() - oracle::chaotic_ising(L, 0.7, -1.3)).cwiseAbs().maxCoeff() < 1e-14);

        const Hamiltonian tf = build_hamiltonian(ChainSpec(Tfim{0.4}, L));
        CHECK((tf.cast<Complex>() - oracle::tfim(L, 0.4)).cwiseAbs().maxCoeff() < 1e-14);

        std::vector<double> fields;
        for (int j = 0; j < L; ++j) fields.push_back(0.3 * j - 0.5);
        const Hamiltonian x = build_hamiltonian(ChainSpec(Xxz{0.8, fields}, L));
        CHECK((x.cast<Complex>() - oracle::xxz(L, 0.8, fields)).cwiseAbs().maxCoeff() < 1e-14);
    }
}

TEST_CASE("two-site Ising ring without fields") {
    // both bonds of the L = 2 ring couple the same pair: H = -X_0 X_1
    const Hamiltonian h = build_hamiltonian(ChainSpec(ChaoticIsing{0.0, 0.0}, 2));
    const RealVector e = sorted_eigenvalues(h.cast<Complex>());
    CHECK(e(0) == doctest::Approx(-1.0));
    CHECK(e(1) == doctest::Approx(-1.0));
    CHECK(e(2) == doctest::Approx(1.0));
    CHECK(e(3) == doctest::Approx(1.0));
}

TEST_CASE("two-site Heisenberg ring") {
    const Hamiltonian h = build_hamiltonian(ChainSpec(Xxz{1.0, {0.0, 0.0}}, 2));
    const RealVector e = sorted_eigenvalues(h.cast<Complex>());
    CHECK(e(0) == doctest::Approx(sorted_eigenvalues(oracle::xxz(2, 1.0, {0.0, 0.0}))(0)));
    CHECK(e(0) == doctest::Approx(-1.5));  // singlet, doubled bond
}

TEST_CASE("published parameters build a real symmetric matrix") {
    const Hamiltonian h = build_hamiltonian(ChainSpec(ChaoticIsing{std::sqrt(3.0) / 2.0, std::sqrt(2.0)}, 8));
    CHECK((h - h.transpose()).cwiseAbs().maxCoeff() < 1e-14);
    CHECK(h.rows() == 256);
}

TEST_CASE("TFIM is chaotic Ising without the longitudinal field") {
    CHECK(build_hamiltonian(ChainSpec(Tfim{1.7}, 6)) == build_hamiltonian(ChainSpec(ChaoticIsing{0.0, 1.7}, 6)));
}

TEST_CASE("builds are deterministic") {
    const ChainSpec spec(ChaoticIsing{0.3, 0.9}, 7);
    CHECK(build_hamiltonian(spec) == build_hamiltonian(spec));
}

TEST_CASE("XXZ conserves the magnetization") {
    const int L = 6;
    const Hamiltonian h = build_hamiltonian(ChainSpec(Xxz{1.0, std::vector<double>(L, 0.0)}, L));
    oracle::Mat mz = oracle::Mat::Zero(h.rows(), h.cols());
    for (int j = 0; j < L; ++j) mz += oracle::pauli_string(L, {{j, 'Z'}});
    const oracle::Mat hc = h.cast<Complex>();
    CHECK((hc * mz - mz * hc).norm() < 1e-12);
    CHECK(ChainSpec(Xxz{1.0, std::vector<double>(L, 0.2)}, L).conserves_magnetization());
    CHECK_FALSE(ChainSpec(ChaoticIsing{0.5, 0.5}, L).conserves_magnetization());
}

TEST_CASE("sector Hamiltonian is the restriction of the full one") {
    const int L = 6;
    const ChainSpec spec(Xxz{1.0, {0.1, -0.4, 0.9, 0.0, 0.3, -0.2}}, L);
    const Hamiltonian full = build_hamiltonian(spec);
    const auto states = magnetization_sector(L, 3);
    CHECK(states.size() == 20);
    const Hamiltonian sub = build_hamiltonian(spec, states);
    for (std::size_t a = 0; a < states.size(); ++a)
        for (std::size_t b = 0; b < states.size(); ++b)
            CHECK(sub(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(b)) ==
                  full(static_cast<Eigen::Index>(states[a]), static_cast<Eigen::Index>(states[b])));
}

TEST_CASE("chain validation and the dense guard") {
    CHECK_THROWS_AS(ChainSpec(Tfim{1.0}, 1), DomainError);
    CHECK_THROWS_AS(ChainSpec(Xxz{1.0, {0.0, 0.0}}, 3), DomainError);
    CHECK_THROWS_AS(build_hamiltonian(ChainSpec(Tfim{1.0}, kMaxDenseSites + 1)), ResourceError);
    CHECK(ChainSpec(Tfim{1.0}, 4).translation_invariant());
    CHECK_FALSE(ChainSpec(Xxz{1.0, {0.0, 0.1, 0.0, 0.0}}, 4).translation_invariant());
}

TEST_CASE("disorder sampling") {
    CHECK(sample_disorder({0.0, 5, 1}, 8) == std::vector<double>(8, 0.0));
    CHECK(sample_disorder({1.0, 7, 3}, 10) == sample_disorder({1.0, 7, 3}, 10));
    CHECK(sample_disorder({1.0, 7, 3}, 10) != sample_disorder({1.0, 7, 4}, 10));
    CHECK(sample_disorder({1.0, 7, 3}, 10) != sample_disorder({1.0, 8, 3}, 10));

    const double h = std::sqrt(2.0);
    const int n = 100000;
    const auto f = sample_disorder({h, 42, 0}, n);
    double mean = 0.0, var = 0.0;
    for (double x : f) {
        CHECK_MESSAGE((x >= -h && x <= h), x);
        mean += x;
    }
    mean /= n;
    for (double x : f) var += (x - mean) * (x - mean);
    var /= n - 1;
    const double sigma = std::sqrt(h * h / 3.0 / n);
    CHECK(std::abs(mean) < 3.0 * sigma);
    CHECK(std::abs(var - h * h / 3.0) < 0.05 * h * h / 3.0);
}

TEST_CASE("product states") {
    const auto z = make_initial_state(ProductState{ProductStateKind::ZPlus}, 2);
    CHECK(z.amplitudes()(0) == Complex(1.0));
    CHECK(z.amplitudes().tail(3).norm() == 0.0);

    const auto y = make_initial_state(ProductState{ProductStateKind::YPlus}, 2);
    // (1, i)/sqrt2 on each site
    CHECK(std::abs(y.amplitudes()(0) - Complex(0.5, 0.0)) < 1e-15);
    CHECK(std::abs(y.amplitudes()(1) - Complex(0.0, 0.5)) < 1e-15);
    CHECK(std::abs(y.amplitudes()(3) - Complex(-0.5, 0.0)) < 1e-15);

    const auto x = make_initial_state(ProductState{ProductStateKind::XPlus}, 3);
    CHECK((x.amplitudes() - ComplexVector::Constant(8, 1.0 / std::sqrt(8.0))).norm() < 1e-15);

    const auto neel = make_initial_state(ProductState{ProductStateKind::Neel}, 4);
    CHECK(neel.amplitudes()(0b0101) == Complex(1.0));
    CHECK_THROWS_AS(make_initial_state(ProductState{ProductStateKind::Neel}, 5), DomainError);
    CHECK(definite_magnetization(neel) == 2);
    CHECK_FALSE(definite_magnetization(x).has_value());
}

TEST_CASE("random Gaussian states") {
    const auto a = make_initial_state(RandomGaussianState{99, true}, 6);
    const auto b = make_initial_state(RandomGaussianState{99, true}, 6);
    CHECK(a.amplitudes() == b.amplitudes());
    CHECK(a.amplitudes().norm() == doctest::Approx(1.0));
    CHECK(a.amplitudes().imag().norm() > 0.1);
    const auto r = make_initial_state(RandomGaussianState{99, false}, 6);
    CHECK(r.amplitudes().imag().norm() == 0.0);
    CHECK(make_initial_state(RandomGaussianState{100, true}, 6).amplitudes() != a.amplitudes());
}

TEST_CASE("product state names") {
    for (auto k : {ProductStateKind::XPlus, ProductStateKind::YPlus, ProductStateKind::ZPlus, ProductStateKind::Neel})
        CHECK(parse_product_state(to_string(k)) == k);
    CHECK_THROWS_AS(parse_product_state("w+"), DomainError);
}

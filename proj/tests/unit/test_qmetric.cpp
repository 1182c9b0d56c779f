// test_qmetric.cpp - states, partial traces and distances

#include <limits>

#include "doctest.h"
#include "oracles.hpp"
#include "relax/errors.hpp"
#include "relax/qmetric.hpp"

using namespace relax;

namespace {

ComplexVector basis_vector(int L, Eigen::Index index) {
    ComplexVector v = ComplexVector::Zero(Eigen::Index{1} << L);
    v(index) = 1.0;
    return v;
}

DensityMatrix diag2(double p) {
    ComplexMatrix m = ComplexMatrix::Zero(2, 2);
    m(0, 0) = p;
    m(1, 1) = 1.0 - p;
    return DensityMatrix(m);
}

}  // namespace

TEST_CASE("state containers validate their invariants") {
    CHECK_THROWS_AS(StateVector(ComplexVector::Ones(4)), DomainError);
    CHECK_THROWS_AS(StateVector(ComplexVector::Zero(3)), DomainError);
    CHECK(StateVector::normalized(ComplexVector::Ones(4)).amplitudes().norm() == doctest::Approx(1.0));
    CHECK_THROWS(StateVector::normalized(ComplexVector::Zero(4)));

    ComplexMatrix bad = ComplexMatrix::Identity(2, 2);
    CHECK_THROWS_AS(DensityMatrix{bad}, StateValidityError);  // trace 2
    bad = ComplexMatrix::Zero(2, 2);
    bad(0, 0) = 1.5;
    bad(1, 1) = -0.5;
    CHECK_THROWS_AS(DensityMatrix{bad}, StateValidityError);  // negative eigenvalue
    bad = ComplexMatrix::Zero(2, 2);
    bad(0, 0) = bad(1, 1) = 0.5;
    bad(0, 1) = 0.1;
    CHECK_THROWS_AS(DensityMatrix{bad}, StateValidityError);  // not Hermitian
}

TEST_CASE("partial trace of simple states") {
    const StateVector up_up(basis_vector(2, 0));
    const auto r = partial_trace(up_up, 0, 1);
    CHECK(r.matrix()(0, 0).real() == doctest::Approx(1.0));
    CHECK(std::abs(r.matrix()(1, 1)) < 1e-15);

    ComplexVector singlet = ComplexVector::Zero(4);
    singlet(1) = 1.0 / std::sqrt(2.0);
    singlet(2) = -1.0 / std::sqrt(2.0);
    const auto s = partial_trace(StateVector(singlet), 0, 1);
    CHECK((s.matrix() - 0.5 * ComplexMatrix::Identity(2, 2)).norm() < 1e-15);

    CHECK_THROWS_AS(partial_trace(up_up, 0, 3), DomainError);
    CHECK_THROWS_AS(partial_trace(up_up, 0, 0), DomainError);
    CHECK_THROWS_AS(partial_trace(up_up, 2, 1), DomainError);
}

TEST_CASE("partial trace matches the index-loop oracle, including wrapping blocks") {
    std::mt19937_64 rng(11);
    for (int L : {3, 4, 5}) {
        const oracle::Vec psi = oracle::random_state(L, rng);
        const oracle::Mat rho = psi * psi.adjoint();
        for (int first = 0; first < L; ++first)
            for (int len = 1; len <= L; ++len) {
                const auto got = partial_trace(StateVector(psi), first, len);
                CHECK((got.matrix() - oracle::partial_trace(rho, L, first, len)).cwiseAbs().maxCoeff() < 1e-13);
            }
    }
}

TEST_CASE("full-system partial trace is the pure projector") {
    std::mt19937_64 rng(3);
    const StateVector psi(oracle::random_state(4, rng));
    const auto rho = partial_trace(psi, 1, 4);  // wraps, same site order after rotation
    CHECK(rho.purity() == doctest::Approx(1.0).epsilon(1e-12));
    const auto direct = partial_trace(psi, 0, 4);
    CHECK((direct.matrix() - psi.amplitudes() * psi.amplitudes().adjoint()).norm() < 1e-14);
}

TEST_CASE("trace distance examples") {
    const auto a = diag2(0.3);
    CHECK(trace_distance(a, a) == doctest::Approx(0.0));
    CHECK(trace_distance(diag2(1.0), diag2(0.0)) == doctest::Approx(1.0));
    CHECK(trace_distance(diag2(0.3), diag2(0.75)) == doctest::Approx(0.45));
    CHECK_THROWS_AS(trace_distance(diag2(0.3), DensityMatrix::maximally_mixed(2)), DomainError);
}

TEST_CASE("pure trace distance") {
    const StateVector up(basis_vector(1, 0));
    const StateVector down(basis_vector(1, 1));
    const StateVector plus(ComplexVector::Constant(2, 1.0 / std::sqrt(2.0)));
    CHECK(pure_trace_distance(up, up) == doctest::Approx(0.0));
    CHECK(pure_trace_distance(up, down) == doctest::Approx(1.0));
    CHECK(pure_trace_distance(up, plus) == doctest::Approx(1.0 / std::sqrt(2.0)));

    std::mt19937_64 rng(5);
    for (int k = 0; k < 20; ++k) {
        const StateVector p(oracle::random_state(3, rng)), q(oracle::random_state(3, rng));
        CHECK(pure_trace_distance(p, q) ==
              doctest::Approx(trace_distance(DensityMatrix::pure(p), DensityMatrix::pure(q))).epsilon(1e-10));
    }
}

TEST_CASE("fidelity and Bures examples") {
    const auto a = diag2(0.3), b = diag2(0.8);
    CHECK(fidelity(a, a) == doctest::Approx(1.0));
    CHECK(fidelity(a, b) == doctest::Approx(std::sqrt(0.3 * 0.8) + std::sqrt(0.7 * 0.2)));
    CHECK(bures_distance(a, a) < 1e-7);
    CHECK(bures_distance(diag2(1.0), diag2(0.0)) == doctest::Approx(std::sqrt(2.0)));

    std::mt19937_64 rng(9);
    const StateVector p(oracle::random_state(2, rng)), q(oracle::random_state(2, rng));
    CHECK(fidelity(DensityMatrix::pure(p), DensityMatrix::pure(q)) ==
          doctest::Approx(std::abs(p.overlap(q))).epsilon(1e-7));

    for (int k = 0; k < 20; ++k) {
        const DensityMatrix r(oracle::random_density(4, 4, rng)), s(oracle::random_density(4, 2, rng));
        // the textbook sqrt(sqrt(r) s sqrt(r)) loses ~1e-9 when s is singular
        CHECK(fidelity(r, s) == doctest::Approx(oracle::fidelity(r.matrix(), s.matrix())).epsilon(1e-7));
        Eigen::JacobiSVD<oracle::Mat> sv(oracle::sqrtm_psd(s.matrix()) * oracle::sqrtm_psd(r.matrix()));
        CHECK(fidelity(r, s) == doctest::Approx(sv.singularValues().sum()).epsilon(1e-12));
        CHECK(fidelity(r, s) == doctest::Approx(fidelity(s, r)).epsilon(1e-10));
        CHECK(bures_distance(r, s) == doctest::Approx(oracle::bures(r.matrix(), s.matrix())).epsilon(1e-8));
    }
}

TEST_CASE("fidelity rejects clearly negative input") {
    ComplexMatrix m = ComplexMatrix::Zero(2, 2);
    m(0, 0) = 1.0 + 1e-6;
    m(1, 1) = -1e-6;
    const auto bad = DensityMatrix::trusted(m);
    CHECK_THROWS_AS(fidelity(bad, diag2(0.5)), StateValidityError);
}

TEST_CASE("Schatten-2 examples") {
    const auto up = diag2(1.0), down = diag2(0.0), mixed = diag2(0.5);
    CHECK(schatten2_distance(up, up) == doctest::Approx(0.0));
    CHECK(normalized_schatten2_distance(up, up) == doctest::Approx(0.0));
    CHECK(schatten2_distance(up, down) == doctest::Approx(1.0));
    CHECK(normalized_schatten2_distance(up, down) == doctest::Approx(1.0));
    CHECK(schatten2_distance(mixed, up) == doctest::Approx(0.5));
    CHECK(normalized_schatten2_distance(mixed, up) == doctest::Approx(1.0 / std::sqrt(3.0)));
}

TEST_CASE("relative distance") {
    const auto a = diag2(0.3);
    CHECK(relative_distance(a, a) == doctest::Approx(0.0));
    CHECK(relative_distance(diag2(1.0), diag2(0.0)) == std::numeric_limits<double>::infinity());
    // commuting case: classical KL divergence
    const double p = 0.3, q = 0.6;
    const double kl = p * std::log(p / q) + (1 - p) * std::log((1 - p) / (1 - q));
    CHECK(relative_distance(diag2(p), diag2(q)) == doctest::Approx(std::sqrt(kl / 2.0)));

    std::mt19937_64 rng(13);
    for (int k = 0; k < 20; ++k) {
        const DensityMatrix r(oracle::random_density(4, 4, rng)), s(oracle::random_density(4, 4, rng));
        CHECK(relative_distance(r, s) ==
              doctest::Approx(oracle::relative_distance(r.matrix(), s.matrix())).epsilon(1e-9));
    }
    // pure rho inside the support of a full-rank sigma is finite
    CHECK(std::isfinite(relative_distance(diag2(1.0), diag2(0.5))));
    // cutoff is a parameter
    RelativeEntropyOptions strict;
    strict.support_cutoff = 0.2;
    CHECK(relative_distance(diag2(0.5), diag2(0.9), strict) == std::numeric_limits<double>::infinity());
}

TEST_CASE("pure-state metrics agree with the dense metrics") {
    std::mt19937_64 rng(17);
    for (int k = 0; k < 10; ++k) {
        const StateVector p(oracle::random_state(2, rng)), q(oracle::random_state(2, rng));
        const auto P = DensityMatrix::pure(p), Q = DensityMatrix::pure(q);
        for (auto m : {MetricKind::TraceDistance, MetricKind::Bures, MetricKind::Schatten2,
                       MetricKind::NormalizedSchatten2})
            CHECK(pure_distance(m, p, q) == doctest::Approx(distance(m, P, Q)).epsilon(1e-7));
    }
}

TEST_CASE("metric names round-trip") {
    for (auto m : {MetricKind::TraceDistance, MetricKind::Bures, MetricKind::Schatten2,
                   MetricKind::NormalizedSchatten2, MetricKind::RelativeDistance})
        CHECK(parse_metric_kind(to_string(m)) == m);
    CHECK_THROWS_AS(parse_metric_kind("frobenius"), DomainError);
}

// ---------------------------------------------------------------------------
// Property tests on random samples

TEST_CASE("metric axioms on random triples") {
    std::mt19937_64 rng(21);
    for (int n : {2, 4, 8}) {
        for (int k = 0; k < 350; ++k) {
            const DensityMatrix a(oracle::random_density(n, 1 + k % n, rng));
            const DensityMatrix b(oracle::random_density(n, 1 + (k + 1) % n, rng));
            const DensityMatrix c(oracle::random_density(n, n, rng));
            for (auto m : {MetricKind::TraceDistance, MetricKind::Bures, MetricKind::Schatten2}) {
                const double ab = distance(m, a, b), bc = distance(m, b, c), ac = distance(m, a, c);
                CHECK(ab >= 0.0);
                CHECK(ab == doctest::Approx(distance(m, b, a)).epsilon(1e-10));
                CHECK(ac <= ab + bc + 1e-10);
                CHECK(distance(m, a, a) < 1e-7);
            }
        }
    }
}

TEST_CASE("sqrt(1 - F) is not a lower bound on the trace distance") {
    // p = 0.01 vs q = 0.02: D = 0.01 while sqrt(1 - F) is about 0.0295
    const auto a = diag2(0.01), b = diag2(0.02);
    CHECK(std::sqrt(1.0 - fidelity(a, b)) > trace_distance(a, b));
    CHECK(1.0 - fidelity(a, b) <= trace_distance(a, b));
}

TEST_CASE("Fuchs-van de Graaf, Bures equivalence and Pinsker") {
    std::mt19937_64 rng(23);
    for (int k = 0; k < 1000; ++k) {
        const int n = k % 2 == 0 ? 2 : 4;
        const DensityMatrix a(oracle::random_density(n, n, rng)), b(oracle::random_density(n, n, rng));
        const double d = trace_distance(a, b), f = fidelity(a, b), bu = bures_distance(a, b);
        CHECK(1.0 - f <= d + 1e-10);
        CHECK(d <= std::sqrt(1.0 - f * f) + 1e-10);
        CHECK(bu * bu / 2.0 <= d + 1e-10);
        CHECK(d <= bu * std::sqrt(1.0 - bu * bu / 4.0) + 1e-10);
        CHECK(d <= relative_distance(a, b) + 1e-10);
    }
}

TEST_CASE("contractivity of the trace distance under partial trace") {
    std::mt19937_64 rng(29);
    for (int k = 0; k < 200; ++k) {
        const StateVector p(oracle::random_state(3, rng)), q(oracle::random_state(3, rng));
        for (int first = 0; first < 3; ++first) {
            const double d1 = trace_distance(partial_trace(p, first, 1), partial_trace(q, first, 1));
            const double d2 = trace_distance(partial_trace(p, first, 2), partial_trace(q, first, 2));
            CHECK(d1 <= d2 + 1e-12);
            CHECK(d2 <= pure_trace_distance(p, q) + 1e-12);
        }
    }
}

TEST_CASE("low-rank trace norm equals the dense trace norm") {
    std::mt19937_64 rng(31);
    std::normal_distribution<double> g;
    for (auto [rows, cols] : {std::pair{8, 3}, std::pair{3, 8}, std::pair{16, 16}}) {
        ComplexMatrix u(rows, cols);
        for (int i = 0; i < rows; ++i)
            for (int j = 0; j < cols; ++j) u(i, j) = Complex(g(rng), g(rng));
        RealVector w(cols);
        for (int j = 0; j < cols; ++j) w(j) = g(rng);
        const ComplexMatrix full = u * w.asDiagonal() * u.adjoint();
        Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(full);
        CHECK(trace_norm_lowrank(u, w) == doctest::Approx(es.eigenvalues().cwiseAbs().sum()).epsilon(1e-10));
    }
}

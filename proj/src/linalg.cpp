// linalg.cpp - LAPACK-backed Hermitian eigensolvers

#include "relax/linalg.hpp"

#include <lapacke.h>

#include <mutex>
#include <string>

#include "relax/errors.hpp"

extern "C" void openblas_set_num_threads(int num_threads);

namespace relax::linalg {

namespace {

// OpenBLAS 0.3.x is not reliably re-entrant from several caller threads.
std::mutex& lapack_mutex() {
    static std::mutex m;
    return m;
}

void pin_blas_threads() {
    static std::once_flag flag;
    std::call_once(flag, [] { openblas_set_num_threads(1); });
}

}  // namespace

RealEigensystem eigh(const RealMatrix& symmetric) {
    if (symmetric.rows() != symmetric.cols()) throw DomainError("eigh: matrix is not square");
    const auto n = static_cast<lapack_int>(symmetric.rows());
    RealEigensystem out{RealVector(n), symmetric};
    if (n == 0) return out;
    pin_blas_threads();
    std::lock_guard lock(lapack_mutex());
    const lapack_int info = LAPACKE_dsyevd(LAPACK_COL_MAJOR, 'V', 'L', n, out.vectors.data(), n,
                                           out.values.data());
    if (info != 0) throw Error("dsyevd failed with info=" + std::to_string(info));
    return out;
}

ComplexEigensystem eigh(const ComplexMatrix& hermitian) {
    if (hermitian.rows() != hermitian.cols()) throw DomainError("eigh: matrix is not square");
    const auto n = static_cast<lapack_int>(hermitian.rows());
    ComplexEigensystem out{RealVector(n), hermitian};
    if (n == 0) return out;
    pin_blas_threads();
    std::lock_guard lock(lapack_mutex());
    const lapack_int info =
        LAPACKE_zheevd(LAPACK_COL_MAJOR, 'V', 'L', n,
                       reinterpret_cast<lapack_complex_double*>(out.vectors.data()), n, out.values.data());
    if (info != 0) throw Error("zheevd failed with info=" + std::to_string(info));
    return out;
}

RealVector eigvalsh(const ComplexMatrix& hermitian) {
    Eigen::SelfAdjointEigenSolver<ComplexMatrix> solver(hermitian_part(hermitian), Eigen::EigenvaluesOnly);
    if (solver.info() != Eigen::Success) throw Error("eigvalsh: eigensolver did not converge");
    return solver.eigenvalues();
}

ComplexMatrix hermitian_part(const ComplexMatrix& m) { return 0.5 * (m + m.adjoint()); }

double hermiticity_defect(const ComplexMatrix& m) {
    if (m.size() == 0) return 0.0;
    return (m - m.adjoint()).cwiseAbs().maxCoeff();
}

double symmetry_defect(const RealMatrix& m) {
    if (m.size() == 0) return 0.0;
    return (m - m.transpose()).cwiseAbs().maxCoeff();
}

bool blas_self_check() {
    constexpr int n = 96;
    RealMatrix a(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) a(i, j) = 1.0 / (1.0 + i + j) + (i == j ? 2.0 : 0.0);
    const RealEigensystem es = eigh(a);
    const double residual = (a * es.vectors - es.vectors * es.values.asDiagonal()).cwiseAbs().maxCoeff();
    return residual < 1e-10;
}

}  // namespace relax::linalg

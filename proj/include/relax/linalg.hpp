// linalg.hpp - Hermitian eigensolvers
//
// Full spectral decompositions of large matrices go through LAPACK (?syevd /
// ?heevd), everything small stays in Eigen. LAPACK is always driven with a
// single BLAS thread so results do not depend on the machine's core count.
#pragma once

#include "relax/types.hpp"

namespace relax::linalg {

struct RealEigensystem {
    RealVector values;   // ascending
    RealMatrix vectors;  // columns
};

struct ComplexEigensystem {
    RealVector values;  // ascending
    ComplexMatrix vectors;
};

RealEigensystem eigh(const RealMatrix& symmetric);
ComplexEigensystem eigh(const ComplexMatrix& hermitian);

/// Eigenvalues only, ascending. Input is Hermitized first.
RealVector eigvalsh(const ComplexMatrix& hermitian);

ComplexMatrix hermitian_part(const ComplexMatrix& m);

/// Largest |M_ij - conj(M_ji)|.
double hermiticity_defect(const ComplexMatrix& m);
double symmetry_defect(const RealMatrix& m);

/// Runs a small dgemm/dsyevd against Eigen and reports whether the linked
/// BLAS kernels produce correct results on this CPU.
bool blas_self_check();

}  // namespace relax::linalg

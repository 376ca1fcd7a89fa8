#pragma once

#include "dfrc/types.hpp"

namespace dfrc {

// Decomposition conventions shared by the whole library: singular values and
// eigenvalues in descending order, and a fixed per-column phase so that
// factorizations are deterministic and directly comparable in tests.

struct SvdResult {
  CMat u;       // m x m unitary
  RVec s;       // min(m, n) singular values, descending, >= 0
  CMat v;       // n x n unitary; in each column the largest-magnitude entry
                // is real non-negative (u adjusted to keep u*diag(s)*v^H = a)
};

struct HermEigResult {
  RVec values;  // descending
  CMat vectors; // unitary, same phase convention as SvdResult::v
};

// Full SVD with descending singular values and the phase convention applied.
SvdResult svd_desc(const CMat& a);

// Lower-triangular Cholesky factor of r + ridge*I with real positive diagonal.
// r must be Hermitian to 1e-8 relative; throws NotPositiveDefiniteError naming
// the smallest eigenvalue if r + ridge*I is not positive definite.
CMat cholesky_lower(const CMat& r, double ridge = 0.0);

// Eigendecomposition of a Hermitian matrix, eigenvalues descending.
HermEigResult eig_herm_desc(const CMat& a);

// log(det(a)) for Hermitian positive definite a, natural log.
double log_det_hpd(const CMat& a);

}  // namespace dfrc

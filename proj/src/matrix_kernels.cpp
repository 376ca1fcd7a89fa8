#include "dfrc/matrix_kernels.hpp"

#include <cmath>
#include <sstream>

namespace dfrc {

namespace {

constexpr double kHermitianTol = 1e-8;  // relative, Frobenius

void require_finite(const CMat& a, const char* who) {
  if (!a.allFinite()) {
    throw InvalidInputError(std::string(who) + ": input has non-finite entries");
  }
}

void require_hermitian(const CMat& a, const char* who) {
  if (a.rows() != a.cols()) {
    throw InvalidInputError(std::string(who) + ": matrix is not square");
  }
  require_finite(a, who);
  const double scale = std::max(a.norm(), 1e-300);
  if ((a - a.adjoint()).norm() > kHermitianTol * scale) {
    throw InvalidInputError(std::string(who) + ": matrix is not Hermitian to 1e-8 relative");
  }
}

// Rotate column j of m so its largest-magnitude entry becomes real >= 0.
// Returns the applied unit factor so a paired matrix can be rotated alike.
Complex fix_column_phase(CMat& m, Eigen::Index j) {
  Eigen::Index imax = 0;
  double best = -1.0;
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    const double mag = std::abs(m(i, j));
    if (mag > best) {
      best = mag;
      imax = i;
    }
  }
  if (best <= 0.0) return Complex(1.0, 0.0);
  // z * conj(z) has exactly zero imaginary part in IEEE arithmetic, so the
  // anchor entry comes out exactly real non-negative.
  const Complex factor = std::conj(m(imax, j)) / best;
  m.col(j) *= factor;
  return factor;
}

}  // namespace

SvdResult svd_desc(const CMat& a) {
  require_finite(a, "svd_desc");
  Eigen::JacobiSVD<CMat> svd(a, Eigen::ComputeFullU | Eigen::ComputeFullV);
  SvdResult out;
  out.u = svd.matrixU();
  out.v = svd.matrixV();
  out.s = svd.singularValues();
  const Eigen::Index r = std::min(a.rows(), a.cols());
  for (Eigen::Index j = 0; j < out.v.cols(); ++j) {
    const Complex factor = fix_column_phase(out.v, j);
    if (j < r) out.u.col(j) *= factor;
  }
  // Trailing columns of u (m > n) pair with nothing; fix them independently.
  for (Eigen::Index j = r; j < out.u.cols(); ++j) {
    fix_column_phase(out.u, j);
  }
  return out;
}

CMat cholesky_lower(const CMat& r, double ridge) {
  require_hermitian(r, "cholesky_lower");
  if (ridge < 0.0) {
    throw InvalidInputError("cholesky_lower: ridge must be >= 0");
  }
  CMat a = hermitian_part(r);
  a.diagonal().array() += ridge;
  Eigen::LLT<CMat> llt(a);
  if (llt.info() != Eigen::Success) {
    Eigen::SelfAdjointEigenSolver<CMat> es(a, Eigen::EigenvaluesOnly);
    const double min_eig = es.eigenvalues().minCoeff();
    std::ostringstream msg;
    msg << "cholesky_lower: matrix not positive definite, smallest eigenvalue " << min_eig;
    throw NotPositiveDefiniteError(msg.str(), min_eig);
  }
  return llt.matrixL();
}

HermEigResult eig_herm_desc(const CMat& a) {
  require_hermitian(a, "eig_herm_desc");
  Eigen::SelfAdjointEigenSolver<CMat> es(hermitian_part(a));
  if (es.info() != Eigen::Success) {
    throw NumericalConsistencyError("eig_herm_desc: eigensolver failed to converge");
  }
  const Eigen::Index n = a.rows();
  HermEigResult out;
  out.values = es.eigenvalues().reverse();  // ascending -> descending
  out.vectors.resize(n, n);
  for (Eigen::Index j = 0; j < n; ++j) {
    out.vectors.col(j) = es.eigenvectors().col(n - 1 - j);
    fix_column_phase(out.vectors, j);
  }
  return out;
}

double log_det_hpd(const CMat& a) {
  Eigen::LLT<CMat> llt(hermitian_part(a));
  if (llt.info() != Eigen::Success) {
    throw NumericalConsistencyError("log_det_hpd: matrix not positive definite");
  }
  double acc = 0.0;
  const CMat l = llt.matrixL();
  for (Eigen::Index i = 0; i < l.rows(); ++i) {
    acc += std::log(l(i, i).real());
  }
  return 2.0 * acc;
}

}  // namespace dfrc

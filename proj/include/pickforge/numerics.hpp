#ifndef PICKFORGE_NUMERICS_HPP
#define PICKFORGE_NUMERICS_HPP

#include <Eigen/Dense>
#include <complex>
#include <vector>

#include "pickforge/errors.hpp"

namespace pickforge {

using Complex = std::complex<double>;
using ComplexMatrix = Eigen::MatrixXcd;
using ComplexVector = Eigen::VectorXcd;

struct ToleranceConfig {
  double psd_tol = 1e-10;
  double residual_tol = 1e-8;
  double truncation_tol = 1e-12;
  int grid_boundary_points = 200;
  int grid_interior_points = 200;
};

struct PsdCertificate {
  bool is_psd = false;
  double min_eigenvalue = 0.0;
  double hermitian_defect = 0.0;  // ||M - M*||
};

/// Largest singular value; 0 for empty matrices.
inline double op_norm(const ComplexMatrix& m) {
  if (m.rows() == 0 || m.cols() == 0) return 0.0;
  return Eigen::JacobiSVD<ComplexMatrix>(m).singularValues()(0);
}

inline ComplexMatrix hermitian_part(const ComplexMatrix& m) {
  return 0.5 * (m + m.adjoint());
}

inline double spectral_radius(const ComplexMatrix& a) {
  if (a.rows() == 0) return 0.0;
  Eigen::ComplexEigenSolver<ComplexMatrix> es(a, /*computeEigenvectors=*/false);
  return es.eigenvalues().cwiseAbs().maxCoeff();
}

inline PsdCertificate psd_certificate(const ComplexMatrix& m,
                                      const ToleranceConfig& cfg = {}) {
  if (m.rows() != m.cols())
    throw DimensionError("psd_certificate: matrix must be square");
  PsdCertificate cert;
  if (m.rows() == 0) {
    cert.is_psd = true;
    return cert;
  }
  cert.hermitian_defect = op_norm(m - m.adjoint());
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(hermitian_part(m),
                                                  Eigen::EigenvaluesOnly);
  cert.min_eigenvalue = es.eigenvalues().minCoeff();
  const double scale = std::max(1.0, op_norm(m));
  cert.is_psd = cert.min_eigenvalue >= -cfg.psd_tol * scale &&
                cert.hermitian_defect <= cfg.psd_tol * scale;
  return cert;
}

/// Hermitian PSD square root via eigendecomposition. Tiny negative
/// eigenvalues (rounding noise below the PSD tolerance) are clamped to zero.
inline ComplexMatrix sqrt_psd(const ComplexMatrix& m,
                              const ToleranceConfig& cfg = {}) {
  const PsdCertificate cert = psd_certificate(m, cfg);
  if (!cert.is_psd)
    throw NotPsdError("sqrt_psd: input fails PSD certification (min eig " +
                      std::to_string(cert.min_eigenvalue) + ")");
  if (m.rows() == 0) return m;
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(hermitian_part(m));
  Eigen::VectorXd lam = es.eigenvalues().cwiseMax(0.0).cwiseSqrt();
  return es.eigenvectors() * lam.asDiagonal() *
         es.eigenvectors().adjoint();
}

/// Solves P - T P T* = Q by dense Kronecker vectorization,
/// vec(T P T*) = (conj(T) (x) T) vec(P).
inline ComplexMatrix solve_stein(const ComplexMatrix& t,
                                 const ComplexMatrix& q,
                                 const ToleranceConfig& cfg = {}) {
  const Eigen::Index n = t.rows();
  if (t.cols() != n) throw DimensionError("solve_stein: T must be square");
  if (q.rows() != n || q.cols() != n)
    throw DimensionError("solve_stein: Q must match T");
  if (n == 0) return q;

  {
    Eigen::ComplexEigenSolver<ComplexMatrix> es(t, false);
    const auto& ev = es.eigenvalues();
    for (Eigen::Index i = 0; i < n; ++i)
      for (Eigen::Index j = 0; j < n; ++j)
        if (std::abs(1.0 - ev(i) * std::conj(ev(j))) < cfg.psd_tol)
          throw SteinSingularError(
              "solve_stein: eigenvalue product on the unit circle, "
              "non-unique Stein solution");
  }

  ComplexMatrix sys = ComplexMatrix::Identity(n * n, n * n);
  // kron(conj(T), T): block (i,j) is conj(T(i,j)) * T.
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j)
      sys.block(i * n, j * n, n, n) -= std::conj(t(i, j)) * t;

  // vec stacks columns; vec(T P T^*) = kron(conj(T), T) vec(P).
  ComplexVector vec_q(n * n);
  for (Eigen::Index j = 0; j < n; ++j) vec_q.segment(j * n, n) = q.col(j);
  ComplexVector vec_p = sys.fullPivLu().solve(vec_q);
  ComplexMatrix p(n, n);
  for (Eigen::Index j = 0; j < n; ++j) p.col(j) = vec_p.segment(j * n, n);
  return p;
}

/// Moore-Penrose pseudoinverse; singular values below psd_tol * sigma_max
/// are truncated.
inline ComplexMatrix pinv(const ComplexMatrix& m,
                          const ToleranceConfig& cfg = {}) {
  if (m.rows() == 0 || m.cols() == 0)
    return ComplexMatrix::Zero(m.cols(), m.rows());
  Eigen::JacobiSVD<ComplexMatrix> svd(
      m, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const auto& sv = svd.singularValues();
  const double cutoff = cfg.psd_tol * sv(0);
  Eigen::VectorXd inv_sv = Eigen::VectorXd::Zero(sv.size());
  for (Eigen::Index i = 0; i < sv.size(); ++i)
    if (sv(i) > cutoff && sv(i) > 0.0) inv_sv(i) = 1.0 / sv(i);
  return svd.matrixV() * inv_sv.asDiagonal() * svd.matrixU().adjoint();
}

/// Rank against a relative singular-value cutoff.
inline Eigen::Index numeric_rank(const ComplexMatrix& m, double rel_tol) {
  if (m.rows() == 0 || m.cols() == 0) return 0;
  Eigen::JacobiSVD<ComplexMatrix> svd(m);
  const auto& sv = svd.singularValues();
  if (sv(0) == 0.0) return 0;
  Eigen::Index r = 0;
  for (Eigen::Index i = 0; i < sv.size(); ++i)
    if (sv(i) > rel_tol * sv(0)) ++r;
  return r;
}

/// Rotates each column so its largest-modulus entry is real positive;
/// makes SVD-derived bases deterministic up to the SVD itself.
inline ComplexMatrix canonical_phases(ComplexMatrix m) {
  for (Eigen::Index j = 0; j < m.cols(); ++j) {
    Eigen::Index imax = 0;
    double best = 0.0;
    for (Eigen::Index i = 0; i < m.rows(); ++i)
      if (std::abs(m(i, j)) > best) {
        best = std::abs(m(i, j));
        imax = i;
      }
    if (best > 0.0) m.col(j) *= std::conj(m(imax, j)) / best;
  }
  return m;
}

/// Orthonormal basis (columns) of the column space of m.
inline ComplexMatrix range_basis(const ComplexMatrix& m, double rel_tol) {
  if (m.rows() == 0 || m.cols() == 0) return ComplexMatrix(m.rows(), 0);
  Eigen::JacobiSVD<ComplexMatrix> svd(m, Eigen::ComputeThinU);
  const auto& sv = svd.singularValues();
  Eigen::Index r = 0;
  for (Eigen::Index i = 0; i < sv.size(); ++i)
    if (sv(0) > 0.0 && sv(i) > rel_tol * sv(0)) ++r;
  return canonical_phases(svd.matrixU().leftCols(r));
}

/// Orthonormal basis of the orthogonal complement of the column space of m
/// inside the ambient space of dimension m.rows().
inline ComplexMatrix complement_basis(const ComplexMatrix& m, double rel_tol) {
  if (m.rows() == 0) return ComplexMatrix(0, 0);
  if (m.cols() == 0) return ComplexMatrix::Identity(m.rows(), m.rows());
  Eigen::JacobiSVD<ComplexMatrix> svd(m, Eigen::ComputeFullU);
  const auto& sv = svd.singularValues();
  Eigen::Index r = 0;
  for (Eigen::Index i = 0; i < sv.size(); ++i)
    if (sv(0) > 0.0 && sv(i) > rel_tol * sv(0)) ++r;
  return canonical_phases(svd.matrixU().rightCols(m.rows() - r));
}

}  // namespace pickforge

#endif

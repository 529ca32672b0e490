#ifndef PICKFORGE_REALIZATION_HPP
#define PICKFORGE_REALIZATION_HPP

#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

#include "pickforge/numerics.hpp"

namespace pickforge {

/// State-space rational matrix function F(z) = D + z C (I - zA)^{-1} B.
/// A: n x n, B: n x p, C: q x n, D: q x p. An empty A gives the constant
/// function D.
struct Realization {
  ComplexMatrix A, B, C, D;

  Realization() = default;
  Realization(ComplexMatrix a, ComplexMatrix b, ComplexMatrix c,
              ComplexMatrix d)
      : A(std::move(a)), B(std::move(b)), C(std::move(c)), D(std::move(d)) {
    if (A.rows() != A.cols() || B.rows() != A.rows() || C.cols() != A.rows() ||
        D.rows() != C.rows() || D.cols() != B.cols())
      throw DimensionError("Realization: incompatible block dimensions");
  }

  Eigen::Index state_dim() const { return A.rows(); }
  Eigen::Index in_dim() const { return D.cols(); }
  Eigen::Index out_dim() const { return D.rows(); }

  static Realization constant(const ComplexMatrix& d) {
    return Realization(ComplexMatrix(0, 0), ComplexMatrix(0, d.cols()),
                       ComplexMatrix(d.rows(), 0), d);
  }

  static Realization constant(Complex value) {
    ComplexMatrix d(1, 1);
    d(0, 0) = value;
    return constant(d);
  }

  static Realization zero(Eigen::Index out, Eigen::Index in) {
    return constant(ComplexMatrix::Zero(out, in));
  }

  static Realization identity(Eigen::Index dim) {
    return constant(ComplexMatrix::Identity(dim, dim));
  }
};

namespace detail {

inline Eigen::PartialPivLU<ComplexMatrix> resolvent_lu(const Realization& r,
                                                       Complex z,
                                                       double psd_tol) {
  const Eigen::Index n = r.state_dim();
  ComplexMatrix m = ComplexMatrix::Identity(n, n) - z * r.A;
  Eigen::PartialPivLU<ComplexMatrix> lu(m);
  // reciprocal condition estimate instead of a full SVD: this guard runs on
  // every evaluation and only needs to detect a (near-)singular resolvent
  if (n > 0 && !(lu.rcond() > psd_tol))
    throw SingularResolventError("evaluate: resolvent singular at z");
  return lu;
}

}  // namespace detail

/// order-th derivative F^{(order)}(z). Closed form:
/// F(z) = D + zC(I-zA)^{-1}B and F^{(k)}(z) = k! C (I-zA)^{-(k+1)} A^{k-1} B
/// for k >= 1.
inline ComplexMatrix evaluate(const Realization& r, Complex z, int order = 0,
                              const ToleranceConfig& cfg = {}) {
  if (order < 0) throw Error("evaluate: order must be >= 0");
  if (r.state_dim() == 0)
    return order == 0 ? r.D
                      : ComplexMatrix::Zero(r.out_dim(), r.in_dim());
  auto lu = detail::resolvent_lu(r, z, cfg.psd_tol);
  if (order == 0) {
    return r.D + z * (r.C * lu.solve(r.B));
  }
  ComplexMatrix x = r.B;  // becomes A^{k-1} B
  for (int k = 1; k < order; ++k) x = r.A * x;
  for (int k = 0; k <= order; ++k) x = lu.solve(x);
  double fact = 1.0;
  for (int k = 2; k <= order; ++k) fact *= k;
  return fact * (r.C * x);
}

enum class CombineKind { Add, Multiply, Invert, BackwardShift };

inline Realization combine(CombineKind kind, const Realization& r1,
                           const Realization* r2 = nullptr) {
  switch (kind) {
    case CombineKind::Add: {
      if (!r2) throw Error("combine: add needs two operands");
      if (r1.out_dim() != r2->out_dim() || r1.in_dim() != r2->in_dim())
        throw DimensionError("combine add: dimension mismatch");
      const Eigen::Index n1 = r1.state_dim(), n2 = r2->state_dim();
      ComplexMatrix a = ComplexMatrix::Zero(n1 + n2, n1 + n2);
      a.topLeftCorner(n1, n1) = r1.A;
      a.bottomRightCorner(n2, n2) = r2->A;
      ComplexMatrix b(n1 + n2, r1.in_dim());
      b.topRows(n1) = r1.B;
      b.bottomRows(n2) = r2->B;
      ComplexMatrix c(r1.out_dim(), n1 + n2);
      c.leftCols(n1) = r1.C;
      c.rightCols(n2) = r2->C;
      return Realization(a, b, c, r1.D + r2->D);
    }
    case CombineKind::Multiply: {
      // (r1 * r2)(z) = r1(z) r2(z), cascade realization.
      if (!r2) throw Error("combine: multiply needs two operands");
      if (r1.in_dim() != r2->out_dim())
        throw DimensionError("combine multiply: dimension mismatch");
      const Eigen::Index n1 = r1.state_dim(), n2 = r2->state_dim();
      ComplexMatrix a = ComplexMatrix::Zero(n1 + n2, n1 + n2);
      a.topLeftCorner(n1, n1) = r1.A;
      a.topRightCorner(n1, n2) = r1.B * r2->C;
      a.bottomRightCorner(n2, n2) = r2->A;
      ComplexMatrix b(n1 + n2, r2->in_dim());
      b.topRows(n1) = r1.B * r2->D;
      b.bottomRows(n2) = r2->B;
      ComplexMatrix c(r1.out_dim(), n1 + n2);
      c.leftCols(n1) = r1.C;
      c.rightCols(n2) = r1.D * r2->C;
      return Realization(a, b, c, r1.D * r2->D);
    }
    case CombineKind::Invert: {
      if (r1.in_dim() != r1.out_dim())
        throw DimensionError("combine invert: function must be square");
      if (r1.in_dim() == 0) return r1;  // empty function is its own inverse
      Eigen::FullPivLU<ComplexMatrix> lu(r1.D);
      if (!lu.isInvertible())
        throw Error("combine invert: D is not invertible");
      ComplexMatrix dinv = lu.inverse();
      return Realization(r1.A - r1.B * dinv * r1.C, r1.B * dinv,
                         -dinv * r1.C, dinv);
    }
    case CombineKind::BackwardShift:
      // [F(z) - F(0)]/z has realization (A, B, CA, CB).
      return Realization(r1.A, r1.B, r1.C * r1.A, r1.C * r1.B);
  }
  throw Error("combine: unknown kind");
}

inline Realization operator+(const Realization& a, const Realization& b) {
  return combine(CombineKind::Add, a, &b);
}
inline Realization operator*(const Realization& a, const Realization& b) {
  return combine(CombineKind::Multiply, a, &b);
}
inline Realization operator-(const Realization& a, const Realization& b) {
  Realization neg(b.A, b.B, -b.C, -b.D);
  return combine(CombineKind::Add, a, &neg);
}
inline Realization inverse(const Realization& a) {
  return combine(CombineKind::Invert, a);
}

/// F(z) * constant matrix m, folded into B and D.
inline Realization scale_right(const Realization& r, const ComplexMatrix& m) {
  if (r.in_dim() != m.rows())
    throw DimensionError("scale_right: dimension mismatch");
  return Realization(r.A, r.B * m, r.C, r.D * m);
}

/// constant matrix m * F(z), folded into C and D.
inline Realization scale_left(const ComplexMatrix& m, const Realization& r) {
  if (m.cols() != r.out_dim())
    throw DimensionError("scale_left: dimension mismatch");
  return Realization(r.A, r.B, m * r.C, m * r.D);
}

/// Realization of E(I - zT)^{-1} for a constant E.
inline Realization resolvent_times(const ComplexMatrix& e,
                                   const ComplexMatrix& t) {
  if (e.cols() != t.rows() || t.rows() != t.cols())
    throw DimensionError("resolvent_times: dimension mismatch");
  return Realization(t, ComplexMatrix::Identity(t.rows(), t.cols()), e * t, e);
}

/// Interior sample points: golden-angle spiral, filling the disk of the
/// given radius.
inline std::vector<Complex> interior_grid(int count, double radius = 0.95) {
  std::vector<Complex> pts;
  pts.reserve(count);
  const double golden = M_PI * (3.0 - std::sqrt(5.0));
  for (int k = 0; k < count; ++k) {
    double r = radius * std::sqrt((k + 0.5) / count);
    double th = golden * k;
    pts.emplace_back(r * std::cos(th), r * std::sin(th));
  }
  return pts;
}

inline std::vector<Complex> circle_grid(int count, double radius) {
  std::vector<Complex> pts;
  pts.reserve(count);
  for (int k = 0; k < count; ++k) {
    double th = 2.0 * M_PI * k / count;
    pts.emplace_back(radius * std::cos(th), radius * std::sin(th));
  }
  return pts;
}

struct SchurCertificate {
  bool passed = false;
  double sup_singular_value = 0.0;
  Complex worst_point;
};

/// Sampling certificate: sup of the largest singular value over a
/// quasi-random interior grid plus a near-boundary circle. A pass is a
/// necessary condition only, not a proof of Schur membership.
inline SchurCertificate certify_schur(const Realization& r,
                                      const ToleranceConfig& cfg = {}) {
  SchurCertificate cert;
  auto consider = [&](Complex z) {
    ComplexMatrix v = evaluate(r, z, 0, cfg);
    double s = op_norm(v);
    if (s > cert.sup_singular_value) {
      cert.sup_singular_value = s;
      cert.worst_point = z;
    }
  };
  for (Complex z : interior_grid(cfg.grid_interior_points)) consider(z);
  for (Complex z : circle_grid(cfg.grid_boundary_points, 1.0 - 1e-6))
    consider(z);
  cert.passed = cert.sup_singular_value <= 1.0 + cfg.residual_tol;
  return cert;
}

struct TaylorSeries {
  std::vector<ComplexMatrix> coeffs;
  double tail_bound = 0.0;  // ||C|| ||B|| rho^count / (1 - rho)
};

/// Taylor coefficients: s_0 = D, s_k = C A^{k-1} B for k >= 1.
inline TaylorSeries taylor_coeffs(const Realization& r, int count,
                                  const ToleranceConfig& cfg = {}) {
  (void)cfg;
  const double rho = spectral_radius(r.A);
  if (rho >= 1.0)
    throw SpectralRadiusError("taylor_coeffs: spectral radius of A >= 1");
  TaylorSeries ts;
  ts.coeffs.reserve(count);
  if (count > 0) ts.coeffs.push_back(r.D);
  ComplexMatrix x = r.B;
  for (int k = 1; k < count; ++k) {
    ts.coeffs.push_back(r.C * x);
    x = r.A * x;
  }
  if (r.state_dim() > 0 && count >= 1)
    ts.tail_bound = op_norm(r.C) * op_norm(r.B) * std::pow(rho, count - 1) /
                    (1.0 - rho);
  return ts;
}

namespace detail {

/// Number of terms needed so that amp * rho^K / (1 - rho) <= tol,
/// capped at 1e5.
inline int truncation_length(double rho, double amp, double tol) {
  if (rho <= 0.0 || amp <= 0.0) return 1;
  if (rho >= 1.0)
    throw SpectralRadiusError("truncation_length: rho >= 1");
  double bound = amp / (1.0 - rho);
  int k = 1;
  while (bound > tol) {
    bound *= rho;
    ++k;
    if (k > 100000)
      throw TruncationCapError(
          "truncation cap (1e5 terms) exceeded; spectral radius too close "
          "to 1");
  }
  return k;
}

}  // namespace detail

/// H^2 inner product <f, g> = sum_k g_k^* f_k for column-vector-valued f, g,
/// truncated with a certified geometric tail bound.
inline Complex h2_inner(const Realization& f, const Realization& g,
                        const ToleranceConfig& cfg = {}) {
  if (f.in_dim() != 1 || g.in_dim() != 1)
    throw DimensionError("h2_inner: operands must be column-vector valued");
  if (f.out_dim() != g.out_dim())
    throw DimensionError("h2_inner: coefficient spaces differ");
  const double rho = std::max(spectral_radius(f.A), spectral_radius(g.A));
  if (rho >= 1.0)
    throw SpectralRadiusError("h2_inner: spectral radius >= 1");
  const double amp_f =
      f.state_dim() ? op_norm(f.C) * op_norm(f.B) : 0.0;
  const double amp_g =
      g.state_dim() ? op_norm(g.C) * op_norm(g.B) : 0.0;
  int terms = 2;
  if (rho > 0.0 && amp_f * amp_g > 0.0)
    terms = detail::truncation_length(
        rho, std::max({amp_f, amp_g, amp_f * amp_g, 1.0}),
        cfg.truncation_tol);
  terms = std::max(terms, 2);
  TaylorSeries tf = taylor_coeffs(f, terms, cfg);
  TaylorSeries tg = taylor_coeffs(g, terms, cfg);
  Complex acc = 0.0;
  for (int k = 0; k < terms; ++k)
    acc += (tg.coeffs[k].adjoint() * tf.coeffs[k])(0, 0);
  return acc;
}

/// Deterministic random Schur function: a random (n+q) x (n+p) block matrix
/// scaled to operator norm 1 - 1e-3 is a strict contraction, so its transfer
/// function D + zC(I-zA)^{-1}B lies in the Schur class.
inline Realization random_schur(int state_dim, int out_dim, int in_dim,
                                std::uint64_t seed) {
  if (out_dim < 1 || in_dim < 1)
    throw DimensionError("random_schur: coefficient dims must be >= 1");
  if (state_dim < 0) throw DimensionError("random_schur: state_dim < 0");
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> dist(0.0, 1.0);
  const int rows = state_dim + out_dim, cols = state_dim + in_dim;
  ComplexMatrix u(rows, cols);
  for (int i = 0; i < rows; ++i)
    for (int j = 0; j < cols; ++j) u(i, j) = Complex(dist(rng), dist(rng));
  double nrm = op_norm(u);
  if (nrm > 0.0) u *= (1.0 - 1e-3) / nrm;
  return Realization(u.topLeftCorner(state_dim, state_dim),
                     u.topRightCorner(state_dim, in_dim),
                     u.bottomLeftCorner(out_dim, state_dim),
                     u.bottomRightCorner(out_dim, in_dim));
}

}  // namespace pickforge

#endif

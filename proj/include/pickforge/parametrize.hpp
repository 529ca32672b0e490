#ifndef PICKFORGE_PARAMETRIZE_HPP
#define PICKFORGE_PARAMETRIZE_HPP

#include "pickforge/pick.hpp"

namespace pickforge {

struct Signature {
  Eigen::Index dim_plus = 0;   // dim Y
  Eigen::Index dim_minus = 0;  // dim U

  ComplexMatrix matrix() const {
    ComplexMatrix j =
        ComplexMatrix::Identity(dim_plus + dim_minus, dim_plus + dim_minus);
    j.bottomRightCorner(dim_minus, dim_minus) *= -1.0;
    return j;
  }
};

enum class ThetaProvenance { Explicit, Krein };

/// 2x2-block J-inner function packaged as a (q+p) x (q+p) realization.
/// Block (1,1) is q x q on the Y slot, block (2,2) is p x p on U.
struct ThetaFunction {
  Realization theta;
  Signature J;
  ThetaProvenance provenance = ThetaProvenance::Explicit;
  Complex mu = 1.0;  // normalization point for the explicit construction

  Realization block(int i, int j) const {
    const Eigen::Index q = J.dim_plus, p = J.dim_minus;
    const Eigen::Index r0 = (i == 1) ? 0 : q, rows = (i == 1) ? q : p;
    const Eigen::Index c0 = (j == 1) ? 0 : q, cols = (j == 1) ? q : p;
    return Realization(theta.A, theta.B.middleCols(c0, cols),
                       theta.C.middleRows(r0, rows),
                       theta.D.block(r0, c0, rows, cols));
  }
};

/// Unimodular mu away from spec(T*): 1 when admissible, otherwise the best
/// of 64 roots of unity.
inline Complex choose_mu(const ComplexMatrix& t) {
  if (t.rows() == 0) return 1.0;
  Eigen::ComplexEigenSolver<ComplexMatrix> es(t.adjoint(), false);
  const auto& ev = es.eigenvalues();
  auto dist = [&](Complex mu) {
    double d = std::numeric_limits<double>::infinity();
    for (Eigen::Index i = 0; i < ev.size(); ++i)
      d = std::min(d, std::abs(mu - ev(i)));
    return d;
  };
  if (dist(1.0) > 1e-6) return 1.0;
  Complex best = 1.0;
  double best_d = dist(1.0);
  for (int k = 1; k < 64; ++k) {
    Complex mu = std::polar(1.0, 2.0 * M_PI * k / 64.0);
    double d = dist(mu);
    if (d > best_d) {
      best_d = d;
      best = mu;
    }
  }
  return best;
}

namespace detail {

inline void require_strict_pick(const ComplexMatrix& p, const char* who) {
  if (p.rows() == 0) return;
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(hermitian_part(p),
                                                  Eigen::EigenvaluesOnly);
  if (es.eigenvalues().minCoeff() < 1e-8 * op_norm(p))
    throw DegeneratePickError(
        std::string(who) +
        ": Pick matrix not strictly positive; use the redheffer module");
}

}  // namespace detail

/// Theta(z) = I + (z - mu) [E;N] (I - zT)^{-1} P^{-1} (mu I - T*)^{-1}
/// [E*, -N*], normalized so Theta(mu) = I. Expanding (z - mu)(I - zT)^{-1}
/// puts it in realization form with A = T, B = P^{-1}(mu I - T*)^{-1}
/// [E*, -N*], C = [E;N](I - mu T), D = I - mu [E;N] B.
inline ThetaFunction build_theta_explicit(const InterpolationData& data,
                                          const ComplexMatrix& p,
                                          Complex mu) {
  detail::require_strict_pick(p, "build_theta_explicit");
  if (std::abs(std::abs(mu) - 1.0) > 1e-12)
    throw Error("build_theta_explicit: |mu| must be 1");
  const Eigen::Index n = data.state_dim();
  const Eigen::Index q = data.out_dim(), pp = data.in_dim();

  ComplexMatrix c(q + pp, n);
  c.topRows(q) = data.E;
  c.bottomRows(pp) = data.N;
  ComplexMatrix right(n, q + pp);
  right.leftCols(q) = data.E.adjoint();
  right.rightCols(pp) = -data.N.adjoint();

  ComplexMatrix shift = mu * ComplexMatrix::Identity(n, n) - data.T.adjoint();
  Eigen::FullPivLU<ComplexMatrix> lu(shift);
  if (n > 0 && !lu.isInvertible())
    throw Error("build_theta_explicit: mu in spectrum of T*");
  ComplexMatrix b = p.fullPivLu().solve(lu.solve(right));

  ThetaFunction tf;
  tf.J = Signature{q, pp};
  tf.provenance = ThetaProvenance::Explicit;
  tf.mu = mu;
  tf.theta = Realization(
      data.T, b, c * (ComplexMatrix::Identity(n, n) - mu * data.T),
      ComplexMatrix::Identity(q + pp, q + pp) - mu * (c * b));
  return tf;
}

inline ThetaFunction build_theta_explicit(const InterpolationData& data,
                                          const ComplexMatrix& p) {
  return build_theta_explicit(data, p, choose_mu(data.T));
}

struct KreinCompletion {
  ComplexMatrix B;  // n x (q+p)
  ComplexMatrix D;  // (q+p) x (q+p)
  Eigen::Index inertia_plus = 0;
  Eigen::Index inertia_minus = 0;
};

/// Completes the (P, J)-isometric column [T; E; N] to a (P, J)-unitary
/// matrix [[T, B], [E;N, D]] and reads Theta off as D + z[E;N](I-zT)^{-1}B.
/// The completion columns come from the metric-orthogonal complement of the
/// column span, normalized against the indefinite Gram diag(P, J); the
/// eigenvalue signs of that Gram must have inertia (q, p).
inline std::pair<KreinCompletion, ThetaFunction> krein_complete(
    const InterpolationData& data, const ComplexMatrix& p,
    const ToleranceConfig& cfg = {}) {
  detail::require_strict_pick(p, "krein_complete");
  if (data.stein_residual(p) > cfg.residual_tol)
    throw Error("krein_complete: Stein identity residual too large");
  const Eigen::Index n = data.state_dim();
  const Eigen::Index q = data.out_dim(), pp = data.in_dim();
  const Eigen::Index m = q + pp;

  ComplexMatrix c(m, n);
  c.topRows(q) = data.E;
  c.bottomRows(pp) = data.N;
  ComplexMatrix col(n + m, n);
  col.topRows(n) = data.T;
  col.bottomRows(m) = c;

  ComplexMatrix metric = ComplexMatrix::Zero(n + m, n + m);
  metric.topLeftCorner(n, n) = p;
  metric.bottomRightCorner(m, m) = Signature{q, pp}.matrix();

  // Metric-orthogonal projection onto the column span; the Stein identity
  // makes col* metric col = P, so this is idempotent.
  ComplexMatrix proj =
      col * p.fullPivLu().solve(col.adjoint() * metric);
  ComplexMatrix perp =
      ComplexMatrix::Identity(n + m, n + m) - proj;
  ComplexMatrix qbasis = range_basis(perp, cfg.psd_tol);
  if (qbasis.cols() != m)
    throw Error("krein_complete: complement rank != q+p");

  ComplexMatrix w = hermitian_part(qbasis.adjoint() * metric * qbasis);
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(w);
  const Eigen::VectorXd lam = es.eigenvalues();
  KreinCompletion kc;
  for (Eigen::Index i = 0; i < m; ++i)
    (lam(i) > 0.0 ? kc.inertia_plus : kc.inertia_minus) += 1;
  if (kc.inertia_plus != q || kc.inertia_minus != pp)
    throw Error("krein_complete: inertia mismatch");

  // Eigenvalues ascend; positive-signature columns go first (the Y slot).
  ComplexMatrix arranged(m, m);
  Eigen::Index pos = 0, neg = 0;
  for (Eigen::Index i = 0; i < m; ++i) {
    ComplexVector v = es.eigenvectors().col(i) / std::sqrt(std::abs(lam(i)));
    if (lam(i) > 0.0)
      arranged.col(pos++) = v;
    else
      arranged.col(q + neg++) = v;
  }
  ComplexMatrix bd = qbasis * arranged;
  kc.B = bd.topRows(n);
  kc.D = bd.bottomRows(m);

  ThetaFunction tf;
  tf.J = Signature{q, pp};
  tf.provenance = ThetaProvenance::Krein;
  tf.theta = Realization(data.T, kc.B, c, kc.D);
  return {kc, tf};
}

/// Residuals of the two (P, J)-unitarity equalities for a completion.
inline std::pair<double, double> completion_residuals(
    const InterpolationData& data, const ComplexMatrix& p,
    const KreinCompletion& kc) {
  const Eigen::Index n = data.state_dim();
  const Eigen::Index m = data.out_dim() + data.in_dim();
  ComplexMatrix c(m, n);
  c.topRows(data.out_dim()) = data.E;
  c.bottomRows(data.in_dim()) = data.N;
  ComplexMatrix u(n + m, n + m);
  u.topLeftCorner(n, n) = data.T;
  u.topRightCorner(n, m) = kc.B;
  u.bottomLeftCorner(m, n) = c;
  u.bottomRightCorner(m, m) = kc.D;
  ComplexMatrix j = Signature{data.out_dim(), data.in_dim()}.matrix();
  ComplexMatrix minv = ComplexMatrix::Zero(n + m, n + m);
  minv.topLeftCorner(n, n) = p.fullPivLu().inverse();
  minv.bottomRightCorner(m, m) = j;
  ComplexMatrix met = ComplexMatrix::Zero(n + m, n + m);
  met.topLeftCorner(n, n) = p;
  met.bottomRightCorner(m, m) = j;
  double r1 = op_norm(u * minv * u.adjoint() - minv);
  double r2 = op_norm(u.adjoint() * met * u - met);
  return {r1, r2};
}

struct ThetaReport {
  double identity_residual = 0.0;     // Eq.-(5.20)-type kernel identity
  double min_eig_right = 0.0;         // J - Theta J Theta*
  double min_eig_left = 0.0;          // J - Theta* J Theta
  double boundary_unitarity = 0.0;    // max ||Theta(t) J Theta(t)* - J||
  bool boundary_checked = false;
  bool passed = false;
};

inline ThetaReport verify_theta(const ThetaFunction& tf,
                                const InterpolationData& data,
                                const ComplexMatrix& p,
                                const ToleranceConfig& cfg = {},
                                std::uint64_t seed = 13) {
  ThetaReport rep;
  const ComplexMatrix j = tf.J.matrix();
  const Eigen::Index n = data.state_dim();
  ComplexMatrix c(j.rows(), n);
  c.topRows(data.out_dim()) = data.E;
  c.bottomRows(data.in_dim()) = data.N;
  Eigen::FullPivLU<ComplexMatrix> plu(p);

  std::mt19937_64 rng(seed);
  auto pts = detail::random_disk_points(rng, 50);
  rep.min_eig_right = rep.min_eig_left =
      std::numeric_limits<double>::infinity();
  for (size_t a = 0; a < pts.size(); ++a) {
    Complex z = pts[a];
    Complex zeta = pts[(a + 1) % pts.size()];
    ComplexMatrix tz = evaluate(tf.theta, z, 0, cfg);
    ComplexMatrix tzeta = evaluate(tf.theta, zeta, 0, cfg);
    ComplexMatrix lhs =
        (j - tz * j * tzeta.adjoint()) / (1.0 - z * std::conj(zeta));
    ComplexMatrix rz =
        (ComplexMatrix::Identity(n, n) - z * data.T).fullPivLu().inverse();
    ComplexMatrix rzeta =
        (ComplexMatrix::Identity(n, n) - zeta * data.T)
            .fullPivLu()
            .inverse();
    ComplexMatrix rhs = c * rz * plu.solve(rzeta.adjoint() * c.adjoint());
    rep.identity_residual =
        std::max(rep.identity_residual, op_norm(lhs - rhs));
    rep.min_eig_right = std::min(
        rep.min_eig_right,
        psd_certificate(j - tz * j * tz.adjoint(), cfg).min_eigenvalue);
    rep.min_eig_left = std::min(
        rep.min_eig_left,
        psd_certificate(j - tz.adjoint() * j * tz, cfg).min_eigenvalue);
  }
  if (spectral_radius(data.T) < 1.0) {
    rep.boundary_checked = true;
    for (Complex t : circle_grid(cfg.grid_boundary_points, 1.0)) {
      ComplexMatrix tt = evaluate(tf.theta, t, 0, cfg);
      rep.boundary_unitarity = std::max(
          rep.boundary_unitarity, op_norm(tt * j * tt.adjoint() - j));
    }
  }
  rep.passed = rep.identity_residual <= 1e-9 * std::max(1.0, op_norm(p)) &&
               rep.min_eig_right >= -1e-9 && rep.min_eig_left >= -1e-9 &&
               (!rep.boundary_checked || rep.boundary_unitarity <= 1e-8);
  return rep;
}

/// S = (Theta11 E + Theta12)(Theta21 E + Theta22)^{-1}.
inline Realization lft(const ThetaFunction& tf, const Realization& param,
                       const ToleranceConfig& cfg = {}) {
  if (param.out_dim() != tf.J.dim_plus || param.in_dim() != tf.J.dim_minus)
    throw DimensionError("lft: parameter must map U -> Y");
  Realization num = tf.block(1, 1) * param + tf.block(1, 2);
  Realization den = tf.block(2, 1) * param + tf.block(2, 2);
  Eigen::FullPivLU<ComplexMatrix> lu(den.D);
  if (!lu.isInvertible())
    throw Error("lft: Theta21 E + Theta22 singular at z = 0");
  (void)cfg;
  return num * inverse(den);
}

/// E = (Theta11 - S Theta21)^{-1} (S Theta22 - Theta12). When the lead
/// factor vanishes at the origin the quotient is still analytic provided
/// the right side vanishes too; common zeros are peeled off by backward
/// shifts before inverting.
inline Realization recover_param(const ThetaFunction& tf, const Realization& s,
                                 const ToleranceConfig& cfg = {}) {
  Realization lead = tf.block(1, 1) - s * tf.block(2, 1);
  Realization rhs = s * tf.block(2, 2) - tf.block(1, 2);
  const Eigen::Index max_shifts = lead.state_dim() + 1;
  for (Eigen::Index k = 0; k <= max_shifts; ++k) {
    if (Eigen::FullPivLU<ComplexMatrix>(lead.D).isInvertible())
      return inverse(lead) * rhs;
    const double scale = std::max(1.0, op_norm(lead.C) * op_norm(lead.B));
    if (op_norm(lead.D) > cfg.residual_tol * scale ||
        op_norm(rhs.D) > cfg.residual_tol *
                             std::max(1.0, op_norm(rhs.C) * op_norm(rhs.B)))
      break;
    lead = combine(CombineKind::BackwardShift, lead);
    rhs = combine(CombineKind::BackwardShift, rhs);
  }
  throw Error("recover_param: Theta11 - S Theta21 singular at z = 0");
}

}  // namespace pickforge

#endif

#ifndef PICKFORGE_REDHEFFER_HPP
#define PICKFORGE_REDHEFFER_HPP

#include "pickforge/pick.hpp"

namespace pickforge {

/// Unitary colligation completing the isometry
/// V: [P^{1/2}x; Nx] -> [P^{1/2}Tx; Ex] with defect spaces Delta (domain
/// side) and Delta_* (range side). No inverse of P is taken anywhere, so
/// rank-deficient Pick matrices are fine.
struct RedhefferColligation {
  ComplexMatrix U;  // (r+q+dD) x (r+p+dDs), unitary
  Eigen::Index r = 0;        // rank of P
  Eigen::Index q = 0, p = 0;
  Eigen::Index d_delta = 0;       // dim Delta
  Eigen::Index d_delta_star = 0;  // dim Delta_*
  ComplexMatrix sqrt_p;  // r x n coordinate square root, sqrt_p* sqrt_p = P
  ComplexMatrix A, B1, B2, C1, C2, D11, D12, D21;
};

inline RedhefferColligation build_colligation(const InterpolationData& data,
                                              const ComplexMatrix& p,
                                              const ToleranceConfig& cfg = {}) {
  const Eigen::Index n = data.state_dim();
  const Eigen::Index q = data.out_dim(), pp = data.in_dim();
  PsdCertificate cert = psd_certificate(p, cfg);
  if (!cert.is_psd)
    throw NotPsdError("build_colligation: P fails PSD certification");
  if (data.stein_residual(p) > cfg.residual_tol)
    throw Error("build_colligation: Stein identity residual too large");

  RedhefferColligation coll;
  coll.q = q;
  coll.p = pp;

  Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(hermitian_part(p));
  const Eigen::VectorXd lam = es.eigenvalues();
  const double cutoff = cfg.psd_tol * std::max(1.0, op_norm(p));
  std::vector<Eigen::Index> keep;
  for (Eigen::Index i = 0; i < n; ++i)
    if (lam(i) > cutoff) keep.push_back(i);
  coll.r = static_cast<Eigen::Index>(keep.size());
  coll.sqrt_p.resize(coll.r, n);
  for (Eigen::Index k = 0; k < coll.r; ++k)
    coll.sqrt_p.row(k) =
        std::sqrt(lam(keep[k])) * es.eigenvectors().col(keep[k]).adjoint();

  const Eigen::Index r = coll.r;
  ComplexMatrix md(r + pp, n);  // domain columns [P^{1/2}; N]
  md.topRows(r) = coll.sqrt_p;
  md.bottomRows(pp) = data.N;
  ComplexMatrix mr(r + q, n);  // range columns [P^{1/2}T; E]
  mr.topRows(r) = coll.sqrt_p * data.T;
  mr.bottomRows(q) = data.E;

  ComplexMatrix v = mr * pinv(md, cfg);
  const double iso_defect = op_norm(v * md - mr);
  if (iso_defect > cfg.residual_tol * std::max(1.0, op_norm(mr)))
    throw Error(
        "build_colligation: V is not isometric on its domain (Stein "
        "identity violated)");

  ComplexMatrix q_delta = complement_basis(md, cfg.psd_tol);
  ComplexMatrix q_delta_star = complement_basis(mr, cfg.psd_tol);
  coll.d_delta = q_delta.cols();
  coll.d_delta_star = q_delta_star.cols();

  coll.U = ComplexMatrix::Zero(r + q + coll.d_delta,
                               r + pp + coll.d_delta_star);
  coll.U.topLeftCorner(r + q, r + pp) = v;
  coll.U.topRightCorner(r + q, coll.d_delta_star) = q_delta_star;
  coll.U.bottomLeftCorner(coll.d_delta, r + pp) = q_delta.adjoint();

  coll.A = coll.U.block(0, 0, r, r);
  coll.B1 = coll.U.block(0, r, r, pp);
  coll.B2 = coll.U.block(0, r + pp, r, coll.d_delta_star);
  coll.C1 = coll.U.block(r, 0, q, r);
  coll.C2 = coll.U.block(r + q, 0, coll.d_delta, r);
  coll.D11 = coll.U.block(r, r, q, pp);
  coll.D12 = coll.U.block(r, r + pp, q, coll.d_delta_star);
  coll.D21 = coll.U.block(r + q, r, coll.d_delta, pp);
  return coll;
}

inline double unitarity_residual(const RedhefferColligation& coll) {
  const Eigen::Index rows = coll.U.rows(), cols = coll.U.cols();
  double a = op_norm(coll.U.adjoint() * coll.U -
                     ComplexMatrix::Identity(cols, cols));
  double b = op_norm(coll.U * coll.U.adjoint() -
                     ComplexMatrix::Identity(rows, rows));
  return std::max(a, b);
}

/// Characteristic function of the colligation, as a 2x2-block function
/// (U x Delta_*) -> (Y x Delta); the (2,2) block vanishes at the origin.
struct SigmaFunction {
  Realization sigma;
  Eigen::Index out_main = 0;    // Y
  Eigen::Index out_defect = 0;  // Delta
  Eigen::Index in_main = 0;     // U
  Eigen::Index in_defect = 0;   // Delta_*
  ComplexMatrix A, C1, C2;      // kept for the kernel identity and Gamma

  Realization block(int i, int j) const {
    const Eigen::Index r0 = (i == 1) ? 0 : out_main;
    const Eigen::Index rows = (i == 1) ? out_main : out_defect;
    const Eigen::Index c0 = (j == 1) ? 0 : in_main;
    const Eigen::Index cols = (j == 1) ? in_main : in_defect;
    return Realization(sigma.A, sigma.B.middleCols(c0, cols),
                       sigma.C.middleRows(r0, rows),
                       sigma.D.block(r0, c0, rows, cols));
  }
};

inline SigmaFunction sigma(const RedhefferColligation& coll) {
  SigmaFunction sf;
  sf.out_main = coll.q;
  sf.out_defect = coll.d_delta;
  sf.in_main = coll.p;
  sf.in_defect = coll.d_delta_star;
  sf.A = coll.A;
  sf.C1 = coll.C1;
  sf.C2 = coll.C2;

  ComplexMatrix b(coll.r, coll.p + coll.d_delta_star);
  b.leftCols(coll.p) = coll.B1;
  b.rightCols(coll.d_delta_star) = coll.B2;
  ComplexMatrix c(coll.q + coll.d_delta, coll.r);
  c.topRows(coll.q) = coll.C1;
  c.bottomRows(coll.d_delta) = coll.C2;
  ComplexMatrix d = ComplexMatrix::Zero(coll.q + coll.d_delta,
                                        coll.p + coll.d_delta_star);
  d.topLeftCorner(coll.q, coll.p) = coll.D11;
  d.topRightCorner(coll.q, coll.d_delta_star) = coll.D12;
  d.bottomLeftCorner(coll.d_delta, coll.p) = coll.D21;
  sf.sigma = Realization(coll.A, b, c, d);
  return sf;
}

/// S = Sigma11 + Sigma12 (I - E Sigma22)^{-1} E Sigma21 with parameter
/// E: Delta -> Delta_*.
inline Realization redheffer_apply(const SigmaFunction& sf,
                                   const Realization& param,
                                   const ToleranceConfig& cfg = {}) {
  (void)cfg;
  if (param.in_dim() != sf.out_defect || param.out_dim() != sf.in_defect)
    throw DimensionError("redheffer_apply: parameter must map Delta -> "
                         "Delta_*");
  Realization chain = Realization::identity(sf.in_defect) -
                      param * sf.block(2, 2);
  return sf.block(1, 1) +
         sf.block(1, 2) * inverse(chain) * param * sf.block(2, 1);
}

/// G(z) = Sigma12(z)(I - E(z)Sigma22(z))^{-1} and
/// Gamma(z) = [C1 + G(z)E(z)C2](I - zA)^{-1}.
inline std::pair<Realization, Realization> maps_g_gamma(
    const SigmaFunction& sf, const Realization& param) {
  if (param.in_dim() != sf.out_defect || param.out_dim() != sf.in_defect)
    throw DimensionError("maps_g_gamma: parameter must map Delta -> Delta_*");
  Realization chain = Realization::identity(sf.in_defect) -
                      param * sf.block(2, 2);
  Realization g = sf.block(1, 2) * inverse(chain);
  Realization gamma = resolvent_times(sf.C1, sf.A) +
                      g * param * resolvent_times(sf.C2, sf.A);
  return {g, gamma};
}

/// Sampled residuals of the kernel decomposition
/// K_S = G K_E G* + Gamma Gamma*, the square-root factorization
/// Gamma(z) sqrt_p = (E - S(z)N)(I - zT)^{-1}, and the colligation kernel
/// identity for Sigma.
inline VerificationReport verify_decomposition(
    const Realization& s, const Realization& param, const Realization& g,
    const Realization& gamma, const RedhefferColligation& coll,
    const InterpolationData& data, const ToleranceConfig& cfg = {},
    std::uint64_t seed = 17, int samples = 25) {
  VerificationReport rep;
  SigmaFunction sf = sigma(coll);
  const Eigen::Index n = data.state_dim();
  auto ks = dbr_kernel(s, cfg);
  auto ke = dbr_kernel(param, cfg);
  std::mt19937_64 rng(seed);
  auto pts = detail::random_disk_points(rng, samples);
  double kernel_res = 0.0, fs_res = 0.0, sigma_res = 0.0;
  for (size_t a = 0; a < pts.size(); ++a) {
    Complex z = pts[a];
    Complex zeta = pts[(a + 1) % pts.size()];
    ComplexMatrix gz = evaluate(g, z, 0, cfg);
    ComplexMatrix gzeta = evaluate(g, zeta, 0, cfg);
    ComplexMatrix gaz = evaluate(gamma, z, 0, cfg);
    ComplexMatrix gazeta = evaluate(gamma, zeta, 0, cfg);
    kernel_res = std::max(
        kernel_res, op_norm(ks(z, zeta) - gz * ke(z, zeta) * gzeta.adjoint() -
                            gaz * gazeta.adjoint()));
    ComplexMatrix fs =
        (data.E - evaluate(s, z, 0, cfg) * data.N) *
        (ComplexMatrix::Identity(n, n) - z * data.T).fullPivLu().inverse();
    fs_res = std::max(fs_res, op_norm(gaz * coll.sqrt_p - fs));
    ComplexMatrix sz = evaluate(sf.sigma, z, 0, cfg);
    ComplexMatrix szeta = evaluate(sf.sigma, zeta, 0, cfg);
    ComplexMatrix lhs =
        (ComplexMatrix::Identity(sz.rows(), sz.rows()) -
         sz * szeta.adjoint()) /
        (1.0 - z * std::conj(zeta));
    ComplexMatrix c(coll.q + coll.d_delta, coll.r);
    c.topRows(coll.q) = coll.C1;
    c.bottomRows(coll.d_delta) = coll.C2;
    ComplexMatrix rz = (ComplexMatrix::Identity(coll.r, coll.r) - z * coll.A)
                           .fullPivLu()
                           .inverse();
    ComplexMatrix rzeta =
        (ComplexMatrix::Identity(coll.r, coll.r) - zeta * coll.A)
            .fullPivLu()
            .inverse();
    sigma_res = std::max(
        sigma_res, op_norm(lhs - c * rz * rzeta.adjoint() * c.adjoint()));
  }
  rep.metrics["kernel_residual"] = kernel_res;
  rep.metrics["fs_residual"] = fs_res;
  rep.metrics["sigma_identity_residual"] = sigma_res;
  rep.passed = kernel_res <= 1e-8 && fs_res <= 1e-8 && sigma_res <= 1e-9;
  return rep;
}

/// Injectivity condition for the Redheffer parametrization:
/// the intersection of the ranges of (T*)^k must be trivial. Finite
/// matrices stabilize the chain by step n.
inline bool param_injectivity_condition(const ComplexMatrix& t,
                                        const ToleranceConfig& cfg = {}) {
  const Eigen::Index n = t.rows();
  if (n == 0) return true;
  ComplexMatrix power = ComplexMatrix::Identity(n, n);
  for (Eigen::Index k = 0; k < n; ++k) power = t.adjoint() * power;
  return numeric_rank(power, cfg.psd_tol) == 0;
}

}  // namespace pickforge

#endif

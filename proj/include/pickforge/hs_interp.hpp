#ifndef PICKFORGE_HS_INTERP_HPP
#define PICKFORGE_HS_INTERP_HPP

#include <optional>

#include "pickforge/parametrize.hpp"
#include "pickforge/redheffer.hpp"

namespace pickforge {

/// Interpolation problem inside H(S): find f with the (T, E, N)-structured
/// conditions and ||f|| <= 1, the row functional y collecting the target
/// values. P is the Gram of the map F^S(z) = (E - S(z)N)(I - zT)^{-1}.
struct HSProblemData {
  Realization S;
  InterpolationData data;
  ComplexMatrix y;  // 1 x n
  ComplexMatrix P;  // n x n
  // Parameter reproducing S through the Redheffer transform; required for
  // the degenerate-P parametrization, where it cannot be recovered from S
  // and the data alone.
  std::optional<Realization> generating_param;
};

/// Realization of F^S(z) = (E - S(z)N)(I - zT)^{-1}.
inline Realization fs_map(const Realization& s,
                          const InterpolationData& data) {
  return resolvent_times(data.E, data.T) -
         s * resolvent_times(data.N, data.T);
}

inline VerificationReport check_admissible(const HSProblemData& prob,
                                           const ToleranceConfig& cfg = {}) {
  VerificationReport rep;
  const double rho = spectral_radius(prob.data.T);
  rep.metrics["spectral_radius"] = rho;
  // Holomorphy of x -> [E;N](I-zT)^{-1}x on the disk needs every
  // eigenvalue of T inside the closed disk.
  const bool holomorphic = rho <= 1.0 + cfg.psd_tol;
  if (!holomorphic) rep.notes.push_back("T has an eigenvalue outside the closed disk");
  const double stein = prob.data.stein_residual(prob.P);
  rep.metrics["stein_residual"] = stein;
  double series_mismatch = 0.0;
  if (rho < 1.0) {
    ComplexMatrix p_series =
        build_pick(prob.data, PickStrategy::Series, cfg).P;
    series_mismatch =
        op_norm(p_series - prob.P) / std::max(1.0, op_norm(prob.P));
    rep.metrics["series_mismatch"] = series_mismatch;
  } else {
    rep.notes.push_back(
        "rho(T) = 1: series cross-check of P skipped, Stein residual only");
  }
  rep.passed = holomorphic && stein <= cfg.residual_tol &&
               series_mismatch <= cfg.residual_tol;
  return rep;
}

inline PsdCertificate hs_solvable(const ComplexMatrix& p,
                                  const ComplexMatrix& y,
                                  const ToleranceConfig& cfg = {}) {
  if (y.rows() != 1 || y.cols() != p.rows())
    throw DimensionError("hs_solvable: y must be a 1 x n row");
  return psd_certificate(p - y.adjoint() * y, cfg);
}

namespace detail {

/// Square root of a PSD defect I - X*X. Eigenvalues below the cut are
/// rounding residue of an exactly-zero defect; taking their square root
/// would turn 1e-16 noise into 1e-8, so they are clamped to zero first.
inline ComplexMatrix defect_sqrt(const ComplexMatrix& m, double tol = 1e-12) {
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(hermitian_part(m));
  Eigen::VectorXd lam = es.eigenvalues();
  const double cut = tol * std::max(1.0, lam.cwiseAbs().maxCoeff());
  for (Eigen::Index i = 0; i < lam.size(); ++i)
    lam(i) = (lam(i) > cut) ? std::sqrt(lam(i)) : 0.0;
  return es.eigenvectors() * lam.asDiagonal() *
         es.eigenvectors().adjoint();
}

}  // namespace detail

/// Douglas-lemma solver: given AA* >= BB*, produces a contraction X with
/// AX = B. K parametrizes the solution set; it may be given at full size
/// (cols(A) x cols(B)) or at defect size, in which case it is embedded via
/// orthonormal bases of the defect ranges. K absent means K = 0, the
/// minimal-norm solution X2* X1.
inline ComplexMatrix douglas_solve(const ComplexMatrix& a,
                                   const ComplexMatrix& b,
                                   const ComplexMatrix* k = nullptr,
                                   const ToleranceConfig& cfg = {}) {
  if (a.rows() != b.rows())
    throw DimensionError("douglas_solve: A and B need equal row counts");
  ComplexMatrix gap = a * a.adjoint() - b * b.adjoint();
  if (!psd_certificate(gap, cfg).is_psd)
    throw NotPsdError("douglas_solve: AA* >= BB* fails");
  if (k && op_norm(*k) > 1.0 + cfg.psd_tol)
    throw Error("douglas_solve: ||K|| > 1");

  ComplexMatrix sq = sqrt_psd(a * a.adjoint(), cfg);
  ComplexMatrix sq_pinv = pinv(sq, cfg);
  ComplexMatrix x1 = sq_pinv * b;
  ComplexMatrix x2 = sq_pinv * a;
  ComplexMatrix x = x2.adjoint() * x1;
  if (!k) return x;

  ComplexMatrix def2 = ComplexMatrix::Identity(a.cols(), a.cols()) -
                       x2.adjoint() * x2;
  ComplexMatrix def1 = ComplexMatrix::Identity(b.cols(), b.cols()) -
                       x1.adjoint() * x1;
  ComplexMatrix ktilde;
  if (k->rows() == a.cols() && k->cols() == b.cols()) {
    ktilde = *k;
  } else {
    ComplexMatrix v2 = range_basis(hermitian_part(def2), cfg.psd_tol);
    ComplexMatrix v1 = range_basis(hermitian_part(def1), cfg.psd_tol);
    if (k->rows() != v2.cols() || k->cols() != v1.cols())
      throw DimensionError(
          "douglas_solve: K matches neither full nor defect dimensions");
    ktilde = v2 * (*k) * v1.adjoint();
  }
  return x + detail::defect_sqrt(def2) * ktilde * detail::defect_sqrt(def1);
}

/// Finite combination h(z) = sum_k K_E(z, w_k) c_k of reproducing kernels
/// of H(E); its H(E) norm is exact via the Gram of the kernels.
struct KernelCombination {
  Realization base;  // the parameter E
  std::vector<Complex> points;
  std::vector<ComplexVector> coeffs;  // values in the output space of E

  bool empty() const { return points.empty(); }
};

inline Complex kernel_gram_inner(const KernelCombination& h1,
                                 const KernelCombination& h2,
                                 const ToleranceConfig& cfg = {}) {
  auto ke = dbr_kernel(h1.base, cfg);
  Complex acc = 0.0;
  for (size_t l = 0; l < h2.points.size(); ++l)
    for (size_t k = 0; k < h1.points.size(); ++k)
      acc += (h2.coeffs[l].adjoint() * ke(h2.points[l], h1.points[k]) *
              h1.coeffs[k])(0, 0);
  return acc;
}

inline double kernel_norm_sq(const KernelCombination& h,
                             const ToleranceConfig& cfg = {}) {
  return std::real(kernel_gram_inner(h, h, cfg));
}

/// Realization of h: each kernel column K_E(z, w)c =
/// (c - E(z) E(w)* c) / (1 - z conj(w)).
inline Realization kernel_combination_realization(
    const KernelCombination& h, Eigen::Index out_dim,
    const ToleranceConfig& cfg = {}) {
  Realization acc = Realization::zero(h.empty() ? out_dim
                                                : h.base.out_dim(),
                                      1);
  for (size_t k = 0; k < h.points.size(); ++k) {
    Complex wbar = std::conj(h.points[k]);
    ComplexMatrix cauchy_a(1, 1), cauchy_b(1, 1), cauchy_c(1, 1),
        cauchy_d(1, 1);
    cauchy_a(0, 0) = wbar;
    cauchy_b(0, 0) = 1.0;
    cauchy_c(0, 0) = wbar;
    cauchy_d(0, 0) = 1.0;
    Realization cauchy(cauchy_a, cauchy_b, cauchy_c, cauchy_d);
    ComplexMatrix ew = evaluate(h.base, h.points[k], 0, cfg);
    Realization numer =
        Realization::constant(ComplexMatrix(h.coeffs[k])) -
        scale_right(h.base, ew.adjoint() * h.coeffs[k]);
    acc = acc + numer * cauchy;
  }
  return acc;
}

struct HSSolution {
  Realization central;  // F^S P^{-1} y*  (strict)  or  Gamma ytilde* (degen)
  Realization carrier;  // u = Theta11 - S Theta21  or  G
  Realization param;    // the E whose space hosts the free parameter h
  double central_norm_sq = 0.0;
  double norm_budget = 0.0;
  bool degenerate = false;
};

inline HSSolution solve_min_norm(const HSProblemData& prob,
                                 const ToleranceConfig& cfg = {}) {
  PsdCertificate cert = hs_solvable(prob.P, prob.y, cfg);
  if (!cert.is_psd)
    throw UnsolvableError("solve_min_norm: P - y*y not PSD (min eig " +
                          std::to_string(cert.min_eigenvalue) + ")");
  const Eigen::Index n = prob.data.state_dim();
  HSSolution sol;
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(hermitian_part(prob.P),
                                                  Eigen::EigenvaluesOnly);
  const bool strict =
      n == 0 || es.eigenvalues().minCoeff() >= 1e-8 * op_norm(prob.P);
  if (strict) {
    ComplexMatrix x = prob.P.fullPivLu().solve(prob.y.adjoint());
    sol.central = fs_map(prob.S, prob.data) * Realization::constant(x);
    sol.central_norm_sq = std::real((prob.y * x)(0, 0));
    ThetaFunction tf = build_theta_explicit(prob.data, prob.P);
    sol.carrier = tf.block(1, 1) - prob.S * tf.block(2, 1);
    sol.param = recover_param(tf, prob.S, cfg);
  } else {
    sol.degenerate = true;
    RedhefferColligation coll = build_colligation(prob.data, prob.P, cfg);
    SigmaFunction sf = sigma(coll);
    if (!prob.generating_param)
      throw Error(
          "solve_min_norm: degenerate P requires the stored generating "
          "parameter for S");
    auto [g, gamma] = maps_g_gamma(sf, *prob.generating_param);
    ComplexMatrix ytilde = pinv(coll.sqrt_p.adjoint(), cfg) * prob.y.adjoint();
    sol.central = gamma * Realization::constant(ytilde);
    sol.central_norm_sq = ytilde.squaredNorm();
    sol.carrier = g;
    sol.param = *prob.generating_param;
  }
  sol.norm_budget =
      std::sqrt(std::max(0.0, 1.0 - sol.central_norm_sq));
  return sol;
}

/// Whether S takes unitary (scalar: unimodular) boundary values, sampled
/// on the circle; only then do H(S) norms agree with H^2 norms.
inline bool is_inner(const Realization& s, const ToleranceConfig& cfg = {}) {
  if (s.out_dim() != s.in_dim()) return false;
  if (spectral_radius(s.A) >= 1.0) return false;
  for (Complex t : circle_grid(64, 1.0)) {
    ComplexMatrix v = evaluate(s, t, 0, cfg);
    if (op_norm(v.adjoint() * v -
                ComplexMatrix::Identity(v.cols(), v.cols())) > 1e-8)
      return false;
  }
  return true;
}

inline bool is_zero_function(const Realization& s) {
  return op_norm(s.D) == 0.0 &&
         (s.state_dim() == 0 || op_norm(s.C) == 0.0 || op_norm(s.B) == 0.0);
}

/// f = central + carrier * h with the budget enforced exactly through the
/// kernel Gram of h. The norm identity ||f||^2 = ||central||^2 + ||h||^2
/// is recomputed independently through H^2 Taylor inner products when S is
/// inner (or zero); a contradiction with the carrier-isometry bookkeeping
/// aborts the solve.
inline Realization parametrize_solutions(const HSProblemData& prob,
                                         const KernelCombination& h,
                                         const ToleranceConfig& cfg = {}) {
  HSSolution sol = solve_min_norm(prob, cfg);
  double h_norm_sq = 0.0;
  Realization f = sol.central;
  if (!h.empty()) {
    h_norm_sq = kernel_norm_sq(h, cfg);
    if (std::sqrt(h_norm_sq) > sol.norm_budget + cfg.psd_tol)
      throw Error("parametrize_solutions: parameter norm exceeds budget");
    Realization hr =
        kernel_combination_realization(h, sol.param.out_dim(), cfg);
    f = sol.central + sol.carrier * hr;
  }
  const double norm_sq = sol.central_norm_sq + h_norm_sq;
  // The H^2 cross-check needs f's Taylor series; boundary-reduced data
  // (Jordan T on the circle) leaves a removable rho(A) = 1 state inside f.
  if (spectral_radius(f.A) < 1.0 &&
      (is_inner(prob.S, cfg) || is_zero_function(prob.S))) {
    const double h2 = std::real(h2_inner(f, f, cfg));
    if (std::abs(h2 - norm_sq) >
        cfg.residual_tol * std::max(1.0, norm_sq) * 100)
      throw Error(
          "parametrize_solutions: carrier-isometry bookkeeping contradicts "
          "the H^2 norm; aborting");
  }
  return f;
}

/// Structured element f = F^S x + u h of H(S).
struct HSElement {
  ComplexVector x;
  KernelCombination h;
};

/// <f1, f2> in H(S) for structured elements: the F^S parts pair through P,
/// the carrier parts through the H(E) kernel Gram, and the cross terms
/// vanish.
inline Complex hs_inner(const HSProblemData& prob, const HSElement& f1,
                        const HSElement& f2,
                        const ToleranceConfig& cfg = {}) {
  Complex acc = 0.0;
  if (f1.x.size() > 0 && f2.x.size() > 0)
    acc += (f2.x.adjoint() * prob.P * f1.x)(0, 0);
  if (!f1.h.empty() && !f2.h.empty())
    acc += kernel_gram_inner(f1.h, f2.h, cfg);
  return acc;
}

}  // namespace pickforge

#endif

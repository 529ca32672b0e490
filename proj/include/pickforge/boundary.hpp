#ifndef PICKFORGE_BOUNDARY_HPP
#define PICKFORGE_BOUNDARY_HPP

#include "pickforge/hs_interp.hpp"

namespace pickforge {

/// Boundary derivative jet at |t0| = 1: derivatives[j] holds
/// S_j = S^{(j)}(t0) / j!. cj_value is the Caratheodory-Julia limit
/// lim (1 - |S(rt0)|^2)/(1 - r^2), +infinity when the condition fails
/// (scalar case; matrix jets carry +infinity unless the boundary value is
/// unitary).
struct BoundaryJet {
  Complex t0;
  int order = 0;
  std::vector<ComplexMatrix> derivatives;
  double cj_value = std::numeric_limits<double>::infinity();
  bool exact = false;             // resolvent path vs radial extrapolation
  double error_estimate = 0.0;    // extrapolation only
};

namespace detail {

/// Richardson extrapolation in (1 - r) for samples at r_k = 1 - h 2^{-k};
/// each level cancels one more power of (1 - r).
inline ComplexMatrix richardson(std::vector<ComplexMatrix> table,
                                double* err = nullptr) {
  const size_t k = table.size();
  double step = 2.0;
  for (size_t level = 1; level < k; ++level) {
    for (size_t i = 0; i + level < k; ++i)
      table[i] = (step * table[i + 1] - table[i]) / (step - 1.0);
    step *= 2.0;
  }
  if (err) {
    *err = (k >= 2) ? op_norm(table[0] - table[1]) : 0.0;
  }
  return table[0];
}

}  // namespace detail

inline BoundaryJet boundary_jet(const Realization& s, Complex t0, int order,
                                const ToleranceConfig& cfg = {}) {
  if (std::abs(std::abs(t0) - 1.0) > 1e-12)
    throw Error("boundary_jet: |t0| must be 1");
  BoundaryJet jet;
  jet.t0 = t0;
  jet.order = order;

  bool exact_ok = true;
  if (s.state_dim() > 0) {
    ComplexMatrix m =
        ComplexMatrix::Identity(s.state_dim(), s.state_dim()) - t0 * s.A;
    Eigen::JacobiSVD<ComplexMatrix> svd(m);
    const auto& sv = svd.singularValues();
    exact_ok = sv(sv.size() - 1) > cfg.psd_tol * std::max(1.0, sv(0));
  }
  if (exact_ok) {
    jet.exact = true;
    double fact = 1.0;
    for (int j = 0; j <= order; ++j) {
      if (j >= 2) fact *= j;
      jet.derivatives.push_back(evaluate(s, t0, j, cfg) / fact);
    }
  } else {
    const double h = 1e-2;
    const int ladder = 7;
    double worst_err = 0.0;
    double fact = 1.0;
    for (int j = 0; j <= order; ++j) {
      if (j >= 2) fact *= j;
      std::vector<ComplexMatrix> samples;
      for (int k = 0; k < ladder; ++k) {
        double r = 1.0 - h * std::pow(2.0, -k);
        samples.push_back(evaluate(s, r * t0, j, cfg) / fact);
      }
      double err = 0.0;
      ComplexMatrix lim = detail::richardson(samples, &err);
      worst_err = std::max(worst_err, err);
      jet.derivatives.push_back(lim);
    }
    jet.error_estimate = worst_err;
    if (worst_err > 1e-4)
      throw Error("boundary_jet: radial extrapolation did not converge");
  }

  if (s.out_dim() == 1 && s.in_dim() == 1 && order >= 1) {
    Complex s0 = jet.derivatives[0](0, 0);
    Complex s1 = jet.derivatives[1](0, 0);
    if (std::abs(std::abs(s0) - 1.0) <= 1e-8)
      jet.cj_value = std::real(t0 * s1 * std::conj(s0));
  } else if (s.out_dim() == s.in_dim() && order >= 1) {
    ComplexMatrix s0 = jet.derivatives[0];
    if (op_norm(s0.adjoint() * s0 - ComplexMatrix::Identity(
                                        s0.cols(), s0.cols())) <= 1e-8)
      jet.cj_value =
          std::real((t0 * jet.derivatives[1] * s0.adjoint()).trace());
  }
  return jet;
}

/// Upper-triangular structure matrix, Psi_{jl} = (-1)^l binom(l, j)
/// t0^{l+j+1} for j <= l.
inline ComplexMatrix psi_matrix(Complex t0, int n) {
  if (std::abs(std::abs(t0) - 1.0) > 1e-12)
    throw Error("psi_matrix: |t0| must be 1");
  ComplexMatrix psi = ComplexMatrix::Zero(n + 1, n + 1);
  for (int l = 0; l <= n; ++l) {
    double binom = 1.0;
    for (int j = 0; j <= l; ++j) {
      if (j > 0) binom = binom * (l - j + 1) / j;
      psi(j, l) = ((l % 2) ? -1.0 : 1.0) * binom *
                  std::pow(t0, static_cast<double>(l + j + 1));
    }
  }
  return psi;
}

struct BoundaryPick {
  ComplexMatrix P;
  ComplexMatrix hankel, psi, toeplitz;  // audit factors
  double asymmetry = 0.0;
};

/// Structured boundary Pick matrix
/// P = Hankel(S_1..S_{2n+1}) Psi_n(t0) UpperToeplitz(S_0*..S_n*).
inline BoundaryPick boundary_pick(const BoundaryJet& jet, int n) {
  if (static_cast<int>(jet.derivatives.size()) < 2 * n + 2)
    throw Error("boundary_pick: jet needs derivatives S_0..S_{2n+1}");
  const Eigen::Index q = jet.derivatives[0].rows();
  const Eigen::Index p = jet.derivatives[0].cols();
  if (q != p)
    throw DimensionError("boundary_pick: square coefficients required");
  BoundaryPick bp;
  bp.hankel = ComplexMatrix::Zero((n + 1) * q, (n + 1) * q);
  bp.toeplitz = ComplexMatrix::Zero((n + 1) * q, (n + 1) * q);
  ComplexMatrix psi_scalar = psi_matrix(jet.t0, n);
  bp.psi = ComplexMatrix::Zero((n + 1) * q, (n + 1) * q);
  for (int j = 0; j <= n; ++j)
    for (int l = 0; l <= n; ++l) {
      bp.hankel.block(j * q, l * q, q, q) = jet.derivatives[j + l + 1];
      bp.psi.block(j * q, l * q, q, q) =
          psi_scalar(j, l) * ComplexMatrix::Identity(q, q);
      if (l >= j)
        bp.toeplitz.block(j * q, l * q, q, q) =
            jet.derivatives[l - j].adjoint();
    }
  ComplexMatrix raw = bp.hankel * bp.psi * bp.toeplitz;
  bp.asymmetry = op_norm(raw - raw.adjoint());
  bp.P = hermitian_part(raw);
  return bp;
}

namespace detail {

inline Realization monomial() {
  ComplexMatrix z(1, 1), o(1, 1);
  z(0, 0) = 0.0;
  o(0, 0) = 1.0;
  return Realization(z, o, o, z);
}

/// 1 / (1 - z conj(t0)).
inline Realization cauchy_factor(Complex t0) {
  ComplexMatrix a(1, 1), b(1, 1), c(1, 1), d(1, 1);
  a(0, 0) = std::conj(t0);
  b(0, 0) = 1.0;
  c(0, 0) = std::conj(t0);
  d(0, 0) = 1.0;
  return Realization(a, b, c, d);
}

/// z^m / (1 - z conj(t0))^k.
inline Realization cauchy_power(Complex t0, int m, int k) {
  Realization acc = Realization::constant(1.0);
  for (int i = 0; i < m; ++i) acc = acc * monomial();
  Realization cf = cauchy_factor(t0);
  for (int i = 0; i < k; ++i) acc = acc * cf;
  return acc;
}

}  // namespace detail

/// Boundary reproducing kernel
/// K_{t0,j}(z) = z^j/(1-z conj t0)^{j+1}
///             - S(z) sum_{l<=j} z^{j-l} S_l^* / (1-z conj t0)^{j+1-l}.
/// The apparent pole at t0 cancels for jets meeting the CJ condition; the
/// assembled realization is checked for boundedness on shrinking circles
/// around t0.
inline Realization boundary_kernels(const Realization& s,
                                    const BoundaryJet& jet, int j,
                                    const ToleranceConfig& cfg = {}) {
  if (static_cast<int>(jet.derivatives.size()) <= j)
    throw Error("boundary_kernels: jet order too small");
  if (s.out_dim() != 1 || s.in_dim() != 1)
    throw DimensionError("boundary_kernels: scalar S only");
  const Complex t0 = jet.t0;
  Realization acc = detail::cauchy_power(t0, j, j + 1);
  for (int l = 0; l <= j; ++l) {
    ComplexMatrix sl_adj(1, 1);
    sl_adj(0, 0) = std::conj(jet.derivatives[l](0, 0));
    acc = acc - s * detail::cauchy_power(t0, j - l, j + 1 - l) *
                    Realization::constant(sl_adj);
  }

  // The probe runs close to the removable pole, where the non-minimal
  // realization's resolvent is ill-conditioned even though the function
  // value is fine (rcond ~ radius^{j+1}); relax the guard for the probe.
  ToleranceConfig probe_cfg = cfg;
  probe_cfg.psd_tol = std::min(cfg.psd_tol, 1e-14);
  auto sup_on_circle = [&](double radius) {
    double m = 0.0;
    for (int k = 0; k < 16; ++k) {
      Complex z = t0 + std::polar(radius, 2.0 * M_PI * k / 16.0);
      if (std::abs(z) >= 1.0) z = t0 * (1.0 - radius);
      m = std::max(m, op_norm(evaluate(acc, z, 0, probe_cfg)));
    }
    return m;
  };
  double s1 = sup_on_circle(1e-2);
  double s2 = sup_on_circle(1e-3);
  if (s2 > 5.0 * s1 + 1.0)
    throw Error(
        "boundary_kernels: pole at t0 does not cancel (CJ condition "
        "fails)");
  return acc;
}

struct CjReport {
  bool holds = false;
  ComplexMatrix limit;                   // valid when holds
  std::vector<ComplexMatrix> b_jets;     // derivatives of A*S at t0
  std::vector<double> trend;             // |top entry| along the radius
};

namespace detail {

inline Realization poly_realization(const std::vector<ComplexMatrix>& coeffs) {
  // sum_k P_k z^k with a nilpotent shift state.
  const Eigen::Index deg = static_cast<Eigen::Index>(coeffs.size()) - 1;
  const Eigen::Index q = coeffs[0].rows(), p = coeffs[0].cols();
  if (deg == 0) return Realization::constant(coeffs[0]);
  ComplexMatrix a = ComplexMatrix::Zero(deg * p, deg * p);
  for (Eigen::Index k = 0; k + 1 < deg; ++k)
    a.block((k + 1) * p, k * p, p, p) = ComplexMatrix::Identity(p, p);
  ComplexMatrix b = ComplexMatrix::Zero(deg * p, p);
  b.topRows(p) = ComplexMatrix::Identity(p, p);
  ComplexMatrix c(q, deg * p);
  for (Eigen::Index k = 0; k < deg; ++k)
    c.middleCols(k * p, p) = coeffs[k + 1];
  return Realization(a, b, c, coeffs[0]);
}

/// All mixed Taylor coefficients (1/(j! l!)) d_u^j d_w^l F(u0, w0) for
/// j, l <= n, by a double Cauchy contour with trapezoid quadrature.
inline std::vector<std::vector<ComplexMatrix>> mixed_derivatives(
    const std::function<ComplexMatrix(Complex, Complex)>& f, Complex u0,
    Complex w0, int n, double rho, int quad_points = 48) {
  std::vector<std::vector<ComplexMatrix>> samples(quad_points);
  for (int a = 0; a < quad_points; ++a) {
    Complex u = u0 + std::polar(rho, 2.0 * M_PI * a / quad_points);
    samples[a].reserve(quad_points);
    for (int b = 0; b < quad_points; ++b) {
      Complex w = w0 + std::polar(rho, 2.0 * M_PI * b / quad_points);
      samples[a].push_back(f(u, w));
    }
  }
  const Eigen::Index rows = samples[0][0].rows(),
                     cols = samples[0][0].cols();
  std::vector<std::vector<ComplexMatrix>> out(
      n + 1, std::vector<ComplexMatrix>(n + 1));
  for (int j = 0; j <= n; ++j)
    for (int l = 0; l <= n; ++l) {
      ComplexMatrix acc = ComplexMatrix::Zero(rows, cols);
      for (int a = 0; a < quad_points; ++a)
        for (int b = 0; b < quad_points; ++b) {
          Complex phase = std::polar(
              1.0, -2.0 * M_PI * (j * a + l * b) / quad_points);
          acc += phase * samples[a][b];
        }
      out[j][l] = acc / (std::pow(rho, j + l) * quad_points * quad_points);
    }
  return out;
}

}  // namespace detail

/// Generalized Caratheodory-Julia check of order n with optional matrix
/// polynomial weight A (coefficients A_0..A_n; absent means A = I). The
/// weighted kernel quotient
///   F(u, w) = A(u)(I - S(u) S~(w)) A~(w) / (1 - u w),  S~(w) := S(conj w)*
/// is expanded to mixed order n at (r t0, r conj t0) and the top (n, n)
/// coefficient is tracked along r -> 1: bounded means the condition holds
/// and the Richardson limit is the structured boundary Pick matrix.
inline CjReport cj_check(const Realization& s, Complex t0, int n,
                         const std::vector<ComplexMatrix>* weight = nullptr,
                         const ToleranceConfig& cfg = {}) {
  CjReport rep;
  std::vector<ComplexMatrix> wc;
  if (weight) {
    wc = *weight;
  } else {
    wc.push_back(ComplexMatrix::Identity(s.out_dim(), s.out_dim()));
  }
  Realization a_poly = detail::poly_realization(wc);
  std::vector<ComplexMatrix> wc_tilde;
  for (const auto& m : wc) wc_tilde.push_back(m.adjoint());
  Realization a_tilde = detail::poly_realization(wc_tilde);
  Realization s_tilde(s.A.adjoint(), s.C.adjoint(), s.B.adjoint(),
                      s.D.adjoint());

  auto f = [&](Complex u, Complex w) -> ComplexMatrix {
    ComplexMatrix su = evaluate(s, u, 0, cfg);
    ComplexMatrix stw = evaluate(s_tilde, w, 0, cfg);
    ComplexMatrix au = evaluate(a_poly, u, 0, cfg);
    ComplexMatrix atw = evaluate(a_tilde, w, 0, cfg);
    return au *
           (ComplexMatrix::Identity(su.rows(), stw.cols()) - su * stw) *
           atw / (1.0 - u * w);
  };

  const double h = 5e-2;
  const int ladder = 6;
  const Eigen::Index q = s.out_dim();
  std::vector<ComplexMatrix> big_samples;
  for (int k = 0; k < ladder; ++k) {
    double r = 1.0 - h * std::pow(2.0, -k);
    double rho = (1.0 - r) / 4.0;
    auto coeffs = detail::mixed_derivatives(f, r * t0, r * std::conj(t0), n,
                                            rho);
    ComplexMatrix big((n + 1) * q, (n + 1) * q);
    for (int j = 0; j <= n; ++j)
      for (int l = 0; l <= n; ++l)
        big.block(j * q, l * q, q, q) = coeffs[j][l];
    rep.trend.push_back(op_norm(coeffs[n][n]));
    big_samples.push_back(big);
  }

  // A bounded quotient settles; divergence doubles per halving of 1 - r.
  bool diverging = true;
  for (size_t k = 0; k + 1 < rep.trend.size(); ++k)
    if (rep.trend[k + 1] < 1.5 * rep.trend[k]) diverging = false;
  if (diverging &&
      rep.trend.back() > 10.0 * std::max(1.0, rep.trend.front())) {
    rep.holds = false;
    return rep;
  }
  rep.holds = true;
  rep.limit = detail::richardson(big_samples);

  // b_j = Taylor coefficients of (A S) at t0, exact for regular resolvents.
  Realization as = a_poly * s;
  BoundaryJet jet = boundary_jet(as, t0, n, cfg);
  rep.b_jets = jet.derivatives;
  return rep;
}

/// Reduces boundary interpolation of order n at t0 to an H(S) problem:
/// Jordan data T = conj(t0) I + shift, observability rows from the weight
/// (or the unit row) and the boundary jet, targets conjugated into y, and
/// the structured boundary Pick matrix as the Gram.
inline HSProblemData to_hs_problem(const Realization& s, Complex t0, int n,
                                   const std::vector<Complex>& targets,
                                   const std::vector<ComplexMatrix>* weight
                                       = nullptr,
                                   const ToleranceConfig& cfg = {}) {
  if (static_cast<int>(targets.size()) != n + 1)
    throw DimensionError("to_hs_problem: need n+1 targets");
  if (s.out_dim() != 1 || s.in_dim() != 1)
    throw DimensionError("to_hs_problem: scalar S only");
  CjReport cj = cj_check(s, t0, n, weight, cfg);
  if (!cj.holds)
    throw Error("to_hs_problem: Caratheodory-Julia condition fails");

  const Eigen::Index m = n + 1;
  ComplexMatrix t = std::conj(t0) * ComplexMatrix::Identity(m, m);
  for (Eigen::Index j = 0; j + 1 < m; ++j) t(j, j + 1) = 1.0;

  HSProblemData prob;
  prob.S = s;
  ComplexMatrix e(1, m), nn(1, m), y(1, m);
  if (weight) {
    for (Eigen::Index j = 0; j < m; ++j) {
      e(0, j) = (j < static_cast<Eigen::Index>(weight->size()))
                    ? std::conj((*weight)[j](0, 0))
                    : Complex(0.0);
      nn(0, j) = std::conj(cj.b_jets[j](0, 0));
    }
    prob.P = cj.limit;
  } else {
    BoundaryJet jet = boundary_jet(s, t0, 2 * n + 1, cfg);
    for (Eigen::Index j = 0; j < m; ++j) {
      e(0, j) = (j == 0) ? 1.0 : 0.0;
      nn(0, j) = std::conj(jet.derivatives[j](0, 0));
    }
    prob.P = boundary_pick(jet, n).P;
  }
  for (Eigen::Index j = 0; j < m; ++j) y(0, j) = std::conj(targets[j]);
  prob.data = InterpolationData(t, e, nn);
  prob.y = y;
  return prob;
}

}  // namespace pickforge

#endif

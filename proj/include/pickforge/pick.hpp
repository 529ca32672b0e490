#ifndef PICKFORGE_PICK_HPP
#define PICKFORGE_PICK_HPP

#include <functional>
#include <limits>
#include <map>
#include <random>
#include <string>
#include <vector>

#include "pickforge/realization.hpp"

namespace pickforge {

/// Interpolation data (T, E, N) for problems IP/AIP. The state space is C^n
/// in columns; the i-th columns of E (q x n) and N (p x n) are the vectors
/// E_i, N_i. For classical Nevanlinna-Pick data T = diag(conj z_1, ...,
/// conj z_n).
struct InterpolationData {
  ComplexMatrix T, E, N;

  InterpolationData() = default;
  InterpolationData(ComplexMatrix t, ComplexMatrix e, ComplexMatrix n)
      : T(std::move(t)), E(std::move(e)), N(std::move(n)) {
    if (T.rows() != T.cols() || E.cols() != T.rows() || N.cols() != T.rows())
      throw DimensionError("InterpolationData: incompatible dimensions");
  }

  Eigen::Index state_dim() const { return T.rows(); }
  Eigen::Index out_dim() const { return E.rows(); }  // dim Y
  Eigen::Index in_dim() const { return N.rows(); }   // dim U

  ComplexMatrix stein_rhs() const {
    return E.adjoint() * E - N.adjoint() * N;
  }

  double stein_residual(const ComplexMatrix& p) const {
    ComplexMatrix rhs = stein_rhs();
    double denom = std::max(1.0, op_norm(rhs));
    return op_norm(p - T.adjoint() * p * T - rhs) / denom;
  }

  /// Nevanlinna-Pick data from interior points z_i and columns E_i, N_i.
  static InterpolationData np_points(const std::vector<Complex>& points,
                                     const ComplexMatrix& e,
                                     const ComplexMatrix& n) {
    const Eigen::Index cnt = static_cast<Eigen::Index>(points.size());
    ComplexMatrix t = ComplexMatrix::Zero(cnt, cnt);
    for (Eigen::Index i = 0; i < cnt; ++i) t(i, i) = std::conj(points[i]);
    return InterpolationData(t, e, n);
  }
};

enum class PickStrategy { Explicit, Series, Stein };

struct PickResult {
  ComplexMatrix P;
  PickStrategy strategy = PickStrategy::Stein;
  double stein_residual = 0.0;
};

/// Pick matrix of (T, E, N). Satisfies the Stein identity
/// P - T* P T = E*E - N*N; for diagonal T this is entrywise
/// P_ij = (E_i^* E_j - N_i^* N_j) / (1 - z_i conj(z_j)) with
/// z_i = conj(T_ii).
inline PickResult build_pick(const InterpolationData& data,
                             PickStrategy strategy,
                             const ToleranceConfig& cfg = {}) {
  const Eigen::Index n = data.state_dim();
  const ComplexMatrix q = data.stein_rhs();
  PickResult result;
  result.strategy = strategy;
  switch (strategy) {
    case PickStrategy::Explicit: {
      for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index j = 0; j < n; ++j) {
          if (i != j && data.T(i, j) != 0.0)
            throw Error("build_pick explicit: T must be diagonal");
        }
        if (std::abs(data.T(i, i)) >= 1.0)
          throw Error("build_pick explicit: |z_i| must be < 1");
        for (Eigen::Index j = 0; j < i; ++j)
          if (std::abs(data.T(i, i) - data.T(j, j)) < cfg.psd_tol)
            throw Error("build_pick explicit: points must be distinct");
      }
      result.P.resize(n, n);
      for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = 0; j < n; ++j)
          result.P(i, j) =
              q(i, j) / (1.0 - std::conj(data.T(i, i)) * data.T(j, j));
      break;
    }
    case PickStrategy::Series: {
      const double rho = spectral_radius(data.T);
      if (rho >= 1.0)
        throw SpectralRadiusError("build_pick series: spectral radius >= 1");
      const double amp = op_norm(q);
      const int terms =
          detail::truncation_length(rho * rho, amp, cfg.truncation_tol);
      result.P = ComplexMatrix::Zero(n, n);
      ComplexMatrix tk = ComplexMatrix::Identity(n, n);  // T^k
      for (int k = 0; k < terms; ++k) {
        result.P += tk.adjoint() * q * tk;
        tk = data.T * tk;
      }
      break;
    }
    case PickStrategy::Stein:
      // solve_stein handles X - T X T* = Q; our convention needs
      // P - T* P T = Q.
      result.P = solve_stein(data.T.adjoint(), q, cfg);
      break;
  }
  result.P = hermitian_part(result.P);
  result.stein_residual = data.stein_residual(result.P);
  return result;
}

inline PsdCertificate check_solvable(const ComplexMatrix& p,
                                     const ToleranceConfig& cfg = {}) {
  return psd_certificate(p, cfg);
}

struct ObservabilityCoeffs {
  std::vector<ComplexVector> coeffs;  // coefficient k is E T^k x
  bool bounded = false;
  double tail_bound = 0.0;
};

inline ObservabilityCoeffs observability_coeffs(const ComplexMatrix& e,
                                                const ComplexMatrix& t,
                                                const ComplexVector& x,
                                                int count) {
  if (e.cols() != t.rows() || t.rows() != t.cols() || x.size() != t.rows())
    throw DimensionError("observability_coeffs: dimension mismatch");
  ObservabilityCoeffs oc;
  oc.coeffs.reserve(count);
  ComplexVector v = x;
  for (int k = 0; k < count; ++k) {
    oc.coeffs.push_back(e * v);
    v = t * v;
  }
  const double rho = spectral_radius(t);
  if (rho < 1.0) {
    oc.bounded = true;
    oc.tail_bound =
        op_norm(e) * x.norm() * std::pow(rho, count) / (1.0 - rho);
  }
  return oc;
}

struct VerificationReport {
  bool passed = false;
  std::map<std::string, double> metrics;
  std::vector<std::string> notes;
};

/// de Branges-Rovnyak kernel evaluator for S.
inline std::function<ComplexMatrix(Complex, Complex)> dbr_kernel(
    const Realization& s, const ToleranceConfig& cfg = {}) {
  return [s, cfg](Complex z, Complex zeta) -> ComplexMatrix {
    ComplexMatrix sz = evaluate(s, z, 0, cfg);
    ComplexMatrix szeta = evaluate(s, zeta, 0, cfg);
    return (ComplexMatrix::Identity(sz.rows(), sz.rows()) -
            sz * szeta.adjoint()) /
           (1.0 - z * std::conj(zeta));
  };
}

inline std::function<ComplexMatrix(Complex, Complex)> szego_kernel(
    Eigen::Index dim = 1) {
  return [dim](Complex z, Complex zeta) -> ComplexMatrix {
    return ComplexMatrix::Identity(dim, dim) /
           (1.0 - z * std::conj(zeta));
  };
}

namespace detail {

inline std::vector<Complex> random_disk_points(std::mt19937_64& rng,
                                               int count,
                                               double radius = 0.8) {
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  std::vector<Complex> pts;
  pts.reserve(count);
  for (int k = 0; k < count; ++k) {
    double r = radius * std::sqrt(unif(rng));
    double th = 2.0 * M_PI * unif(rng);
    pts.emplace_back(r * std::cos(th), r * std::sin(th));
  }
  return pts;
}

}  // namespace detail

/// Verifies S against (T, E, N): (i) the Taylor-adjoint interpolation
/// condition sum_k T*^k E* s_k = N*, (ii) sampled positivity of the
/// augmented kernel (P and de Branges-Rovnyak blocks coupled through the
/// observability columns) on random 3-point tuples.
inline VerificationReport verify_interpolant(const InterpolationData& data,
                                             const Realization& s,
                                             const ToleranceConfig& cfg = {},
                                             std::uint64_t seed = 7,
                                             int tuples = 8) {
  VerificationReport report;
  const double rho = spectral_radius(data.T);
  if (rho >= 1.0)
    throw SpectralRadiusError(
        "verify_interpolant: spectral radius of T >= 1; use the boundary "
        "module's verification path");
  if (s.out_dim() != data.out_dim() || s.in_dim() != data.in_dim())
    throw DimensionError("verify_interpolant: S has wrong coefficient dims");

  const Eigen::Index n = data.state_dim();
  const double amp =
      std::max(1.0, op_norm(data.E) * (op_norm(s.C) * op_norm(s.B) + 1.0));
  const double rho_s = spectral_radius(s.A);
  int terms = detail::truncation_length(std::max(rho, rho_s), amp,
                                        cfg.truncation_tol);
  terms = std::max(terms, 2);
  TaylorSeries ts = taylor_coeffs(s, terms, cfg);
  ComplexMatrix acc = ComplexMatrix::Zero(n, data.in_dim());
  ComplexMatrix tk = ComplexMatrix::Identity(n, n);  // (T*)^k
  for (int k = 0; k < terms; ++k) {
    acc += tk * data.E.adjoint() * ts.coeffs[k];
    tk = data.T.adjoint() * tk;
  }
  const double cond_res = op_norm(acc - data.N.adjoint()) /
                          std::max(1.0, op_norm(data.N));
  report.metrics["condition_residual"] = cond_res;

  const ComplexMatrix p =
      build_pick(data, PickStrategy::Stein, cfg).P;
  auto ks = dbr_kernel(s, cfg);
  std::mt19937_64 rng(seed);
  const Eigen::Index qdim = data.out_dim();
  double min_eig = 0.0;
  for (int t = 0; t < tuples; ++t) {
    auto pts = detail::random_disk_points(rng, 3);
    const Eigen::Index m = static_cast<Eigen::Index>(pts.size());
    ComplexMatrix big(n + m * qdim, n + m * qdim);
    big.topLeftCorner(n, n) = p;
    for (Eigen::Index i = 0; i < m; ++i) {
      ComplexMatrix sz = evaluate(s, pts[i], 0, cfg);
      ComplexMatrix row =
          (data.E - sz * data.N) *
          (ComplexMatrix::Identity(n, n) - pts[i] * data.T)
              .fullPivLu()
              .inverse();
      big.block(n + i * qdim, 0, qdim, n) = row;
      big.block(0, n + i * qdim, n, qdim) = row.adjoint();
      for (Eigen::Index j = 0; j < m; ++j)
        big.block(n + i * qdim, n + j * qdim, qdim, qdim) =
            ks(pts[i], pts[j]);
    }
    PsdCertificate cert = psd_certificate(big, cfg);
    min_eig = std::min(min_eig, cert.min_eigenvalue);
  }
  report.metrics["kernel_min_eig"] = min_eig;
  report.passed = cond_res <= cfg.residual_tol &&
                  min_eig >= -cfg.residual_tol;
  return report;
}

/// Sampled certificate for membership of F in H(K) with norm <= gamma:
/// the kernel K(w, zeta) - gamma^{-2} F(w) F(zeta)* must stay positive.
/// Necessary condition only.
inline PsdCertificate membership_certificate(
    const std::function<ComplexMatrix(Complex, Complex)>& kernel,
    const Realization& f, double gamma, const ToleranceConfig& cfg = {},
    std::uint64_t seed = 11, int tuples = 24) {
  if (gamma <= 0.0) throw Error("membership_certificate: gamma must be > 0");
  std::mt19937_64 rng(seed);
  PsdCertificate worst;
  worst.is_psd = true;
  worst.min_eigenvalue = std::numeric_limits<double>::infinity();
  const Eigen::Index qdim = f.out_dim();
  const double g2 = 1.0 / (gamma * gamma);
  for (int t = 0; t < tuples; ++t) {
    auto pts = detail::random_disk_points(rng, 3, 0.9);
    const Eigen::Index m = static_cast<Eigen::Index>(pts.size());
    ComplexMatrix big(m * qdim, m * qdim);
    std::vector<ComplexMatrix> fv;
    fv.reserve(m);
    for (Eigen::Index i = 0; i < m; ++i)
      fv.push_back(evaluate(f, pts[i], 0, cfg));
    for (Eigen::Index i = 0; i < m; ++i)
      for (Eigen::Index j = 0; j < m; ++j)
        big.block(i * qdim, j * qdim, qdim, qdim) =
            kernel(pts[i], pts[j]) - g2 * fv[i] * fv[j].adjoint();
    PsdCertificate cert = psd_certificate(big, cfg);
    if (cert.min_eigenvalue < worst.min_eigenvalue) worst = cert;
    worst.is_psd = worst.is_psd && cert.is_psd;
  }
  return worst;
}

}  // namespace pickforge

#endif

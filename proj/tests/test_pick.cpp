#include <catch2/catch_amalgamated.hpp>

#include "test_helpers.hpp"

using namespace pickforge;
using namespace pickforge::testing;

TEST_CASE("build_pick fixtures") {
  auto pa = build_pick(fix_a(), PickStrategy::Explicit);
  CHECK_THAT(std::abs(pa.P(0, 0)), Catch::Matchers::WithinAbs(1.0, 1e-15));

  ComplexMatrix e(1, 2), n(1, 2);
  e << 1, 1;
  n << 0, 0;
  auto data = InterpolationData::np_points({Complex(0.0), Complex(0.5)}, e, n);
  auto p = build_pick(data, PickStrategy::Explicit).P;
  CHECK_THAT(p(0, 0).real(), Catch::Matchers::WithinAbs(1.0, 1e-15));
  CHECK_THAT(p(0, 1).real(), Catch::Matchers::WithinAbs(1.0, 1e-15));
  CHECK_THAT(p(1, 1).real(), Catch::Matchers::WithinAbs(4.0 / 3.0, 1e-14));

  auto pb = build_pick(fix_b(), PickStrategy::Explicit).P;
  ComplexMatrix ones = ComplexMatrix::Ones(2, 2);
  CHECK(op_norm(pb - ones) < 1e-14);
  auto cert = psd_certificate(pb);
  CHECK(cert.is_psd);
  CHECK(std::abs(cert.min_eigenvalue) < 1e-14);
}

TEST_CASE("build_pick strategy agreement and residuals") {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    auto sp = sample_np(seed, 3, 3, 2, 2);
    auto pe = build_pick(sp.data, PickStrategy::Explicit);
    auto ps = build_pick(sp.data, PickStrategy::Series);
    auto pt = build_pick(sp.data, PickStrategy::Stein);
    CHECK(op_norm(pe.P - ps.P) < 1e-10);
    CHECK(op_norm(pe.P - pt.P) < 1e-10);
    CHECK(pe.stein_residual < 1e-10);
    CHECK(ps.stein_residual < 1e-10);
    CHECK(pt.stein_residual < 1e-10);
    CHECK(psd_certificate(pe.P).min_eigenvalue >= -1e-10);
  }
}

TEST_CASE("build_pick strategy preconditions") {
  ComplexMatrix t(2, 2), e(1, 2), n(1, 2);
  t << 0, 1, 0, 0;
  e << 1, 0;
  n << 0, 0;
  InterpolationData nondiag(t, e, n);
  CHECK_THROWS(build_pick(nondiag, PickStrategy::Explicit));

  ComplexMatrix t2 = ComplexMatrix::Identity(2, 2) * 1.5;
  InterpolationData expanding(t2, e, n);
  CHECK_THROWS_AS(build_pick(expanding, PickStrategy::Series),
                  SpectralRadiusError);
}

TEST_CASE("check_solvable") {
  CHECK(check_solvable(build_pick(fix_b(), PickStrategy::Explicit).P).is_psd);
  CHECK(check_solvable(ComplexMatrix::Identity(3, 3)).is_psd);
  ComplexMatrix ind(2, 2);
  ind << 1, 2, 2, 1;
  CHECK_FALSE(check_solvable(ind).is_psd);
}

TEST_CASE("observability_coeffs") {
  auto oc = observability_coeffs(mat1(1.0), mat1(0.0),
                                 ComplexVector::Ones(1), 4);
  CHECK_THAT(std::abs(oc.coeffs[0](0)), Catch::Matchers::WithinAbs(1, 1e-15));
  CHECK(std::abs(oc.coeffs[1](0)) < 1e-15);

  ComplexMatrix t = ComplexMatrix::Zero(2, 2);
  t(1, 1) = 0.5;
  ComplexMatrix e(1, 2);
  e << 1, 1;
  ComplexVector x = ComplexVector::Zero(2);
  x(1) = 1.0;
  auto geo = observability_coeffs(e, t, x, 5);
  for (int k = 0; k < 5; ++k)
    CHECK_THAT(geo.coeffs[k](0).real(),
               Catch::Matchers::WithinAbs(std::pow(0.5, k), 1e-14));

  // resummation equals E (I - zT)^{-1} x
  Complex z = 0.3;
  Complex acc = 0.0, zk = 1.0;
  auto many = observability_coeffs(e, t, x, 80);
  for (auto& c : many.coeffs) {
    acc += zk * c(0);
    zk *= z;
  }
  ComplexMatrix direct =
      e * (ComplexMatrix::Identity(2, 2) - z * t).inverse() * x;
  CHECK(std::abs(acc - direct(0, 0)) <
        many.tail_bound * std::abs(z) + 1e-12);
}

TEST_CASE("verify_interpolant fixtures") {
  auto rep = verify_interpolant(fix_b(), shift_function());
  CHECK(rep.passed);
  CHECK(rep.metrics["condition_residual"] <= 1e-12);

  // FIX-A forces S(0) = 0: z * (random Schur) passes
  Realization s = shift_function() * random_schur(2, 1, 1, 8);
  CHECK(verify_interpolant(fix_a(), s).passed);

  CHECK_FALSE(
      verify_interpolant(fix_a(), Realization::constant(mat1(0.5))).passed);
}

TEST_CASE("verify_interpolant detects perturbed data") {
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    auto sp = sample_np(seed + 40, 3, 3);
    CHECK(verify_interpolant(sp.data, sp.s).passed);
    InterpolationData bad = sp.data;
    bad.N(0, 1) += 1e-3;
    CHECK_FALSE(verify_interpolant(bad, sp.s).passed);
  }
}

TEST_CASE("sampled-data Pick matrices are PSD") {
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    auto sp = sample_np(seed, 2 + seed % 2, 1 + seed % 4);
    auto p = build_pick(sp.data, PickStrategy::Explicit).P;
    CHECK(psd_certificate(p).min_eigenvalue >= -1e-10);
  }
}

TEST_CASE("membership_certificate on Szego fixtures") {
  Realization one = Realization::constant(mat1(1.0));
  CHECK(membership_certificate(szego_kernel(), one, 1.0).is_psd);
  CHECK_FALSE(membership_certificate(szego_kernel(), one, 0.5).is_psd);
}

TEST_CASE("membership_certificate boundary kernel norm") {
  // ||1 + z|| in H(S), S = z^2 inner, equals sqrt(2)
  Realization s = shift_squared();
  Realization one_plus_z =
      Realization::constant(mat1(1.0)) + shift_function();
  CHECK(membership_certificate(dbr_kernel(s), one_plus_z, std::sqrt(2.0))
            .is_psd);
  CHECK_FALSE(
      membership_certificate(dbr_kernel(s), one_plus_z, 1.4).is_psd);
}

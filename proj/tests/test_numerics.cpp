#include <catch2/catch_amalgamated.hpp>

#include "test_helpers.hpp"

using namespace pickforge;
using pickforge::testing::mat1;

namespace {

ComplexMatrix random_hermitian_psd(std::uint64_t seed, int n) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> dist;
  ComplexMatrix g(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) g(i, j) = Complex(dist(rng), dist(rng));
  return g * g.adjoint();
}

}  // namespace

TEST_CASE("psd_certificate on small fixtures") {
  ComplexMatrix id = ComplexMatrix::Identity(2, 2);
  auto c1 = psd_certificate(id);
  CHECK(c1.is_psd);
  CHECK_THAT(c1.min_eigenvalue, Catch::Matchers::WithinAbs(1.0, 1e-14));

  ComplexMatrix ones(2, 2);
  ones << 1, 1, 1, 1;
  auto c2 = psd_certificate(ones);
  CHECK(c2.is_psd);
  CHECK_THAT(c2.min_eigenvalue, Catch::Matchers::WithinAbs(0.0, 1e-14));

  ComplexMatrix ind(2, 2);
  ind << 1, 2, 2, 1;
  auto c3 = psd_certificate(ind);
  CHECK_FALSE(c3.is_psd);
  CHECK_THAT(c3.min_eigenvalue, Catch::Matchers::WithinAbs(-1.0, 1e-14));

  CHECK_THROWS_AS(psd_certificate(ComplexMatrix::Zero(2, 3)),
                  DimensionError);
}

TEST_CASE("psd_certificate is monotone under ridge shifts") {
  for (std::uint64_t seed : {1, 2, 3}) {
    ComplexMatrix m = random_hermitian_psd(seed, 4);
    for (double eps : {0.0, 1e-6, 1.0}) {
      ComplexMatrix shifted =
          m + eps * ComplexMatrix::Identity(4, 4);
      CHECK(psd_certificate(shifted).is_psd);
    }
  }
}

TEST_CASE("sqrt_psd fixtures and properties") {
  ComplexMatrix id = ComplexMatrix::Identity(3, 3);
  CHECK(op_norm(sqrt_psd(id) - id) < 1e-14);

  ComplexMatrix d = ComplexMatrix::Zero(2, 2);
  d(0, 0) = 4.0;
  d(1, 1) = 9.0;
  ComplexMatrix r = sqrt_psd(d);
  CHECK_THAT(std::abs(r(0, 0)), Catch::Matchers::WithinAbs(2.0, 1e-14));
  CHECK_THAT(std::abs(r(1, 1)), Catch::Matchers::WithinAbs(3.0, 1e-14));

  ComplexMatrix ind(2, 2);
  ind << 1, 2, 2, 1;
  CHECK_THROWS_AS(sqrt_psd(ind), NotPsdError);

  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    ComplexMatrix m = random_hermitian_psd(seed, 5);
    ComplexMatrix s = sqrt_psd(m);
    double scale = std::max(1.0, op_norm(m));
    CHECK(op_norm(s * s - m) <= 1e-12 * scale);
    CHECK(op_norm(s * m - m * s) <= 1e-10 * scale);
  }
}

TEST_CASE("solve_stein scalar fixtures") {
  CHECK_THAT(std::abs(solve_stein(mat1(0.0), mat1(0.7))(0, 0)),
             Catch::Matchers::WithinAbs(0.7, 1e-14));
  // p - p/4 = 3/4 gives p = 1
  CHECK_THAT(std::abs(solve_stein(mat1(0.5), mat1(0.75))(0, 0)),
             Catch::Matchers::WithinAbs(1.0, 1e-14));
  CHECK_THROWS_AS(solve_stein(mat1(1.0), mat1(1.0)), SteinSingularError);
}

TEST_CASE("solve_stein agrees with the explicit Pick formula") {
  auto sp = pickforge::testing::sample_np(99, 3, 3);
  ComplexMatrix q = sp.data.stein_rhs();
  // our Pick convention solves P - T* P T = Q
  ComplexMatrix p = solve_stein(sp.data.T.adjoint(), q);
  ComplexMatrix expected(3, 3);
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j)
      expected(i, j) =
          q(i, j) /
          (1.0 - std::conj(sp.data.T(i, i)) * sp.data.T(j, j));
  CHECK(op_norm(p - expected) < 1e-12);
}

TEST_CASE("solve_stein residual property") {
  std::mt19937_64 rng(5);
  std::normal_distribution<double> dist;
  for (int trial = 0; trial < 20; ++trial) {
    ComplexMatrix t(3, 3), q(3, 3);
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) {
        t(i, j) = Complex(dist(rng), dist(rng));
        q(i, j) = Complex(dist(rng), dist(rng));
      }
    t *= 0.8 / std::max(1.0, spectral_radius(t));
    ComplexMatrix p = solve_stein(t, q);
    CHECK(op_norm(p - t * p * t.adjoint() - q) <=
          1e-10 * std::max(1.0, op_norm(q)));
  }
}

TEST_CASE("pinv fixtures") {
  ComplexMatrix m(2, 2);
  m << 2, 1, 1, 1;
  CHECK(op_norm(pinv(m) - m.inverse()) < 1e-12);
  CHECK(op_norm(pinv(ComplexMatrix::Zero(3, 2))) == 0.0);

  ComplexMatrix proj = ComplexMatrix::Zero(2, 2);
  proj(0, 0) = 1.0;
  CHECK(op_norm(pinv(proj) - proj) < 1e-14);
}

TEST_CASE("pinv satisfies the Penrose identities") {
  std::mt19937_64 rng(17);
  std::normal_distribution<double> dist;
  for (int trial = 0; trial < 20; ++trial) {
    // rank-deficient 4x3 from a 4x2 times 2x3 product
    ComplexMatrix a(4, 2), b(2, 3);
    for (int i = 0; i < 4; ++i)
      for (int j = 0; j < 2; ++j) a(i, j) = Complex(dist(rng), dist(rng));
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 3; ++j) b(i, j) = Complex(dist(rng), dist(rng));
    ComplexMatrix m = a * b;
    ComplexMatrix g = pinv(m);
    CHECK(op_norm(m * g * m - m) < 1e-10);
    CHECK(op_norm(g * m * g - g) < 1e-10);
    CHECK(op_norm((m * g).adjoint() - m * g) < 1e-10);
    CHECK(op_norm((g * m).adjoint() - g * m) < 1e-10);
  }
}

TEST_CASE("range and complement bases") {
  ComplexMatrix m(3, 2);
  m << 1, 1, 0, 0, 1, 1;  // rank 1
  ComplexMatrix r = range_basis(m, 1e-10);
  REQUIRE(r.cols() == 1);
  ComplexMatrix c = complement_basis(m, 1e-10);
  REQUIRE(c.cols() == 2);
  CHECK(op_norm(c.adjoint() * r) < 1e-12);
  CHECK(op_norm(c.adjoint() * c - ComplexMatrix::Identity(2, 2)) < 1e-12);
}

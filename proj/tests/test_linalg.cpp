#include <doctest.h>

#include <cmath>
#include <random>

#include "regls/linalg.hpp"
#include "test_util.hpp"

using namespace regls;
using testutil::random_matrix;
using testutil::random_vector;

TEST_CASE("svd identity and diagonal cases") {
  const SvdFactors f = svd(Matrix::Identity(3, 3));
  CHECK(f.d(0) == doctest::Approx(1.0));
  CHECK(f.d(2) == doctest::Approx(1.0));

  Matrix a = Matrix::Zero(3, 2);
  a(0, 0) = 3.0;
  a(1, 1) = 2.0;
  const SvdFactors g = svd(a);
  CHECK(g.d(0) == doctest::Approx(3.0));
  CHECK(g.d(1) == doctest::Approx(2.0));
}

TEST_CASE("svd reconstruction and orthonormality on a random 6x4") {
  std::mt19937_64 rng(11);
  const Matrix a = random_matrix(rng, 6, 4);
  const SvdFactors f = svd(a);
  const Matrix rec = f.u * f.d.asDiagonal() * f.v.transpose();
  CHECK((rec - a).norm() <= 1e-10 * a.norm());
  CHECK((f.u.transpose() * f.u - Matrix::Identity(4, 4)).norm() <= 1e-10);
  CHECK((f.v.transpose() * f.v - Matrix::Identity(4, 4)).norm() <= 1e-10);
  for (int i = 0; i + 1 < 4; ++i) CHECK(f.d(i) >= f.d(i + 1));
}

TEST_CASE("svd rejects bad input") {
  Matrix a(2, 2);
  a << 1.0, 2.0, 3.0, std::nan("");
  CHECK_THROWS_AS(svd(a), InvalidInputError);
  CHECK_THROWS_AS(svd(Matrix::Zero(2, 3)), InvalidInputError);
}

TEST_CASE("pinv basic values") {
  CHECK((pinv(Matrix::Identity(4, 4)) - Matrix::Identity(4, 4)).norm() <=
        1e-12);
  Matrix a(2, 1);
  a << 1.0, 1.0;
  const Matrix ap = pinv(a);
  CHECK(ap(0, 0) == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(ap(0, 1) == doctest::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("pinv matches the normal-equations oracle on full-rank input") {
  std::mt19937_64 rng(21);
  const Matrix a = testutil::random_well_conditioned(rng, 5, 3);
  const Matrix oracle = (a.transpose() * a).inverse() * a.transpose();
  CHECK((pinv(a) - oracle).norm() <= 1e-9);
}

TEST_CASE("Moore-Penrose identities hold on random full-rank matrices") {
  std::mt19937_64 rng(31);
  for (int trial = 0; trial < 25; ++trial) {
    const int n = 1 + static_cast<int>(rng() % 4);
    const int m = n + static_cast<int>(rng() % 4);
    const Matrix a = testutil::random_well_conditioned(rng, m, n);
    const Matrix ap = pinv(a);
    CHECK((a * ap * a - a).norm() <= 1e-9);
    CHECK((ap * a * ap - ap).norm() <= 1e-9);
    CHECK(((a * ap) - (a * ap).transpose()).norm() <= 1e-9);
    CHECK(((ap * a) - (ap * a).transpose()).norm() <= 1e-9);
  }
}

TEST_CASE("projector_perp axis and full-range cases") {
  CHECK(projector_perp(Matrix::Identity(3, 3)).norm() <= 1e-12);
  Matrix a(2, 1);
  a << 1.0, 0.0;
  Matrix want(2, 2);
  want << 0.0, 0.0, 0.0, 1.0;
  CHECK((projector_perp(a) - want).norm() <= 1e-12);
}

TEST_CASE("projector_perp is an idempotent symmetric annihilator") {
  std::mt19937_64 rng(41);
  for (int trial = 0; trial < 20; ++trial) {
    const Matrix a = random_matrix(rng, 6, 3);
    const Matrix p = projector_perp(a);
    CHECK((p * p - p).norm() <= 1e-9);
    CHECK((p - p.transpose()).norm() <= 1e-12);
    CHECK((p * a).norm() <= 1e-9);
  }
}

TEST_CASE("vec_rows definition and norm preservation") {
  Matrix m(2, 2);
  m << 1.0, 2.0, 3.0, 4.0;
  const Vector v = vec_rows(m);
  CHECK(v(0) == 1.0);
  CHECK(v(1) == 2.0);
  CHECK(v(2) == 3.0);
  CHECK(v(3) == 4.0);

  Matrix row(1, 3);
  row << 5.0, 6.0, 7.0;
  CHECK((vec_rows(row) - Vector(row.transpose())).norm() == 0.0);

  std::mt19937_64 rng(51);
  const Matrix r = random_matrix(rng, 4, 3);
  CHECK(vec_rows(r).norm() == doctest::Approx(r.norm()).epsilon(1e-14));
}

TEST_CASE("kron_id_rowvec small cases") {
  Vector one(1);
  one << 1.0;
  CHECK((kron_id_rowvec(one, 2) - Matrix::Identity(2, 2)).norm() == 0.0);

  Vector sel(2);
  sel << 1.0, 0.0;
  const Matrix x = kron_id_rowvec(sel, 2);
  Matrix d(2, 2);
  d << 3.0, 4.0, 5.0, 6.0;
  const Vector prod = x * vec_rows(d);
  CHECK(prod(0) == 3.0);
  CHECK(prod(1) == 5.0);
}

TEST_CASE("kron/vec identity over 200 random pairs") {
  std::mt19937_64 rng(61);
  for (int trial = 0; trial < 200; ++trial) {
    const int n = 1 + static_cast<int>(rng() % 4);
    const int m = 1 + static_cast<int>(rng() % 5);
    const Vector x = random_vector(rng, n);
    const Matrix da = random_matrix(rng, m, n);
    const Vector lhs = kron_id_rowvec(x, m) * vec_rows(da);
    const Vector rhs = da * x;
    CHECK((lhs - rhs).norm() <= 1e-12 * (1.0 + rhs.norm()));
  }
}

TEST_CASE("solve_psd identity, diagonal, and residual oracle") {
  const Matrix b = (Matrix(2, 1) << 2.0, 4.0).finished();
  CHECK((solve_psd(Matrix::Identity(2, 2), b) - b).norm() == 0.0);

  Matrix s = Matrix::Zero(2, 2);
  s(0, 0) = 2.0;
  s(1, 1) = 4.0;
  const Matrix x = solve_psd(s, b);
  CHECK(x(0, 0) == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(x(1, 0) == doctest::Approx(1.0).epsilon(1e-14));

  std::mt19937_64 rng(71);
  const Matrix g = random_matrix(rng, 6, 6);
  const Matrix spd = g.transpose() * g + Matrix::Identity(6, 6);
  const Matrix rhs = random_matrix(rng, 6, 2);
  const Matrix sol = solve_psd(spd, rhs);
  CHECK((spd * sol - rhs).norm() <= 1e-9 * rhs.norm());
}

TEST_CASE("solve_psd reports the failing pivot") {
  Matrix s(2, 2);
  s << 1.0, 2.0, 2.0, 1.0;  // indefinite
  try {
    solve_psd(s, Matrix::Identity(2, 2));
    FAIL("expected NotPositiveDefiniteError");
  } catch (const NotPositiveDefiniteError& e) {
    CHECK(e.pivot() == 1);
  }

  Matrix asym(2, 2);
  asym << 1.0, 0.5, -0.5, 1.0;
  CHECK_THROWS_AS(solve_psd(asym, Matrix::Identity(2, 2)), InvalidInputError);
}

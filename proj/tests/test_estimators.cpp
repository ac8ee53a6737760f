#include <doctest.h>

#include <cmath>
#include <random>

#include "regls/estimators.hpp"
#include "regls/oracle.hpp"
#include "test_util.hpp"

using namespace regls;
using testutil::random_vector;
using testutil::random_well_conditioned;

namespace {

UnstructuredProblem random_unstructured(std::mt19937_64& rng, int m, int n,
                                        double rho_h, double rho_y) {
  UnstructuredProblem p;
  p.a = random_well_conditioned(rng, m, n);
  p.a /= p.a.norm();
  p.y = random_vector(rng, m);
  p.y /= p.y.norm();
  p.rho_h = rho_h;
  p.rho_y = rho_y;
  return p;
}

StructuredProblem random_structured(std::mt19937_64& rng, int m, int n, int p,
                                    bool tied, double rho) {
  StructuredProblem sp;
  sp.a = random_well_conditioned(rng, m, n);
  sp.y = random_vector(rng, m);
  for (int i = 0; i < p; ++i) {
    Matrix ai = testutil::random_matrix(rng, m, n);
    sp.basis_a.push_back(ai / ai.norm());
    Vector yi = random_vector(rng, m);
    sp.basis_y.push_back(yi / yi.norm());
  }
  sp.rho_h = rho;
  sp.rho_b = rho;
  sp.tied = tied;
  return sp;
}

Vector ridge_closed_form(const Matrix& a, const Vector& y, double mu) {
  const int n = static_cast<int>(a.cols());
  return (a.transpose() * a + mu * Matrix::Identity(n, n))
      .ldlt()
      .solve(a.transpose() * y);
}

}  // namespace

TEST_CASE("method names and parsing round-trip") {
  for (Method m : {Method::kLs, Method::kRls, Method::kCls, Method::kCrls,
                   Method::kScls, Method::kRlsRobust, Method::kSrls,
                   Method::kRrls}) {
    const auto parsed = parse_method(method_name(m));
    REQUIRE(parsed.has_value());
    CHECK(*parsed == m);
  }
  CHECK(parse_method("c-ls") == Method::kCls);
  CHECK(parse_method("SR-LS") == Method::kSrls);
  CHECK(!parse_method("xyz").has_value());
}

TEST_CASE("least squares closed forms") {
  Vector y(3);
  y << 1.0, 2.0, 3.0;
  CHECK((ls_solve(Matrix::Identity(3, 3), y).x_hat - y).norm() <= 1e-12);

  Matrix a(2, 1);
  a << 1.0, 1.0;
  Vector y2(2);
  y2 << 1.0, 3.0;
  CHECK(ls_solve(a, y2).x_hat(0) == doctest::Approx(2.0).epsilon(1e-12));

  std::mt19937_64 rng(601);
  const Matrix ar = random_well_conditioned(rng, 6, 4);
  const Vector yr = random_vector(rng, 6);
  const Estimate e = ls_solve(ar, yr);
  CHECK((ar.transpose() * (ar * e.x_hat - yr)).norm() <= 1e-9);
  CHECK(!e.regret_bound.has_value());
}

TEST_CASE("ridge closed forms and small-mu limit") {
  Vector y(3);
  y << 2.0, 4.0, 6.0;
  CHECK((rls_solve(Matrix::Identity(3, 3), y, 1.0).x_hat - 0.5 * y).norm() <=
        1e-12);

  std::mt19937_64 rng(611);
  const Matrix a = random_well_conditioned(rng, 5, 3);
  const Vector yr = random_vector(rng, 5);
  const Vector x_mu = rls_solve(a, yr, 1e-10).x_hat;
  CHECK((x_mu - pinv(a) * yr).norm() <= 1e-6);

  const double mu = 0.3;
  const Vector xh = rls_solve(a, yr, mu).x_hat;
  const Vector grad = 2.0 * a.transpose() * (a * xh - yr) + 2.0 * mu * xh;
  CHECK(grad.norm() <= 1e-9);
}

TEST_CASE("c-LS collapses to least squares at zero radius") {
  std::mt19937_64 rng(621);
  const UnstructuredProblem p = random_unstructured(rng, 5, 3, 0.0, 0.0);
  const Estimate e = cls_solve(p);
  CHECK((e.x_hat - pinv(p.a) * p.y).norm() <= 1e-6);
  REQUIRE(e.regret_bound.has_value());
  CHECK(*e.regret_bound <= 1e-6);
  CHECK(*e.regret_bound >= -1e-9);
}

TEST_CASE("c-LS stays near least squares for small radii on easy data") {
  std::mt19937_64 rng(631);
  UnstructuredProblem p = random_unstructured(rng, 5, 3, 0.0, 0.0);
  p.y = p.a * random_vector(rng, 3);  // zero residual
  p.rho_h = 1e-3;
  p.rho_y = 1e-3;
  const Estimate e = cls_solve(p);
  CHECK((e.x_hat - pinv(p.a) * p.y).norm() <= 1e-2);
  CHECK(*e.regret_bound <= 1e-2);
}

TEST_CASE("c-LS minimizes the certified worst-case bound") {
  std::mt19937_64 rng(641);
  const UnstructuredProblem p = random_unstructured(rng, 5, 3, 0.4, 0.4);
  const Estimate e = cls_solve(p);
  const double ub_hat = worst_case_ub(p, e.x_hat);
  const double ub_ls = worst_case_ub(p, pinv(p.a) * p.y);
  CHECK(ub_hat <= ub_ls + 1e-6);
  const double ub_rob = worst_case_ub(p, rls_robust(p).x_hat);
  CHECK(ub_hat <= ub_rob + 1e-6);
}

TEST_CASE("c-RLS matches ridge at zero radius and minimizes the bound") {
  std::mt19937_64 rng(651);
  UnstructuredProblem p = random_unstructured(rng, 5, 3, 0.0, 0.0);
  p.mu = 0.1;
  const Estimate e = crls_solve(p);
  CHECK((e.x_hat - ridge_closed_form(p.a, p.y, 0.1)).norm() <= 1e-6);

  UnstructuredProblem tiny = p;
  tiny.mu = 1e-8;
  CHECK((crls_solve(tiny).x_hat - pinv(p.a) * p.y).norm() <= 1e-5);

  UnstructuredProblem pr = p;
  pr.rho_h = 0.3;
  pr.rho_y = 0.3;
  const Estimate er = crls_solve(pr);
  const double ub_hat = worst_case_ub(pr, er.x_hat);
  const double ub_ridge = worst_case_ub(pr, ridge_closed_form(p.a, p.y, 0.1));
  CHECK(ub_hat <= ub_ridge + 1e-6);
}

TEST_CASE("c-RLS shrinks to zero when the ridge dominates") {
  std::mt19937_64 rng(655);
  UnstructuredProblem p = random_unstructured(rng, 5, 3, 0.0, 0.0);
  p.mu = 1e6;
  CHECK(crls_solve(p).x_hat.norm() <= 1e-5);
}

TEST_CASE("sc-LS on a tied Toeplitz instance beats least squares") {
  // convolution matrix of a +-1 sequence, shift-matrix basis, filter length 3
  const int m = 7, n = 3, len = m - n + 1;
  const double seq[len] = {1.0, -1.0, 1.0, 1.0, -1.0};
  auto conv = [&](int shift) {
    Matrix t = Matrix::Zero(m, n);
    for (int i = 0; i < m; ++i) {
      for (int j = 0; j < n; ++j) {
        const int k = i - j;
        if (k == shift) t(i, j) = 1.0;
      }
    }
    return t;
  };
  StructuredProblem sp;
  sp.a = Matrix::Zero(m, n);
  for (int k = 0; k < len; ++k) sp.a += seq[k] * conv(k);
  Vector h(n);
  h << 0.8, -0.5, 0.3;
  Vector noise(m);
  noise << 0.05, -0.08, 0.02, 0.06, -0.03, 0.07, -0.04;
  sp.y = sp.a * h + noise;
  for (int k = 0; k < len; ++k) {
    sp.basis_a.push_back(conv(k));
    Vector e = Vector::Zero(m);
    e(k) = 1.0;
    sp.basis_y.push_back(e);
  }
  sp.tied = true;
  sp.rho_h = 0.15 * sp.a.norm();
  sp.rho_b = sp.rho_h;

  const Estimate est = scls_solve(sp);
  const double ub_ls = worst_case_ub(sp, pinv(sp.a) * sp.y);
  CHECK(*est.regret_bound <= ub_ls + 1e-6);

  // the certificate bounds every sampled tied perturbation
  const StructuredExpansion e = expand_structured_regret(sp);
  for (int t = 0; t < 2000; ++t) {
    const StructuredSample s = sample_structured(
        len, sp.rho_h, sp.rho_b, true, SampleMode::kBoundary, 60000 + t);
    CHECK(regret_linearized(e, sp, est.x_hat, s) <= *est.regret_bound + 1e-6);
  }
}

TEST_CASE("sc-LS with a null basis reduces to least squares") {
  std::mt19937_64 rng(661);
  StructuredProblem sp = random_structured(rng, 5, 3, 1, true, 0.4);
  sp.basis_a[0].setZero();
  sp.basis_y[0].setZero();
  const Estimate e = scls_solve(sp);
  CHECK((e.x_hat - pinv(sp.a) * sp.y).norm() <= 1e-6);
  CHECK(*e.regret_bound <= 1e-6);
}

TEST_CASE("sc-LS bound is monotone in the radius and beats least squares") {
  std::mt19937_64 rng(671);
  StructuredProblem sp = random_structured(rng, 6, 3, 4, true, 0.2);
  const Estimate e1 = scls_solve(sp);
  const double ub_ls = worst_case_ub(sp, pinv(sp.a) * sp.y);
  CHECK(*e1.regret_bound <= ub_ls + 1e-6);

  StructuredProblem sp2 = sp;
  sp2.rho_h = 0.4;
  sp2.rho_b = 0.4;
  const Estimate e2 = scls_solve(sp2);
  CHECK(*e2.regret_bound >= *e1.regret_bound - 1e-8);
}

TEST_CASE("untied sc-LS agrees with the tied form when the tie binds weakly") {
  std::mt19937_64 rng(681);
  StructuredProblem sp = random_structured(rng, 5, 3, 2, true, 1e-3);
  const Estimate tied = scls_solve(sp);
  StructuredProblem su = sp;
  su.tied = false;
  const Estimate untied = scls_solve(su);
  CHECK((tied.x_hat - untied.x_hat).norm() <= 1e-2);
}

TEST_CASE("r-LS trivial limits") {
  std::mt19937_64 rng(691);
  UnstructuredProblem p = random_unstructured(rng, 5, 3, 0.0, 0.2);
  const Estimate e = rls_robust(p);
  CHECK(e.method == Method::kRlsRobust);
  CHECK((e.x_hat - pinv(p.a) * p.y).norm() <= 1e-9);

  UnstructuredProblem big = p;
  big.rho_h = 1e3;
  CHECK(rls_robust(big).x_hat.norm() <= 1e-3);
}

TEST_CASE("r-LS matches a scalar grid search") {
  UnstructuredProblem p;
  p.a = Matrix(2, 1);
  p.a << 1.0, 1.0;
  p.y = Vector(2);
  p.y << 1.0, 3.0;
  p.rho_h = 0.5;
  p.rho_y = 0.0;
  const Estimate e = rls_robust(p);

  auto objective = [&](double x) {
    return (p.a * Vector::Constant(1, x) - p.y).norm() + 0.5 * std::abs(x);
  };
  double best_x = 0.0, best = objective(0.0);
  for (int i = -4000; i <= 4000; ++i) {
    const double x = i * 1e-3;
    const double v = objective(x);
    if (v < best) {
      best = v;
      best_x = x;
    }
  }
  CHECK(std::abs(e.x_hat(0) - best_x) <= 1e-4);
  CHECK(objective(e.x_hat(0)) <= best + 1e-8);
}

TEST_CASE("sr-LS trivial and collinear cases") {
  std::mt19937_64 rng(701);
  StructuredProblem sp = random_structured(rng, 5, 3, 2, true, 0.0);
  CHECK((srls_solve(sp).x_hat - pinv(sp.a) * sp.y).norm() <= 1e-6);
}

TEST_CASE("sr-LS worst case matches the collinear closed form at fixed x") {
  // with one basis pair chosen so that A_1 x - y_1 == r(x), the worst
  // squared residual over |alpha| <= rho is (1 + rho)^2 ||r||^2
  std::mt19937_64 rng(711);
  StructuredProblem sp = random_structured(rng, 5, 3, 1, true, 0.3);
  const Vector x = random_vector(rng, 3);
  const Vector r = sp.a * x - sp.y;
  sp.basis_a[0].setZero();
  sp.basis_y[0] = -r;  // A_1 x - y_1 = r

  // freeze x inside the sr-LS program by solving with the basis fixed and
  // comparing against the analytic value at that x
  // (the estimator itself optimizes x, so evaluate via the inner LMI)
  const double want = std::pow(1.0 + sp.rho_h, 2) * r.squaredNorm();

  // inner maximization by dense sampling of alpha in [-rho, rho]
  double sampled = 0.0;
  for (int i = -100; i <= 100; ++i) {
    const double alpha = sp.rho_h * i / 100.0;
    const double v = ((1.0 + alpha) * r).squaredNorm();
    sampled = std::max(sampled, v);
  }
  CHECK(sampled == doctest::Approx(want).epsilon(1e-9));

  // the estimator must do at least as well as x itself on its own objective
  const Estimate e = srls_solve(sp);
  double est_worst = 0.0;
  for (int i = -100; i <= 100; ++i) {
    const double alpha = sp.rho_h * i / 100.0;
    const Vector res = (sp.a * e.x_hat - sp.y) + alpha * r;
    est_worst = std::max(est_worst, res.squaredNorm());
  }
  CHECK(est_worst <= want + 1e-6);
}

TEST_CASE("sr-LS dominates sampled and ascent maxima at its solution") {
  std::mt19937_64 rng(721);
  const StructuredProblem sp = random_structured(rng, 5, 3, 3, true, 0.3);
  const Estimate e = srls_solve(sp);

  // worst sampled squared residual at x_hat
  double sampled = 0.0;
  for (int t = 0; t < 5000; ++t) {
    const StructuredSample s = sample_structured(
        3, sp.rho_h, sp.rho_b, true, SampleMode::kBoundary, 40000 + t);
    Vector res = sp.a * e.x_hat - sp.y;
    for (int i = 0; i < 3; ++i) {
      res += s.alpha(i) * (sp.basis_a[i] * e.x_hat - sp.basis_y[i]);
    }
    sampled = std::max(sampled, res.squaredNorm());
  }
  // lambda at the solution upper-bounds every sample; with one ball the
  // S-procedure is tight, so the sampled max also comes close
  Matrix mm(5, 3);
  for (int i = 0; i < 3; ++i) {
    mm.col(i) = sp.basis_a[i] * e.x_hat - sp.basis_y[i];
  }
  const Vector r = sp.a * e.x_hat - sp.y;
  // exact inner maximum via eigen-structure: max ||r + rho*M u||^2, ||u||<=1
  double exact = 0.0;
  for (int t = 0; t < 20000; ++t) {
    const Vector u = sample_ball(3, 1.0, SampleMode::kBoundary, 90000 + t);
    exact = std::max(exact, (r + sp.rho_h * mm * u).squaredNorm());
  }
  CHECK(sampled <= exact + 1e-9 + 1e-6 * exact);
  CHECK(exact >= 0.999 * sampled);
}

TEST_CASE("r-RLS limits: ridge at zero radius, r-LS as mu vanishes") {
  std::mt19937_64 rng(731);
  UnstructuredProblem p = random_unstructured(rng, 5, 3, 0.0, 0.0);
  p.mu = 0.2;
  const Estimate e = rrls_solve(p);
  CHECK((e.x_hat - ridge_closed_form(p.a, p.y, 0.2)).norm() <= 1e-6);

  UnstructuredProblem q = random_unstructured(rng, 5, 3, 0.3, 0.1);
  UnstructuredProblem q_mu = q;
  q_mu.mu = 1e-8;
  const Vector x_rrls = rrls_solve(q_mu).x_hat;
  const Vector x_rob = rls_robust(q).x_hat;
  CHECK((x_rrls - x_rob).norm() <= 1e-3);
}

TEST_CASE("r-RLS matches a scalar grid search") {
  UnstructuredProblem p;
  p.a = Matrix(2, 1);
  p.a << 1.0, 1.0;
  p.y = Vector(2);
  p.y << 1.0, 3.0;
  p.rho_h = 0.4;
  p.rho_y = 0.2;
  p.mu = 0.5;
  const Estimate e = rrls_solve(p);

  auto objective = [&](double x) {
    const double t =
        (p.a * Vector::Constant(1, x) - p.y).norm() + 0.4 * std::abs(x) + 0.2;
    return t * t + 0.5 * x * x;
  };
  double best_x = 0.0, best = objective(0.0);
  for (int i = -4000; i <= 4000; ++i) {
    const double x = i * 1e-3;
    const double v = objective(x);
    if (v < best) {
      best = v;
      best_x = x;
    }
  }
  CHECK(std::abs(e.x_hat(0) - best_x) <= 1e-4);
  CHECK(objective(e.x_hat(0)) <= best + 1e-8);
}

TEST_CASE("zero-radius collapse across all robust estimators") {
  std::mt19937_64 rng(741);
  UnstructuredProblem p = random_unstructured(rng, 5, 3, 0.0, 0.0);
  const Vector x_ls = pinv(p.a) * p.y;
  CHECK((cls_solve(p).x_hat - x_ls).norm() <= 1e-6);
  CHECK((rls_robust(p).x_hat - x_ls).norm() <= 1e-6);

  UnstructuredProblem pm = p;
  pm.mu = 0.1;
  const Vector x_ridge = ridge_closed_form(p.a, p.y, 0.1);
  CHECK((crls_solve(pm).x_hat - x_ridge).norm() <= 1e-6);
  CHECK((rrls_solve(pm).x_hat - x_ridge).norm() <= 1e-6);

  StructuredProblem sp = random_structured(rng, 5, 3, 2, true, 0.0);
  CHECK((scls_solve(sp).x_hat - pinv(sp.a) * sp.y).norm() <= 1e-6);
}

TEST_CASE("estimates vary continuously with the radius") {
  std::mt19937_64 rng(751);
  UnstructuredProblem p = random_unstructured(rng, 5, 3, 0.3, 0.3);
  const Vector x1 = cls_solve(p).x_hat;
  UnstructuredProblem q = p;
  q.rho_h += 1e-4;
  q.rho_y += 1e-4;
  const Vector x2 = cls_solve(q).x_hat;
  CHECK((x1 - x2).norm() <= 1e-2);
}

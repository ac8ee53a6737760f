#include "regls/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>

#include "regls/lmi.hpp"

namespace regls {

const char* to_string(SampleMode m) {
  return m == SampleMode::kBoundary ? "boundary" : "uniform";
}

namespace {

Vector draw_ball(std::mt19937_64& rng, int dim, double radius,
                 SampleMode mode) {
  std::normal_distribution<double> gauss(0.0, 1.0);
  Vector v(dim);
  for (int i = 0; i < dim; ++i) v(i) = gauss(rng);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  const double u = unif(rng);  // drawn in both modes to keep streams aligned
  const double norm = v.norm();
  if (radius == 0.0 || norm == 0.0) return Vector::Zero(dim);
  double scale = radius / norm;
  if (mode == SampleMode::kUniform) {
    scale *= std::pow(u, 1.0 / static_cast<double>(dim));
  }
  return scale * v;
}

Matrix structured_matrix_at(const StructuredProblem& p, const Vector& alpha) {
  Matrix a = p.a;
  for (int i = 0; i < p.dim_p(); ++i) a += alpha(i) * p.basis_a[i];
  return a;
}

Vector structured_output_at(const StructuredProblem& p, const Vector& beta) {
  Vector y = p.y;
  for (int i = 0; i < p.dim_p(); ++i) y += beta(i) * p.basis_y[i];
  return y;
}

}  // namespace

Vector sample_ball(int dim, double radius, SampleMode mode,
                   std::uint64_t seed) {
  if (dim < 1) throw InvalidInputError("sample_ball requires dim >= 1");
  if (!(radius >= 0.0)) {
    throw InvalidParameterError("sample_ball requires radius >= 0");
  }
  std::mt19937_64 rng(seed);
  return draw_ball(rng, dim, radius, mode);
}

PerturbationSample sample_unstructured(int rows, int cols, double rho_h,
                                       double rho_y, SampleMode mode,
                                       std::uint64_t seed) {
  if (rows < 1 || cols < 1) {
    throw InvalidInputError("sample_unstructured requires positive dims");
  }
  std::mt19937_64 rng(seed);
  const Vector da = draw_ball(rng, rows * cols, rho_h, mode);
  const Vector dy = draw_ball(rng, rows, rho_y, mode);
  PerturbationSample s;
  s.delta_a = Matrix::Zero(rows, cols);
  for (int i = 0; i < rows; ++i) {
    for (int j = 0; j < cols; ++j) s.delta_a(i, j) = da(i * cols + j);
  }
  s.delta_y = dy;
  return s;
}

StructuredSample sample_structured(int p, double rho_h, double rho_b,
                                   bool tied, SampleMode mode,
                                   std::uint64_t seed) {
  if (p < 1) throw InvalidInputError("sample_structured requires p >= 1");
  std::mt19937_64 rng(seed);
  StructuredSample s;
  s.alpha = draw_ball(rng, p, rho_h, mode);
  s.beta = tied ? s.alpha : draw_ball(rng, p, rho_b, mode);
  return s;
}

double regret_exact(const UnstructuredProblem& p, const Vector& x,
                    const PerturbationSample& s) {
  const Matrix at = p.a + s.delta_a;
  const Vector yt = p.y + s.delta_y;
  const double cost = (at * x - yt).squaredNorm() +
                      (p.mu ? *p.mu * x.squaredNorm() : 0.0);
  if (p.mu) {
    return cost - ridge_optimal_cost(at, yt, *p.mu);
  }
  require_full_rank(at, "regret_exact");
  return cost - ls_optimal_cost(at, yt);
}

double regret_exact(const StructuredProblem& p, const Vector& x,
                    const StructuredSample& s) {
  const Matrix at = structured_matrix_at(p, s.alpha);
  const Vector yt = structured_output_at(p, s.beta);
  require_full_rank(at, "regret_exact");
  return (at * x - yt).squaredNorm() - ls_optimal_cost(at, yt);
}

double regret_linearized(const RegretExpansion& e, const UnstructuredProblem& p,
                         const Vector& x, const PerturbationSample& s) {
  const double cost = ((p.a + s.delta_a) * x - (p.y + s.delta_y)).squaredNorm() +
                      (p.mu ? *p.mu * x.squaredNorm() : 0.0);
  const double lin = e.nominal_cost +
                     e.grad_matrix.cwiseProduct(s.delta_a).sum() +
                     e.grad_output.dot(s.delta_y);
  return cost - lin;
}

double regret_linearized(const StructuredExpansion& e,
                         const StructuredProblem& p, const Vector& x,
                         const StructuredSample& s) {
  const Matrix at = structured_matrix_at(p, s.alpha);
  const Vector yt = structured_output_at(p, s.beta);
  const double lin = e.nominal_cost + 2.0 * e.lin_alpha.dot(s.alpha) +
                     2.0 * e.lin_beta.dot(s.beta);
  return (at * x - yt).squaredNorm() - lin;
}

double worst_case_lb(const UnstructuredProblem& p, const Vector& x,
                     int n_samples, std::uint64_t seed) {
  validate(p);
  if (n_samples < 1) {
    throw InvalidParameterError("worst_case_lb requires n_samples >= 1");
  }
  const int m = static_cast<int>(p.a.rows());
  const int n = static_cast<int>(p.a.cols());
  const RegretExpansion e = p.mu ? expand_ridge_regret(p.a, p.y, *p.mu)
                                 : expand_ls_regret(p.a, p.y);

  PerturbationSample best;
  double best_val = -std::numeric_limits<double>::infinity();
  for (int t = 0; t < n_samples; ++t) {
    const PerturbationSample s = sample_unstructured(
        m, n, p.rho_h, p.rho_y, SampleMode::kBoundary, seed + t);
    const double val = regret_linearized(e, p, x, s);
    if (val > best_val) {
      best_val = val;
      best = s;
    }
  }

  // ascent refinement from the best sample; the objective is convex in the
  // perturbation, so the maximum sits on the sphere product and the dy ball
  // admits an exact coordinate step
  Matrix da = best.delta_a;
  Vector dy = best.delta_y;
  for (int k = 1; k <= 50; ++k) {
    if (p.rho_y > 0.0) {
      const Vector q0 = (p.a + da) * x - p.y;
      const Vector dir = 2.0 * q0 + e.grad_output;
      if (dir.norm() > 0.0) dy = -p.rho_y * dir / dir.norm();
    }
    const Vector q = (p.a + da) * x - (p.y + dy);
    const Matrix ga = 2.0 * q * x.transpose() - e.grad_matrix;
    const double na = ga.norm();
    if (p.rho_h > 0.0 && na > 0.0) {
      da += (0.1 * p.rho_h / std::sqrt(static_cast<double>(k))) * ga / na;
      const double nrm = da.norm();
      if (nrm > 0.0) da *= p.rho_h / nrm;
    }
    PerturbationSample s{da, dy};
    best_val = std::max(best_val, regret_linearized(e, p, x, s));
  }
  return best_val;
}

double worst_case_lb(const StructuredProblem& p, const Vector& x,
                     int n_samples, std::uint64_t seed) {
  validate(p);
  if (n_samples < 1) {
    throw InvalidParameterError("worst_case_lb requires n_samples >= 1");
  }
  const int np = p.dim_p();
  const StructuredExpansion e = expand_structured_regret(p);

  StructuredSample best;
  double best_val = -std::numeric_limits<double>::infinity();
  for (int t = 0; t < n_samples; ++t) {
    const StructuredSample s = sample_structured(
        np, p.rho_h, p.rho_b, p.tied, SampleMode::kBoundary, seed + t);
    const double val = regret_linearized(e, p, x, s);
    if (val > best_val) {
      best_val = val;
      best = s;
    }
  }

  Vector alpha = best.alpha;
  Vector beta = best.beta;
  for (int k = 1; k <= 50; ++k) {
    const Matrix at = structured_matrix_at(p, alpha);
    const Vector yt = p.tied ? structured_output_at(p, alpha)
                             : structured_output_at(p, beta);
    const Vector q = at * x - yt;
    Vector ga(np), gb(np);
    for (int i = 0; i < np; ++i) {
      ga(i) = 2.0 * q.dot(p.basis_a[i] * x) - 2.0 * e.lin_alpha(i);
      gb(i) = -2.0 * q.dot(p.basis_y[i]) - 2.0 * e.lin_beta(i);
    }
    const double step = 0.1 / std::sqrt(static_cast<double>(k));
    if (p.tied) {
      const Vector g = ga + gb;
      const double ng = g.norm();
      if (p.rho_h > 0.0 && ng > 0.0) {
        alpha += step * p.rho_h * g / ng;
        const double nrm = alpha.norm();
        if (nrm > 0.0) alpha *= p.rho_h / nrm;  // boundary of the ball
      }
      beta = alpha;
    } else {
      const double na = ga.norm();
      const double nb = gb.norm();
      if (p.rho_h > 0.0 && na > 0.0) {
        alpha += step * p.rho_h * ga / na;
        const double nrm = alpha.norm();
        if (nrm > 0.0) alpha *= p.rho_h / nrm;
      }
      if (p.rho_b > 0.0 && nb > 0.0) {
        beta += step * p.rho_b * gb / nb;
        const double nrm = beta.norm();
        if (nrm > 0.0) beta *= p.rho_b / nrm;
      }
    }
    StructuredSample s{alpha, beta};
    best_val = std::max(best_val, regret_linearized(e, p, x, s));
  }
  return best_val;
}

namespace {

double solve_frozen(LmiProblem&& l, const Vector& x, const SolverConfig& cfg,
                    const char* what) {
  std::vector<int> idx(x.size());
  std::iota(idx.begin(), idx.end(), 0);
  const LmiProblem lf = freeze_variables(l, idx, x);
  const SdpSolution sol = solve(lf, cfg);
  if (sol.status != SolveStatus::kOptimal) {
    throw SolverError(std::string(what) + ": SDP solve ended with status " +
                      to_string(sol.status));
  }
  return sol.objective_value;
}

}  // namespace

double worst_case_ub(const UnstructuredProblem& p, const Vector& x,
                     const SolverConfig& cfg) {
  if (x.size() != p.a.cols()) {
    throw InvalidInputError("worst_case_ub: x has wrong dimension");
  }
  LmiProblem l =
      p.mu ? build_regularized_lmi(p, x) : build_unstructured_lmi(p, x);
  return solve_frozen(std::move(l), x, cfg, "worst_case_ub");
}

double worst_case_ub(const StructuredProblem& p, const Vector& x,
                     const SolverConfig& cfg) {
  if (x.size() != p.a.cols()) {
    throw InvalidInputError("worst_case_ub: x has wrong dimension");
  }
  LmiProblem l = p.tied ? build_tied_lmi(p, x) : build_structured_lmi(p, x);
  return solve_frozen(std::move(l), x, cfg, "worst_case_ub");
}

}  // namespace regls

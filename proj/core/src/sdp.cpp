#include "regls/sdp.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>
#include <functional>
#include <limits>

namespace regls {

const char* to_string(SolveStatus s) {
  switch (s) {
    case SolveStatus::kOptimal: return "optimal";
    case SolveStatus::kMaxIterations: return "max_iterations";
    case SolveStatus::kInfeasible: return "infeasible";
    case SolveStatus::kNumericalFailure: return "numerical_failure";
  }
  return "unknown";
}

double min_eigenvalue(const Matrix& s) {
  require_finite(s, "min_eigenvalue input");
  if (s.rows() != s.cols()) {
    throw InvalidInputError("min_eigenvalue requires a square matrix");
  }
  const double asym = (s - s.transpose()).cwiseAbs().maxCoeff();
  if (asym > 1e-8 * (1.0 + s.cwiseAbs().maxCoeff())) {
    throw InvalidInputError("min_eigenvalue requires a symmetric matrix");
  }
  Eigen::SelfAdjointEigenSolver<Matrix> es(0.5 * (s + s.transpose()),
                                           Eigen::EigenvaluesOnly);
  return es.eigenvalues().minCoeff();
}

namespace {

struct CenterOutcome {
  bool centered = false;
  bool numerical = false;
  bool stopped_early = false;
  double last_dec2 = std::numeric_limits<double>::infinity();
};

// squared-decrement thresholds: kTightDec2 is the normal stop; kLooseDec2 is
// accepted when rounding stalls the line search near the central path
constexpr double kTightDec2 = 1e-10;
constexpr double kLooseDec2 = 1e-4;

// Damped Newton minimization of t * c^T z - log det F(z) from a strictly
// feasible z. Maintains feasibility through the backtracking line search.
CenterOutcome center(const LmiProblem& l, const SolverConfig& cfg, double t,
                     Vector& z, int& newton_total,
                     const std::function<bool(const Vector&)>& stop_early) {
  const int nv = l.num_vars;
  Vector grad(nv);
  Matrix hess(nv, nv);
  std::vector<Matrix> tk(nv);
  double dec2 = std::numeric_limits<double>::infinity();

  for (int it = 0; it < cfg.max_newton; ++it) {
    if (stop_early && stop_early(z)) return {true, false, true, dec2};

    const Matrix fz = assemble(l, z);
    const Cholesky chol = cholesky_factor(fz);
    if (!chol.ok) return {false, true, false, dec2};
    const double psi = t * l.objective.dot(z) - chol.log_det();

    for (int k = 0; k < nv; ++k) {
      const Matrix x1 =
          chol.l.triangularView<Eigen::Lower>().solve(l.f[k]);
      Matrix tkk =
          chol.l.triangularView<Eigen::Lower>().solve(Matrix(x1.transpose()));
      tk[k] = 0.5 * (tkk + tkk.transpose());
      grad(k) = t * l.objective(k) - tk[k].trace();
    }
    for (int k = 0; k < nv; ++k) {
      for (int j = k; j < nv; ++j) {
        hess(k, j) = hess(j, k) = tk[k].cwiseProduct(tk[j]).sum();
      }
    }
    if (!grad.allFinite() || !hess.allFinite()) return {false, true, false, dec2};

    // tiny ridge keeps the solve meaningful when coefficient matrices are
    // linearly dependent (exactly singular Hessian)
    const double bump = 1e-12 * (1.0 + hess.diagonal().maxCoeff());
    Eigen::LDLT<Matrix> ldlt(hess + bump * Matrix::Identity(nv, nv));
    Vector step = -ldlt.solve(grad);
    if (ldlt.info() != Eigen::Success || !step.allFinite()) {
      ldlt.compute(hess + 1e6 * bump * Matrix::Identity(nv, nv));
      step = -ldlt.solve(grad);
      if (!step.allFinite()) return {false, true, false, dec2};
    }
    dec2 = -grad.dot(step);  // squared Newton decrement
    if (dec2 <= kTightDec2) return {true, false, false, dec2};

    const double slope = grad.dot(step);
    bool accepted = false;
    for (double s = 1.0; s > 1e-14; s *= cfg.line_search_shrink) {
      const Vector zn = z + s * step;
      const Cholesky cn = cholesky_factor(assemble(l, zn));
      if (!cn.ok) continue;
      const double psin = t * l.objective.dot(zn) - cn.log_det();
      if (std::isfinite(psin) && psin <= psi + 1e-4 * s * slope) {
        z = zn;
        accepted = true;
        break;
      }
    }
    ++newton_total;
    if (!accepted) {
      // line search stalled; near-centered iterates are acceptable
      return {dec2 < kLooseDec2, dec2 >= kLooseDec2, false, dec2};
    }
  }
  return {dec2 < kLooseDec2, false, false, dec2};
}

}  // namespace

std::optional<Vector> find_strictly_feasible(const LmiProblem& l,
                                             const std::optional<Vector>& hint,
                                             const SolverConfig& cfg) {
  validate(l);
  if (hint && hint->size() == l.num_vars) {
    if (min_eigenvalue(assemble(l, *hint)) > 1e-10) return *hint;
  }

  // phase I: maximize s subject to F(z) - s I >= 0, starting from z = 0
  const int nv = l.num_vars;
  LmiProblem aug;
  aug.num_vars = nv + 1;
  aug.f0 = l.f0;
  aug.f = l.f;
  aug.f.push_back(-Matrix::Identity(l.order(), l.order()));
  aug.objective = Vector::Zero(nv + 1);
  aug.objective(nv) = -1.0;
  aug.block_sizes = l.block_sizes;

  Vector z = Vector::Zero(nv + 1);
  z(nv) = min_eigenvalue(l.f0) - 1.0;

  const double margin = 1e-6 * (1.0 + l.f0.cwiseAbs().maxCoeff());
  const auto stop = [&, nv](const Vector& zz) { return zz(nv) >= margin; };

  double t = 1.0;
  int newton_total = 0;
  for (int outer = 0; outer < cfg.max_outer; ++outer) {
    const CenterOutcome out = center(aug, cfg, t, z, newton_total, stop);
    if (z(nv) >= margin) break;
    if (out.numerical || !out.centered) break;
    if (static_cast<double>(aug.order()) / t <= cfg.tol_gap) break;
    t *= cfg.barrier_growth;
  }

  if (z(nv) > 1e-10) {
    Vector zl = z.head(nv);
    if (min_eigenvalue(assemble(l, zl)) > 1e-10) return zl;
  }
  return std::nullopt;
}

SdpSolution solve(const LmiProblem& l, const SolverConfig& cfg) {
  validate(l);
  SdpSolution sol;
  sol.z_star = Vector::Zero(l.num_vars);

  const std::optional<Vector> z0 =
      find_strictly_feasible(l, l.feasible_hint, cfg);
  if (!z0) {
    sol.status = SolveStatus::kInfeasible;
    sol.objective_value = l.objective.dot(sol.z_star);
    sol.min_eig = min_eigenvalue(assemble(l, sol.z_star));
    sol.gap_estimate = std::numeric_limits<double>::infinity();
    return sol;
  }

  Vector z = *z0;
  const double order = static_cast<double>(l.order());
  // stop t exactly at the gap target rather than overshooting a decade
  const double t_target = order / std::max(cfg.tol_gap, 1e-300);
  double t = std::min(1.0, t_target);
  int newton_total = 0;
  SolveStatus status = SolveStatus::kMaxIterations;
  for (int outer = 0; outer < cfg.max_outer; ++outer) {
    const CenterOutcome out = center(l, cfg, t, z, newton_total, nullptr);
    if (out.numerical) {
      status = SolveStatus::kNumericalFailure;
      break;
    }
    if (!out.centered) {
      status = SolveStatus::kMaxIterations;
      break;
    }
    sol.outer_objectives.push_back(l.objective.dot(z));
    if (t >= t_target) {
      status = SolveStatus::kOptimal;
      break;
    }
    t = std::min(t * cfg.barrier_growth, t_target);
  }

  sol.z_star = z;
  sol.objective_value = l.objective.dot(z);
  sol.status = status;
  sol.iterations = newton_total;
  sol.gap_estimate = order / t;
  sol.min_eig = min_eigenvalue(assemble(l, z));
  return sol;
}

}  // namespace regls

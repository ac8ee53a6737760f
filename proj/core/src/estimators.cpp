#include "regls/estimators.hpp"

#include <cctype>
#include <cmath>
#include <string>

#include "regls/lmi.hpp"

namespace regls {

const char* method_name(Method m) {
  switch (m) {
    case Method::kLs: return "LS";
    case Method::kRls: return "RLS";
    case Method::kCls: return "c-LS";
    case Method::kCrls: return "c-RLS";
    case Method::kScls: return "sc-LS";
    case Method::kRlsRobust: return "r-LS";
    case Method::kSrls: return "sr-LS";
    case Method::kRrls: return "r-RLS";
  }
  return "?";
}

std::optional<Method> parse_method(const std::string& tag) {
  // hyphens are significant: "r-LS" and "RLS" are different estimators
  std::string key;
  for (char c : tag) {
    key += c == '_' ? '-'
                    : static_cast<char>(
                          std::tolower(static_cast<unsigned char>(c)));
  }
  if (key == "ls") return Method::kLs;
  if (key == "rls") return Method::kRls;
  if (key == "c-ls") return Method::kCls;
  if (key == "c-rls") return Method::kCrls;
  if (key == "sc-ls") return Method::kScls;
  if (key == "r-ls") return Method::kRlsRobust;
  if (key == "sr-ls") return Method::kSrls;
  if (key == "r-rls") return Method::kRrls;
  return std::nullopt;
}

bool is_minimax(Method m) {
  return m == Method::kCls || m == Method::kCrls || m == Method::kScls;
}

SolverConfig estimator_config() {
  SolverConfig cfg;
  cfg.tol_gap = 1e-9;
  return cfg;
}

namespace {

Estimate from_solution(const SdpSolution& sol, Method method, int n,
                       bool minimax) {
  if (sol.status != SolveStatus::kOptimal) {
    throw SolverError(std::string("estimator ") + method_name(method) +
                      ": SDP solve ended with status " +
                      to_string(sol.status) + " after " +
                      std::to_string(sol.iterations) + " Newton steps");
  }
  Estimate est;
  est.x_hat = sol.z_star.head(n);
  est.method = method;
  if (minimax) est.regret_bound = sol.objective_value;
  est.solver_status = sol.status;
  est.iterations = sol.iterations;
  est.min_eig = sol.min_eig;
  return est;
}

}  // namespace

Estimate ls_solve(const Matrix& a, const Vector& y) {
  require_finite(a, "data matrix");
  require_finite(y, "output vector");
  if (a.rows() < a.cols() || a.rows() != y.size()) {
    throw InvalidInputError("ls_solve requires m >= n and matching y");
  }
  Estimate est;
  est.x_hat = pinv(a) * y;
  est.method = Method::kLs;
  return est;
}

Estimate rls_solve(const Matrix& a, const Vector& y, double mu) {
  require_finite(a, "data matrix");
  require_finite(y, "output vector");
  if (!(mu > 0.0)) {
    throw InvalidParameterError("rls_solve requires mu > 0");
  }
  const int n = static_cast<int>(a.cols());
  const Matrix gram = a.transpose() * a + mu * Matrix::Identity(n, n);
  Estimate est;
  est.x_hat = solve_psd(gram, Matrix(a.transpose() * y)).col(0);
  est.method = Method::kRls;
  return est;
}

Estimate cls_solve(const UnstructuredProblem& p, const SolverConfig& cfg) {
  const LmiProblem l = build_unstructured_lmi(p);
  return from_solution(solve(l, cfg), Method::kCls,
                       static_cast<int>(p.a.cols()), true);
}

Estimate crls_solve(const UnstructuredProblem& p, const SolverConfig& cfg) {
  const LmiProblem l = build_regularized_lmi(p);
  return from_solution(solve(l, cfg), Method::kCrls,
                       static_cast<int>(p.a.cols()), true);
}

Estimate scls_solve(const StructuredProblem& p, const SolverConfig& cfg) {
  const LmiProblem l = p.tied ? build_tied_lmi(p) : build_structured_lmi(p);
  return from_solution(solve(l, cfg), Method::kScls,
                       static_cast<int>(p.a.cols()), true);
}

Estimate rls_robust(const UnstructuredProblem& p, const SolverConfig& cfg) {
  validate(p);
  if (p.mu) {
    throw InvalidParameterError("rls_robust does not take a ridge weight");
  }
  const int m = static_cast<int>(p.a.rows());
  const int n = static_cast<int>(p.a.cols());

  if (p.rho_h == 0.0) {
    // the ||x|| penalty vanishes and the minimizer is plain least squares
    Estimate est = ls_solve(p.a, p.y);
    est.method = Method::kRlsRobust;
    return est;
  }

  // variables (x, u, v): minimize u + rho_h v
  // subject to ||A x - y|| <= u and ||x|| <= v
  LmiProblem l;
  l.num_vars = n + 2;
  const int u = n, v = n + 1;
  l.objective = Vector::Zero(l.num_vars);
  l.objective(u) = 1.0;
  l.objective(v) = p.rho_h;
  for (int j = 0; j < n; ++j) l.var_names.push_back("x" + std::to_string(j + 1));
  l.var_names.push_back("u");
  l.var_names.push_back("v");
  l.f0 = Matrix::Zero(0, 0);
  l.f.assign(l.num_vars, Matrix::Zero(0, 0));

  Matrix coeff_r = Matrix::Zero(m, l.num_vars);
  coeff_r.leftCols(n) = p.a;
  append_soc_epigraph(l, coeff_r, Vector(-p.y), u);
  Matrix coeff_x = Matrix::Zero(n, l.num_vars);
  coeff_x.leftCols(n) = Matrix::Identity(n, n);
  append_soc_epigraph(l, coeff_x, Vector::Zero(n), v);

  Vector hint = Vector::Zero(l.num_vars);
  hint(u) = p.y.norm() + 1.0;
  hint(v) = 1.0;
  l.feasible_hint = hint;

  return from_solution(solve(l, cfg), Method::kRlsRobust, n, false);
}

Estimate srls_solve(const StructuredProblem& p, const SolverConfig& cfg) {
  validate(p);
  if (!p.tied) {
    throw InvalidParameterError("srls_solve requires tied coefficients");
  }
  require_full_rank(p.a, "srls_solve");
  const int m = static_cast<int>(p.a.rows());
  const int n = static_cast<int>(p.a.cols());
  const int np = p.dim_p();
  const double rho = p.rho_h;

  // variables (x, tau, lambda): minimize the worst squared residual over
  // the tied coefficient ball
  LmiProblem l;
  l.num_vars = n + 2;
  const int tau = n, lambda = n + 1;
  l.objective = Vector::Zero(l.num_vars);
  l.objective(lambda) = 1.0;
  for (int j = 0; j < n; ++j) l.var_names.push_back("x" + std::to_string(j + 1));
  l.var_names.push_back("tau");
  l.var_names.push_back("lambda");

  const int main_order = 1 + m + np;
  const int o2 = 1, o3 = 1 + m;
  const int total = main_order + 1;
  l.block_sizes = {main_order, 1};
  l.f0 = Matrix::Zero(total, total);
  l.f.assign(l.num_vars, Matrix::Zero(total, total));

  for (int i = 0; i < m; ++i) {
    l.f0(0, o2 + i) = -p.y(i);
    l.f0(o2 + i, 0) = -p.y(i);
    l.f0(o2 + i, o2 + i) = 1.0;
  }
  for (int i = 0; i < np; ++i) {
    for (int r = 0; r < m; ++r) {
      l.f0(o2 + r, o3 + i) = -rho * p.basis_y[i](r);
      l.f0(o3 + i, o2 + r) = -rho * p.basis_y[i](r);
    }
  }
  for (int j = 0; j < n; ++j) {
    Matrix& fx = l.f[j];
    for (int i = 0; i < m; ++i) {
      fx(0, o2 + i) = p.a(i, j);
      fx(o2 + i, 0) = p.a(i, j);
    }
    for (int i = 0; i < np; ++i) {
      for (int r = 0; r < m; ++r) {
        fx(o2 + r, o3 + i) = rho * p.basis_a[i](r, j);
        fx(o3 + i, o2 + r) = rho * p.basis_a[i](r, j);
      }
    }
  }
  l.f[tau](0, 0) = -1.0;
  for (int i = 0; i < np; ++i) l.f[tau](o3 + i, o3 + i) = 1.0;
  l.f[tau](main_order, main_order) = 1.0;
  l.f[lambda](0, 0) = 1.0;

  const Vector x0 = pinv(p.a) * p.y;
  double mx = 0.0;
  for (int i = 0; i < np; ++i) {
    mx += (p.basis_a[i] * x0 - p.basis_y[i]).squaredNorm();
  }
  Vector hint = Vector::Zero(l.num_vars);
  hint.head(n) = x0;
  double t0 = 1.0 + rho * rho * mx;
  for (int attempt = 0; attempt < 60; ++attempt) {
    hint(tau) = t0;
    if (complete_hint_via_schur(l, hint, lambda)) {
      l.feasible_hint = hint;
      break;
    }
    t0 *= 4.0;
  }

  return from_solution(solve(l, cfg), Method::kSrls, n, false);
}

Estimate rrls_solve(const UnstructuredProblem& p, const SolverConfig& cfg) {
  validate(p);
  if (!p.mu) {
    throw InvalidParameterError("rrls_solve requires a ridge weight");
  }
  const double mu = *p.mu;
  const int m = static_cast<int>(p.a.rows());
  const int n = static_cast<int>(p.a.cols());

  // variables (x, u, s, w): minimize w subject to
  //   ||A x - y|| <= u,  ||x|| <= s,  (u + rho_h s + rho_y)^2 + mu s^2 <= w
  LmiProblem l;
  l.num_vars = n + 3;
  const int u = n, s = n + 1, w = n + 2;
  l.objective = Vector::Zero(l.num_vars);
  l.objective(w) = 1.0;
  for (int j = 0; j < n; ++j) l.var_names.push_back("x" + std::to_string(j + 1));
  l.var_names.push_back("u");
  l.var_names.push_back("s");
  l.var_names.push_back("w");
  l.f0 = Matrix::Zero(0, 0);
  l.f.assign(l.num_vars, Matrix::Zero(0, 0));

  Matrix coeff_r = Matrix::Zero(m, l.num_vars);
  coeff_r.leftCols(n) = p.a;
  append_soc_epigraph(l, coeff_r, Vector(-p.y), u);
  Matrix coeff_x = Matrix::Zero(n, l.num_vars);
  coeff_x.leftCols(n) = Matrix::Identity(n, n);
  append_soc_epigraph(l, coeff_x, Vector::Zero(n), s);

  // quadratic epigraph block [[w, t, sqrt(mu) s], [t, 1, 0], [sqrt(mu) s, 0, 1]]
  // with t = u + rho_h s + rho_y
  {
    const int base = l.order();
    Matrix f0 = Matrix::Zero(base + 3, base + 3);
    f0.topLeftCorner(base, base) = l.f0;
    l.f0 = std::move(f0);
    for (Matrix& fk : l.f) {
      Matrix g = Matrix::Zero(base + 3, base + 3);
      g.topLeftCorner(base, base) = fk;
      fk = std::move(g);
    }
    l.block_sizes.push_back(3);
    l.f0(base + 1, base + 1) = 1.0;
    l.f0(base + 2, base + 2) = 1.0;
    l.f0(base, base + 1) = p.rho_y;
    l.f0(base + 1, base) = p.rho_y;
    l.f[w](base, base) = 1.0;
    l.f[u](base, base + 1) = 1.0;
    l.f[u](base + 1, base) = 1.0;
    l.f[s](base, base + 1) = p.rho_h;
    l.f[s](base + 1, base) = p.rho_h;
    const double smu = std::sqrt(mu);
    l.f[s](base, base + 2) = smu;
    l.f[s](base + 2, base) = smu;
  }

  Vector hint = Vector::Zero(l.num_vars);
  hint(u) = p.y.norm() + 1.0;
  hint(s) = 1.0;
  hint(w) = std::pow(hint(u) + p.rho_h + p.rho_y, 2) + mu + 10.0;
  l.feasible_hint = hint;

  return from_solution(solve(l, cfg), Method::kRrls, n, false);
}

}  // namespace regls

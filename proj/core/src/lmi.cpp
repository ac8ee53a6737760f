#include "regls/lmi.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <string>

namespace regls {

namespace {

void set_sym(Matrix& f, int i, int j, double v) {
  f(i, j) = v;
  f(j, i) = v;
}

std::vector<std::string> regret_var_names(int n, bool with_theta) {
  std::vector<std::string> names;
  for (int j = 0; j < n; ++j) names.push_back("x" + std::to_string(j + 1));
  names.push_back("tau");
  if (with_theta) names.push_back("theta");
  names.push_back("lambda");
  return names;
}

// Raises the multiplier variables geometrically until the Schur completion
// succeeds.
void attach_hint(LmiProblem& l, const Vector& x0,
                 const std::vector<int>& multiplier_vars, int lambda_var,
                 double t0) {
  Vector z = Vector::Zero(l.num_vars);
  z.head(x0.size()) = x0;
  double t = std::max(1.0, t0);
  for (int attempt = 0; attempt < 60; ++attempt) {
    for (int v : multiplier_vars) z(v) = t;
    z(lambda_var) = 0.0;
    if (complete_hint_via_schur(l, z, lambda_var)) {
      l.feasible_hint = z;
      return;
    }
    t *= 4.0;
  }
  // no hint; the solver falls back to its phase-I search
}

// A(alpha) for the structured model.
Matrix structured_matrix_at(const StructuredProblem& p, const Vector& alpha) {
  Matrix a = p.a;
  for (int i = 0; i < p.dim_p(); ++i) a += alpha(i) * p.basis_a[i];
  return a;
}

// Full rank cannot be certified over the whole coefficient ball; a fixed
// set of boundary samples catches the gross failures at build time.
void check_full_rank_on_ball(const StructuredProblem& p) {
  require_full_rank(p.a, "structured builder");
  if (p.rho_h <= 0.0) return;
  std::mt19937_64 rng(0x5eed5eedULL);
  std::normal_distribution<double> gauss(0.0, 1.0);
  const int np = p.dim_p();
  for (int s = 0; s < 8; ++s) {
    Vector alpha(np);
    for (int i = 0; i < np; ++i) alpha(i) = gauss(rng);
    const double norm = alpha.norm();
    if (norm == 0.0) continue;
    alpha *= p.rho_h / norm;
    if (!is_full_rank(structured_matrix_at(p, alpha))) {
      throw RankDeficientError(
          "structured builder: A(alpha) loses rank on the sampled "
          "coefficient ball");
    }
  }
}

}  // namespace

void validate(const UnstructuredProblem& p) {
  require_finite(p.a, "data matrix");
  require_finite(p.y, "output vector");
  if (p.a.rows() < p.a.cols() || p.a.cols() < 1) {
    throw InvalidInputError("problem requires m >= n >= 1");
  }
  if (p.y.size() != p.a.rows()) {
    throw InvalidInputError("output vector length must match matrix rows");
  }
  if (!(p.rho_h >= 0.0) || !(p.rho_y >= 0.0)) {
    throw InvalidParameterError("uncertainty radii must be nonnegative");
  }
  if (p.mu && !(*p.mu > 0.0)) {
    throw InvalidParameterError("mu must be positive when present");
  }
}

void validate(const StructuredProblem& p) {
  require_finite(p.a, "data matrix");
  require_finite(p.y, "output vector");
  if (p.a.rows() < p.a.cols() || p.a.cols() < 1) {
    throw InvalidInputError("problem requires m >= n >= 1");
  }
  if (p.y.size() != p.a.rows()) {
    throw InvalidInputError("output vector length must match matrix rows");
  }
  if (p.basis_a.empty() || p.basis_a.size() != p.basis_y.size()) {
    throw InvalidInputError(
        "perturbation bases must be nonempty and of equal length");
  }
  for (const Matrix& ai : p.basis_a) {
    require_finite(ai, "basis matrix");
    if (ai.rows() != p.a.rows() || ai.cols() != p.a.cols()) {
      throw InvalidInputError("basis matrix dimensions must match A");
    }
  }
  for (const Vector& yi : p.basis_y) {
    require_finite(yi, "basis vector");
    if (yi.size() != p.y.size()) {
      throw InvalidInputError("basis vector length must match y");
    }
  }
  if (!(p.rho_h >= 0.0) || !(p.rho_b >= 0.0)) {
    throw InvalidParameterError("uncertainty radii must be nonnegative");
  }
}

Matrix assemble(const LmiProblem& l, const Vector& z) {
  Matrix fz = l.f0;
  for (int k = 0; k < l.num_vars; ++k) fz += z(k) * l.f[k];
  return fz;
}

bool complete_hint_via_schur(const LmiProblem& l, Vector& z, int lambda_var) {
  // with the other entries fixed, F is PD iff its trailing principal block
  // S is PD and the (0,0) entry exceeds v^T S^{-1} v
  z(lambda_var) = 0.0;
  const Matrix fz = assemble(l, z);
  const int n = l.order();
  const Cholesky c = cholesky_factor(fz.bottomRightCorner(n - 1, n - 1));
  if (!c.ok) return false;
  const Vector v = fz.col(0).tail(n - 1);
  z(lambda_var) = v.dot(c.solve(v)) - fz(0, 0) + 1.0;
  return true;
}

void validate(const LmiProblem& l) {
  if (l.num_vars < 1 || static_cast<int>(l.f.size()) != l.num_vars ||
      l.objective.size() != l.num_vars) {
    throw InvalidInputError("LMI problem: inconsistent variable count");
  }
  const int n = l.order();
  int total = 0;
  for (int b : l.block_sizes) total += b;
  if (total != n) {
    throw InvalidInputError("LMI problem: block sizes do not sum to order");
  }
  auto check_sym = [n](const Matrix& m, const char* what) {
    if (m.rows() != n || m.cols() != n) {
      throw InvalidInputError(std::string("LMI problem: ") + what +
                              " has wrong dimensions");
    }
    const double d = (m - m.transpose()).cwiseAbs().maxCoeff();
    if (d > 1e-12 * (1.0 + m.cwiseAbs().maxCoeff())) {
      throw InvalidInputError(std::string("LMI problem: ") + what +
                              " is not symmetric");
    }
  };
  check_sym(l.f0, "constant term");
  for (const Matrix& fk : l.f) check_sym(fk, "coefficient term");
  if (l.feasible_hint && l.feasible_hint->size() != l.num_vars) {
    throw InvalidInputError("LMI problem: hint has wrong dimension");
  }
}

LmiProblem build_unstructured_lmi(const UnstructuredProblem& p,
                                  const std::optional<Vector>& hint_x) {
  validate(p);
  if (p.mu) {
    throw InvalidParameterError(
        "unstructured builder does not take a ridge weight");
  }
  require_full_rank(p.a, "unstructured builder");
  const RegretExpansion e = expand_ls_regret(p.a, p.y);

  const int m = static_cast<int>(p.a.rows());
  const int n = static_cast<int>(p.a.cols());
  const int mn = m * n;
  const int main_order = 1 + m + mn + m;
  const int o2 = 1, o3 = 1 + m, o4 = 1 + m + mn;
  const int total = main_order + 2;  // [tau], [theta] blocks

  LmiProblem l;
  l.num_vars = n + 3;
  const int tau = n, theta = n + 1, lambda = n + 2;
  l.objective = Vector::Zero(l.num_vars);
  l.objective(lambda) = 1.0;
  l.var_names = regret_var_names(n, true);
  l.block_sizes = {main_order, 1, 1};
  l.f0 = Matrix::Zero(total, total);
  l.f.assign(l.num_vars, Matrix::Zero(total, total));

  l.f0(0, 0) = e.nominal_cost;
  for (int i = 0; i < m; ++i) {
    set_sym(l.f0, 0, o2 + i, -p.y(i));
    l.f0(o2 + i, o2 + i) = 1.0;
    set_sym(l.f0, o2 + i, o4 + i, -p.rho_y);
    set_sym(l.f0, 0, o4 + i, p.rho_y * e.lin_output(i));
  }
  for (int j = 0; j < mn; ++j) set_sym(l.f0, 0, o3 + j, p.rho_h * e.lin_matrix(j));

  for (int j = 0; j < n; ++j) {
    Matrix& fx = l.f[j];
    for (int i = 0; i < m; ++i) {
      set_sym(fx, 0, o2 + i, p.a(i, j));
      set_sym(fx, o2 + i, o3 + i * n + j, p.rho_h);
    }
  }
  l.f[tau](0, 0) = -1.0;
  for (int j = 0; j < mn; ++j) l.f[tau](o3 + j, o3 + j) = 1.0;
  l.f[tau](main_order, main_order) = 1.0;
  l.f[theta](0, 0) = -1.0;
  for (int i = 0; i < m; ++i) l.f[theta](o4 + i, o4 + i) = 1.0;
  l.f[theta](main_order + 1, main_order + 1) = 1.0;
  l.f[lambda](0, 0) = 1.0;

  const Vector x0 = hint_x.value_or(pinv(p.a) * p.y);
  const double t0 = 1.0 + std::pow(p.rho_h * x0.norm() + p.rho_y, 2);
  attach_hint(l, x0, {tau, theta}, lambda, t0);
  return l;
}

LmiProblem build_regularized_lmi(const UnstructuredProblem& p,
                                 const std::optional<Vector>& hint_x) {
  validate(p);
  if (!p.mu) {
    throw InvalidParameterError("regularized builder requires a ridge weight");
  }
  const double mu = *p.mu;
  const RegretExpansion e = expand_ridge_regret(p.a, p.y, mu);

  const int m = static_cast<int>(p.a.rows());
  const int n = static_cast<int>(p.a.cols());
  const int mn = m * n;
  const int main_order = 1 + m + n + mn + m;
  const int o2 = 1, oR = 1 + m, o3 = 1 + m + n, o4 = 1 + m + n + mn;
  const int total = main_order + 2;

  LmiProblem l;
  l.num_vars = n + 3;
  const int tau = n, theta = n + 1, lambda = n + 2;
  l.objective = Vector::Zero(l.num_vars);
  l.objective(lambda) = 1.0;
  l.var_names = regret_var_names(n, true);
  l.block_sizes = {main_order, 1, 1};
  l.f0 = Matrix::Zero(total, total);
  l.f.assign(l.num_vars, Matrix::Zero(total, total));

  l.f0(0, 0) = e.nominal_cost;
  for (int i = 0; i < m; ++i) {
    set_sym(l.f0, 0, o2 + i, -p.y(i));
    l.f0(o2 + i, o2 + i) = 1.0;
    set_sym(l.f0, o2 + i, o4 + i, -p.rho_y);
    set_sym(l.f0, 0, o4 + i, p.rho_y * e.lin_output(i));
  }
  // ridge coupling: sqrt(mu) x against an identity block contributes
  // exactly mu ||x||^2 through the Schur complement
  for (int j = 0; j < n; ++j) l.f0(oR + j, oR + j) = 1.0;
  for (int j = 0; j < mn; ++j) set_sym(l.f0, 0, o3 + j, p.rho_h * e.lin_matrix(j));

  const double smu = std::sqrt(mu);
  for (int j = 0; j < n; ++j) {
    Matrix& fx = l.f[j];
    set_sym(fx, 0, oR + j, smu);
    for (int i = 0; i < m; ++i) {
      set_sym(fx, 0, o2 + i, p.a(i, j));
      set_sym(fx, o2 + i, o3 + i * n + j, p.rho_h);
    }
  }
  l.f[tau](0, 0) = -1.0;
  for (int j = 0; j < mn; ++j) l.f[tau](o3 + j, o3 + j) = 1.0;
  l.f[tau](main_order, main_order) = 1.0;
  l.f[theta](0, 0) = -1.0;
  for (int i = 0; i < m; ++i) l.f[theta](o4 + i, o4 + i) = 1.0;
  l.f[theta](main_order + 1, main_order + 1) = 1.0;
  l.f[lambda](0, 0) = 1.0;

  Vector x0;
  if (hint_x) {
    x0 = *hint_x;
  } else {
    const Matrix gram =
        p.a.transpose() * p.a + mu * Matrix::Identity(n, n);
    x0 = solve_psd(gram, Matrix(p.a.transpose() * p.y)).col(0);
  }
  const double t0 = 1.0 + std::pow(p.rho_h * x0.norm() + p.rho_y, 2);
  attach_hint(l, x0, {tau, theta}, lambda, t0);
  return l;
}

LmiProblem build_structured_lmi(const StructuredProblem& p,
                                const std::optional<Vector>& hint_x) {
  validate(p);
  if (p.tied) {
    throw InvalidParameterError(
        "structured builder handles untied coefficients; use the tied "
        "builder");
  }
  check_full_rank_on_ball(p);
  const StructuredExpansion e = expand_structured_regret(p);

  const int m = static_cast<int>(p.a.rows());
  const int n = static_cast<int>(p.a.cols());
  const int np = p.dim_p();
  const int main_order = 1 + m + np + np;
  const int o2 = 1, o3 = 1 + m, o4 = 1 + m + np;
  const int total = main_order + 2;

  LmiProblem l;
  l.num_vars = n + 3;
  const int tau = n, theta = n + 1, lambda = n + 2;
  l.objective = Vector::Zero(l.num_vars);
  l.objective(lambda) = 1.0;
  l.var_names = regret_var_names(n, true);
  l.block_sizes = {main_order, 1, 1};
  l.f0 = Matrix::Zero(total, total);
  l.f.assign(l.num_vars, Matrix::Zero(total, total));

  l.f0(0, 0) = e.nominal_cost;
  for (int i = 0; i < m; ++i) {
    set_sym(l.f0, 0, o2 + i, -p.y(i));
    l.f0(o2 + i, o2 + i) = 1.0;
  }
  for (int i = 0; i < np; ++i) {
    set_sym(l.f0, 0, o3 + i, p.rho_h * e.lin_alpha(i));
    set_sym(l.f0, 0, o4 + i, p.rho_b * e.lin_beta(i));
    for (int r = 0; r < m; ++r) {
      set_sym(l.f0, o2 + r, o4 + i, -p.rho_b * p.basis_y[i](r));
    }
  }
  for (int j = 0; j < n; ++j) {
    Matrix& fx = l.f[j];
    for (int i = 0; i < m; ++i) set_sym(fx, 0, o2 + i, p.a(i, j));
    for (int i = 0; i < np; ++i) {
      for (int r = 0; r < m; ++r) {
        set_sym(fx, o2 + r, o3 + i, p.rho_h * p.basis_a[i](r, j));
      }
    }
  }
  l.f[tau](0, 0) = -1.0;
  for (int i = 0; i < np; ++i) l.f[tau](o3 + i, o3 + i) = 1.0;
  l.f[tau](main_order, main_order) = 1.0;
  l.f[theta](0, 0) = -1.0;
  for (int i = 0; i < np; ++i) l.f[theta](o4 + i, o4 + i) = 1.0;
  l.f[theta](main_order + 1, main_order + 1) = 1.0;
  l.f[lambda](0, 0) = 1.0;

  const Vector x0 = hint_x.value_or(pinv(p.a) * p.y);
  double mx = 0.0, qx = 0.0;
  for (int i = 0; i < np; ++i) {
    mx += (p.basis_a[i] * x0).squaredNorm();
    qx += p.basis_y[i].squaredNorm();
  }
  const double t0 =
      1.0 + std::pow(p.rho_h * std::sqrt(mx) + p.rho_b * std::sqrt(qx), 2);
  attach_hint(l, x0, {tau, theta}, lambda, t0);
  return l;
}

LmiProblem build_tied_lmi(const StructuredProblem& p,
                          const std::optional<Vector>& hint_x) {
  validate(p);
  if (!p.tied) {
    throw InvalidParameterError(
        "tied builder requires tied = true; use the structured builder");
  }
  check_full_rank_on_ball(p);
  const StructuredExpansion e = expand_structured_regret(p);
  const Vector b = e.lin_alpha + e.lin_beta;

  const int m = static_cast<int>(p.a.rows());
  const int n = static_cast<int>(p.a.cols());
  const int np = p.dim_p();
  const int main_order = 1 + m + np;
  const int o2 = 1, o3 = 1 + m;
  const int total = main_order + 1;

  LmiProblem l;
  l.num_vars = n + 2;
  const int tau = n, lambda = n + 1;
  l.objective = Vector::Zero(l.num_vars);
  l.objective(lambda) = 1.0;
  l.var_names = regret_var_names(n, false);
  l.block_sizes = {main_order, 1};
  l.f0 = Matrix::Zero(total, total);
  l.f.assign(l.num_vars, Matrix::Zero(total, total));

  l.f0(0, 0) = e.nominal_cost;
  for (int i = 0; i < m; ++i) {
    set_sym(l.f0, 0, o2 + i, -p.y(i));
    l.f0(o2 + i, o2 + i) = 1.0;
  }
  for (int i = 0; i < np; ++i) {
    set_sym(l.f0, 0, o3 + i, p.rho_h * b(i));
    for (int r = 0; r < m; ++r) {
      set_sym(l.f0, o2 + r, o3 + i, -p.rho_h * p.basis_y[i](r));
    }
  }
  for (int j = 0; j < n; ++j) {
    Matrix& fx = l.f[j];
    for (int i = 0; i < m; ++i) set_sym(fx, 0, o2 + i, p.a(i, j));
    for (int i = 0; i < np; ++i) {
      for (int r = 0; r < m; ++r) {
        set_sym(fx, o2 + r, o3 + i, p.rho_h * p.basis_a[i](r, j));
      }
    }
  }
  l.f[tau](0, 0) = -1.0;
  for (int i = 0; i < np; ++i) l.f[tau](o3 + i, o3 + i) = 1.0;
  l.f[tau](main_order, main_order) = 1.0;
  l.f[lambda](0, 0) = 1.0;

  const Vector x0 = hint_x.value_or(pinv(p.a) * p.y);
  double mx = 0.0;
  for (int i = 0; i < np; ++i) {
    mx += (p.basis_a[i] * x0 - p.basis_y[i]).squaredNorm();
  }
  const double t0 = 1.0 + p.rho_h * p.rho_h * mx;
  attach_hint(l, x0, {tau}, lambda, t0);
  return l;
}

namespace {

void grow(LmiProblem& l, int extra) {
  const int old = l.order();
  Matrix f0 = Matrix::Zero(old + extra, old + extra);
  f0.topLeftCorner(old, old) = l.f0;
  l.f0 = std::move(f0);
  for (Matrix& fk : l.f) {
    Matrix g = Matrix::Zero(old + extra, old + extra);
    g.topLeftCorner(old, old) = fk;
    fk = std::move(g);
  }
}

}  // namespace

void append_soc_epigraph(LmiProblem& l, const Matrix& coeff,
                         const Vector& offset, int bound_var) {
  if (coeff.rows() != offset.size() || coeff.cols() != l.num_vars) {
    throw InvalidInputError("append_soc_epigraph: dimension mismatch");
  }
  if (bound_var < 0 || bound_var >= l.num_vars) {
    throw InvalidInputError("append_soc_epigraph: bad bound variable");
  }
  const int d = static_cast<int>(offset.size());
  const int base = l.order();
  grow(l, d + 1);
  l.block_sizes.push_back(d + 1);
  for (int i = 0; i <= d; ++i) {
    l.f[bound_var](base + i, base + i) += 1.0;
  }
  for (int i = 0; i < d; ++i) {
    set_sym(l.f0, base + i, base + d, offset(i));
    for (int k = 0; k < l.num_vars; ++k) {
      if (coeff(i, k) != 0.0) {
        l.f[k](base + i, base + d) += coeff(i, k);
        l.f[k](base + d, base + i) += coeff(i, k);
      }
    }
  }
}

void append_scalar_block(LmiProblem& l, int var, double scale) {
  if (var < 0 || var >= l.num_vars) {
    throw InvalidInputError("append_scalar_block: bad variable index");
  }
  const int base = l.order();
  grow(l, 1);
  l.block_sizes.push_back(1);
  l.f[var](base, base) += scale;
}

LmiProblem freeze_variables(const LmiProblem& l, const std::vector<int>& idx,
                            const Vector& values) {
  if (static_cast<int>(idx.size()) != values.size()) {
    throw InvalidInputError("freeze_variables: index/value mismatch");
  }
  std::vector<bool> frozen(l.num_vars, false);
  for (int k : idx) {
    if (k < 0 || k >= l.num_vars) {
      throw InvalidInputError("freeze_variables: bad variable index");
    }
    frozen[k] = true;
  }
  for (std::size_t j = 0; j < idx.size(); ++j) {
    if (l.objective(idx[j]) != 0.0) {
      throw InvalidInputError(
          "freeze_variables: frozen variables must have zero objective "
          "weight");
    }
  }

  LmiProblem out;
  out.f0 = l.f0;
  for (std::size_t j = 0; j < idx.size(); ++j) {
    out.f0 += values(static_cast<Eigen::Index>(j)) * l.f[idx[j]];
  }
  out.block_sizes = l.block_sizes;
  out.num_vars = l.num_vars - static_cast<int>(idx.size());
  out.objective = Vector::Zero(out.num_vars);
  int kept = 0;
  bool hint_matches = l.feasible_hint.has_value();
  if (hint_matches) {
    for (std::size_t j = 0; j < idx.size(); ++j) {
      if (std::abs((*l.feasible_hint)(idx[j]) -
                   values(static_cast<Eigen::Index>(j))) > 1e-12) {
        hint_matches = false;
        break;
      }
    }
  }
  Vector hint(out.num_vars);
  for (int k = 0; k < l.num_vars; ++k) {
    if (frozen[k]) continue;
    out.objective(kept) = l.objective(k);
    out.f.push_back(l.f[k]);
    if (!l.var_names.empty()) out.var_names.push_back(l.var_names[k]);
    if (hint_matches) hint(kept) = (*l.feasible_hint)(k);
    ++kept;
  }
  if (hint_matches) out.feasible_hint = hint;
  return out;
}

}  // namespace regls

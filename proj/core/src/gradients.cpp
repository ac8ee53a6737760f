#include "regls/gradients.hpp"

#include <string>

namespace regls {

namespace {

void check_pair(const Matrix& a, const Vector& y) {
  require_finite(a, "data matrix");
  require_finite(y, "output vector");
  if (a.rows() < a.cols()) {
    throw InvalidInputError("data matrix requires rows >= cols");
  }
  if (a.rows() != y.size()) {
    throw InvalidInputError("output vector length must match matrix rows");
  }
}

void check_mu(double mu) {
  if (!(mu > 0.0)) {
    throw InvalidParameterError("mu must be positive, got " +
                                std::to_string(mu));
  }
}

// (I + mu^{-1} A A^T)^{-1} y
Vector ridge_kernel_apply(const Matrix& a, const Vector& y, double mu) {
  const Matrix s = Matrix::Identity(a.rows(), a.rows()) +
                   (1.0 / mu) * (a * a.transpose());
  return solve_psd(s, Matrix(y)).col(0);
}

}  // namespace

double ls_optimal_cost(const Matrix& a, const Vector& y) {
  check_pair(a, y);
  const Vector py = projector_perp(a) * y;
  return y.dot(py);
}

double ridge_optimal_cost(const Matrix& a, const Vector& y, double mu) {
  check_pair(a, y);
  check_mu(mu);
  return y.dot(ridge_kernel_apply(a, y, mu));
}

Matrix ls_cost_grad_matrix(const Matrix& a, const Vector& y) {
  check_pair(a, y);
  require_full_rank(a, "ls_cost_grad_matrix");
  const Vector u = projector_perp(a) * y;           // P_A y
  const Vector v = solve_psd(a.transpose() * a, Matrix(a.transpose() * y))
                       .col(0);                     // (A^T A)^{-1} A^T y
  return -2.0 * u * v.transpose();
}

Vector ls_cost_grad_output(const Matrix& a, const Vector& y) {
  check_pair(a, y);
  require_full_rank(a, "ls_cost_grad_output");
  return 2.0 * (projector_perp(a) * y);
}

Matrix ridge_cost_grad_matrix(const Matrix& a, const Vector& y, double mu) {
  check_pair(a, y);
  check_mu(mu);
  const Vector u = ridge_kernel_apply(a, y, mu);
  return (-2.0 / mu) * u * (u.transpose() * a);
}

Vector ridge_cost_grad_output(const Matrix& a, const Vector& y, double mu) {
  check_pair(a, y);
  check_mu(mu);
  return 2.0 * ridge_kernel_apply(a, y, mu);
}

double structured_cost_grad_alpha(const StructuredProblem& p, int i) {
  check_pair(p.a, p.y);
  require_full_rank(p.a, "structured_cost_grad_alpha");
  const Vector py = projector_perp(p.a) * p.y;
  const Vector apy = pinv(p.a) * p.y;
  return -2.0 * py.dot(p.basis_a.at(i) * apy);
}

double structured_cost_grad_beta(const StructuredProblem& p, int i) {
  check_pair(p.a, p.y);
  require_full_rank(p.a, "structured_cost_grad_beta");
  const Vector py = projector_perp(p.a) * p.y;
  return 2.0 * py.dot(p.basis_y.at(i));
}

RegretExpansion expand_ls_regret(const Matrix& a, const Vector& y) {
  RegretExpansion e;
  e.grad_matrix = ls_cost_grad_matrix(a, y);
  e.grad_output = ls_cost_grad_output(a, y);
  e.nominal_cost = ls_optimal_cost(a, y);
  e.lin_matrix = 0.5 * vec_rows(e.grad_matrix);
  e.lin_output = 0.5 * e.grad_output;
  return e;
}

RegretExpansion expand_ridge_regret(const Matrix& a, const Vector& y,
                                    double mu) {
  RegretExpansion e;
  e.grad_matrix = ridge_cost_grad_matrix(a, y, mu);
  e.grad_output = ridge_cost_grad_output(a, y, mu);
  e.nominal_cost = ridge_optimal_cost(a, y, mu);
  e.lin_matrix = 0.5 * vec_rows(e.grad_matrix);
  e.lin_output = 0.5 * e.grad_output;
  return e;
}

StructuredExpansion expand_structured_regret(const StructuredProblem& p) {
  check_pair(p.a, p.y);
  require_full_rank(p.a, "expand_structured_regret");
  const int np = p.dim_p();
  StructuredExpansion e;
  e.nominal_cost = ls_optimal_cost(p.a, p.y);
  e.lin_alpha = Vector::Zero(np);
  e.lin_beta = Vector::Zero(np);
  const Vector py = projector_perp(p.a) * p.y;
  const Vector apy = pinv(p.a) * p.y;
  for (int i = 0; i < np; ++i) {
    e.lin_alpha(i) = -py.dot(p.basis_a[i] * apy);  // 0.5 * grad_alpha
    e.lin_beta(i) = py.dot(p.basis_y[i]);          // 0.5 * grad_beta
  }
  return e;
}

}  // namespace regls

#pragma once

#include "regls/linalg.hpp"
#include "regls/problem.hpp"

namespace regls {

// Optimal-cost functions of the nominal data. ls_optimal_cost is the
// smallest attainable squared residual, ridge_optimal_cost the smallest
// attainable ridge cost ||Aw - y||^2 + mu ||w||^2.

double ls_optimal_cost(const Matrix& a, const Vector& y);
double ridge_optimal_cost(const Matrix& a, const Vector& y, double mu);

/// d/dA of ls_optimal_cost: -2 (I - A A^+) y y^T A (A^T A)^{-1}.
/// Requires full-rank A with m >= n.
Matrix ls_cost_grad_matrix(const Matrix& a, const Vector& y);

/// d/dy of ls_optimal_cost: 2 (I - A A^+) y.
Vector ls_cost_grad_output(const Matrix& a, const Vector& y);

/// d/dA of ridge_optimal_cost:
/// -2 mu^{-1} (I + mu^{-1} A A^T)^{-1} y y^T (I + mu^{-1} A A^T)^{-1} A.
Matrix ridge_cost_grad_matrix(const Matrix& a, const Vector& y, double mu);

/// d/dy of ridge_optimal_cost: 2 (I + mu^{-1} A A^T)^{-1} y.
Vector ridge_cost_grad_output(const Matrix& a, const Vector& y, double mu);

/// d/d alpha_i of the structured optimal cost at alpha = beta = 0:
/// -2 y^T P_A basis_a[i] A^+ y.
double structured_cost_grad_alpha(const StructuredProblem& p, int i);

/// d/d beta_i at alpha = beta = 0: 2 y^T P_A basis_y[i].
double structured_cost_grad_beta(const StructuredProblem& p, int i);

/// First-order expansion of the optimal cost around the nominal data.
/// lin_matrix and lin_output are the halved, row-stacked coefficients the
/// LMI builders consume: the symmetrized pair c^T d + d^T c + b^T e + e^T b
/// reproduces exactly <grad_matrix, dA> + grad_output^T dy.
struct RegretExpansion {
  double nominal_cost = 0.0;  // optimal cost at the nominal data, >= 0
  Vector lin_matrix;          // mn-vector, 0.5 * vec_rows(grad_matrix)
  Vector lin_output;          // m-vector,  0.5 * grad_output
  Matrix grad_matrix;         // m-by-n full gradient
  Vector grad_output;         // m-vector full gradient
};

/// Structured counterpart over the coefficient vectors (alpha, beta).
struct StructuredExpansion {
  double nominal_cost = 0.0;
  Vector lin_alpha;  // p-vector, halved alpha coefficients
  Vector lin_beta;   // p-vector, halved beta coefficients
};

RegretExpansion expand_ls_regret(const Matrix& a, const Vector& y);
RegretExpansion expand_ridge_regret(const Matrix& a, const Vector& y, double mu);
StructuredExpansion expand_structured_regret(const StructuredProblem& p);

}  // namespace regls

#pragma once

#include <optional>
#include <string>
#include <vector>

#include "regls/gradients.hpp"
#include "regls/problem.hpp"

namespace regls {

/// Inequality-form SDP data: minimize objective^T z subject to
///   F(z) = f0 + sum_k z[k] * f[k]  >=  0,
/// where f0 and every f[k] are symmetric and block diagonal with the layout
/// recorded in block_sizes. `feasible_hint`, when present, is a strictly
/// feasible point supplied by the builder.
struct LmiProblem {
  int num_vars = 0;
  Vector objective;
  Matrix f0;
  std::vector<Matrix> f;
  std::vector<int> block_sizes;
  std::vector<std::string> var_names;
  std::optional<Vector> feasible_hint;

  int order() const { return static_cast<int>(f0.rows()); }
};

Matrix assemble(const LmiProblem& l, const Vector& z);
void validate(const LmiProblem& l);

// Regret-minimax builders. Decision variables are ordered
// (x_1..x_n, tau, theta, lambda); the tied builder drops theta. Each builder
// attaches a strictly feasible hint whose x-part is `hint_x` (least-squares
// or ridge solution when omitted) and appends 1x1 blocks [tau] >= 0,
// [theta] >= 0 after the main block.

LmiProblem build_unstructured_lmi(const UnstructuredProblem& p,
                                  const std::optional<Vector>& hint_x = {});
LmiProblem build_regularized_lmi(const UnstructuredProblem& p,
                                 const std::optional<Vector>& hint_x = {});
LmiProblem build_structured_lmi(const StructuredProblem& p,
                                const std::optional<Vector>& hint_x = {});
LmiProblem build_tied_lmi(const StructuredProblem& p,
                          const std::optional<Vector>& hint_x = {});

/// Appends the arrow block [[t I, r(z)], [r(z)^T, t]] >= 0 encoding
/// ||r(z)|| <= t, where r(z) = offset + coeff * z is affine in the decision
/// vector and t is the variable at index bound_var.
void append_soc_epigraph(LmiProblem& l, const Matrix& coeff,
                         const Vector& offset, int bound_var);

/// Appends the 1x1 block [z_k] >= 0.
void append_scalar_block(LmiProblem& l, int var, double scale = 1.0);

/// Substitutes fixed values for a subset of variables, producing a smaller
/// problem over the remaining ones. Frozen variables must carry zero
/// objective weight. A feasible hint survives when its frozen components
/// match `values`.
LmiProblem freeze_variables(const LmiProblem& l, const std::vector<int>& idx,
                            const Vector& values);

/// Completes a candidate point into a strictly feasible one by raising the
/// variable at `lambda_var`, which must enter F only through the (0,0)
/// entry. Returns false when no value of that variable can work at the
/// given remaining entries.
bool complete_hint_via_schur(const LmiProblem& l, Vector& z, int lambda_var);

}  // namespace regls

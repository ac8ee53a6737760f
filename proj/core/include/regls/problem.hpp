#pragma once

#include <optional>
#include <vector>

#include "regls/linalg.hpp"

namespace regls {

/// Least-squares data (A, y) with Frobenius/Euclidean uncertainty radii.
/// `mu` is the ridge weight; present only for the regularized variants.
struct UnstructuredProblem {
  Matrix a;
  Vector y;
  double rho_h = 0.0;  // bound on ||dA||_F
  double rho_y = 0.0;  // bound on ||dy||
  std::optional<double> mu;
};

/// Perturbations restricted to known directions:
///   dA = sum_i alpha_i * basis_a[i],  dy = sum_i beta_i * basis_y[i],
/// with ||alpha|| <= rho_h and ||beta|| <= rho_b. When `tied` the two
/// coefficient vectors coincide (beta = alpha) and rho_h is the single bound.
struct StructuredProblem {
  Matrix a;
  Vector y;
  std::vector<Matrix> basis_a;
  std::vector<Vector> basis_y;
  double rho_h = 0.0;
  double rho_b = 0.0;
  bool tied = false;

  int dim_p() const { return static_cast<int>(basis_a.size()); }
};

/// Structural checks (dimensions, radii, mu range). Rank checks live in the
/// builders, which is where full rank is actually required.
void validate(const UnstructuredProblem& p);
void validate(const StructuredProblem& p);

}  // namespace regls

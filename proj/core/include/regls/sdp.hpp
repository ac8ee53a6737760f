#pragma once

#include <optional>
#include <vector>

#include "regls/lmi.hpp"

namespace regls {

enum class SolveStatus {
  kOptimal,
  kMaxIterations,
  kInfeasible,
  kNumericalFailure,
};

const char* to_string(SolveStatus s);

struct SolverConfig {
  double tol_gap = 1e-7;          // target barrier duality-gap bound
  double barrier_growth = 10.0;   // outer multiplier on t
  int max_outer = 60;
  int max_newton = 50;            // per centering
  double line_search_shrink = 0.5;
};

struct SdpSolution {
  Vector z_star;
  double objective_value = 0.0;
  SolveStatus status = SolveStatus::kNumericalFailure;
  int iterations = 0;      // total Newton steps
  double min_eig = 0.0;    // smallest eigenvalue of F(z_star)
  double gap_estimate = 0.0;
  std::vector<double> outer_objectives;  // objective after each centering
};

/// Smallest eigenvalue of a symmetric matrix.
double min_eigenvalue(const Matrix& s);

/// Returns a point with F(z) strictly positive definite, trying `hint`
/// first and otherwise running a phase-I barrier on max s, F(z) - sI >= 0.
/// nullopt means the LMI has no strictly feasible point (s* <= 0).
std::optional<Vector> find_strictly_feasible(const LmiProblem& l,
                                             const std::optional<Vector>& hint,
                                             const SolverConfig& cfg = {});

/// Log-det barrier interior-point solve of an inequality-form SDP.
/// Deterministic: identical inputs produce identical iterates.
SdpSolution solve(const LmiProblem& l, const SolverConfig& cfg = {});

}  // namespace regls

#pragma once

#include <optional>
#include <string>

#include "regls/problem.hpp"
#include "regls/sdp.hpp"

namespace regls {

enum class Method {
  kLs,        // LS     least squares on the nominal data
  kRls,       // RLS    ridge on the nominal data
  kCls,       // c-LS   minimax regret, unstructured
  kCrls,      // c-RLS  minimax regret, regularized
  kScls,      // sc-LS  minimax regret, structured
  kRlsRobust, // r-LS   worst-case residual baseline
  kSrls,      // sr-LS  worst-case residual, structured
  kRrls,      // r-RLS  worst-case residual plus ridge baseline
};

const char* method_name(Method m);
std::optional<Method> parse_method(const std::string& tag);
bool is_minimax(Method m);

struct Estimate {
  Vector x_hat;
  Method method = Method::kLs;
  std::optional<double> regret_bound;  // lambda* for the minimax methods
  SolveStatus solver_status = SolveStatus::kOptimal;
  int iterations = 0;
  double min_eig = 0.0;
};

/// Solver settings used by the estimators: tighter gap than the library
/// default so zero-radius collapses hold to ~1e-8 in x.
SolverConfig estimator_config();

Estimate ls_solve(const Matrix& a, const Vector& y);
Estimate rls_solve(const Matrix& a, const Vector& y, double mu);

/// Minimax-regret estimators (SDP-backed). Throw SolverError when the
/// underlying solve does not reach Optimal.
Estimate cls_solve(const UnstructuredProblem& p,
                   const SolverConfig& cfg = estimator_config());
Estimate crls_solve(const UnstructuredProblem& p,
                    const SolverConfig& cfg = estimator_config());
Estimate scls_solve(const StructuredProblem& p,
                    const SolverConfig& cfg = estimator_config());

/// Worst-case-residual baselines.
Estimate rls_robust(const UnstructuredProblem& p,
                    const SolverConfig& cfg = estimator_config());
Estimate srls_solve(const StructuredProblem& p,
                    const SolverConfig& cfg = estimator_config());
Estimate rrls_solve(const UnstructuredProblem& p,
                    const SolverConfig& cfg = estimator_config());

}  // namespace regls

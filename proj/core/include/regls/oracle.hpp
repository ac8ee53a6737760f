#pragma once

#include <cstdint>

#include "regls/estimators.hpp"
#include "regls/gradients.hpp"
#include "regls/problem.hpp"

namespace regls {

enum class SampleMode { kBoundary, kUniform };

const char* to_string(SampleMode m);

/// A perturbation drawn inside (or on) the uncertainty balls.
struct PerturbationSample {
  Matrix delta_a;
  Vector delta_y;
};

struct StructuredSample {
  Vector alpha;
  Vector beta;
};

/// Draws a vector of the given dimension from the radius-ball: Gaussian
/// direction normalized to the sphere, scaled by u^(1/dim) in uniform mode.
/// Deterministic given the seed.
Vector sample_ball(int dim, double radius, SampleMode mode, std::uint64_t seed);

PerturbationSample sample_unstructured(int rows, int cols, double rho_h,
                                       double rho_y, SampleMode mode,
                                       std::uint64_t seed);
StructuredSample sample_structured(int p, double rho_h, double rho_b,
                                   bool tied, SampleMode mode,
                                   std::uint64_t seed);

/// Exact regret of x under the realized perturbation: the (ridge) cost of x
/// on the perturbed data minus the smallest attainable (ridge) cost there.
/// Throws RankDeficientError if the perturbed matrix loses rank.
double regret_exact(const UnstructuredProblem& p, const Vector& x,
                    const PerturbationSample& s);
double regret_exact(const StructuredProblem& p, const Vector& x,
                    const StructuredSample& s);

/// Regret with the optimal-cost term replaced by its first-order expansion;
/// this is the quantity the minimax estimators bound.
double regret_linearized(const RegretExpansion& e, const UnstructuredProblem& p,
                         const Vector& x, const PerturbationSample& s);
double regret_linearized(const StructuredExpansion& e,
                         const StructuredProblem& p, const Vector& x,
                         const StructuredSample& s);

/// Sampled lower bound on the worst-case linearized regret: best of
/// n_samples boundary draws, refined by projected gradient ascent.
double worst_case_lb(const UnstructuredProblem& p, const Vector& x,
                     int n_samples, std::uint64_t seed);
double worst_case_lb(const StructuredProblem& p, const Vector& x,
                     int n_samples, std::uint64_t seed);

/// Certified upper bound on the worst-case linearized regret at fixed x:
/// the estimator LMI with x frozen, minimized over the multipliers only.
double worst_case_ub(const UnstructuredProblem& p, const Vector& x,
                     const SolverConfig& cfg = estimator_config());
double worst_case_ub(const StructuredProblem& p, const Vector& x,
                     const SolverConfig& cfg = estimator_config());

}  // namespace regls

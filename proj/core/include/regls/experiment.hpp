#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "regls/estimators.hpp"
#include "regls/oracle.hpp"

namespace regls {

/// Raised for malformed or invalid experiment/problem configs; the CLI maps
/// it to exit code 2.
class ConfigError : public Error {
 public:
  using Error::Error;
};

enum class ExpMode { kUnstructured, kRegularized, kStructured };

const char* to_string(ExpMode m);

struct SweepSpec {
  double rho_from = 0.0;
  double rho_to = 0.0;
  int steps = 1;
};

enum class StructuredKind { kToeplitz, kGeneric };

struct StructuredSpec {
  int p = 0;                    // basis size (derived for toeplitz)
  StructuredKind kind = StructuredKind::kToeplitz;
  int filter_len = 3;
  double alpha_bound_rel = 0.4; // ||alpha|| bound relative to ||A||_F
  bool tied = true;
};

struct ExperimentConfig {
  ExpMode mode = ExpMode::kUnstructured;
  int m = 0;
  int n = 0;
  int trials = 1;
  double rho_h = 0.0;
  double rho_y = 0.0;
  std::optional<double> mu;
  std::optional<SweepSpec> sweep;
  std::optional<StructuredSpec> structured;
  std::vector<Method> methods;
  std::uint64_t seed = 1;
  SampleMode sample_mode = SampleMode::kUniform;
};

/// Strict JSON parse: unknown fields are rejected with a field diagnostic.
ExperimentConfig parse_experiment_config(const std::string& json_text);
void validate(const ExperimentConfig& cfg);

using Instance = std::variant<UnstructuredProblem, StructuredProblem>;

/// Deterministic instance generation. Unstructured/regularized: standard
/// normal entries rescaled to ||A||_F = 1 and ||y|| = 1. Structured
/// Toeplitz: convolution matrix of a random +-1 sequence, y the filtered
/// output plus 10% observation noise, shift-matrix perturbation basis.
Instance gen_instance(const ExperimentConfig& cfg, std::uint64_t seed);

struct TrialResult {
  int trial_id = 0;
  Method method = Method::kLs;
  double error = 0.0;  // squared residual on the perturbed system
  std::optional<double> regret_bound;
  std::uint64_t seed_used = 0;
  bool ok = true;
};

struct MethodSummary {
  Method method = Method::kLs;
  double mean_error = 0.0;
  double max_error = 0.0;
  std::vector<double> sorted_errors;
  int trials_ok = 0;
};

struct TrialRun {
  std::vector<TrialResult> rows;
  std::vector<MethodSummary> summaries;
};

/// Runs cfg.trials independent perturbations of one nominal instance.
/// Estimates are computed once per method on the nominal data; trial t uses
/// the RNG stream seeded with cfg.seed + t (t = 1..trials).
TrialRun run_trials(const ExperimentConfig& cfg);

struct SweepRow {
  double rho = 0.0;
  Method method = Method::kLs;
  double mean_error = 0.0;
  double max_error = 0.0;
  int trials = 0;
};

struct SweepRun {
  std::vector<SweepRow> rows;
};

/// Repeats run_trials over the sweep grid with rho_h = rho_y = rho
/// (structured mode: alpha_bound_rel = rho).
SweepRun run_sweep(const ExperimentConfig& cfg);

/// 17-significant-digit float formatting used in all CSV output.
std::string format_double(double v);

void write_trials_csv(std::ostream& out, const ExperimentConfig& cfg,
                      const TrialRun& run);
void write_sweep_csv(std::ostream& out, const ExperimentConfig& cfg,
                     const SweepRun& run);

}  // namespace regls

#include <CLI11.hpp>
#include <cmath>
#include <fstream>
#include <iostream>
#include <json.hpp>
#include <optional>
#include <sstream>
#include <string>

#include "regls/experiment.hpp"

using nlohmann::json;
using namespace regls;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitSolver = 3;

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot read file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw SolverError("cannot write file: " + path);
  out << content;
}

Matrix parse_matrix(const json& j, const std::string& field) {
  if (!j.is_array() || j.empty() || !j[0].is_array()) {
    throw ConfigError("field \"" + field + "\" must be a 2-d array");
  }
  const int rows = static_cast<int>(j.size());
  const int cols = static_cast<int>(j[0].size());
  Matrix m(rows, cols);
  for (int i = 0; i < rows; ++i) {
    if (!j[i].is_array() || static_cast<int>(j[i].size()) != cols) {
      throw ConfigError("field \"" + field + "\" has ragged rows");
    }
    for (int k = 0; k < cols; ++k) {
      if (!j[i][k].is_number()) {
        throw ConfigError("field \"" + field + "\" must contain numbers");
      }
      m(i, k) = j[i][k].get<double>();
    }
  }
  return m;
}

Vector parse_vector(const json& j, const std::string& field) {
  if (!j.is_array()) {
    throw ConfigError("field \"" + field + "\" must be an array");
  }
  Vector v(static_cast<int>(j.size()));
  for (int i = 0; i < v.size(); ++i) {
    if (!j[i].is_number()) {
      throw ConfigError("field \"" + field + "\" must contain numbers");
    }
    v(i) = j[i].get<double>();
  }
  return v;
}

struct ProblemInput {
  UnstructuredProblem unstructured;
  std::optional<StructuredProblem> structured;
};

ProblemInput parse_problem(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("problem file is not valid JSON: ") +
                      e.what());
  }
  if (!j.is_object()) throw ConfigError("problem root must be a JSON object");
  for (auto it = j.begin(); it != j.end(); ++it) {
    const std::string& k = it.key();
    if (k != "A" && k != "y" && k != "rho_h" && k != "rho_y" && k != "mu" &&
        k != "structured") {
      throw ConfigError("unknown field \"" + k + "\" in problem");
    }
  }
  for (const char* req : {"A", "y"}) {
    if (!j.contains(req)) {
      throw ConfigError(std::string("problem field \"") + req +
                        "\" is required");
    }
  }

  ProblemInput in;
  in.unstructured.a = parse_matrix(j.at("A"), "A");
  in.unstructured.y = parse_vector(j.at("y"), "y");
  in.unstructured.rho_h = j.value("rho_h", 0.0);
  in.unstructured.rho_y = j.value("rho_y", 0.0);
  if (j.contains("mu")) in.unstructured.mu = j.at("mu").get<double>();

  if (j.contains("structured")) {
    const json& js = j.at("structured");
    if (!js.is_object()) throw ConfigError("\"structured\" must be an object");
    for (auto it = js.begin(); it != js.end(); ++it) {
      const std::string& k = it.key();
      if (k != "basis_a" && k != "basis_y" && k != "tied") {
        throw ConfigError("unknown field \"" + k + "\" in structured");
      }
    }
    StructuredProblem sp;
    sp.a = in.unstructured.a;
    sp.y = in.unstructured.y;
    sp.rho_h = in.unstructured.rho_h;
    sp.rho_b = in.unstructured.rho_y;
    sp.tied = js.value("tied", true);
    if (sp.tied) sp.rho_b = sp.rho_h;
    if (!js.contains("basis_a") || !js.contains("basis_y")) {
      throw ConfigError("structured requires basis_a and basis_y");
    }
    for (const json& ja : js.at("basis_a")) {
      sp.basis_a.push_back(parse_matrix(ja, "basis_a"));
    }
    for (const json& jy : js.at("basis_y")) {
      sp.basis_y.push_back(parse_vector(jy, "basis_y"));
    }
    in.structured = std::move(sp);
  }
  return in;
}

Estimate dispatch_solve(Method method, const ProblemInput& in) {
  const bool needs_structure = method == Method::kScls || method == Method::kSrls;
  if (needs_structure && !in.structured) {
    throw ConfigError(std::string("method ") + method_name(method) +
                      " requires the \"structured\" problem section");
  }
  const bool needs_mu = method == Method::kRls || method == Method::kCrls ||
                        method == Method::kRrls;
  if (needs_mu && !in.unstructured.mu) {
    throw ConfigError(std::string("method ") + method_name(method) +
                      " requires \"mu\"");
  }
  const bool rejects_mu = method == Method::kCls || method == Method::kRlsRobust;
  if (rejects_mu && in.unstructured.mu) {
    throw ConfigError(std::string("method ") + method_name(method) +
                      " does not take \"mu\"");
  }
  switch (method) {
    case Method::kLs:
      return ls_solve(in.unstructured.a, in.unstructured.y);
    case Method::kRls:
      return rls_solve(in.unstructured.a, in.unstructured.y,
                       *in.unstructured.mu);
    case Method::kCls:
      return cls_solve(in.unstructured);
    case Method::kCrls:
      return crls_solve(in.unstructured);
    case Method::kRlsRobust:
      return rls_robust(in.unstructured);
    case Method::kRrls:
      return rrls_solve(in.unstructured);
    case Method::kScls:
      return scls_solve(*in.structured);
    case Method::kSrls:
      return srls_solve(*in.structured);
  }
  throw ConfigError("unreachable method");
}

std::string estimate_to_json(const Estimate& e) {
  nlohmann::ordered_json out;
  out["method"] = method_name(e.method);
  out["x_hat"] = std::vector<double>(e.x_hat.data(),
                                     e.x_hat.data() + e.x_hat.size());
  if (e.regret_bound) out["regret_bound"] = *e.regret_bound;
  out["solver"] = {{"status", to_string(e.solver_status)},
                   {"iterations", e.iterations},
                   {"min_eig", e.min_eig}};
  return out.dump(2) + "\n";
}

void emit(const std::string& out_path, const std::string& content) {
  if (out_path.empty()) {
    std::cout << content;
  } else {
    write_file(out_path, content);
  }
}

int run_selftest() {
  int failures = 0;
  const auto report = [&](const char* name, bool pass) {
    std::cout << (pass ? "PASS " : "FAIL ") << name << "\n";
    if (!pass) ++failures;
  };

  {
    Matrix a(4, 2);
    for (int i = 0; i < 4; ++i)
      for (int j = 0; j < 2; ++j) a(i, j) = std::sin(1.0 + i + 2.0 * j);
    Vector x(2);
    x << 0.3, -1.2;
    const Vector lhs = kron_id_rowvec(x, 4) * vec_rows(a);
    report("kron/vec identity", (lhs - a * x).norm() <= 1e-12);

    const Matrix ap = pinv(a);
    report("pseudo-inverse identities",
           (a * ap * a - a).norm() <= 1e-9 && (ap * a * ap - ap).norm() <= 1e-9);
  }
  {
    LmiProblem l;
    l.num_vars = 1;
    l.objective = Vector::Ones(1);
    l.f0 = Matrix::Zero(2, 2);
    l.f0(0, 1) = 1.0;
    l.f0(1, 0) = 1.0;
    l.f.assign(1, Matrix::Identity(2, 2));
    l.block_sizes = {2};
    const SdpSolution s = solve(l);
    report("arrow LMI solve",
           s.status == SolveStatus::kOptimal &&
               std::abs(s.objective_value - 1.0) <= 1e-6);
  }
  {
    UnstructuredProblem p;
    p.a = Matrix(3, 2);
    p.a << 1.0, 0.2, -0.4, 1.1, 0.7, -0.3;
    p.y = Vector(3);
    p.y << 0.5, -1.0, 0.25;
    p.rho_h = 0.0;
    p.rho_y = 0.0;
    const Estimate e = cls_solve(p);
    report("zero-radius collapse",
           (e.x_hat - pinv(p.a) * p.y).norm() <= 1e-6);

    p.rho_h = 0.3;
    p.rho_y = 0.3;
    const Estimate er = cls_solve(p);
    const double ub = worst_case_ub(p, er.x_hat);
    report("certificate consistency", std::abs(ub - *er.regret_bound) <= 2e-6);
  }
  std::cout << (failures == 0 ? "selftest ok\n" : "selftest FAILED\n");
  return failures == 0 ? kExitOk : kExitSolver;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"robust least-squares estimation toolkit"};
  app.require_subcommand(1);

  std::string config_path, out_path, method_tag, sample_mode_flag;
  long long seed_flag = -1;

  CLI::App* solve_cmd =
      app.add_subcommand("solve", "estimate x from a problem JSON file");
  solve_cmd->add_option("--config", config_path, "problem JSON path")
      ->required();
  solve_cmd->add_option("--method", method_tag,
                        "estimator tag (LS, RLS, c-LS, c-RLS, sc-LS, r-LS, "
                        "sr-LS, r-RLS)")
      ->required();
  solve_cmd->add_option("--out", out_path, "output JSON path (default stdout)");

  CLI::App* exp_cmd = app.add_subcommand(
      "experiment", "run Monte-Carlo trials from a config, emit CSV");
  exp_cmd->add_option("--config", config_path, "experiment config JSON path")
      ->required();
  exp_cmd->add_option("--out", out_path, "output CSV path (default stdout)");
  exp_cmd->add_option("--seed", seed_flag, "override the config seed");
  exp_cmd->add_option("--sample-mode", sample_mode_flag,
                      "override sampling: boundary|uniform");

  CLI::App* sweep_cmd = app.add_subcommand(
      "sweep", "run trials over a radius grid, emit CSV");
  sweep_cmd->add_option("--config", config_path, "experiment config JSON path")
      ->required();
  sweep_cmd->add_option("--out", out_path, "output CSV path (default stdout)");
  sweep_cmd->add_option("--seed", seed_flag, "override the config seed");
  sweep_cmd->add_option("--sample-mode", sample_mode_flag,
                        "override sampling: boundary|uniform");

  CLI::App* selftest_cmd =
      app.add_subcommand("selftest", "run built-in invariant checks");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitConfig;
  }

  try {
    if (selftest_cmd->parsed()) return run_selftest();

    if (solve_cmd->parsed()) {
      const auto method = parse_method(method_tag);
      if (!method) throw ConfigError("unknown method tag: " + method_tag);
      const ProblemInput in = parse_problem(read_file(config_path));
      const Estimate e = dispatch_solve(*method, in);
      emit(out_path, estimate_to_json(e));
      return kExitOk;
    }

    ExperimentConfig cfg = parse_experiment_config(read_file(config_path));
    if (seed_flag >= 0) cfg.seed = static_cast<std::uint64_t>(seed_flag);
    if (!sample_mode_flag.empty()) {
      if (sample_mode_flag == "boundary") {
        cfg.sample_mode = SampleMode::kBoundary;
      } else if (sample_mode_flag == "uniform") {
        cfg.sample_mode = SampleMode::kUniform;
      } else {
        throw ConfigError("--sample-mode must be boundary or uniform");
      }
    }

    std::ostringstream csv;
    if (exp_cmd->parsed()) {
      const TrialRun run = run_trials(cfg);
      write_trials_csv(csv, cfg, run);
    } else if (sweep_cmd->parsed()) {
      if (!cfg.sweep) throw ConfigError("config field \"sweep\": is required");
      const SweepRun run = run_sweep(cfg);
      write_sweep_csv(csv, cfg, run);
    }
    emit(out_path, csv.str());
    return kExitOk;
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const InvalidInputError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const InvalidParameterError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const Error& e) {
    std::cerr << "solver error: " << e.what() << "\n";
    return kExitSolver;
  }
}

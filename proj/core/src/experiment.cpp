#include "regls/experiment.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <limits>
#include <ostream>
#include <random>

#include <json.hpp>

namespace regls {

using nlohmann::json;

const char* to_string(ExpMode m) {
  switch (m) {
    case ExpMode::kUnstructured: return "unstructured";
    case ExpMode::kRegularized: return "regularized";
    case ExpMode::kStructured: return "structured";
  }
  return "?";
}

namespace {

[[noreturn]] void config_fail(const std::string& field,
                              const std::string& detail) {
  throw ConfigError("config field \"" + field + "\": " + detail);
}

double get_number(const json& j, const std::string& field) {
  if (!j.at(field).is_number()) config_fail(field, "must be a number");
  return j.at(field).get<double>();
}

int get_int(const json& j, const std::string& field) {
  if (!j.at(field).is_number_integer()) config_fail(field, "must be an integer");
  return j.at(field).get<int>();
}

void check_known_fields(const json& j, const std::vector<std::string>& known,
                        const std::string& where) {
  for (auto it = j.begin(); it != j.end(); ++it) {
    if (std::find(known.begin(), known.end(), it.key()) == known.end()) {
      throw ConfigError("unknown field \"" + it.key() + "\" in " + where);
    }
  }
}

}  // namespace

ExperimentConfig parse_experiment_config(const std::string& json_text) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
  if (!j.is_object()) throw ConfigError("config root must be a JSON object");
  check_known_fields(j,
                     {"mode", "m", "n", "trials", "rho_h", "rho_y", "mu",
                      "sweep", "structured_spec", "methods", "seed",
                      "sample_mode"},
                     "config");
  for (const char* req : {"mode", "m", "n", "trials", "methods", "seed"}) {
    if (!j.contains(req)) config_fail(req, "is required");
  }

  ExperimentConfig cfg;
  {
    const std::string mode = j.at("mode").is_string()
                                 ? j.at("mode").get<std::string>()
                                 : std::string();
    if (mode == "unstructured") cfg.mode = ExpMode::kUnstructured;
    else if (mode == "regularized") cfg.mode = ExpMode::kRegularized;
    else if (mode == "structured") cfg.mode = ExpMode::kStructured;
    else config_fail("mode", "must be unstructured|regularized|structured");
  }
  cfg.m = get_int(j, "m");
  cfg.n = get_int(j, "n");
  cfg.trials = get_int(j, "trials");
  cfg.rho_h = j.contains("rho_h") ? get_number(j, "rho_h") : 0.0;
  cfg.rho_y = j.contains("rho_y") ? get_number(j, "rho_y") : 0.0;
  if (j.contains("mu")) cfg.mu = get_number(j, "mu");
  if (j.contains("seed")) {
    if (!j.at("seed").is_number_integer() || j.at("seed").get<long long>() < 0) {
      config_fail("seed", "must be a nonnegative integer");
    }
    cfg.seed = j.at("seed").get<std::uint64_t>();
  }
  if (j.contains("sample_mode")) {
    const std::string sm = j.at("sample_mode").is_string()
                               ? j.at("sample_mode").get<std::string>()
                               : std::string();
    if (sm == "boundary") cfg.sample_mode = SampleMode::kBoundary;
    else if (sm == "uniform") cfg.sample_mode = SampleMode::kUniform;
    else config_fail("sample_mode", "must be boundary|uniform");
  }
  if (!j.at("methods").is_array() || j.at("methods").empty()) {
    config_fail("methods", "must be a nonempty array of method tags");
  }
  for (const auto& mj : j.at("methods")) {
    if (!mj.is_string()) config_fail("methods", "entries must be strings");
    const auto m = parse_method(mj.get<std::string>());
    if (!m) config_fail("methods", "unknown tag \"" + mj.get<std::string>() + "\"");
    cfg.methods.push_back(*m);
  }
  if (j.contains("sweep")) {
    const json& js = j.at("sweep");
    if (!js.is_object()) config_fail("sweep", "must be an object");
    check_known_fields(js, {"rho_from", "rho_to", "steps"}, "sweep");
    SweepSpec sw;
    sw.rho_from = get_number(js, "rho_from");
    sw.rho_to = get_number(js, "rho_to");
    sw.steps = get_int(js, "steps");
    cfg.sweep = sw;
  }
  if (j.contains("structured_spec")) {
    const json& js = j.at("structured_spec");
    if (!js.is_object()) config_fail("structured_spec", "must be an object");
    check_known_fields(js,
                       {"p", "kind", "filter_len", "alpha_bound_rel", "tied"},
                       "structured_spec");
    StructuredSpec sp;
    if (js.contains("kind")) {
      const std::string kind = js.at("kind").is_string()
                                   ? js.at("kind").get<std::string>()
                                   : std::string();
      if (kind == "toeplitz") sp.kind = StructuredKind::kToeplitz;
      else if (kind == "generic") sp.kind = StructuredKind::kGeneric;
      else config_fail("structured_spec.kind", "must be toeplitz|generic");
    }
    if (js.contains("p")) sp.p = get_int(js, "p");
    if (js.contains("filter_len")) sp.filter_len = get_int(js, "filter_len");
    if (js.contains("alpha_bound_rel")) {
      sp.alpha_bound_rel = get_number(js, "alpha_bound_rel");
    }
    if (js.contains("tied")) {
      if (!js.at("tied").is_boolean()) {
        config_fail("structured_spec.tied", "must be a boolean");
      }
      sp.tied = js.at("tied").get<bool>();
    }
    cfg.structured = sp;
  }
  validate(cfg);
  return cfg;
}

void validate(const ExperimentConfig& cfg) {
  if (cfg.n < 1 || cfg.m < cfg.n) config_fail("m", "requires m >= n >= 1");
  if (cfg.trials < 1) config_fail("trials", "must be >= 1");
  if (!(cfg.rho_h >= 0.0) || !(cfg.rho_y >= 0.0)) {
    config_fail("rho_h", "radii must be nonnegative");
  }
  if (cfg.mu && !(*cfg.mu > 0.0)) config_fail("mu", "must be positive");
  if (cfg.mode == ExpMode::kRegularized && !cfg.mu) {
    config_fail("mu", "is required in regularized mode");
  }
  if (cfg.mode == ExpMode::kStructured && !cfg.structured) {
    config_fail("structured_spec", "is required in structured mode");
  }
  if (cfg.mode != ExpMode::kStructured && cfg.structured) {
    config_fail("structured_spec", "is only valid in structured mode");
  }
  if (cfg.sweep) {
    if (cfg.sweep->steps < 1) config_fail("sweep.steps", "must be >= 1");
    if (!(cfg.sweep->rho_from <= cfg.sweep->rho_to)) {
      config_fail("sweep.rho_from", "sweep bounds must be ordered");
    }
    if (!(cfg.sweep->rho_from >= 0.0)) {
      config_fail("sweep.rho_from", "must be nonnegative");
    }
  }
  if (cfg.structured) {
    const StructuredSpec& sp = *cfg.structured;
    if (sp.filter_len < 1) config_fail("structured_spec.filter_len", "must be >= 1");
    if (!(sp.alpha_bound_rel >= 0.0)) {
      config_fail("structured_spec.alpha_bound_rel", "must be nonnegative");
    }
    if (sp.kind == StructuredKind::kToeplitz) {
      if (cfg.n != sp.filter_len) {
        config_fail("structured_spec.filter_len",
                    "must equal n for the toeplitz kind");
      }
      const int derived_p = cfg.m - cfg.n + 1;
      if (derived_p < 1) config_fail("m", "too small for the toeplitz kind");
      if (sp.p != 0 && sp.p != derived_p) {
        config_fail("structured_spec.p",
                    "must equal m - n + 1 for the toeplitz kind");
      }
    } else if (sp.p < 1) {
      config_fail("structured_spec.p", "must be >= 1 for the generic kind");
    }
  }
  for (Method m : cfg.methods) {
    bool ok = false;
    switch (cfg.mode) {
      case ExpMode::kUnstructured:
        ok = m == Method::kLs || m == Method::kCls || m == Method::kRlsRobust ||
             (m == Method::kRls && cfg.mu.has_value());
        break;
      case ExpMode::kRegularized:
        ok = m == Method::kLs || m == Method::kRls || m == Method::kCrls ||
             m == Method::kRrls;
        break;
      case ExpMode::kStructured:
        ok = m == Method::kLs || m == Method::kScls || m == Method::kSrls;
        break;
    }
    if (!ok) {
      config_fail("methods", std::string("method ") + method_name(m) +
                                 " is not available in " +
                                 to_string(cfg.mode) + " mode");
    }
  }
}

Instance gen_instance(const ExperimentConfig& cfg, std::uint64_t seed) {
  validate(cfg);
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::uniform_real_distribution<double> unif(0.0, 1.0);

  if (cfg.mode != ExpMode::kStructured) {
    Matrix a(cfg.m, cfg.n);
    for (int i = 0; i < cfg.m; ++i) {
      for (int j = 0; j < cfg.n; ++j) a(i, j) = gauss(rng);
    }
    a /= a.norm();
    Vector y(cfg.m);
    for (int i = 0; i < cfg.m; ++i) y(i) = gauss(rng);
    y /= y.norm();
    UnstructuredProblem p;
    p.a = a;
    p.y = y;
    p.rho_h = cfg.rho_h;
    p.rho_y = cfg.rho_y;
    if (cfg.mode == ExpMode::kRegularized) p.mu = cfg.mu;
    return p;
  }

  const StructuredSpec& sp = *cfg.structured;
  StructuredProblem p;
  p.tied = sp.tied;
  if (sp.kind == StructuredKind::kToeplitz) {
    const int n = cfg.n;
    const int len = cfg.m - n + 1;  // input sequence length
    Vector u(len);
    for (int i = 0; i < len; ++i) u(i) = unif(rng) < 0.5 ? -1.0 : 1.0;
    auto conv_matrix = [&](const Vector& seq) {
      Matrix t = Matrix::Zero(cfg.m, n);
      for (int i = 0; i < cfg.m; ++i) {
        for (int j = 0; j < n; ++j) {
          const int k = i - j;
          if (k >= 0 && k < static_cast<int>(seq.size())) t(i, j) = seq(k);
        }
      }
      return t;
    };
    p.a = conv_matrix(u);
    Vector h(n);
    for (int j = 0; j < n; ++j) h(j) = gauss(rng);
    const Vector y0 = p.a * h;
    Vector w(cfg.m);
    for (int i = 0; i < cfg.m; ++i) w(i) = gauss(rng);
    // 10% observation noise keeps a residual in the nominal data
    w *= 0.1 * y0.norm() / w.norm();
    p.y = y0 + w;
    for (int i = 0; i < len; ++i) {
      Vector e = Vector::Zero(len);
      e(i) = 1.0;
      p.basis_a.push_back(conv_matrix(e));
      Vector ey = Vector::Zero(cfg.m);
      ey(i) = 1.0;
      p.basis_y.push_back(ey);
    }
    p.rho_h = sp.alpha_bound_rel * p.a.norm();
    p.rho_b = p.tied ? p.rho_h : cfg.rho_y;
  } else {
    Matrix a(cfg.m, cfg.n);
    for (int i = 0; i < cfg.m; ++i) {
      for (int j = 0; j < cfg.n; ++j) a(i, j) = gauss(rng);
    }
    a /= a.norm();
    p.a = a;
    Vector y(cfg.m);
    for (int i = 0; i < cfg.m; ++i) y(i) = gauss(rng);
    y /= y.norm();
    p.y = y;
    for (int k = 0; k < sp.p; ++k) {
      Matrix ak(cfg.m, cfg.n);
      for (int i = 0; i < cfg.m; ++i) {
        for (int j = 0; j < cfg.n; ++j) ak(i, j) = gauss(rng);
      }
      ak /= ak.norm();
      p.basis_a.push_back(ak);
      Vector yk(cfg.m);
      for (int i = 0; i < cfg.m; ++i) yk(i) = gauss(rng);
      yk /= yk.norm();
      p.basis_y.push_back(yk);
    }
    p.rho_h = cfg.rho_h;
    p.rho_b = p.tied ? p.rho_h : cfg.rho_y;
  }
  return p;
}

namespace {

Estimate compute_estimate(Method m, const Instance& inst,
                          const ExperimentConfig& cfg) {
  if (const auto* up = std::get_if<UnstructuredProblem>(&inst)) {
    switch (m) {
      case Method::kLs: return ls_solve(up->a, up->y);
      case Method::kRls: return rls_solve(up->a, up->y, *cfg.mu);
      case Method::kCls: return cls_solve(*up);
      case Method::kCrls: return crls_solve(*up);
      case Method::kRlsRobust: {
        UnstructuredProblem q = *up;
        q.mu.reset();
        return rls_robust(q);
      }
      case Method::kRrls: return rrls_solve(*up);
      default: break;
    }
    throw InvalidParameterError("method not available for this instance");
  }
  const auto& spb = std::get<StructuredProblem>(inst);
  switch (m) {
    case Method::kLs: return ls_solve(spb.a, spb.y);
    case Method::kScls: return scls_solve(spb);
    case Method::kSrls: return srls_solve(spb);
    default: break;
  }
  throw InvalidParameterError("method not available for this instance");
}

}  // namespace

TrialRun run_trials(const ExperimentConfig& cfg) {
  validate(cfg);
  const Instance inst = gen_instance(cfg, cfg.seed);

  struct PerMethod {
    Method method;
    bool ok = false;
    Estimate est;
  };
  std::vector<PerMethod> ests;
  for (Method m : cfg.methods) {
    PerMethod pm;
    pm.method = m;
    try {
      pm.est = compute_estimate(m, inst, cfg);
      pm.ok = true;
    } catch (const Error&) {
      pm.ok = false;
    }
    ests.push_back(std::move(pm));
  }

  TrialRun run;
  std::vector<std::vector<double>> errors(cfg.methods.size());
  const double nan = std::numeric_limits<double>::quiet_NaN();

  for (int t = 1; t <= cfg.trials; ++t) {
    const std::uint64_t seed_used = cfg.seed + static_cast<std::uint64_t>(t);
    Matrix at;
    Vector yt;
    if (const auto* up = std::get_if<UnstructuredProblem>(&inst)) {
      const PerturbationSample s = sample_unstructured(
          cfg.m, cfg.n, up->rho_h, up->rho_y, cfg.sample_mode, seed_used);
      at = up->a + s.delta_a;
      yt = up->y + s.delta_y;
    } else {
      const auto& spb = std::get<StructuredProblem>(inst);
      const StructuredSample s =
          sample_structured(spb.dim_p(), spb.rho_h, spb.rho_b, spb.tied,
                            cfg.sample_mode, seed_used);
      at = spb.a;
      yt = spb.y;
      for (int i = 0; i < spb.dim_p(); ++i) {
        at += s.alpha(i) * spb.basis_a[i];
        yt += s.beta(i) * spb.basis_y[i];
      }
    }
    for (std::size_t k = 0; k < ests.size(); ++k) {
      TrialResult row;
      row.trial_id = t;
      row.method = ests[k].method;
      row.seed_used = seed_used;
      row.ok = ests[k].ok;
      if (ests[k].ok) {
        row.error = (at * ests[k].est.x_hat - yt).squaredNorm();
        row.regret_bound = ests[k].est.regret_bound;
        errors[k].push_back(row.error);
      } else {
        row.error = nan;
      }
      run.rows.push_back(std::move(row));
    }
  }

  for (std::size_t k = 0; k < ests.size(); ++k) {
    MethodSummary s;
    s.method = ests[k].method;
    s.trials_ok = static_cast<int>(errors[k].size());
    if (!errors[k].empty()) {
      double sum = 0.0, mx = -std::numeric_limits<double>::infinity();
      for (double v : errors[k]) {
        sum += v;
        mx = std::max(mx, v);
      }
      s.mean_error = sum / static_cast<double>(errors[k].size());
      s.max_error = mx;
      s.sorted_errors = errors[k];
      std::sort(s.sorted_errors.begin(), s.sorted_errors.end());
    } else {
      s.mean_error = nan;
      s.max_error = nan;
    }
    run.summaries.push_back(std::move(s));
  }
  return run;
}

SweepRun run_sweep(const ExperimentConfig& cfg) {
  validate(cfg);
  if (!cfg.sweep) throw ConfigError("config field \"sweep\": is required");
  const SweepSpec sw = *cfg.sweep;
  SweepRun out;
  for (int i = 0; i < sw.steps; ++i) {
    const double rho =
        sw.steps == 1
            ? sw.rho_from
            : sw.rho_from + (sw.rho_to - sw.rho_from) *
                                static_cast<double>(i) /
                                static_cast<double>(sw.steps - 1);
    ExperimentConfig point = cfg;
    point.sweep.reset();
    if (point.mode == ExpMode::kStructured) {
      point.structured->alpha_bound_rel = rho;
    } else {
      point.rho_h = rho;
      point.rho_y = rho;
    }
    const TrialRun tr = run_trials(point);
    for (const MethodSummary& s : tr.summaries) {
      out.rows.push_back(
          SweepRow{rho, s.method, s.mean_error, s.max_error, s.trials_ok});
    }
  }
  return out;
}

std::string format_double(double v) {
  std::array<char, 64> buf{};
  std::snprintf(buf.data(), buf.size(), "%.17g", v);
  return std::string(buf.data());
}

namespace {

void write_metadata(std::ostream& out, const ExperimentConfig& cfg) {
  out << "# mode=" << to_string(cfg.mode) << "\n";
  out << "# m=" << cfg.m << "\n";
  out << "# n=" << cfg.n << "\n";
  out << "# trials=" << cfg.trials << "\n";
  out << "# rho_h=" << format_double(cfg.rho_h) << "\n";
  out << "# rho_y=" << format_double(cfg.rho_y) << "\n";
  if (cfg.mu) out << "# mu=" << format_double(*cfg.mu) << "\n";
  if (cfg.structured) {
    const StructuredSpec& sp = *cfg.structured;
    out << "# structured kind="
        << (sp.kind == StructuredKind::kToeplitz ? "toeplitz" : "generic")
        << " filter_len=" << sp.filter_len
        << " alpha_bound_rel=" << format_double(sp.alpha_bound_rel)
        << " tied=" << (sp.tied ? "true" : "false") << "\n";
  }
  out << "# sample_mode=" << to_string(cfg.sample_mode) << "\n";
  out << "# seed=" << cfg.seed << "\n";
  out << "# error_metric=squared_residual_on_perturbed_system\n";
}

}  // namespace

void write_trials_csv(std::ostream& out, const ExperimentConfig& cfg,
                      const TrialRun& run) {
  write_metadata(out, cfg);
  out << "trial_id,method,error,regret_bound,seed_used\n";
  for (const TrialResult& r : run.rows) {
    out << r.trial_id << "," << method_name(r.method) << ","
        << format_double(r.error) << ",";
    if (r.regret_bound) out << format_double(*r.regret_bound);
    out << "," << r.seed_used << "\n";
  }
  for (const MethodSummary& s : run.summaries) {
    out << "# summary method=" << method_name(s.method)
        << " mean=" << format_double(s.mean_error)
        << " max=" << format_double(s.max_error)
        << " trials_ok=" << s.trials_ok << "\n";
  }
}

void write_sweep_csv(std::ostream& out, const ExperimentConfig& cfg,
                     const SweepRun& run) {
  write_metadata(out, cfg);
  out << "rho,method,mean_error,max_error,trials\n";
  for (const SweepRow& r : run.rows) {
    out << format_double(r.rho) << "," << method_name(r.method) << ","
        << format_double(r.mean_error) << "," << format_double(r.max_error)
        << "," << r.trials << "\n";
  }
}

}  // namespace regls

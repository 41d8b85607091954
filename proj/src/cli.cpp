#include "splitkit/cli.hpp"

#include <cmath>
#include <fstream>
#include <ostream>
#include <vector>

#include <json.hpp>

#include "splitkit/decomposition.hpp"
#include "splitkit/dynamics.hpp"
#include "splitkit/inequality.hpp"
#include "splitkit/io.hpp"
#include "splitkit/parallel.hpp"
#include "splitkit/scene.hpp"

namespace splitkit {

namespace {

using json = nlohmann::ordered_json;

/// JSON has no non-finite numbers; they become tagged strings.
json json_number(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  return x;
}

json vector_to_json(const Eigen::VectorXd& v) {
  json out = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(json_number(v[i]));
  return out;
}

json matrix_rows_to_json(const Eigen::MatrixXd& m) {
  json out = json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r)
    out.push_back(vector_to_json(m.row(r).transpose()));
  return out;
}

/// Columns-as-lists, matching the scene input convention.
json subspace_to_json(const Subspace& s) {
  json basis = json::array();
  for (Eigen::Index c = 0; c < s.basis().cols(); ++c)
    basis.push_back(vector_to_json(s.basis().col(c)));
  return json{{"dim", s.dim()}, {"basis", std::move(basis)}};
}

json mc_to_json(const McEstimate& e) {
  return json{{"value", json_number(e.value)},
              {"se", json_number(e.se)},
              {"n", e.n}};
}

json report_to_json(const SlackReport& r) {
  json params = json::object();
  for (const auto& [key, value] : r.params) params[key] = json_number(value);
  return json{{"name", r.name},
              {"lhs", mc_to_json(r.lhs)},
              {"rhs", mc_to_json(r.rhs)},
              {"slack", json_number(r.slack)},
              {"margin", json_number(r.margin)},
              {"verdict", to_string(r.verdict)},
              {"tight", r.tight},
              {"notes", r.notes},
              {"params", std::move(params)}};
}

bool write_text_file(const std::filesystem::path& file, const std::string& text,
                     std::ostream& err) {
  std::ofstream out(file, std::ios::binary);
  if (!out) {
    err << "cannot write " << file.string() << "\n";
    return false;
  }
  out << text;
  return out.good();
}

/// Loads and fully validates the scene, reporting the first violating path.
std::optional<Scene> load_scene_checked(const std::filesystem::path& scene_path,
                                        std::ostream& err) {
  try {
    return load_scene(scene_path);
  } catch (const SceneError& e) {
    err << "scene validation error at " << e.path() << ": " << e.message()
        << "\n";
    return std::nullopt;
  }
}

bool prepare_out_dir(const std::filesystem::path& out_dir, std::ostream& err) {
  std::error_code ec;
  std::filesystem::create_directories(out_dir, ec);
  if (ec) err << "cannot create output directory " << out_dir.string() << "\n";
  return !ec;
}

// ---------------------------------------------------------------------------
// verify: manifest execution
// ---------------------------------------------------------------------------

struct CheckOutcome {
  std::vector<SlackReport> reports;
  std::string error;  // nonempty = precondition failure
};

std::vector<MeasureSpec> resolve_components(const Scene& scene,
                                            const SuiteCheckConfig& cfg) {
  std::vector<MeasureSpec> comps;
  for (const auto& name : cfg.measures) comps.push_back(scene.measure(name));
  return comps;
}

SlackReport tail_ratio_report(const Scene& scene, const SuiteCheckConfig& cfg,
                              std::uint64_t seed) {
  const Eigen::MatrixXd draws =
      sample(scene.measure(cfg.measures[0]), cfg.samples, seed);
  const auto rep = tail_ratio_diagnostic(draws, cfg.c, cfg.big_c, cfg.t_grid);
  SlackReport out;
  out.name = cfg.label;
  const double n = static_cast<double>(cfg.samples);
  const double pt = rep.survival_t.back();
  const double pct = rep.survival_ct.back();
  out.lhs = {pt, std::sqrt(pt * (1.0 - pt) / n), cfg.samples};
  out.rhs = {cfg.big_c * pct, cfg.big_c * std::sqrt(pct * (1.0 - pct) / n),
             cfg.samples};
  out.slack = out.rhs.value - out.lhs.value;
  out.verdict = rep.holds_from_t0 ? Verdict::holds : Verdict::inconclusive;
  out.notes = rep.holds_from_t0
                  ? "diagnostic only; survival bound holds from t0 onward"
                  : "diagnostic only; no trailing run supports the bound";
  out.params["t0"] = rep.t0;
  out.params["c"] = cfg.c;
  out.params["C"] = cfg.big_c;
  out.params["samples"] = n;
  return out;
}

CheckOutcome run_check(const Scene& scene, const SuiteCheckConfig& cfg,
                       double z, double scene_lambda, std::uint64_t seed) {
  CheckOutcome outcome;
  CheckOptions opts;
  opts.z = z;
  if (cfg.n_outer) opts.n_outer = *cfg.n_outer;
  if (cfg.n_inner) opts.n_inner = *cfg.n_inner;
  const auto lambda = [&] {
    if (cfg.lambda) return *cfg.lambda;
    if (std::isnan(scene_lambda))
      throw std::invalid_argument(
          "no frame constant available (continuous xi); set \"lambda\" explicitly");
    return scene_lambda;
  };

  try {
    if (cfg.kind == "bl_split") {
      const auto nu = as_gaussian(scene.measure(cfg.measures[1]));
      if (!nu)
        throw std::invalid_argument(
            "\"nu\" must flatten to an explicit Gaussian");
      auto report = check_bl_split(scene.measure(cfg.measures[0]), scene.xi,
                                   *nu, lambda());
      report.name = cfg.label;
      outcome.reports.push_back(std::move(report));
    } else if (cfg.kind == "linearized_bl") {
      auto reports = check_linearized_bl(scene.measure(cfg.measures[0]),
                                         scene.xi, *cfg.f, lambda(), opts, seed);
      reports.variance_drop.name = cfg.label + " variance drop";
      reports.inverse_form.name = cfg.label + " inverse form";
      outcome.reports.push_back(std::move(reports.variance_drop));
      outcome.reports.push_back(std::move(reports.inverse_form));
    } else if (cfg.kind == "efron_stein") {
      auto report =
          check_efron_stein(resolve_components(scene, cfg), *cfg.f, opts, seed);
      report.name = cfg.label;
      outcome.reports.push_back(std::move(report));
    } else if (cfg.kind == "dks") {
      auto report = check_dks(scene.measure(cfg.measures[0]), *cfg.f, cfg.n,
                              cfg.m, opts, seed);
      report.name = cfg.label;
      outcome.reports.push_back(std::move(report));
    } else if (cfg.kind == "madiman_barron") {
      auto report = check_madiman_barron(resolve_components(scene, cfg),
                                         cfg.cover, cfg.r, cfg.psi, opts, seed);
      report.name = cfg.label;
      outcome.reports.push_back(std::move(report));
    } else if (cfg.kind == "jensen") {
      auto report = check_jensen_improvement(scene.measure(cfg.measures[0]),
                                             scene.xi, cfg.psi, lambda(), opts,
                                             seed);
      report.name = cfg.label;
      outcome.reports.push_back(std::move(report));
    } else if (cfg.kind == "tail_ratio") {
      outcome.reports.push_back(tail_ratio_report(scene, cfg, seed));
    } else {
      throw std::invalid_argument("unknown check kind \"" + cfg.kind + "\"");
    }
  } catch (const std::exception& e) {
    outcome.error = e.what();
  }
  return outcome;
}

void print_report_line(std::ostream& out, const SlackReport& r) {
  out << r.name << ": " << to_string(r.verdict);
  if (r.verdict != Verdict::inconclusive) {
    out << "  lhs=" << r.lhs.value << " rhs=" << r.rhs.value
        << " slack=" << r.slack;
    if (r.tight) out << " [tight]";
  }
  if (!r.notes.empty()) out << "  (" << r.notes << ")";
  out << "\n";
}

}  // namespace

// ---------------------------------------------------------------------------
// decompose
// ---------------------------------------------------------------------------

int cmd_decompose(const std::filesystem::path& scene_path,
                  const std::filesystem::path& out_dir,
                  const CommandOverrides& /*overrides*/, std::ostream& out,
                  std::ostream& err) {
  const auto scene = load_scene_checked(scene_path, err);
  if (!scene) return kExitPrecondition;
  if (!scene->xi.is_discrete()) {
    err << "unsupported operation: the decomposition is defined for discrete "
           "subspace distributions only\n";
    return kExitPrecondition;
  }
  if (!prepare_out_dir(out_dir, err)) return kExitPrecondition;

  const auto dec = independent_decomposition(scene->xi);
  const auto frame = mean_projector(scene->xi);

  out << dec.independent.size() << " independent subspace"
      << (dec.independent.size() == 1 ? "" : "s") << ", dim(E_dep)="
      << dec.dependent.dim() << ", lambda=" << frame.lambda << "\n";
  for (std::size_t i = 0; i < dec.independent.size(); ++i) {
    const auto& e = dec.independent[i];
    out << "  E_" << (i + 1) << ": dim " << e.dim() << ", basis columns";
    for (Eigen::Index c = 0; c < e.basis().cols(); ++c) {
      out << " [";
      for (Eigen::Index r = 0; r < e.basis().rows(); ++r)
        out << (r ? ", " : "") << e.basis()(r, c);
      out << "]";
    }
    out << "\n";
  }

  json doc{{"ambient_dim", dec.ambient_dim},
           {"lambda", json_number(frame.lambda)},
           {"mean_projector", matrix_rows_to_json(frame.mean_projector)},
           {"top_eigenvector", vector_to_json(frame.top_eigenvector)},
           {"independent", json::array()},
           {"dependent", subspace_to_json(dec.dependent)}};
  for (const auto& e : dec.independent)
    doc["independent"].push_back(subspace_to_json(e));

  const auto file = out_dir / "decomposition.json";
  if (!write_text_file(file, doc.dump(2) + "\n", err)) return kExitPrecondition;
  out << "wrote " << file.string() << "\n";
  return kExitOk;
}

// ---------------------------------------------------------------------------
// simulate
// ---------------------------------------------------------------------------

int cmd_simulate(const std::filesystem::path& scene_path,
                 const std::filesystem::path& out_dir,
                 const CommandOverrides& overrides, std::ostream& out,
                 std::ostream& err) {
  const auto scene = load_scene_checked(scene_path, err);
  if (!scene) return kExitPrecondition;
  if (!scene->dynamics) {
    err << "the scene has no \"dynamics\" section\n";
    return kExitPrecondition;
  }
  const double t_end = overrides.t_end.value_or(1.0);
  const int n_paths = overrides.paths.value_or(1000);
  if (t_end <= 0 || n_paths <= 0) {
    err << "t-end and paths must be positive\n";
    return kExitPrecondition;
  }
  if (!prepare_out_dir(out_dir, err)) return kExitPrecondition;
  const std::uint64_t seed = overrides.seed.value_or(scene->seed);

  const CollisionScene dyn(scene->xi, scene->measure(scene->dynamics->bath),
                           scene->measure(scene->dynamics->initial),
                           scene->dynamics->rate);
  const auto paths = simulate(dyn, t_end, n_paths, seed, overrides.jobs);

  const auto csv_file = out_dir / "trajectories.csv";
  {
    std::ofstream csv(csv_file, std::ios::binary);
    if (!csv) {
      err << "cannot write " << csv_file.string() << "\n";
      return kExitPrecondition;
    }
    write_trajectories_csv(csv, paths, dyn.dim());
  }
  out << "simulated " << n_paths << " paths to t=" << t_end << "; wrote "
      << csv_file.string() << "\n";

  // 21-point uniform grid; the closed-form flow needs Gaussian bath/initial
  // laws and a discrete xi, so it is best-effort here.
  std::vector<double> times;
  for (int i = 0; i <= 20; ++i) times.push_back(t_end * i / 20.0);
  try {
    const auto flow = moment_evolution(dyn, times);
    json doc{{"rate", json_number(dyn.rate())},
             {"lambda", json_number(mean_projector(scene->xi).lambda)},
             {"q", matrix_rows_to_json(flow.q)},
             {"times", json::array()},
             {"means", json::array()},
             {"covariances", json::array()}};
    for (std::size_t i = 0; i < flow.times.size(); ++i) {
      doc["times"].push_back(json_number(flow.times[i]));
      doc["means"].push_back(vector_to_json(flow.means[i]));
      doc["covariances"].push_back(matrix_rows_to_json(flow.covariances[i]));
    }
    const auto file = out_dir / "moments.json";
    if (!write_text_file(file, doc.dump(2) + "\n", err)) return kExitPrecondition;
    out << "wrote " << file.string() << "\n";
  } catch (const std::invalid_argument& e) {
    out << "moments unavailable: " << e.what() << "\n";
  }
  return kExitOk;
}

// ---------------------------------------------------------------------------
// verify
// ---------------------------------------------------------------------------

int cmd_verify(const std::filesystem::path& scene_path,
               const std::filesystem::path& out_dir,
               const CommandOverrides& overrides, std::ostream& out,
               std::ostream& err) {
  const auto scene = load_scene_checked(scene_path, err);
  if (!scene) return kExitPrecondition;

  std::vector<SuiteCheckConfig> checks;
  try {
    checks = overrides.manifest ? load_manifest(*overrides.manifest, *scene)
                                : scene->suite;
  } catch (const SceneError& e) {
    err << "manifest validation error at " << e.path() << ": " << e.message()
        << "\n";
    return kExitPrecondition;
  }
  if (checks.empty()) {
    err << "nothing to verify: no --manifest and no \"suite\" in the scene\n";
    return kExitPrecondition;
  }
  if (!prepare_out_dir(out_dir, err)) return kExitPrecondition;

  const double level = overrides.tol.value_or(scene->tolerances.suite_level);
  if (level <= 0 || level >= 1) {
    err << "the family-wise level must lie in (0,1)\n";
    return kExitPrecondition;
  }
  // Bonferroni across every test the run produces (the linearized check
  // reports two); diagnostics are not hypothesis tests.
  int n_comparisons = 0;
  for (const auto& cfg : checks)
    if (cfg.kind != "tail_ratio")
      n_comparisons += cfg.kind == "linearized_bl" ? 2 : 1;
  const double z = bonferroni_z(level, std::max(1, n_comparisons));

  const double scene_lambda =
      scene->xi.is_discrete() ? mean_projector(scene->xi).lambda
                              : std::numeric_limits<double>::quiet_NaN();
  const std::uint64_t seed = overrides.seed.value_or(scene->seed);

  std::vector<CheckOutcome> outcomes(checks.size());
  parallel_for(resolve_jobs(overrides.jobs),
               static_cast<std::int64_t>(checks.size()),
               [&](std::int64_t i) {
                 outcomes[static_cast<std::size_t>(i)] = run_check(
                     *scene, checks[static_cast<std::size_t>(i)], z,
                     scene_lambda, derive_seed(seed, "verify", i));
               });

  for (std::size_t i = 0; i < outcomes.size(); ++i) {
    if (!outcomes[i].error.empty()) {
      err << "precondition error in check \"" << checks[i].label
          << "\": " << outcomes[i].error << "\n";
      return kExitPrecondition;
    }
  }

  json doc = json::array();
  int violations = 0;
  for (const auto& outcome : outcomes) {
    for (const auto& report : outcome.reports) {
      print_report_line(out, report);
      doc.push_back(report_to_json(report));
      violations += report.verdict == Verdict::violated ? 1 : 0;
    }
  }
  const auto file = out_dir / "report.json";
  if (!write_text_file(file, doc.dump(2) + "\n", err)) return kExitPrecondition;
  out << "checks: " << doc.size() << ", violations: " << violations
      << "; level " << level << " (z=" << z << ")\n";
  out << "wrote " << file.string() << "\n";
  return violations > 0 ? kExitViolation : kExitOk;
}

}  // namespace splitkit

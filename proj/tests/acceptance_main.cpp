// Acceptance gate: end-to-end checks of the library's headline claims, one
// [PASS]/[FAIL] line each.  Exits nonzero when any criterion fails.  Every
// random quantity is seeded, so a given build either passes or fails
// deterministically.

#include <chrono>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include "splitkit/cli.hpp"
#include "splitkit/decomposition.hpp"
#include "splitkit/dynamics.hpp"
#include "splitkit/gaussian.hpp"
#include "splitkit/independence.hpp"
#include "splitkit/inequality.hpp"
#include "splitkit/measure.hpp"
#include "splitkit/rng.hpp"
#include "splitkit/scalar_fn.hpp"
#include "splitkit/stats.hpp"
#include "splitkit/subspace.hpp"
#include "splitkit/subspace_distribution.hpp"
#include "support/fixtures.hpp"
#include "support/oracles.hpp"

using namespace splitkit;
using namespace splitkit::testing;
namespace fs = std::filesystem;

namespace {

struct Criterion {
  bool pass = false;
  std::string detail;
};

double seconds_since(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
      .count();
}

std::string fmt(double x) {
  std::ostringstream os;
  os.precision(4);
  os << x;
  return os.str();
}

MeasureSpec standard_spec(int dim) {
  return MeasureSpec::gaussian(GaussianMeasure::standard(dim));
}

// ---------------------------------------------------------------------------
// 1. Decomposition vs. the 2^k sign-pattern oracle on 200 random instances.
// ---------------------------------------------------------------------------
Criterion decomposition_oracle() {
  const auto start = std::chrono::steady_clock::now();
  int mismatches = 0;
  for (std::uint64_t i = 0; i < 200; ++i) {
    const auto xi = random_instance(8, 6, 910000 + i);
    const auto dec = independent_decomposition(xi);
    const auto oracle = brute_force_independent_blocks(xi);
    int oracle_dim = 0;
    for (const auto& b : oracle) oracle_dim += b.dim();
    const bool ok = same_subspace_set(dec.independent, oracle, 1e-8) &&
                    dec.dependent.dim() == xi.ambient_dim() - oracle_dim;
    if (!ok) ++mismatches;
  }
  const double elapsed = seconds_since(start);
  return {mismatches == 0 && elapsed < 30.0,
          "200 instances (n<=8, k<=6), " + std::to_string(mismatches) +
              " mismatches, " + fmt(elapsed) + "s"};
}

// ---------------------------------------------------------------------------
// 2. Frame-constant closed forms: 1/k for leave-one-out, 1 - m/n for
//    m-out-of-n coordinate spans.
// ---------------------------------------------------------------------------
Criterion lambda_closed_forms() {
  double worst = 0.0;
  for (int k = 2; k <= 8; ++k) {
    const auto fc = mean_projector(leave_one_out_xi(k));
    worst = std::max(worst, std::abs(fc.lambda - 1.0 / k));
    const Eigen::MatrixXd expect =
        ((k - 1.0) / k) * Eigen::MatrixXd::Identity(k, k);
    worst = std::max(worst, (fc.mean_projector - expect).norm());
  }
  const int pairs[][2] = {{2, 1}, {3, 1}, {3, 2}, {4, 2}, {5, 3}, {6, 4}};
  for (const auto& nm : pairs) {
    const int n = nm[0];
    const int m = nm[1];
    const auto fc = mean_projector(coordinate_subset_xi(n, m));
    worst = std::max(worst, std::abs(fc.lambda - (1.0 - double(m) / n)));
    const Eigen::MatrixXd expect =
        (double(m) / n) * Eigen::MatrixXd::Identity(n, n);
    worst = std::max(worst, (fc.mean_projector - expect).norm());
  }
  return {worst <= 1e-10, "max deviation " + fmt(worst) + " (tol 1e-10)"};
}

// ---------------------------------------------------------------------------
// 3. Two-line rigidity: the whole plane is dependent, and a non-Gaussian
//    product law is caught failing to split along at least one of the lines.
// ---------------------------------------------------------------------------
Criterion bernstein_rigidity() {
  const auto xi = bernstein_xi();
  const auto dec = independent_decomposition(xi);
  if (!dec.independent.empty() || dec.dependent.dim() != 2)
    return {false, "decomposition is not fully dependent"};

  const double half_width = std::sqrt(3.0);  // unit-variance uniform
  const int reps = 20;
  const int n_samples = 100000;
  int detections = 0;
  for (int rep = 0; rep < reps; ++rep) {
    Rng rng(derive_seed(3100, "acceptance", static_cast<std::size_t>(rep)));
    Eigen::MatrixXd rows(n_samples, 2);
    for (int i = 0; i < n_samples; ++i) {
      rows(i, 0) = rng.uniform(-half_width, half_width);
      rows(i, 1) = rng.uniform(-half_width, half_width);
    }
    bool failed_somewhere = false;
    for (std::size_t a = 0; a < xi.atoms().size(); ++a) {
      SplitTestOptions opts;
      opts.seed = derive_seed(3200, "acceptance", 2 * rep + a);
      if (!empirical_split_test(rows, xi.atoms()[a].subspace, 0.01, opts).pass)
        failed_somewhere = true;
    }
    if (failed_somewhere) ++detections;
  }
  return {detections >= reps - 1,
          "dim(E_dep)=2; dependence detected in " + std::to_string(detections) +
              "/" + std::to_string(reps) + " repetitions at 1e5 samples"};
}

// ---------------------------------------------------------------------------
// 4. Entropy sandwich along the flow: DV lower bound <= D(nu_t || gamma)
//    <= e^{-lambda t} D(nu_0 || gamma) at four times.
// ---------------------------------------------------------------------------
Criterion entropy_sandwich() {
  const auto start = std::chrono::steady_clock::now();
  const auto xi = bernstein_xi();
  const double lambda = mean_projector(xi).lambda;
  const Eigen::Vector2d theta(2.0, 2.0);  // |theta|^2 = 8, D(nu_0||gamma) = 4
  const CollisionScene scene(xi, standard_spec(2),
                             MeasureSpec::gaussian(GaussianMeasure(
                                 theta, Eigen::Matrix2d::Identity())),
                             1.0);
  const GaussianMeasure gamma = GaussianMeasure::standard(2);
  std::string detail;
  bool ok = true;
  const double times[] = {0.0, 0.5, 1.0, 2.0};
  for (std::size_t i = 0; i < 4; ++i) {
    const double t = times[i];
    const int trunc_k = poisson_trunc_k(t, 1e-8);
    const NuT nu = nu_t_density(scene, t, trunc_k);
    const KlEstimate kl = kl_to_gaussian(
        nu, gamma, 300000, derive_seed(4100, "acceptance", i));
    const double lower = dv_lower_bound(theta, lambda, t, 1.2, 2);
    const double upper = std::exp(-lambda * t) * 4.0;
    const double ci = kl.ci_halfwidth(3.0) + kl.bias_bound;
    if (kl.bias_bound >= 1e-6) ok = false;
    if (lower > kl.value + ci) ok = false;
    if (kl.value - ci > upper) ok = false;
    if (i) detail += ", ";
    detail += "t=" + fmt(t) + ": " + fmt(lower) + " <= " + fmt(kl.value) +
              " <= " + fmt(upper);
  }
  const double elapsed = seconds_since(start);
  ok = ok && elapsed < 120.0;
  return {ok, detail + " (" + fmt(elapsed) + "s)"};
}

// ---------------------------------------------------------------------------
// 5. Variance decay at rate exactly 2*lambda along the top eigenvector, and
//    zero slack for that direction in the closed-form linearized check.
// ---------------------------------------------------------------------------
Criterion variance_decay() {
  const auto xi = bernstein_xi();
  const auto frame = mean_projector(xi);
  const double lambda = frame.lambda;
  const Eigen::VectorXd u = frame.top_eigenvector;
  const Eigen::Matrix2d id = Eigen::Matrix2d::Identity();
  const Eigen::MatrixXd proj[2] = {xi.atoms()[0].subspace.projector(),
                                   xi.atoms()[1].subspace.projector()};

  bool ok = true;
  std::string detail;
  const double times[] = {0.25, 0.5, 1.0};
  const int n_outer = 3000;
  const int n_inner = 200;
  for (std::size_t ti = 0; ti < 3; ++ti) {
    const double t = times[ti];
    Rng rng(derive_seed(5100, "acceptance", ti));
    std::vector<double> inner_means;
    inner_means.reserve(n_outer);
    RunningMoments inner_vars;
    for (int i = 0; i < n_outer; ++i) {
      const Eigen::VectorXd v0 = rng.normal_vector(2);
      RunningMoments inner;
      for (int j = 0; j < n_inner; ++j) {
        Eigen::VectorXd v = v0;
        double clock = rng.exponential(1.0);
        while (clock < t) {
          const auto& p = proj[rng.uniform01() < 0.5 ? 0 : 1];
          v = p * v + (id - p) * rng.normal_vector(2);
          clock += rng.exponential(1.0);
        }
        inner.add(u.dot(v));
      }
      inner_means.push_back(inner.mean());
      inner_vars.add(inner.variance());
    }
    const McEstimate raw = sample_variance_with_se(inner_means);
    const double est = raw.value - inner_vars.mean() / n_inner;
    const double se = std::hypot(raw.se, inner_vars.se_mean() / n_inner);
    const double target = std::exp(-2.0 * lambda * t);
    if (std::abs(est - target) > 4.0 * se) ok = false;
    if (ti) detail += ", ";
    detail += "t=" + fmt(t) + ": " + fmt(est) + " vs " + fmt(target);
  }

  const auto reports =
      check_linearized_bl(standard_spec(2), xi, ScalarFn::linear(u, 0.0),
                          lambda, CheckOptions{}, 1);
  const double worst_slack = std::max(std::abs(reports.variance_drop.slack),
                                      std::abs(reports.inverse_form.slack));
  ok = ok && worst_slack <= 1e-10;
  return {ok, detail + "; eigenvector slack " + fmt(worst_slack)};
}

// ---------------------------------------------------------------------------
// 6. Equilibrium, reversibility, and power against a non-splitting bath.
// ---------------------------------------------------------------------------
Criterion equilibrium_and_reversibility() {
  const auto xi = bernstein_xi();
  const CollisionScene scene(xi, standard_spec(2), standard_spec(2), 1.0);

  // (a) the splitting bath is invariant: two-sample test finds nothing.
  int null_passes = 0;
  const double times[] = {0.5, 1.0, 2.0};
  for (std::size_t i = 0; i < 3; ++i) {
    const auto paths =
        simulate(scene, times[i], 3000, derive_seed(6100, "acceptance", i));
    Eigen::MatrixXd ours(3000, 2);
    for (int p = 0; p < 3000; ++p)
      ours.row(p) = paths[static_cast<std::size_t>(p)].states.back().transpose();
    const Eigen::MatrixXd fresh =
        sample(standard_spec(2), 3000, derive_seed(6200, "acceptance", i));
    TwoSampleOptions opts;
    opts.seed = derive_seed(6300, "acceptance", i);
    if (energy_two_sample_test(ours, fresh, 0.01, opts).pass) ++null_passes;
  }

  // (b) detailed balance on random observable pairs.
  int reversible = 0;
  for (std::size_t i = 0; i < 10; ++i) {
    Rng rng(derive_seed(6400, "acceptance", i));
    const Eigen::MatrixXd ga = rng.normal_vector(2) * rng.normal_vector(2).transpose();
    const Eigen::MatrixXd a = 0.5 * (ga + ga.transpose());
    const Eigen::VectorXd b = rng.normal_vector(2);
    const Eigen::VectorXd c = rng.normal_vector(2);
    const auto f = [a, b](const Eigen::VectorXd& v) {
      return v.dot(a * v) + b.dot(v);
    };
    const auto g = [c](const Eigen::VectorXd& v) { return c.dot(v); };
    if (reversibility_check(scene, f, g, 40000,
                            derive_seed(6500, "acceptance", i))
            .pass)
      ++reversible;
  }

  // (c) a correlated Gaussian bath is not invariant, and the test sees it.
  // The needle (eigenvalues 0.1 and 4, tilted 30 degrees) splits along
  // neither line, and collisions visibly fatten it.
  Eigen::Matrix2d rot;
  const double ang = std::numbers::pi / 6.0;
  rot << std::cos(ang), -std::sin(ang), std::sin(ang), std::cos(ang);
  const Eigen::Matrix2d sigma =
      rot * Eigen::Vector2d(0.1, 4.0).asDiagonal() * rot.transpose();
  const MeasureSpec skew = MeasureSpec::gaussian(
      GaussianMeasure(Eigen::Vector2d::Zero(), sigma));
  const CollisionScene skew_scene(xi, skew, skew, 1.0);
  int detections = 0;
  const int reps = 15;
  for (std::size_t i = 0; i < reps; ++i) {
    const auto paths =
        simulate(skew_scene, 2.0, 2500, derive_seed(6600, "acceptance", i));
    Eigen::MatrixXd ours(2500, 2);
    for (int p = 0; p < 2500; ++p)
      ours.row(p) = paths[static_cast<std::size_t>(p)].states.back().transpose();
    const Eigen::MatrixXd fresh =
        sample(skew, 2500, derive_seed(6700, "acceptance", i));
    TwoSampleOptions opts;
    opts.seed = derive_seed(6800, "acceptance", i);
    if (!energy_two_sample_test(ours, fresh, 0.01, opts).pass) ++detections;
  }

  const bool ok = null_passes == 3 && reversible == 10 && detections >= reps - 1;
  return {ok, "equilibrium " + std::to_string(null_passes) +
                  "/3, reversibility " + std::to_string(reversible) +
                  "/10, non-splitting detected " + std::to_string(detections) +
                  "/" + std::to_string(reps)};
}

// ---------------------------------------------------------------------------
// 7. Inequality suite on randomized admissible instances, plus the equality
//    cases.
// ---------------------------------------------------------------------------
Eigen::MatrixXd random_sym(int n, Rng& rng) {
  Eigen::MatrixXd g(n, n);
  for (int j = 0; j < n; ++j) g.col(j) = rng.normal_vector(n);
  return 0.5 * (g + g.transpose());
}

ScalarFn random_quadratic(int n, Rng& rng) {
  return ScalarFn::quadratic(random_sym(n, rng), rng.normal_vector(n),
                             rng.normal());
}

MeasureSpec uniform1d() {
  return MeasureSpec::custom(1, [](Rng& rng) {
    Eigen::VectorXd v(1);
    v[0] = rng.uniform(-std::sqrt(3.0), std::sqrt(3.0));
    return v;
  });
}

Criterion inequality_suite() {
  const int instances = 20;
  // Comparison count: bl_split 1, linearized 2, efron-stein 1, dks 1,
  // madiman-barron 1, jensen 1 per instance.
  const double z = bonferroni_z(0.01, instances * 7);
  CheckOptions opts;
  opts.n_outer = 400;
  opts.n_inner = 150;
  opts.z = z;

  int violated = 0;
  int holds = 0;
  const auto tally = [&](const SlackReport& r) {
    if (r.verdict == Verdict::violated) ++violated;
    if (r.verdict == Verdict::holds) ++holds;
  };

  for (std::uint64_t i = 0; i < instances; ++i) {
    Rng rng(derive_seed(7100, "acceptance", i));
    const auto xi = random_instance(4, 3, 77000 + i);
    const int n = xi.ambient_dim();
    const double lambda = mean_projector(xi).lambda;

    // Entropy drop for a random full-rank Gaussian nu (exact arithmetic).
    const Eigen::MatrixXd g = random_sym(n, rng);
    const Eigen::MatrixXd cov =
        Eigen::MatrixXd::Identity(n, n) * (0.5 + rng.uniform01()) +
        g * g.transpose() / n;
    tally(check_bl_split(standard_spec(n), xi,
                         GaussianMeasure(rng.normal_vector(n), cov), lambda));

    // Linearized forms for a random quadratic (closed-form path).
    const auto lin = check_linearized_bl(standard_spec(n), xi,
                                         random_quadratic(n, rng), lambda,
                                         opts, derive_seed(7200, "acceptance", i));
    tally(lin.variance_drop);
    tally(lin.inverse_form);

    // Coordinate checks on mixed 1-d component stacks.
    const int k = 2 + static_cast<int>(rng.uniform_index(3));
    std::vector<MeasureSpec> comps;
    for (int j = 0; j < k; ++j)
      comps.push_back(rng.uniform01() < 0.5 ? uniform1d() : standard_spec(1));
    tally(check_efron_stein(comps, random_quadratic(k, rng), opts,
                            derive_seed(7300, "acceptance", i)));

    const int nn = 3 + static_cast<int>(rng.uniform_index(4));
    const int mm = 1 + static_cast<int>(rng.uniform_index(
                           static_cast<std::size_t>(nn)));
    tally(check_dks(rng.uniform01() < 0.5 ? uniform1d() : standard_spec(1),
                    random_quadratic(1, rng), nn, mm, opts,
                    derive_seed(7400, "acceptance", i)));

    // A random cover with r = the realized maximal multiplicity.
    std::vector<std::vector<int>> cover;
    std::vector<int> mult(static_cast<std::size_t>(k), 0);
    const int members = 2 + static_cast<int>(rng.uniform_index(3));
    for (int s = 0; s < members; ++s) {
      std::vector<int> set;
      for (int j = 0; j < k; ++j)
        if (rng.uniform01() < 0.6) set.push_back(j);
      if (set.empty()) set.push_back(static_cast<int>(rng.uniform_index(
          static_cast<std::size_t>(k))));
      for (int j : set) ++mult[static_cast<std::size_t>(j)];
      cover.push_back(std::move(set));
    }
    int r = 1;
    for (int m : mult) r = std::max(r, m);
    std::vector<ScalarFn> psi;
    for (const auto& s : cover)
      psi.push_back(random_quadratic(static_cast<int>(s.size()), rng));
    tally(check_madiman_barron(comps, cover, r, psi, opts,
                               derive_seed(7500, "acceptance", i)));

    std::vector<ScalarFn> family;
    for (std::size_t a = 0; a < xi.atoms().size(); ++a)
      family.push_back(random_quadratic(n, rng));
    tally(check_jensen_improvement(standard_spec(n), xi, family, lambda, opts,
                                   derive_seed(7600, "acceptance", i)));
  }

  // Equality cases.  Exact paths must have vanishing slack; sampled paths
  // must sit within four combined standard errors of zero.
  const auto xi = bernstein_xi();
  const auto frame = mean_projector(xi);
  bool equalities = true;
  {
    const Eigen::VectorXd theta = 2.0 * frame.top_eigenvector;
    const auto r = check_bl_split(
        standard_spec(2), xi,
        GaussianMeasure(theta, Eigen::Matrix2d::Identity()), frame.lambda);
    equalities = equalities && std::abs(r.slack) <= 1e-10;
    const auto lin = check_linearized_bl(
        standard_spec(2), xi, ScalarFn::linear(frame.top_eigenvector, 0.0),
        frame.lambda, opts, 2);
    equalities = equalities && std::abs(lin.variance_drop.slack) <= 1e-10 &&
                 std::abs(lin.inverse_form.slack) <= 1e-10;
  }
  CheckOptions mc = opts;
  mc.n_outer = 1500;
  mc.n_inner = 300;
  {
    std::vector<MeasureSpec> three(3, standard_spec(1));
    const auto r = check_efron_stein(three, ScalarFn::norm_squared(3), mc,
                                     derive_seed(7700, "acceptance", 0));
    equalities =
        equalities && std::abs(r.slack) <= 4.0 * (r.lhs.se + r.rhs.se);
  }
  {
    const auto r = check_dks(standard_spec(1),
                             ScalarFn::linear(Eigen::VectorXd::Ones(1), 0.0),
                             5, 2, mc, derive_seed(7700, "acceptance", 1));
    equalities =
        equalities && std::abs(r.slack) <= 4.0 * (r.lhs.se + r.rhs.se);
  }
  {
    std::vector<MeasureSpec> three(3, standard_spec(1));
    const std::vector<std::vector<int>> cover = {{0}, {1}, {2}};
    std::vector<ScalarFn> psi(3, ScalarFn::norm_squared(1));
    const auto r = check_madiman_barron(three, cover, 1, psi, mc,
                                        derive_seed(7700, "acceptance", 2));
    equalities =
        equalities && std::abs(r.slack) <= 4.0 * (r.lhs.se + r.rhs.se);
  }

  const bool ok = violated == 0 && equalities;
  return {ok, std::to_string(holds) + " holds / " + std::to_string(violated) +
                  " violated over " + std::to_string(instances) +
                  " instances per check (z=" + fmt(z) +
                  "); equality cases " +
                  (equalities ? "within tolerance" : "OUT OF tolerance")};
}

// ---------------------------------------------------------------------------
// 8. Collision mechanics: exact energy conservation and Poisson jump counts.
// ---------------------------------------------------------------------------
Criterion collision_mechanics() {
  Rng rng(derive_seed(8100, "acceptance", 0));
  std::vector<Subspace> pool;
  for (int n = 2; n <= 6; ++n)
    for (int d = 0; d <= n; ++d)
      for (int copies = 0; copies < 8; ++copies)
        pool.push_back(random_subspace(n, d, rng));

  double worst = 0.0;
  const int total = 1000000;
  for (int i = 0; i < total; ++i) {
    const Subspace& e = pool[static_cast<std::size_t>(i) % pool.size()];
    const Eigen::VectorXd v = rng.normal_vector(e.ambient_dim());
    const Eigen::VectorXd w = rng.normal_vector(e.ambient_dim());
    const auto [v2, w2] = collide(v, w, e);
    worst = std::max(worst, std::abs(v2.squaredNorm() + w2.squaredNorm() -
                                     v.squaredNorm() - w.squaredNorm()));
  }

  const double t = 0.7;
  const int n_paths = 200000;
  const CollisionScene scene(bernstein_xi(), standard_spec(2),
                             standard_spec(2), 1.0);
  const auto paths = simulate(scene, t, n_paths,
                              derive_seed(8200, "acceptance", 0));
  int count[3] = {0, 0, 0};
  for (const auto& p : paths) {
    const std::size_t jumps = p.times.size() - 1;
    ++count[jumps > 2 ? 2 : jumps];
  }
  const double expect[3] = {std::exp(-t), t * std::exp(-t),
                            1.0 - (1.0 + t) * std::exp(-t)};
  bool poisson_ok = true;
  for (int k = 0; k < 3; ++k) {
    const double phat = double(count[k]) / n_paths;
    const double se = std::sqrt(expect[k] * (1.0 - expect[k]) / n_paths);
    if (std::abs(phat - expect[k]) > 4.0 * se) poisson_ok = false;
  }
  return {worst <= 1e-10 && poisson_ok,
          "worst energy drift " + fmt(worst) + " over 1e6 collisions; " +
              "jump fractions " + fmt(double(count[0]) / n_paths) + "/" +
              fmt(double(count[1]) / n_paths) + "/" +
              fmt(double(count[2]) / n_paths) + " vs " + fmt(expect[0]) + "/" +
              fmt(expect[1]) + "/" + fmt(expect[2])};
}

// ---------------------------------------------------------------------------
// 9. Bit-identical artifacts for worker counts 1, 2, 8.
// ---------------------------------------------------------------------------
std::string reproducibility_scene() {
  return R"({
    "ambient_dim": 2,
    "seed": 99,
    "xi": {"atoms": [
      {"basis": [[1.0, 0.0]], "weight": 0.5},
      {"basis": [[0.7071067811865476, 0.7071067811865476]], "weight": 0.5}
    ]},
    "measures": {
      "gamma": {"type": "gaussian"},
      "excited": {"type": "gaussian", "mean": [2.0, 2.0]},
      "std1": {"type": "gaussian", "dim": 1}
    },
    "dynamics": {"bath": "gamma", "initial": "excited", "rate": 1.0},
    "suite": [
      {"kind": "bl_split", "measure": "gamma", "nu": "excited"},
      {"kind": "efron_stein", "components": ["std1", "std1", "std1"],
       "f": {"type": "quadratic", "a": [[1,1,1],[1,1,1],[1,1,1]]},
       "n_outer": 300, "n_inner": 80},
      {"kind": "jensen", "measure": "gamma",
       "psi": [{"type": "norm_squared"}, {"type": "norm_squared"}],
       "n_outer": 300, "n_inner": 80}
    ]
  })";
}

std::string slurp(const fs::path& file) {
  std::ifstream is(file, std::ios::binary);
  std::ostringstream ss;
  ss << is.rdbuf();
  return ss.str();
}

Criterion reproducibility() {
  const fs::path root =
      fs::temp_directory_path() / "splitkit_acceptance_repro";
  fs::remove_all(root);
  const fs::path scene_file = root / "scene.json";
  fs::create_directories(root);
  {
    std::ofstream os(scene_file, std::ios::binary);
    os << reproducibility_scene();
  }

  std::vector<std::string> csv, moments, reports;
  for (int jobs : {1, 2, 8}) {
    const fs::path dir = root / ("jobs" + std::to_string(jobs));
    CommandOverrides overrides;
    overrides.jobs = jobs;
    overrides.paths = 500;
    overrides.t_end = 1.0;
    std::ostringstream out;
    std::ostringstream err;
    if (cmd_simulate(scene_file, dir, overrides, out, err) != kExitOk)
      return {false, "simulate failed: " + err.str()};
    if (cmd_verify(scene_file, dir, overrides, out, err) != kExitOk)
      return {false, "verify failed: " + err.str()};
    csv.push_back(slurp(dir / "trajectories.csv"));
    moments.push_back(slurp(dir / "moments.json"));
    reports.push_back(slurp(dir / "report.json"));
  }
  const bool ok = !csv[0].empty() && csv[0] == csv[1] && csv[0] == csv[2] &&
                  moments[0] == moments[1] && moments[0] == moments[2] &&
                  !reports[0].empty() && reports[0] == reports[1] &&
                  reports[0] == reports[2];
  return {ok, ok ? "trajectories.csv, moments.json, report.json identical for "
                   "1/2/8 workers"
                 : "artifacts differ across worker counts"};
}

}  // namespace

int main() {
  const struct {
    const char* title;
    Criterion (*run)();
  } criteria[] = {
      {"decomposition matches the sign-pattern oracle", decomposition_oracle},
      {"frame-constant closed forms", lambda_closed_forms},
      {"two-line rigidity and split-test power", bernstein_rigidity},
      {"entropy-decay sandwich", entropy_sandwich},
      {"variance decay at rate 2*lambda", variance_decay},
      {"equilibrium, reversibility, non-splitting power",
       equilibrium_and_reversibility},
      {"inequality suite on random instances", inequality_suite},
      {"collision mechanics", collision_mechanics},
      {"bit-identical artifacts across workers", reproducibility},
  };

  int failures = 0;
  int index = 0;
  for (const auto& c : criteria) {
    ++index;
    const Criterion result = c.run();
    if (!result.pass) ++failures;
    std::cout << (result.pass ? "[PASS] " : "[FAIL] ") << index << ". "
              << c.title << ": " << result.detail << "\n"
              << std::flush;
  }
  if (failures) {
    std::cout << failures << " criteria failed\n";
    return 1;
  }
  std::cout << "all criteria passed\n";
  return 0;
}

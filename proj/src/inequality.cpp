#include "splitkit/inequality.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include <Eigen/Dense>

#include "splitkit/rng.hpp"

namespace splitkit {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

SlackReport make_report(std::string name, const McEstimate& lhs,
                        const McEstimate& rhs, double z) {
  SlackReport r;
  r.name = std::move(name);
  r.lhs = lhs;
  r.rhs = rhs;
  if (std::isnan(lhs.value) || std::isnan(rhs.value)) {
    r.verdict = Verdict::inconclusive;
    r.notes = "non-finite estimate";
    return r;
  }
  if (std::isinf(rhs.value) && rhs.value > 0.0) {
    r.slack = kInf;
    r.verdict = Verdict::holds;
    r.notes = "right-hand side infinite; holds vacuously";
    return r;
  }
  r.slack = rhs.value - lhs.value;
  // Exact paths have zero standard errors; the absolute cushion absorbs
  // floating-point rounding there.
  r.margin = z * (lhs.se + rhs.se) +
             1e-12 * (1.0 + std::abs(lhs.value) + std::abs(rhs.value));
  r.verdict = lhs.value <= rhs.value + r.margin ? Verdict::holds : Verdict::violated;
  r.tight = r.verdict == Verdict::holds && std::abs(r.slack) <= r.margin;
  return r;
}

/// Var(X'AX + c'X) for X ~ N(m, S), A symmetric.
double gaussian_quad_variance(const Eigen::MatrixXd& s, const Eigen::VectorXd& m,
                              const Eigen::MatrixXd& a, const Eigen::VectorXd& c) {
  const Eigen::MatrixXd as = a * s;
  return 2.0 * (as * as).trace() + 4.0 * m.dot(as * a * m) + c.dot(s * c) +
         4.0 * m.dot(as * c);
}

}  // namespace

std::string to_string(Verdict v) {
  switch (v) {
    case Verdict::holds: return "holds";
    case Verdict::violated: return "violated";
    case Verdict::inconclusive: return "inconclusive";
  }
  return "inconclusive";
}

double bonferroni_z(double level, int n_comparisons) {
  if (!(level > 0.0 && level < 1.0) || n_comparisons < 1)
    throw std::invalid_argument("bonferroni_z: bad level or comparison count");
  return normal_quantile(1.0 - level / (2.0 * n_comparisons));
}

ConditionalDecomposition conditional_decomposition(const MeasureSpec& spec,
                                                   const Subspace& e,
                                                   const ScalarFn& f,
                                                   const CheckOptions& opts,
                                                   std::uint64_t seed,
                                                   CvMethodChoice choice) {
  if (spec.dim() != e.ambient_dim() || f.dim() != spec.dim())
    throw std::invalid_argument("conditional_decomposition: dimension mismatch");
  if (!certifies_split(spec, e))
    throw std::invalid_argument(
        "conditional_decomposition: the measure is not certified to split "
        "along the subspace, so conditional resampling would be biased");

  const bool closed_possible = spec.is_gaussian() && f.is_closed_form();
  if (choice == CvMethodChoice::closed_form && !closed_possible)
    throw std::invalid_argument(
        "conditional_decomposition: closed form needs a Gaussian measure and "
        "a linear or quadratic function");
  const bool closed = choice == CvMethodChoice::closed_form ||
                      (choice == CvMethodChoice::automatic && closed_possible);

  ConditionalDecomposition out;
  if (closed) {
    const auto& g = spec.gaussian_part();
    const Eigen::MatrixXd p = e.projector();
    const Eigen::MatrixXd sy = p * g.cov() * p;
    double vcm = 0.0, total = 0.0;
    if (f.kind() == ScalarFn::Kind::linear) {
      const Eigen::VectorXd& u = f.linear_u();
      vcm = u.dot(sy * u);
      total = u.dot(g.cov() * u);
    } else {  // quadratic; constants are linear forms with u = 0
      const Eigen::MatrixXd& a = f.quad_a();
      const Eigen::VectorXd& b = f.quad_b();
      const Eigen::VectorXd my = p * g.mean();
      const Eigen::VectorXd mz = g.mean() - my;
      // E[f | P_E X = y] is the quadratic y'Ay + (2 A m_Z + b)'y + const.
      vcm = gaussian_quad_variance(sy, my, a, 2.0 * a * mz + b);
      total = gaussian_quad_variance(g.cov(), g.mean(), a, b);
    }
    out.var_of_conditional_mean = {vcm, 0.0, CvMethod::closed_form_gaussian};
    out.mean_of_conditional_variance = {std::max(0.0, total - vcm), 0.0,
                                        CvMethod::closed_form_gaussian};
    out.total_variance = {total, 0.0, 0};
    return out;
  }

  if (opts.n_outer < 2 || opts.n_inner < 2)
    throw std::invalid_argument("conditional_decomposition: budget too small");
  Rng rng(derive_seed(seed, "conditional_decomposition", 0));
  std::vector<double> cond_mean(static_cast<std::size_t>(opts.n_outer));
  std::vector<double> outer_value(static_cast<std::size_t>(opts.n_outer));
  RunningMoments cond_var;
  for (int j = 0; j < opts.n_outer; ++j) {
    const Eigen::VectorXd x = spec.sample_one(rng);
    const Eigen::VectorXd y = e.project(x);
    outer_value[static_cast<std::size_t>(j)] = f(x);
    RunningMoments inner;
    for (int i = 0; i < opts.n_inner; ++i) {
      const Eigen::VectorXd fresh = spec.sample_one(rng);
      inner.add(f(y + (fresh - e.project(fresh))));
    }
    cond_mean[static_cast<std::size_t>(j)] = inner.mean();
    cond_var.add(inner.variance());
  }
  const auto raw = sample_variance_with_se(cond_mean);
  const double correction = cond_var.mean() / opts.n_inner;
  const double corr_se = cond_var.se_mean() / opts.n_inner;
  out.var_of_conditional_mean = {raw.value - correction,
                                 std::hypot(raw.se, corr_se),
                                 CvMethod::resample_nested};
  out.mean_of_conditional_variance = {cond_var.mean(), cond_var.se_mean(),
                                      CvMethod::resample_nested};
  const auto total = sample_variance_with_se(outer_value);
  out.total_variance = {total.value, total.se, total.n};
  return out;
}

ConditionalVarianceEstimate conditional_mean_variance(const MeasureSpec& spec,
                                                      const Subspace& e,
                                                      const ScalarFn& f,
                                                      int n_outer, int n_inner,
                                                      std::uint64_t seed) {
  CheckOptions opts;
  opts.n_outer = n_outer;
  opts.n_inner = n_inner;
  return conditional_decomposition(spec, e, f, opts, seed).var_of_conditional_mean;
}

LinearizedBlReports check_linearized_bl(const MeasureSpec& spec,
                                        const SubspaceDistribution& xi,
                                        const ScalarFn& f, double lambda,
                                        const CheckOptions& opts,
                                        std::uint64_t seed) {
  if (!xi.is_discrete())
    throw std::invalid_argument("check_linearized_bl: xi must be discrete");
  const auto& atoms = xi.atoms();
  double lhs_drop = 0.0, lhs_drop_var = 0.0;
  double sum_cond_var = 0.0, sum_cond_var_var = 0.0;
  McEstimate var_f;
  for (std::size_t i = 0; i < atoms.size(); ++i) {
    const auto cd = conditional_decomposition(
        spec, atoms[i].subspace, f, opts, derive_seed(seed, "linearized_bl", i));
    const double w = atoms[i].weight;
    lhs_drop += w * cd.var_of_conditional_mean.value;
    lhs_drop_var += w * w * cd.var_of_conditional_mean.se * cd.var_of_conditional_mean.se;
    sum_cond_var += w * cd.mean_of_conditional_variance.value;
    sum_cond_var_var += w * w * cd.mean_of_conditional_variance.se *
                        cd.mean_of_conditional_variance.se;
    if (i == 0) var_f = cd.total_variance;
  }

  LinearizedBlReports out;
  out.variance_drop = make_report(
      "linearized-bl variance drop",
      {lhs_drop, std::sqrt(lhs_drop_var), var_f.n},
      {(1.0 - lambda) * var_f.value, (1.0 - lambda) * var_f.se, var_f.n},
      opts.z);
  out.variance_drop.params["lambda"] = lambda;

  if (lambda <= 0.0) {
    out.inverse_form.name = "linearized-bl inverse form";
    out.inverse_form.verdict = Verdict::inconclusive;
    out.inverse_form.notes = "inapplicable: lambda = 0 (no gap to divide by)";
    out.inverse_form.params["lambda"] = lambda;
  } else {
    out.inverse_form = make_report(
        "linearized-bl inverse form", var_f,
        {sum_cond_var / lambda, std::sqrt(sum_cond_var_var) / lambda, var_f.n},
        opts.z);
    out.inverse_form.params["lambda"] = lambda;
  }
  return out;
}

SlackReport check_bl_split(const MeasureSpec& mu, const SubspaceDistribution& xi,
                           const GaussianMeasure& nu, double lambda) {
  if (!xi.is_discrete())
    throw std::invalid_argument("check_bl_split: xi must be discrete");
  if (nu.dim() != mu.dim() || mu.dim() != xi.ambient_dim())
    throw std::invalid_argument("check_bl_split: dimension mismatch");
  const auto flat = as_gaussian(mu);
  if (!flat)
    throw std::invalid_argument(
        "check_bl_split: the closed-form path needs a Gaussian or "
        "all-Gaussian product measure");
  for (const auto& atom : xi.atoms()) {
    if (!certifies_split(mu, atom.subspace))
      throw std::invalid_argument(
          "check_bl_split: mu does not split along every xi atom");
  }

  double lhs = 0.0;
  for (const auto& atom : xi.atoms()) {
    if (atom.subspace.dim() == 0) continue;  // zero marginal carries nothing
    lhs += atom.weight * gaussian_kl(marginal_gaussian(nu, atom.subspace),
                                     marginal_gaussian(*flat, atom.subspace));
  }
  const double total = gaussian_kl(nu, *flat);
  auto report = make_report("split relative-entropy drop", {lhs, 0.0, 0},
                            {(1.0 - lambda) * total, 0.0, 0}, 3.0);
  report.params["lambda"] = lambda;
  return report;
}

SlackReport check_efron_stein(const std::vector<MeasureSpec>& components,
                              const ScalarFn& f, const CheckOptions& opts,
                              std::uint64_t seed) {
  const int k = static_cast<int>(components.size());
  if (k == 0) throw std::invalid_argument("check_efron_stein: no components");
  for (const auto& c : components)
    if (c.dim() != 1)
      throw std::invalid_argument("check_efron_stein: components must be 1-d");
  if (f.dim() != k)
    throw std::invalid_argument("check_efron_stein: function dimension mismatch");
  if (opts.n_outer < 2 || opts.n_inner < 2)
    throw std::invalid_argument("check_efron_stein: budget too small");

  Rng rng(derive_seed(seed, "efron_stein", 0));
  const auto draw = [&](Eigen::VectorXd& x) {
    for (int i = 0; i < k; ++i) x[i] = components[static_cast<std::size_t>(i)].sample_one(rng)[0];
  };
  std::vector<double> f_outer(static_cast<std::size_t>(opts.n_outer));
  RunningMoments rhs_acc;
  Eigen::VectorXd x(k);
  for (int j = 0; j < opts.n_outer; ++j) {
    draw(x);
    f_outer[static_cast<std::size_t>(j)] = f(x);
    double sum_cond = 0.0;
    for (int i = 0; i < k; ++i) {
      const double keep = x[i];
      RunningMoments inner;
      for (int s = 0; s < opts.n_inner; ++s) {
        x[i] = components[static_cast<std::size_t>(i)].sample_one(rng)[0];
        inner.add(f(x));
      }
      x[i] = keep;
      sum_cond += inner.variance();
    }
    rhs_acc.add(sum_cond);
  }
  const auto lhs = sample_variance_with_se(f_outer);
  auto report = make_report("efron-stein", {lhs.value, lhs.se, lhs.n},
                            rhs_acc.mean_estimate(), opts.z);
  report.params["k"] = static_cast<double>(k);
  return report;
}

SlackReport check_dks(const MeasureSpec& base, const ScalarFn& g, int n, int m,
                      const CheckOptions& opts, std::uint64_t seed) {
  if (base.dim() != 1) throw std::invalid_argument("check_dks: base must be 1-d");
  if (g.dim() != 1) throw std::invalid_argument("check_dks: g must be 1-d");
  if (m < 1 || n < m) throw std::invalid_argument("check_dks: need n >= m >= 1");
  if (opts.n_outer < 2 || opts.n_inner < 2)
    throw std::invalid_argument("check_dks: budget too small");

  Rng rng(derive_seed(seed, "dks", 0));
  const auto partial_sum = [&](int count) {
    double s = 0.0;
    for (int i = 0; i < count; ++i) s += base.sample_one(rng)[0];
    return s;
  };
  Eigen::VectorXd arg(1);

  std::vector<double> cond_mean(static_cast<std::size_t>(opts.n_outer));
  RunningMoments cond_var;
  for (int j = 0; j < opts.n_outer; ++j) {
    const double s_m = partial_sum(m);
    RunningMoments inner;
    for (int i = 0; i < opts.n_inner; ++i) {
      arg[0] = s_m + partial_sum(n - m);
      inner.add(g(arg));
    }
    cond_mean[static_cast<std::size_t>(j)] = inner.mean();
    cond_var.add(inner.variance());
  }
  const auto raw = sample_variance_with_se(cond_mean);
  const McEstimate lhs{raw.value - cond_var.mean() / opts.n_inner,
                       std::hypot(raw.se, cond_var.se_mean() / opts.n_inner),
                       raw.n};

  std::vector<double> direct(static_cast<std::size_t>(opts.n_outer));
  for (int j = 0; j < opts.n_outer; ++j) {
    arg[0] = partial_sum(n);
    direct[static_cast<std::size_t>(j)] = g(arg);
  }
  const auto var_g = sample_variance_with_se(direct);
  const double ratio = static_cast<double>(m) / n;
  auto report = make_report("dembo-kagan-shepp", lhs,
                            {ratio * var_g.value, ratio * var_g.se, var_g.n},
                            opts.z);
  report.params["n"] = n;
  report.params["m"] = m;
  return report;
}

SlackReport check_madiman_barron(const std::vector<MeasureSpec>& components,
                                 const std::vector<std::vector<int>>& cover,
                                 int r, const std::vector<ScalarFn>& psi,
                                 const CheckOptions& opts, std::uint64_t seed) {
  const int n = static_cast<int>(components.size());
  if (n == 0) throw std::invalid_argument("check_madiman_barron: no components");
  for (const auto& c : components)
    if (c.dim() != 1)
      throw std::invalid_argument("check_madiman_barron: components must be 1-d");
  if (cover.size() != psi.size())
    throw std::invalid_argument("check_madiman_barron: cover/psi size mismatch");
  if (r < 1) throw std::invalid_argument("check_madiman_barron: r must be positive");

  std::vector<int> occurrences(static_cast<std::size_t>(n), 0);
  for (std::size_t i = 0; i < cover.size(); ++i) {
    if (cover[i].empty())
      throw std::invalid_argument("check_madiman_barron: empty cover member");
    if (psi[i].dim() != static_cast<int>(cover[i].size()))
      throw std::invalid_argument("check_madiman_barron: psi dimension mismatch");
    for (int idx : cover[i]) {
      if (idx < 0 || idx >= n)
        throw std::invalid_argument("check_madiman_barron: cover index out of range");
      ++occurrences[static_cast<std::size_t>(idx)];
    }
  }
  std::string uncovered_note;
  for (int idx = 0; idx < n; ++idx) {
    if (occurrences[static_cast<std::size_t>(idx)] > r)
      throw std::invalid_argument(
          "check_madiman_barron: an index appears in more than r members");
    if (occurrences[static_cast<std::size_t>(idx)] == 0)
      uncovered_note += (uncovered_note.empty() ? "uncovered indices: " : ", ") +
                        std::to_string(idx);
  }

  const int total = opts.n_outer * opts.n_inner;
  Rng rng(derive_seed(seed, "madiman_barron", 0));
  std::vector<double> sum_values(static_cast<std::size_t>(total));
  std::vector<std::vector<double>> member_values(
      cover.size(), std::vector<double>(static_cast<std::size_t>(total)));
  Eigen::VectorXd x(n);
  for (int s = 0; s < total; ++s) {
    for (int i = 0; i < n; ++i)
      x[i] = components[static_cast<std::size_t>(i)].sample_one(rng)[0];
    double t = 0.0;
    for (std::size_t i = 0; i < cover.size(); ++i) {
      Eigen::VectorXd sub(static_cast<Eigen::Index>(cover[i].size()));
      for (std::size_t a = 0; a < cover[i].size(); ++a)
        sub[static_cast<Eigen::Index>(a)] = x[cover[i][a]];
      const double v = psi[i](sub);
      member_values[i][static_cast<std::size_t>(s)] = v;
      t += v;
    }
    sum_values[static_cast<std::size_t>(s)] = t;
  }
  const auto lhs = sample_variance_with_se(sum_values);
  double rhs = 0.0, rhs_var = 0.0;
  for (const auto& vals : member_values) {
    const auto v = sample_variance_with_se(vals);
    rhs += v.value;
    rhs_var += v.se * v.se;
  }
  auto report = make_report("madiman-barron", {lhs.value, lhs.se, lhs.n},
                            {r * rhs, r * std::sqrt(rhs_var), lhs.n}, opts.z);
  report.params["r"] = r;
  report.params["n"] = n;
  if (!uncovered_note.empty()) report.notes = uncovered_note;
  return report;
}

SlackReport check_jensen_improvement(const MeasureSpec& spec,
                                     const SubspaceDistribution& xi,
                                     const std::vector<ScalarFn>& psi_family,
                                     double lambda, const CheckOptions& opts,
                                     std::uint64_t seed) {
  if (!xi.is_discrete())
    throw std::invalid_argument("check_jensen_improvement: xi must be discrete");
  const auto& atoms = xi.atoms();
  if (psi_family.size() != atoms.size())
    throw std::invalid_argument(
        "check_jensen_improvement: one function per xi atom required");
  for (const auto& p : psi_family)
    if (p.dim() != spec.dim())
      throw std::invalid_argument("check_jensen_improvement: psi dimension mismatch");
  for (const auto& atom : atoms) {
    if (!certifies_split(spec, atom.subspace))
      throw std::invalid_argument(
          "check_jensen_improvement: the measure is not certified to split "
          "along every xi atom");
  }

  const int total = opts.n_outer * opts.n_inner;
  Rng rng(derive_seed(seed, "jensen", 0));
  std::vector<double> avg_values(static_cast<std::size_t>(total));
  std::vector<std::vector<double>> atom_values(
      atoms.size(), std::vector<double>(static_cast<std::size_t>(total)));
  for (int s = 0; s < total; ++s) {
    const Eigen::VectorXd x = spec.sample_one(rng);
    double g = 0.0;
    for (std::size_t i = 0; i < atoms.size(); ++i) {
      const double v = psi_family[i](atoms[i].subspace.project(x));
      atom_values[i][static_cast<std::size_t>(s)] = v;
      g += atoms[i].weight * v;
    }
    avg_values[static_cast<std::size_t>(s)] = g;
  }
  const auto lhs = sample_variance_with_se(avg_values);
  double rhs = 0.0, rhs_var = 0.0;
  for (std::size_t i = 0; i < atoms.size(); ++i) {
    const auto v = sample_variance_with_se(atom_values[i]);
    rhs += atoms[i].weight * v.value;
    rhs_var += atoms[i].weight * atoms[i].weight * v.se * v.se;
  }
  auto report = make_report(
      "jensen improvement", {lhs.value, lhs.se, lhs.n},
      {(1.0 - lambda) * rhs, (1.0 - lambda) * std::sqrt(rhs_var), lhs.n},
      opts.z);
  report.params["lambda"] = lambda;
  return report;
}

namespace {

std::pair<double, double> wilson_interval(double count, double n, double z) {
  const double p = count / n;
  const double z2 = z * z;
  const double denom = 1.0 + z2 / n;
  const double center = (p + z2 / (2.0 * n)) / denom;
  const double half =
      z * std::sqrt(p * (1.0 - p) / n + z2 / (4.0 * n * n)) / denom;
  return {std::max(0.0, center - half), std::min(1.0, center + half)};
}

}  // namespace

TailRatioReport tail_ratio_diagnostic(const Eigen::MatrixXd& samples, double c,
                                      double big_c,
                                      const std::vector<double>& t_grid) {
  if (samples.rows() < 10000)
    throw std::invalid_argument("tail_ratio_diagnostic: need at least 1e4 samples");
  if (!(c > 0.0 && c < 1.0) || !(big_c > 0.0 && big_c < 1.0))
    throw std::invalid_argument("tail_ratio_diagnostic: c and C must lie in (0,1)");
  if (t_grid.empty())
    throw std::invalid_argument("tail_ratio_diagnostic: empty grid");
  for (std::size_t i = 0; i < t_grid.size(); ++i)
    if (t_grid[i] <= 0.0 || (i > 0 && t_grid[i] <= t_grid[i - 1]))
      throw std::invalid_argument(
          "tail_ratio_diagnostic: grid must be positive and increasing");

  const double n = static_cast<double>(samples.rows());
  std::vector<double> sq(static_cast<std::size_t>(samples.rows()));
  for (Eigen::Index i = 0; i < samples.rows(); ++i)
    sq[static_cast<std::size_t>(i)] = samples.row(i).squaredNorm();
  std::sort(sq.begin(), sq.end());
  const auto exceed = [&](double t) {
    return static_cast<double>(sq.end() -
                               std::upper_bound(sq.begin(), sq.end(), t));
  };

  TailRatioReport rep;
  rep.t_grid = t_grid;
  const double z = 2.0;
  constexpr double kMinTailCount = 10.0;
  for (double t : t_grid) {
    const double k_t = exceed(t);
    const double k_ct = exceed(c * t);
    rep.survival_t.push_back(k_t / n);
    rep.survival_ct.push_back(k_ct / n);
    const auto [lo_t, hi_t] = wilson_interval(k_t, n, z);
    const auto [lo_ct, hi_ct] = wilson_interval(k_ct, n, z);
    rep.ci_low_t.push_back(lo_t);
    rep.ci_high_t.push_back(hi_t);
    rep.ci_low_ct.push_back(lo_ct);
    rep.ci_high_ct.push_back(hi_ct);
    rep.supported.push_back(k_ct >= kMinTailCount);
    rep.holds_at.push_back(k_t / n <= big_c * (k_ct / n));
  }

  // Trailing supported run on which the point estimates satisfy the bound.
  int last = -1;
  for (int i = static_cast<int>(t_grid.size()) - 1; i >= 0; --i) {
    if (rep.supported[static_cast<std::size_t>(i)]) {
      last = i;
      break;
    }
  }
  if (last >= 0 && rep.holds_at[static_cast<std::size_t>(last)]) {
    int start = last;
    while (start > 0 && rep.supported[static_cast<std::size_t>(start - 1)] &&
           rep.holds_at[static_cast<std::size_t>(start - 1)])
      --start;
    rep.t0 = t_grid[static_cast<std::size_t>(start)];
    rep.holds_from_t0 = true;
  }
  return rep;
}

}  // namespace splitkit

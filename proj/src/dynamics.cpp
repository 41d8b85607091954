#include "splitkit/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numbers>
#include <stdexcept>

#include <Eigen/Dense>

#include "splitkit/parallel.hpp"

namespace splitkit {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

}  // namespace

CollisionScene::CollisionScene(SubspaceDistribution xi, MeasureSpec bath,
                               MeasureSpec initial, double rate)
    : xi_(std::move(xi)),
      bath_(std::move(bath)),
      initial_(std::move(initial)),
      rate_(rate) {
  if (bath_.dim() != xi_.ambient_dim() || initial_.dim() != xi_.ambient_dim())
    throw std::invalid_argument(
        "CollisionScene: bath, initial law, and xi must share one ambient "
        "dimension");
  if (!(rate_ > 0.0) || !std::isfinite(rate_))
    throw std::invalid_argument("CollisionScene: rate must be positive");
}

std::pair<Eigen::VectorXd, Eigen::VectorXd> collide(const Eigen::VectorXd& v,
                                                    const Eigen::VectorXd& v_star,
                                                    const Subspace& e) {
  if (v.size() != v_star.size() || v.size() != e.ambient_dim())
    throw std::invalid_argument("collide: dimension mismatch");
  const Eigen::VectorXd pv = e.project(v);
  const Eigen::VectorXd pv_star = e.project(v_star);
  return {pv + (v_star - pv_star), pv_star + (v - pv)};
}

std::vector<Trajectory> simulate(const CollisionScene& scene, double t_end,
                                 int n_paths, std::uint64_t seed, int jobs) {
  if (!(t_end > 0.0)) throw std::invalid_argument("simulate: t_end must be positive");
  if (n_paths < 0) throw std::invalid_argument("simulate: negative path count");

  const auto& xi = scene.xi();
  const bool discrete = xi.is_discrete();
  std::vector<Trajectory> paths(static_cast<std::size_t>(n_paths));
  parallel_for(resolve_jobs(jobs), n_paths, [&](std::int64_t p) {
    Rng rng(derive_seed(seed, "simulate", static_cast<std::uint64_t>(p)));
    Trajectory& traj = paths[static_cast<std::size_t>(p)];
    Eigen::VectorXd v = scene.initial().sample_one(rng);
    traj.times.push_back(0.0);
    traj.states.push_back(v);
    traj.atom_indices.push_back(-1);
    double t = 0.0;
    while (true) {
      t += rng.exponential(scene.rate());
      if (t > t_end) break;
      int atom = -1;
      Eigen::VectorXd pv, pv_star;
      const Eigen::VectorXd v_star = scene.bath().sample_one(rng);
      if (discrete) {
        atom = static_cast<int>(xi.sample_atom_index(rng));
        const Subspace& e = xi.atoms()[static_cast<std::size_t>(atom)].subspace;
        pv = e.project(v);
        pv_star = e.project(v_star);
      } else {
        const Subspace e = xi.sample(rng.next_u64());
        pv = e.project(v);
        pv_star = e.project(v_star);
      }
      v = pv + (v_star - pv_star);
      traj.times.push_back(t);
      traj.states.push_back(v);
      traj.atom_indices.push_back(atom);
    }
  });
  return paths;
}

McEstimate generator_apply(const std::function<double(const Eigen::VectorXd&)>& f,
                           const CollisionScene& scene, const Eigen::VectorXd& v,
                           int n_mc, std::uint64_t seed) {
  if (v.size() != scene.dim())
    throw std::invalid_argument("generator_apply: dimension mismatch");
  if (n_mc < 2) throw std::invalid_argument("generator_apply: need n_mc >= 2");

  const auto& xi = scene.xi();
  const double f_v = f(v);
  Rng rng(derive_seed(seed, "generator", 0));
  RunningMoments acc;
  if (xi.is_discrete()) {
    const auto& atoms = xi.atoms();
    std::vector<Eigen::VectorXd> pv(atoms.size());
    for (std::size_t i = 0; i < atoms.size(); ++i)
      pv[i] = atoms[i].subspace.project(v);
    for (int s = 0; s < n_mc; ++s) {
      const Eigen::VectorXd v_star = scene.bath().sample_one(rng);
      double jump = 0.0;
      for (std::size_t i = 0; i < atoms.size(); ++i) {
        const Eigen::VectorXd post =
            pv[i] + (v_star - atoms[i].subspace.project(v_star));
        jump += atoms[i].weight * (f(post) - f_v);
      }
      acc.add(scene.rate() * jump);
    }
  } else {
    for (int s = 0; s < n_mc; ++s) {
      const Eigen::VectorXd v_star = scene.bath().sample_one(rng);
      const Subspace e = xi.sample(rng.next_u64());
      const Eigen::VectorXd post = e.project(v) + (v_star - e.project(v_star));
      acc.add(scene.rate() * (f(post) - f_v));
    }
  }
  return acc.mean_estimate();
}

MomentEvolution moment_evolution(const CollisionScene& scene,
                                 const std::vector<double>& times) {
  if (!scene.xi().is_discrete())
    throw std::invalid_argument("moment_evolution: xi must be discrete");
  if (!scene.bath().is_gaussian() || !scene.initial().is_gaussian())
    throw std::invalid_argument(
        "moment_evolution: bath and initial law must be Gaussian");
  for (std::size_t i = 0; i < times.size(); ++i) {
    if (times[i] < 0.0 || (i > 0 && times[i] < times[i - 1]))
      throw std::invalid_argument(
          "moment_evolution: times must be nonnegative and nondecreasing");
  }

  const int n = scene.dim();
  const auto& atoms = scene.xi().atoms();
  const Eigen::MatrixXd id = Eigen::MatrixXd::Identity(n, n);
  std::vector<Eigen::MatrixXd> proj(atoms.size());
  Eigen::MatrixXd q = Eigen::MatrixXd::Zero(n, n);
  for (std::size_t i = 0; i < atoms.size(); ++i) {
    proj[i] = atoms[i].subspace.projector();
    q += atoms[i].weight * proj[i];
  }

  const auto& bath = scene.bath().gaussian_part();
  const auto& init = scene.initial().gaussian_part();
  const Eigen::VectorXd mb = bath.mean();
  const Eigen::MatrixXd second_b = bath.cov() + mb * mb.transpose();

  // State: mean theta and raw second moment M = E[V V^T].  One jump maps
  //   theta -> Q theta + (I - Q) m_b
  //   M     -> sum_i w_i (P M P + P theta m_b^T P' + P' m_b theta^T P + P' M_b P')
  // with P' = I - P, and the flow is rate * (jump - identity).
  const auto derivative = [&](const Eigen::VectorXd& theta,
                              const Eigen::MatrixXd& m,
                              Eigen::VectorXd& dtheta, Eigen::MatrixXd& dm) {
    dtheta = q * theta + (id - q) * mb - theta;
    dm = -m;
    for (std::size_t i = 0; i < atoms.size(); ++i) {
      const Eigen::MatrixXd& p = proj[i];
      const Eigen::MatrixXd pc = id - p;
      const Eigen::VectorXd pt = p * theta;
      const Eigen::VectorXd pm = pc * mb;
      dm += atoms[i].weight *
            (p * m * p + pt * pm.transpose() + pm * pt.transpose() +
             pc * second_b * pc);
    }
    dtheta *= scene.rate();
    dm *= scene.rate();
  };

  Eigen::VectorXd theta = init.mean();
  Eigen::MatrixXd m = init.cov() + theta * theta.transpose();
  MomentEvolution out;
  out.q = q;
  out.times = times;

  double t = 0.0;
  const double h_target = 1e-3 / scene.rate();
  Eigen::VectorXd k1, k2, k3, k4;
  Eigen::MatrixXd l1, l2, l3, l4;
  for (double t_query : times) {
    const double gap = t_query - t;
    if (gap > 0.0) {
      const int steps = static_cast<int>(
          std::min(2e6, std::max(1.0, std::ceil(gap / h_target))));
      const double h = gap / steps;
      for (int s = 0; s < steps; ++s) {
        derivative(theta, m, k1, l1);
        derivative(theta + 0.5 * h * k1, m + 0.5 * h * l1, k2, l2);
        derivative(theta + 0.5 * h * k2, m + 0.5 * h * l2, k3, l3);
        derivative(theta + h * k3, m + h * l3, k4, l4);
        theta += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        m += (h / 6.0) * (l1 + 2.0 * l2 + 2.0 * l3 + l4);
      }
      t = t_query;
    }
    out.means.push_back(theta);
    Eigen::MatrixXd cov = m - theta * theta.transpose();
    cov = 0.5 * (cov + cov.transpose()).eval();
    out.covariances.push_back(std::move(cov));
  }
  return out;
}

double poisson_tail(double mean, int k) {
  if (mean < 0.0) throw std::invalid_argument("poisson_tail: negative mean");
  if (k < 0) return 1.0;
  if (mean == 0.0) return 0.0;
  double term = std::exp(-mean);
  double cum = term;
  for (int j = 1; j <= k; ++j) {
    term *= mean / j;
    cum += term;
  }
  return std::max(0.0, 1.0 - cum);
}

int poisson_trunc_k(double mean, double bound) {
  if (!(bound > 0.0)) throw std::invalid_argument("poisson_trunc_k: bound must be positive");
  int k = 0;
  while (poisson_tail(mean, k) >= bound) ++k;
  return k;
}

NuT nu_t_density(const CollisionScene& scene, double t, int trunc_k) {
  if (!scene.xi().is_discrete())
    throw std::invalid_argument("nu_t_density: xi must be discrete");
  if (t < 0.0) throw std::invalid_argument("nu_t_density: negative time");
  if (trunc_k < 0) throw std::invalid_argument("nu_t_density: negative trunc_k");
  if (!scene.bath().is_gaussian() || !scene.initial().is_gaussian())
    throw std::invalid_argument(
        "nu_t_density: bath and initial law must be Gaussian");
  const int n = scene.dim();
  const Eigen::MatrixXd id = Eigen::MatrixXd::Identity(n, n);
  const auto& bath = scene.bath().gaussian_part();
  const auto& init = scene.initial().gaussian_part();
  if (bath.mean().norm() > 1e-10 || (bath.cov() - id).norm() > 1e-8)
    throw std::invalid_argument("nu_t_density: bath must be the standard Gaussian");
  if ((init.cov() - id).norm() > 1e-8)
    throw std::invalid_argument(
        "nu_t_density: initial law must have identity covariance");
  const auto& atoms = scene.xi().atoms();
  const double a = static_cast<double>(atoms.size());
  if (trunc_k * std::log(a) > std::log(1e6) + 1e-9)
    throw std::invalid_argument("nu_t_density: a^trunc_k exceeds the 1e6 budget");

  std::vector<Eigen::MatrixXd> proj(atoms.size());
  for (std::size_t i = 0; i < atoms.size(); ++i)
    proj[i] = atoms[i].subspace.projector();

  // Enumerate collision words level by level, merging words whose means agree
  // to ~1e-9 (they index identical unit-covariance components).  Keys are
  // coordinate-quantized means; std::map keeps the final ordering
  // deterministic across runs and worker counts.
  using Key = std::vector<long long>;
  const auto key_of = [n](const Eigen::VectorXd& mu) {
    Key k(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) k[static_cast<std::size_t>(i)] = llround(mu[i] * 1e9);
    return k;
  };

  const double jump_mean = scene.rate() * t;
  std::map<Key, std::pair<Eigen::VectorXd, double>> total;
  std::map<Key, std::pair<Eigen::VectorXd, double>> level;
  level.emplace(key_of(init.mean()), std::make_pair(init.mean(), 1.0));

  double pois = std::exp(-jump_mean);  // Poisson(jump_mean) pmf at current level
  double mass_kept = 0.0;
  for (int len = 0; len <= trunc_k; ++len) {
    if (len > 0) {
      pois *= jump_mean / len;
      std::map<Key, std::pair<Eigen::VectorXd, double>> next;
      for (const auto& [key, entry] : level) {
        for (std::size_t i = 0; i < atoms.size(); ++i) {
          Eigen::VectorXd mu = proj[i] * entry.first;
          Key key = key_of(mu);
          auto [it, inserted] = next.try_emplace(
              std::move(key), std::make_pair(std::move(mu), 0.0));
          it->second.second += atoms[i].weight * entry.second;
        }
      }
      level = std::move(next);
    }
    if (pois <= 0.0) continue;
    mass_kept += pois;
    for (const auto& [key, entry] : level) {
      auto [it, inserted] =
          total.try_emplace(key, std::make_pair(entry.first, 0.0));
      it->second.second += pois * entry.second;
    }
  }

  NuT out;
  out.truncation_mass = std::max(0.0, 1.0 - mass_kept);
  out.initial_mean = init.mean();
  for (const auto& [key, entry] : total) {
    if (entry.second <= 0.0) continue;
    out.means.push_back(entry.first);
    out.weights.push_back(entry.second);
  }
  return out;
}

double NuT::log_density(const Eigen::VectorXd& x) const {
  if (means.empty()) return -kInf;
  const int n = static_cast<int>(x.size());
  double best = -kInf;
  std::vector<double> expo(weights.size());
  for (std::size_t j = 0; j < weights.size(); ++j) {
    expo[j] = std::log(weights[j]) - 0.5 * (x - means[j]).squaredNorm();
    best = std::max(best, expo[j]);
  }
  double sum = 0.0;
  for (double e : expo) sum += std::exp(e - best);
  return best + std::log(sum) - 0.5 * n * std::log(2.0 * std::numbers::pi);
}

double NuT::density(const Eigen::VectorXd& x) const {
  return std::exp(log_density(x));
}

Eigen::VectorXd NuT::sample(Rng& rng) const {
  if (means.empty()) throw std::logic_error("NuT::sample: empty mixture");
  double total = 0.0;
  for (double w : weights) total += w;
  const double u = rng.uniform01() * total;
  double cum = 0.0;
  std::size_t idx = weights.size() - 1;
  for (std::size_t j = 0; j < weights.size(); ++j) {
    cum += weights[j];
    if (u < cum) {
      idx = j;
      break;
    }
  }
  return means[idx] + rng.normal_vector(means[idx].size());
}

KlEstimate kl_to_gaussian(const NuT& nu, const GaussianMeasure& reference,
                          int n_mc, std::uint64_t seed) {
  if (nu.means.empty()) throw std::invalid_argument("kl_to_gaussian: empty mixture");
  if (reference.dim() != nu.means.front().size())
    throw std::invalid_argument("kl_to_gaussian: dimension mismatch");
  if (n_mc < 2) throw std::invalid_argument("kl_to_gaussian: need n_mc >= 2");
  if (reference.rank() < reference.dim())
    return {kInf, 0.0, 0, 0.0};  // absolutely continuous part is empty

  const double log_norm = std::log1p(-nu.truncation_mass);
  Rng rng(derive_seed(seed, "kl", 0));
  RunningMoments acc;
  for (int s = 0; s < n_mc; ++s) {
    const Eigen::VectorXd x = nu.sample(rng);
    acc.add(nu.log_density(x) - log_norm - reference.log_density(x));
  }

  KlEstimate out;
  out.value = acc.mean();
  out.se = acc.se_mean();
  out.n = acc.count();

  // Truncation bias: the dropped components are unit-covariance Gaussians
  // whose means are projector products of the initial mean, hence no longer
  // than it.  Their divergence from the reference is bounded by the
  // worst-case mean on that ball, and mixing mass m against the kept part
  // costs at most m * max(kl) plus the binary entropy of m.
  const double m = nu.truncation_mass;
  if (m > 0.0 && m < 1.0) {
    const auto& ev = reference.range_eigenvalues();
    double trace_inv = 0.0, log_det = 0.0;
    for (int i = 0; i < ev.size(); ++i) {
      trace_inv += 1.0 / ev[i];
      log_det += std::log(ev[i]);
    }
    const double reach = nu.initial_mean.norm() + reference.mean().norm();
    const double worst_kl = 0.5 * (trace_inv - reference.dim() + log_det +
                                   reach * reach / ev[0]);
    const double h2 = -m * std::log(m) - (1.0 - m) * std::log1p(-m);
    out.bias_bound = m * std::max(std::abs(out.value), worst_kl) + h2;
  }
  return out;
}

double dv_lower_bound(const Eigen::VectorXd& theta, double lambda, double t,
                      double beta, int n) {
  if (!(beta > 1.0)) throw std::invalid_argument("dv_lower_bound: beta must exceed 1");
  if (n < 1) throw std::invalid_argument("dv_lower_bound: n must be positive");
  return n / (2.0 * beta) - 0.5 * n * std::log(beta / (beta - 1.0)) +
         std::exp(-lambda * t) * 0.5 * theta.squaredNorm() / beta;
}

ReversibilityResult reversibility_check(
    const CollisionScene& scene,
    const std::function<double(const Eigen::VectorXd&)>& f,
    const std::function<double(const Eigen::VectorXd&)>& g, int n_mc,
    std::uint64_t seed) {
  if (n_mc < 2) throw std::invalid_argument("reversibility_check: need n_mc >= 2");
  const auto& xi = scene.xi();
  Rng rng(derive_seed(seed, "reversibility", 0));
  RunningMoments lhs, rhs;
  for (int s = 0; s < n_mc; ++s) {
    const Eigen::VectorXd v = scene.bath().sample_one(rng);
    const Eigen::VectorXd v_star = scene.bath().sample_one(rng);
    const double f_v = f(v);
    const double g_v = g(v);
    double lf = 0.0, lg = 0.0;
    if (xi.is_discrete()) {
      for (const auto& atom : xi.atoms()) {
        const Eigen::VectorXd post =
            atom.subspace.project(v) + (v_star - atom.subspace.project(v_star));
        lf += atom.weight * (f(post) - f_v);
        lg += atom.weight * (g(post) - g_v);
      }
    } else {
      const Subspace e = xi.sample(rng.next_u64());
      const Eigen::VectorXd post = e.project(v) + (v_star - e.project(v_star));
      lf = f(post) - f_v;
      lg = g(post) - g_v;
    }
    lhs.add(f_v * scene.rate() * lg);
    rhs.add(g_v * scene.rate() * lf);
  }

  ReversibilityResult out;
  out.lhs = lhs.mean_estimate();
  out.rhs = rhs.mean_estimate();
  out.pass = std::abs(out.lhs.value - out.rhs.value) <=
             out.lhs.ci_halfwidth() + out.rhs.ci_halfwidth();
  return out;
}

}  // namespace splitkit

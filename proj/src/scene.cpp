#include "splitkit/scene.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "splitkit/decomposition.hpp"
#include "splitkit/io.hpp"

namespace splitkit {

namespace {

using json = nlohmann::ordered_json;

std::string child(const std::string& path, const std::string& key) {
  return path + "/" + key;
}

std::string item(const std::string& path, std::size_t index) {
  return path + "/" + std::to_string(index);
}

const json& require(const json& j, const std::string& path, const char* key) {
  if (!j.is_object()) throw SceneError(path, "expected an object");
  const auto it = j.find(key);
  if (it == j.end())
    throw SceneError(path, std::string("missing required key \"") + key + "\"");
  return *it;
}

void reject_unknown(const json& j, const std::string& path,
                    std::initializer_list<const char*> allowed) {
  if (!j.is_object()) throw SceneError(path, "expected an object");
  for (const auto& [key, value] : j.items()) {
    bool known = false;
    for (const char* a : allowed) known = known || key == a;
    if (!known) throw SceneError(child(path, key), "unknown key");
  }
}

double as_number(const json& j, const std::string& path) {
  if (!j.is_number()) throw SceneError(path, "expected a number");
  return j.get<double>();
}

int as_positive_int(const json& j, const std::string& path) {
  if (!j.is_number_integer() || j.get<std::int64_t>() <= 0)
    throw SceneError(path, "expected a positive integer");
  return static_cast<int>(j.get<std::int64_t>());
}

std::string as_string(const json& j, const std::string& path) {
  if (!j.is_string()) throw SceneError(path, "expected a string");
  return j.get<std::string>();
}

Eigen::VectorXd as_vector(const json& j, const std::string& path, int dim) {
  if (!j.is_array() || static_cast<int>(j.size()) != dim)
    throw SceneError(path, "expected an array of " + std::to_string(dim) +
                               " numbers");
  Eigen::VectorXd v(dim);
  for (int i = 0; i < dim; ++i) v[i] = as_number(j[static_cast<std::size_t>(i)], item(path, i));
  return v;
}

Eigen::MatrixXd as_square_matrix(const json& j, const std::string& path, int n) {
  if (!j.is_array() || static_cast<int>(j.size()) != n)
    throw SceneError(path, "expected " + std::to_string(n) + " rows");
  Eigen::MatrixXd m(n, n);
  for (int r = 0; r < n; ++r)
    m.row(r) = as_vector(j[static_cast<std::size_t>(r)], item(path, r), n).transpose();
  return m;
}

/// `{"basis": [...columns...]}` with each column a list of `ambient` numbers.
/// Key vetting happens in the caller, which also owns the sibling "weight".
Subspace parse_subspace(const json& j, const std::string& path, int ambient,
                        double rank_tol) {
  if (j.contains("ambient_dim") &&
      as_positive_int(j["ambient_dim"], child(path, "ambient_dim")) != ambient)
    throw SceneError(child(path, "ambient_dim"),
                     "inconsistent with the scene's ambient_dim");
  const json& basis = require(j, path, "basis");
  if (!basis.is_array()) throw SceneError(child(path, "basis"), "expected an array of columns");
  const int k = static_cast<int>(basis.size());
  Eigen::MatrixXd b(ambient, k);
  for (int c = 0; c < k; ++c)
    b.col(c) = as_vector(basis[static_cast<std::size_t>(c)],
                         item(child(path, "basis"), c), ambient);
  try {
    return Subspace(b, ambient, rank_tol);
  } catch (const std::invalid_argument& e) {
    throw SceneError(child(path, "basis"), e.what());
  }
}

SubspaceDistribution parse_xi(const json& j, const std::string& path,
                              int ambient, double rank_tol) {
  reject_unknown(j, path, {"atoms"});
  const json& atoms_json = require(j, path, "atoms");
  if (!atoms_json.is_array() || atoms_json.empty())
    throw SceneError(child(path, "atoms"), "expected a nonempty array");
  std::vector<WeightedAtom> atoms;
  for (std::size_t i = 0; i < atoms_json.size(); ++i) {
    const std::string apath = item(child(path, "atoms"), i);
    const json& a = atoms_json[i];
    reject_unknown(a, apath, {"basis", "ambient_dim", "weight"});
    const double w = as_number(require(a, apath, "weight"), child(apath, "weight"));
    atoms.push_back({parse_subspace(a, apath, ambient, rank_tol), w});
  }
  try {
    return SubspaceDistribution(ambient, std::move(atoms));
  } catch (const std::invalid_argument& e) {
    throw SceneError(path, e.what());
  }
}

MeasureSpec parse_measure(const json& j, const std::string& path, int dim,
                          const std::filesystem::path& base_dir,
                          const SubspaceDistribution& xi, double rank_tol);

MeasureSpec parse_product(const json& j, const std::string& path, int dim,
                          const std::filesystem::path& base_dir,
                          const SubspaceDistribution& xi, double rank_tol) {
  if (!xi.is_discrete())
    throw SceneError(path, "product factors need the decomposition of a discrete xi");
  if (dim != xi.ambient_dim())
    throw SceneError(path,
                     "product measures live on the full ambient space; factors "
                     "cannot themselves be products");
  const auto dec = independent_decomposition(xi);
  std::vector<int> block_dims;
  for (const auto& e : dec.independent) block_dims.push_back(e.dim());
  if (dec.dependent.dim() > 0) block_dims.push_back(dec.dependent.dim());

  const json& factors_json = require(j, path, "factors");
  const std::string fpath = child(path, "factors");
  if (!factors_json.is_array() ||
      factors_json.size() != block_dims.size())
    throw SceneError(fpath, "expected one factor per decomposition block (" +
                                std::to_string(block_dims.size()) + ")");
  std::vector<MeasureSpec> factors;
  for (std::size_t i = 0; i < factors_json.size(); ++i)
    factors.push_back(parse_measure(factors_json[i], item(fpath, i),
                                    block_dims[i], base_dir, xi, rank_tol));
  try {
    return MeasureSpec::product(dec, std::move(factors));
  } catch (const std::invalid_argument& e) {
    throw SceneError(path, e.what());
  }
}

MeasureSpec parse_measure(const json& j, const std::string& path, int dim,
                          const std::filesystem::path& base_dir,
                          const SubspaceDistribution& xi, double rank_tol) {
  const std::string type = as_string(require(j, path, "type"), child(path, "type"));
  if (j.contains("dim") &&
      as_positive_int(j["dim"], child(path, "dim")) != dim)
    throw SceneError(child(path, "dim"), "inconsistent dimension (expected " +
                                             std::to_string(dim) + ")");
  try {
    if (type == "gaussian") {
      reject_unknown(j, path, {"type", "dim", "mean", "cov"});
      Eigen::VectorXd mean = Eigen::VectorXd::Zero(dim);
      if (j.contains("mean")) mean = as_vector(j["mean"], child(path, "mean"), dim);
      Eigen::MatrixXd cov = Eigen::MatrixXd::Identity(dim, dim);
      if (j.contains("cov")) cov = as_square_matrix(j["cov"], child(path, "cov"), dim);
      return MeasureSpec::gaussian(GaussianMeasure(mean, cov, rank_tol));
    }
    if (type == "product") {
      reject_unknown(j, path, {"type", "dim", "factors"});
      return parse_product(j, path, dim, base_dir, xi, rank_tol);
    }
    if (type == "mixture") {
      reject_unknown(j, path, {"type", "dim", "base"});
      return MeasureSpec::mixture(
          xi, parse_measure(require(j, path, "base"), child(path, "base"), dim,
                            base_dir, xi, rank_tol));
    }
    if (type == "empirical") {
      reject_unknown(j, path, {"type", "dim", "csv", "rows"});
      if (j.contains("rows") == j.contains("csv"))
        throw SceneError(path, "empirical measures take exactly one of \"rows\", \"csv\"");
      Eigen::MatrixXd rows;
      if (j.contains("rows")) {
        const json& rj = j["rows"];
        if (!rj.is_array() || rj.empty())
          throw SceneError(child(path, "rows"), "expected a nonempty array");
        rows.resize(static_cast<Eigen::Index>(rj.size()), dim);
        for (std::size_t i = 0; i < rj.size(); ++i)
          rows.row(static_cast<Eigen::Index>(i)) =
              as_vector(rj[i], item(child(path, "rows"), i), dim).transpose();
      } else {
        const auto csv = base_dir / as_string(j["csv"], child(path, "csv"));
        try {
          rows = read_csv_matrix(csv);
        } catch (const std::runtime_error& e) {
          throw SceneError(child(path, "csv"), e.what());
        }
        if (rows.cols() != dim)
          throw SceneError(child(path, "csv"),
                           "sample width " + std::to_string(rows.cols()) +
                               " does not match dimension " + std::to_string(dim));
      }
      return MeasureSpec::empirical(std::move(rows));
    }
  } catch (const SceneError&) {
    throw;
  } catch (const std::invalid_argument& e) {
    throw SceneError(path, e.what());
  }
  throw SceneError(child(path, "type"),
                   "unknown measure type \"" + type +
                       "\" (expected gaussian, product, mixture, or empirical)");
}

ScalarFn parse_fn(const json& j, const std::string& path, int dim) {
  const std::string type = as_string(require(j, path, "type"), child(path, "type"));
  if (type == "linear") {
    reject_unknown(j, path, {"type", "u", "c"});
    const Eigen::VectorXd u = as_vector(require(j, path, "u"), child(path, "u"), dim);
    const double c = j.contains("c") ? as_number(j["c"], child(path, "c")) : 0.0;
    return ScalarFn::linear(u, c);
  }
  if (type == "quadratic") {
    reject_unknown(j, path, {"type", "a", "b", "c"});
    const Eigen::MatrixXd a =
        as_square_matrix(require(j, path, "a"), child(path, "a"), dim);
    Eigen::VectorXd b = Eigen::VectorXd::Zero(dim);
    if (j.contains("b")) b = as_vector(j["b"], child(path, "b"), dim);
    const double c = j.contains("c") ? as_number(j["c"], child(path, "c")) : 0.0;
    return ScalarFn::quadratic(a, b, c);
  }
  if (type == "norm_squared") {
    reject_unknown(j, path, {"type"});
    return ScalarFn::norm_squared(dim);
  }
  if (type == "constant") {
    reject_unknown(j, path, {"type", "c"});
    return ScalarFn::constant(dim, as_number(require(j, path, "c"), child(path, "c")));
  }
  throw SceneError(child(path, "type"),
                   "unknown function type \"" + type +
                       "\" (expected linear, quadratic, norm_squared, or constant)");
}

std::vector<std::string> parse_name_list(const json& j, const std::string& path) {
  if (j.is_string()) return {j.get<std::string>()};
  if (!j.is_array() || j.empty())
    throw SceneError(path, "expected a measure name or a nonempty array of names");
  std::vector<std::string> names;
  for (std::size_t i = 0; i < j.size(); ++i)
    names.push_back(as_string(j[i], item(path, i)));
  return names;
}

/// Resolves a name against the scene, surfacing unknown names at `path`.
const MeasureSpec& resolve(const Scene& scene, const std::string& name,
                           const std::string& path) {
  for (const auto& [n, spec] : scene.measures)
    if (n == name) return spec;
  throw SceneError(path, "unknown measure \"" + name + "\"");
}

SuiteCheckConfig parse_check(const json& j, const std::string& path,
                             const Scene& scene) {
  SuiteCheckConfig cfg;
  cfg.kind = as_string(require(j, path, "kind"), child(path, "kind"));
  cfg.label = j.contains("label")
                  ? as_string(j["label"], child(path, "label"))
                  : cfg.kind;
  if (j.contains("lambda")) cfg.lambda = as_number(j["lambda"], child(path, "lambda"));
  if (j.contains("n_outer"))
    cfg.n_outer = as_positive_int(j["n_outer"], child(path, "n_outer"));
  if (j.contains("n_inner"))
    cfg.n_inner = as_positive_int(j["n_inner"], child(path, "n_inner"));

  const int dim = scene.ambient_dim;
  const auto ambient_measure = [&](const char* key) {
    const std::string name =
        as_string(require(j, path, key), child(path, key));
    if (resolve(scene, name, child(path, key)).dim() != dim)
      throw SceneError(child(path, key),
                       "measure must live on the ambient space");
    return name;
  };
  const auto one_dim_components = [&](const char* key) {
    cfg.measures = parse_name_list(require(j, path, key), child(path, key));
    for (std::size_t i = 0; i < cfg.measures.size(); ++i)
      if (resolve(scene, cfg.measures[i], item(child(path, key), i)).dim() != 1)
        throw SceneError(item(child(path, key), i), "component measures must be 1-d");
  };

  if (cfg.kind == "bl_split") {
    reject_unknown(j, path, {"kind", "label", "lambda", "measure", "nu"});
    cfg.measures = {ambient_measure("measure"), ambient_measure("nu")};
  } else if (cfg.kind == "linearized_bl") {
    reject_unknown(j, path,
                   {"kind", "label", "lambda", "measure", "f", "n_outer", "n_inner"});
    cfg.measures = {ambient_measure("measure")};
    cfg.f = parse_fn(require(j, path, "f"), child(path, "f"), dim);
  } else if (cfg.kind == "efron_stein") {
    reject_unknown(j, path,
                   {"kind", "label", "components", "f", "n_outer", "n_inner"});
    one_dim_components("components");
    cfg.f = parse_fn(require(j, path, "f"), child(path, "f"),
                     static_cast<int>(cfg.measures.size()));
  } else if (cfg.kind == "dks") {
    reject_unknown(j, path,
                   {"kind", "label", "base", "g", "n", "m", "n_outer", "n_inner"});
    cfg.measures = {as_string(require(j, path, "base"), child(path, "base"))};
    if (resolve(scene, cfg.measures[0], child(path, "base")).dim() != 1)
      throw SceneError(child(path, "base"), "the summand law must be 1-d");
    cfg.f = parse_fn(require(j, path, "g"), child(path, "g"), 1);
    cfg.n = as_positive_int(require(j, path, "n"), child(path, "n"));
    cfg.m = as_positive_int(require(j, path, "m"), child(path, "m"));
    if (cfg.m > cfg.n) throw SceneError(child(path, "m"), "m must not exceed n");
  } else if (cfg.kind == "madiman_barron") {
    reject_unknown(j, path, {"kind", "label", "components", "cover", "r", "psi",
                             "n_outer", "n_inner"});
    one_dim_components("components");
    const json& cover = require(j, path, "cover");
    if (!cover.is_array()) throw SceneError(child(path, "cover"), "expected an array");
    for (std::size_t i = 0; i < cover.size(); ++i) {
      const json& s = cover[i];
      const std::string spath = item(child(path, "cover"), i);
      if (!s.is_array() || s.empty())
        throw SceneError(spath, "expected a nonempty index array");
      std::vector<int> members;
      for (std::size_t a = 0; a < s.size(); ++a) {
        if (!s[a].is_number_integer())
          throw SceneError(item(spath, a), "expected an integer index");
        members.push_back(static_cast<int>(s[a].get<std::int64_t>()));
      }
      cfg.cover.push_back(std::move(members));
    }
    cfg.r = as_positive_int(require(j, path, "r"), child(path, "r"));
    const json& psi = require(j, path, "psi");
    if (!psi.is_array() || psi.size() != cfg.cover.size())
      throw SceneError(child(path, "psi"), "expected one function per cover member");
    for (std::size_t i = 0; i < psi.size(); ++i)
      cfg.psi.push_back(parse_fn(psi[i], item(child(path, "psi"), i),
                                 static_cast<int>(cfg.cover[i].size())));
  } else if (cfg.kind == "jensen") {
    reject_unknown(j, path,
                   {"kind", "label", "lambda", "measure", "psi", "n_outer", "n_inner"});
    cfg.measures = {ambient_measure("measure")};
    const json& psi = require(j, path, "psi");
    if (!psi.is_array() || !scene.xi.is_discrete() ||
        psi.size() != scene.xi.atoms().size())
      throw SceneError(child(path, "psi"), "expected one function per xi atom");
    for (std::size_t i = 0; i < psi.size(); ++i)
      cfg.psi.push_back(parse_fn(psi[i], item(child(path, "psi"), i), dim));
  } else if (cfg.kind == "tail_ratio") {
    reject_unknown(j, path, {"kind", "label", "measure", "samples", "c", "C", "t_grid"});
    cfg.measures = {ambient_measure("measure")};
    cfg.samples = as_positive_int(require(j, path, "samples"), child(path, "samples"));
    cfg.c = as_number(require(j, path, "c"), child(path, "c"));
    cfg.big_c = as_number(require(j, path, "C"), child(path, "C"));
    const json& grid = require(j, path, "t_grid");
    if (!grid.is_array() || grid.empty())
      throw SceneError(child(path, "t_grid"), "expected a nonempty array");
    for (std::size_t i = 0; i < grid.size(); ++i)
      cfg.t_grid.push_back(as_number(grid[i], item(child(path, "t_grid"), i)));
  } else {
    throw SceneError(child(path, "kind"),
                     "unknown check kind \"" + cfg.kind + "\"");
  }
  return cfg;
}

std::vector<SuiteCheckConfig> parse_checks(const json& j, const std::string& path,
                                           const Scene& scene) {
  if (!j.is_array()) throw SceneError(path, "expected an array of checks");
  std::vector<SuiteCheckConfig> checks;
  for (std::size_t i = 0; i < j.size(); ++i)
    checks.push_back(parse_check(j[i], item(path, i), scene));
  return checks;
}

json parse_document(const std::string& text, const std::string& what) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    throw SceneError("/", what + " is not valid JSON: " + e.what());
  }
}

}  // namespace

const MeasureSpec& Scene::measure(const std::string& name) const {
  return resolve(*this, name, "/measures/" + name);
}

Scene parse_scene_text(const std::string& text,
                       const std::filesystem::path& base_dir) {
  const json root = parse_document(text, "scene");
  reject_unknown(root, "", {"ambient_dim", "seed", "xi", "measures", "dynamics",
                            "suite", "tolerances"});

  const int ambient =
      as_positive_int(require(root, "", "ambient_dim"), "/ambient_dim");

  SceneTolerances tols;
  if (root.contains("tolerances")) {
    const json& t = root["tolerances"];
    reject_unknown(t, "/tolerances", {"rank_tol", "suite_level"});
    if (t.contains("rank_tol")) {
      tols.rank_tol = as_number(t["rank_tol"], "/tolerances/rank_tol");
      if (tols.rank_tol <= 0) throw SceneError("/tolerances/rank_tol", "must be positive");
    }
    if (t.contains("suite_level")) {
      tols.suite_level = as_number(t["suite_level"], "/tolerances/suite_level");
      if (tols.suite_level <= 0 || tols.suite_level >= 1)
        throw SceneError("/tolerances/suite_level", "must lie in (0,1)");
    }
  }

  const json& seed_json = require(root, "", "seed");
  if (!seed_json.is_number_integer() || seed_json.get<std::int64_t>() < 0)
    throw SceneError("/seed", "expected a nonnegative integer");

  Scene scene{ambient,
              seed_json.get<std::uint64_t>(),
              parse_xi(require(root, "", "xi"), "/xi", ambient, tols.rank_tol),
              {},
              std::nullopt,
              {},
              tols};

  if (root.contains("measures")) {
    const json& measures = root["measures"];
    if (!measures.is_object()) throw SceneError("/measures", "expected an object");
    for (const auto& [name, mj] : measures.items()) {
      // Named measures default to the ambient dimension; 1-d auxiliary laws
      // (component measures for the coordinate checks) state "dim" explicitly.
      int mdim = ambient;
      if (mj.is_object() && mj.contains("dim"))
        mdim = as_positive_int(mj["dim"], "/measures/" + name + "/dim");
      scene.measures.emplace_back(
          name, parse_measure(mj, "/measures/" + name, mdim, base_dir,
                              scene.xi, tols.rank_tol));
    }
  }

  if (root.contains("dynamics")) {
    const json& d = root["dynamics"];
    reject_unknown(d, "/dynamics", {"bath", "initial", "rate"});
    DynamicsConfig cfg;
    cfg.bath = as_string(require(d, "/dynamics", "bath"), "/dynamics/bath");
    cfg.initial = as_string(require(d, "/dynamics", "initial"), "/dynamics/initial");
    resolve(scene, cfg.bath, "/dynamics/bath");
    resolve(scene, cfg.initial, "/dynamics/initial");
    if (d.contains("rate")) {
      cfg.rate = as_number(d["rate"], "/dynamics/rate");
      if (cfg.rate <= 0) throw SceneError("/dynamics/rate", "must be positive");
    }
    scene.dynamics = std::move(cfg);
  }

  if (root.contains("suite"))
    scene.suite = parse_checks(root["suite"], "/suite", scene);

  return scene;
}

Scene load_scene(const std::filesystem::path& file) {
  std::ifstream in(file, std::ios::binary);
  if (!in) throw SceneError("/", "cannot read scene file " + file.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_scene_text(buf.str(), file.parent_path());
}

std::vector<SuiteCheckConfig> parse_manifest_text(const std::string& text,
                                                  const Scene& scene) {
  const json root = parse_document(text, "manifest");
  if (root.is_array()) return parse_checks(root, "", scene);
  reject_unknown(root, "", {"checks"});
  return parse_checks(require(root, "", "checks"), "/checks", scene);
}

std::vector<SuiteCheckConfig> load_manifest(const std::filesystem::path& file,
                                            const Scene& scene) {
  std::ifstream in(file, std::ios::binary);
  if (!in) throw SceneError("/", "cannot read manifest file " + file.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_manifest_text(buf.str(), scene);
}

}  // namespace splitkit

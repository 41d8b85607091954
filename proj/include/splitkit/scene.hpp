#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "splitkit/measure.hpp"
#include "splitkit/scalar_fn.hpp"
#include "splitkit/subspace_distribution.hpp"

namespace splitkit {

/// Scene-file validation failure, carrying the JSON path of the first
/// offending node (e.g. "/measures/gamma/cov").
class SceneError : public std::runtime_error {
 public:
  SceneError(std::string path, std::string message)
      : std::runtime_error((path.empty() ? "/" : path) + ": " + message),
        path_(path.empty() ? "/" : std::move(path)),
        message_(std::move(message)) {}
  const std::string& path() const { return path_; }
  const std::string& message() const { return message_; }

 private:
  std::string path_;
  std::string message_;
};

struct SceneTolerances {
  double rank_tol = kDefaultRankTol;  // subspace rank decisions
  double suite_level = 0.01;          // family-wise level for cmd_verify
};

struct DynamicsConfig {
  std::string bath;     // measure name
  std::string initial;  // measure name
  double rate = 1.0;
};

// One entry of the verification manifest.  The `measures` list holds measure
// names whose roles depend on `kind`:
//   bl_split         {mu, nu}
//   linearized_bl    {mu}
//   efron_stein      component list (1-d each)
//   dks              {base} (1-d)
//   madiman_barron   component list (1-d each)
//   jensen           {mu}
//   tail_ratio       {mu}
struct SuiteCheckConfig {
  std::string label;
  std::string kind;
  std::vector<std::string> measures;
  std::optional<ScalarFn> f;
  std::vector<ScalarFn> psi;
  std::vector<std::vector<int>> cover;
  int r = 1;
  int n = 0, m = 0;                    // dks partial-sum sizes
  std::optional<double> lambda;        // default: frame constant of the scene xi
  std::optional<int> n_outer, n_inner; // default: CheckOptions defaults
  double c = 0.5, big_c = 0.9;         // tail_ratio parameters
  int samples = 0;
  std::vector<double> t_grid;
};

struct Scene {
  int ambient_dim;
  std::uint64_t seed;
  SubspaceDistribution xi;
  std::vector<std::pair<std::string, MeasureSpec>> measures;  // file order
  std::optional<DynamicsConfig> dynamics;
  std::vector<SuiteCheckConfig> suite;
  SceneTolerances tolerances;

  /// Throws SceneError when the name is unknown.
  const MeasureSpec& measure(const std::string& name) const;
};

/// Parses and fully validates a scene document.  `base_dir` anchors relative
/// CSV paths for empirical measures.  Throws SceneError with the path of the
/// first violating node.
Scene parse_scene_text(const std::string& text,
                       const std::filesystem::path& base_dir = ".");

/// Reads the file and delegates to parse_scene_text with the file's directory
/// as base.  Throws SceneError (unreadable file reports path "/").
Scene load_scene(const std::filesystem::path& file);

/// Parses a manifest document: either a JSON array of checks or an object
/// with a "checks" array.  Dimensions are validated against the scene.
std::vector<SuiteCheckConfig> parse_manifest_text(const std::string& text,
                                                  const Scene& scene);
std::vector<SuiteCheckConfig> load_manifest(const std::filesystem::path& file,
                                            const Scene& scene);

}  // namespace splitkit

#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>

namespace splitkit {

// Exit codes shared by the command entry points: violations are
// distinguishable from bad inputs / unmet preconditions.
inline constexpr int kExitOk = 0;
inline constexpr int kExitViolation = 1;
inline constexpr int kExitPrecondition = 2;

struct CommandOverrides {
  std::optional<std::uint64_t> seed;                // --seed
  std::optional<double> t_end;                      // --t-end
  std::optional<int> paths;                         // --paths
  std::optional<std::filesystem::path> manifest;    // --manifest
  std::optional<double> tol;                        // --tol (suite level)
  int jobs = 0;                                     // --jobs, 0 = SPLITKIT_JOBS
};

/// Prints the independent/dependent decomposition of the scene's xi and
/// writes `decomposition.json` into out_dir.
int cmd_decompose(const std::filesystem::path& scene_path,
                  const std::filesystem::path& out_dir,
                  const CommandOverrides& overrides, std::ostream& out,
                  std::ostream& err);

/// Simulates the scene's collision dynamics: writes `trajectories.csv` and,
/// when the moment flow is available in closed form, `moments.json`.
int cmd_simulate(const std::filesystem::path& scene_path,
                 const std::filesystem::path& out_dir,
                 const CommandOverrides& overrides, std::ostream& out,
                 std::ostream& err);

/// Runs the verification manifest (--manifest file, or the scene's `suite`)
/// and writes `report.json`.  Exit code 1 iff some verdict is "violated";
/// precondition failures exit 2 before any report is written.
int cmd_verify(const std::filesystem::path& scene_path,
               const std::filesystem::path& out_dir,
               const CommandOverrides& overrides, std::ostream& out,
               std::ostream& err);

}  // namespace splitkit

#pragma once

#include "levynls/config.hpp"

#include <cstdint>
#include <functional>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

namespace levynls {

inline constexpr const char* kTrajectorySchema = "levynls.trajectory.v1";
inline constexpr const char* kSummarySchema = "levynls.summary.v1";

/// Command-line values that override the configuration file.
struct Overrides {
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out_dir;
  std::optional<int> trajectories;
  std::optional<int> threads;
};

void apply_overrides(RunConfig& config, const Overrides& overrides);

/// Runs body(i) for i in [0, count) on `threads` workers. Every index is
/// processed exactly once; the first exception is rethrown after joining.
void parallel_for(int count, int threads, const std::function<void(int)>& body);

/// Independent trajectories at one level; trajectory i uses stream i of the
/// master seed, so results do not depend on the thread count.
std::vector<TrajectoryRecord> run_ensemble(const GalerkinProblem& problem,
                                           const SolverConfig& solver, int count,
                                           std::uint64_t master_seed, int threads);

/// Each command writes into config.out_dir and returns a process exit status.
int cmd_simulate(const RunConfig& config, std::ostream& log);
int cmd_converge(const RunConfig& config, std::ostream& log);
int cmd_moments(const RunConfig& config, std::ostream& log);
int cmd_verify(const RunConfig& config, std::ostream& log);

}  // namespace levynls

#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "resavg/integrate.hpp"

namespace resavg {

/// Sum in a fixed binary-tree order, so the result does not depend on how
/// members were scheduled.
double pairwise_sum(std::span<const double> values);

/// Runs `body(i)` for i in [0, count) on up to `threads` workers. Exceptions
/// are rethrown on the calling thread (the one with the lowest index wins).
void parallel_for(int count, int threads, const std::function<void(int)>& body);

/// Per sample time and mode: mean, unbiased variance and standard error of I_k.
struct EnsembleSummary {
  std::vector<double> tau;
  RMat mean;  // samples x modes
  RMat var;
  RMat stderr_;
  int members = 0;
};

struct Ensemble {
  std::vector<Trajectory> members;  // successful members, by index
  std::vector<int> member_index;
  std::vector<std::string> failures;  // "member i (seed s): message"
  int requested = 0;
  EnsembleSummary summary;
};

using MemberRun = std::function<Trajectory(std::uint64_t seed)>;

/// Summary statistics of trajectories sharing a sample grid.
EnsembleSummary summarize(const std::vector<Trajectory>& members);

/// N trajectories with seeds base_seed + i. Members hitting the blow-up guard
/// are excluded and counted; more than 5% exclusions raises NumericError.
/// `keep_members` = false drops the member trajectories after summarising.
Ensemble run_ensemble(const MemberRun& run, int n, std::uint64_t base_seed, int threads = 1,
                      bool keep_members = true);

}  // namespace resavg

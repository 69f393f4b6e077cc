#include "resavg/ensemble.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <mutex>
#include <optional>
#include <thread>

#include "resavg/error.hpp"

namespace resavg {

double pairwise_sum(std::span<const double> values) {
  if (values.size() <= 8) {
    double acc = 0.0;
    for (double x : values) acc += x;
    return acc;
  }
  const std::size_t half = values.size() / 2;
  return pairwise_sum(values.first(half)) + pairwise_sum(values.subspan(half));
}

void parallel_for(int count, int threads, const std::function<void(int)>& body) {
  if (count <= 0) return;
  const int workers = std::clamp(threads, 1, count);
  if (workers == 1) {
    for (int i = 0; i < count; ++i) body(i);
    return;
  }
  std::atomic<int> next{0};
  std::mutex guard;
  int failed_index = count;
  std::exception_ptr failure;
  auto worker = [&] {
    for (int i = next++; i < count; i = next++) {
      try {
        body(i);
      } catch (...) {
        std::lock_guard lock(guard);
        if (i < failed_index) {
          failed_index = i;
          failure = std::current_exception();
        }
      }
    }
  };
  std::vector<std::thread> pool;
  for (int w = 0; w < workers; ++w) pool.emplace_back(worker);
  for (auto& t : pool) t.join();
  if (failure) std::rethrow_exception(failure);
}

EnsembleSummary summarize(const std::vector<Trajectory>& members) {
  EnsembleSummary s;
  s.members = static_cast<int>(members.size());
  if (members.empty()) return s;
  const auto& first = members.front();
  const std::size_t samples = first.size();
  const Eigen::Index modes = samples ? first.actions.front().size() : 0;
  for (const auto& t : members) {
    if (t.size() != samples) throw ValidationError("ensemble members have different sample grids");
  }
  s.tau = first.tau;
  s.mean = RMat::Zero(samples, modes);
  s.var = RMat::Zero(samples, modes);
  s.stderr_ = RMat::Zero(samples, modes);
  const double n = static_cast<double>(members.size());
  std::vector<double> column(members.size());
  for (std::size_t j = 0; j < samples; ++j) {
    for (Eigen::Index k = 0; k < modes; ++k) {
      for (std::size_t i = 0; i < members.size(); ++i) column[i] = members[i].actions[j][k];
      const double mean = pairwise_sum(column) / n;
      for (auto& x : column) x = (x - mean) * (x - mean);
      const double var = members.size() > 1 ? pairwise_sum(column) / (n - 1.0) : 0.0;
      s.mean(j, k) = mean;
      s.var(j, k) = var;
      s.stderr_(j, k) = std::sqrt(var / n);
    }
  }
  return s;
}

Ensemble run_ensemble(const MemberRun& run, int n, std::uint64_t base_seed, int threads, bool keep_members) {
  if (n < 1) throw ConfigError("ensemble size must be >= 1");
  std::vector<std::optional<Trajectory>> slots(n);
  std::vector<std::string> errors(n);
  parallel_for(n, threads, [&](int i) {
    const std::uint64_t seed = base_seed + static_cast<std::uint64_t>(i);
    try {
      slots[i] = run(seed);
    } catch (const NumericError& e) {
      errors[i] = "member " + std::to_string(i) + " (seed " + std::to_string(seed) + "): " + e.what();
    }
  });

  Ensemble out;
  out.requested = n;
  for (int i = 0; i < n; ++i) {
    if (slots[i]) {
      out.members.push_back(std::move(*slots[i]));
      out.member_index.push_back(i);
    } else {
      out.failures.push_back(errors[i]);
    }
  }
  if (out.failures.size() * 20 > static_cast<std::size_t>(n)) {
    throw NumericError(std::to_string(out.failures.size()) + " of " + std::to_string(n) +
                       " ensemble members blew up (limit 5%); first: " + out.failures.front());
  }
  out.summary = summarize(out.members);
  if (!keep_members) out.members.clear();
  return out;
}

}  // namespace resavg

#pragma once

#include <string>
#include <vector>

#include "resavg/config.hpp"

namespace resavg {

struct Verdict {
  std::string name;
  bool pass = false;
  std::string detail;
};

struct ReportTable {
  std::string name;
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;

  std::string to_csv() const;
  /// Column index by name; throws if absent.
  std::size_t column(const std::string& name) const;
};

/// Outcome of one study: tables for plotting, declared verdicts and the
/// hashes of every input and trajectory the numbers came from.
struct StudyReport {
  std::string study;
  Json config;
  std::vector<ReportTable> tables;
  std::vector<Verdict> verdicts;
  /// Verdict depends on hypotheses the study cannot check (mixing, uniqueness).
  bool conditional = false;
  /// Diagnostics (e.g. batch-mean drift) say the estimates cannot be trusted.
  bool inconclusive = false;
  std::vector<std::string> notes;
  Json provenance;

  bool passed() const;
  const ReportTable& table(const std::string& name) const;
  Json to_json() const;
};

/// Action deviation delta(eps) = max over samples of the weighted action
/// distance between full and effective runs, for each initial datum.
StudyReport study_deterministic_convergence(const RunConfig& cfg);
/// |<f>^T - <f>| over a ladder of windows T for a fixed observable battery.
StudyReport study_operator_convergence(const RunConfig& cfg);
/// Moments of the actions: full stochastic ensembles per epsilon vs the effective SDE.
StudyReport study_stochastic_actions(const RunConfig& cfg);
/// Long-run batch-mean estimates of stationary expectations, full vs effective.
StudyReport study_stationary_measure(const RunConfig& cfg);
/// Disparity maxima along the epsilon ladder (deterministic and ensemble means).
StudyReport study_disparity_decay(const RunConfig& cfg);

/// Dispatches on cfg.study.kind.
StudyReport run_study(const RunConfig& cfg);

}  // namespace resavg

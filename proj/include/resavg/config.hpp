#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "resavg/dynamics.hpp"
#include "resavg/integrate.hpp"

namespace resavg {

using Json = nlohmann::ordered_json;

struct ProblemSpec {
  TorusGeometry geometry;
  Potential potential;
  int modes = 9;
  std::optional<int> cutoff;
  NonlinearitySpec nonlinearity;
  double eta_res = kDefaultEtaRes;
  /// Previously exported frame to reuse instead of rebuilding.
  std::optional<std::string> frame_file;
  std::optional<std::string> frame_hash;
};

struct DriftSpec {
  EffectiveField::Route route = EffectiveField::Route::analytic;
  std::optional<double> t_avg;
  std::optional<int> n_quad;
};

/// Initial coefficients: explicit values, zero, or `count` samples on the
/// sphere |v|_{norm_index} = radius drawn from `seed`.
struct InitialSpec {
  enum class Kind { random, explicit_values, zero };
  Kind kind = Kind::random;
  std::uint64_t seed = 1;
  double radius = 1.0;
  double norm_index = 2.0;
  int count = 1;
  CVec values;
};

/// b_l = scale * (1 + |k_l|^2)^exponent, or explicit per plane wave.
struct NoiseSpec {
  bool enabled = false;
  std::optional<RVec> amplitudes;
  double scale = 0.0;
  double exponent = -3.0;
  std::uint64_t seed = 1;
  int members = 1;
};

enum class StudyKind { converge, operator_limit, stochastic, stationary, disparity };

std::string to_string(StudyKind kind);
StudyKind study_kind_from_string(const std::string& name);

struct StudyParams {
  std::optional<StudyKind> kind;
  std::vector<double> epsilons{0.1, 0.05, 0.025, 0.0125};
  double s1 = 1.6;
  std::vector<double> sample_times;
  int tracked_modes = 4;
  bool coupled_noise = true;
  bool stochastic = true;
  double burn_in = 0.0;
  int batches = 20;
  std::vector<double> windows{10.0, 20.0, 40.0, 80.0, 160.0};
  int probes = 8;
  double ratio_threshold = 0.5;
  double decay_factor = 2.0;
  double band_sigma = 3.0;
  int trend_min = 3;
};

/// Everything one command needs; `snapshot` is the resolved document the
/// modules consumed, written verbatim into the run manifest.
struct RunConfig {
  ProblemSpec problem;
  SolverConfig solver;
  DriftSpec drift;
  InitialSpec initial;
  NoiseSpec noise;
  StudyParams study;
  int threads = 1;
  Json snapshot;

  void validate() const;
};

/// Parses a configuration document. Unknown keys and type mismatches raise
/// ConfigError naming the offending key.
RunConfig parse_config(const Json& doc);
RunConfig load_config(const std::string& path);
/// Resolved document with every default filled in.
Json config_to_json(const RunConfig& cfg);
/// Human-readable key reference.
std::string config_help();

SpectralFrame build_problem_frame(const ProblemSpec& problem);
EffectiveField make_effective_field(std::shared_ptr<const SpectralFrame> frame, const NonlinearitySpec& spec,
                                    const DriftSpec& drift, double eta);
/// Amplitudes per plane wave of `frame`.
RVec noise_amplitudes(const NoiseSpec& noise, const SpectralFrame& frame);
std::vector<CVec> initial_states(const InitialSpec& initial, const SpectralFrame& frame);

/// Deterministic draw of `count` states with |v|_s = radius, s = norm_index.
std::vector<CVec> sample_sphere(const SpectralFrame& frame, int count, std::uint64_t seed, double radius,
                                double norm_index);

}  // namespace resavg

#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "resavg/diffusion.hpp"
#include "resavg/dynamics.hpp"
#include "resavg/state.hpp"

namespace resavg {

enum class Scheme {
  lawson4,    // exponential (Lawson) RK4
  exp_euler,  // exponential Euler / Euler-Maruyama
};

std::string to_string(Scheme scheme);
Scheme scheme_from_string(const std::string& name);

/// Time-stepping parameters on the slow time axis tau = epsilon t.
struct SolverConfig {
  double epsilon = 0.1;  // default epsilon for CLI runs
  double horizon = 1.0;
  double step = 1e-3;
  /// Full runs use h <= theta_osc * epsilon / max(1, lambda_max), so the fastest
  /// phase advances at most theta_osc radians per step.
  double theta_osc = 0.2;
  Scheme scheme = Scheme::lawson4;
  int record_stride = 1;
  /// When > 0, the step count is rounded up to a multiple of `samples` and the
  /// state is recorded at tau = horizon * j / samples (overrides record_stride).
  int samples = 0;
  double s_star = 2.0;
  /// Abort when |a|_{s*} > blowup_factor |a(0)|_{s*} + blowup_offset.
  double blowup_factor = 100.0;
  double blowup_offset = 100.0;

  void validate() const;
};

/// theta_osc * epsilon / max(1, lambda_max).
double oscillation_step_limit(const SolverConfig& cfg, double epsilon, double lambda_max);

struct StepGrid {
  long steps = 0;
  double h = 0.0;
  long stride = 1;
};

/// Uniform grid on [0, horizon] with step <= h_max.
StepGrid make_step_grid(const SolverConfig& cfg, double h_max);

/// Complex Wiener normalisation used throughout: beta = beta_R + i beta_I with
/// independent standard real parts, so E|beta(t)|^2 = 2t.
inline constexpr const char* kNoiseConvention = "E|beta(t)|^2 = 2t (independent standard real and imaginary parts)";

/// Additive noise sum_l b_l beta_l(tau) e_l(x) with b indexed by plane wave.
struct NoiseModel {
  RVec amplitudes;
  std::uint64_t seed = 0;
};

struct TrajectoryMeta {
  std::string system;  // "full" or "effective"
  std::string scheme;
  bool stochastic = false;
  double epsilon = 0.0;
  std::uint64_t seed = 0;
  long steps = 0;
  double step = 0.0;
};

/// Time-sampled states: interaction variables a(tau) for full runs, the
/// effective state for effective runs (the two share the action map).
struct Trajectory {
  std::vector<double> tau;
  std::vector<CVec> states;
  std::vector<RVec> actions;
  Representation representation = Representation::interaction;
  /// max_tau |int_0^tau (Y_k - R_k)(a(s), s / epsilon) ds| per mode, when tracked.
  std::optional<RVec> disparity;
  TrajectoryMeta meta;

  std::size_t size() const { return tau.size(); }
  /// v(tau_j) = Phi_{-tau_j Lambda / epsilon} a(tau_j); identity for effective runs.
  CVec physical_state(std::size_t j, const RVec& lambda) const;
};

/// One Lawson-RK4 (or exponential Euler, per cfg.scheme) step of
/// da_k = -mu lambda_k a_k + e^{i lambda_k tau / eps} P_k(Phi_{-tau Lambda / eps} a).
/// Refuses steps larger than the oscillation limit.
CVec step_full_deterministic(const CVec& a, double tau, double h, double epsilon,
                             const SolverConfig& cfg, const PerturbationField& field);

/// Full oscillatory system in interaction representation on [0, horizon].
/// With `disparity_reference`, also tracks the disparity integral of Y - R.
Trajectory integrate_full(const CVec& v0, double epsilon, const SolverConfig& cfg,
                          const PerturbationField& field,
                          const EffectiveField* disparity_reference = nullptr);
Trajectory integrate_full(const CVec& v0, double epsilon, const SolverConfig& cfg,
                          const NonlinearitySpec& spec, const SpectralFrame& frame);

/// Effective equation da/dtau = -mu lambda a + R(a).
Trajectory integrate_effective(const CVec& v0, const SolverConfig& cfg, const EffectiveField& drift);

/// Exponential Euler-Maruyama for the randomly forced full system:
/// a <- E(h) [a + h Y(a, tau/eps) + e^{i Lambda tau / eps} Psi b dbeta].
/// Noise increments are addressed by (seed, step, plane-wave index).
Trajectory integrate_full_stochastic(const CVec& v0, double epsilon, const SolverConfig& cfg,
                                     const PerturbationField& field, const NoiseModel& noise,
                                     const EffectiveField* disparity_reference = nullptr);

/// Exponential Euler-Maruyama for the effective SDE
/// a <- E(h) [a + h R(a) + B dbeta], increments addressed by (seed, step, mode).
///
/// With `coupling_epsilon`, the increment of mode k is rotated by
/// exp(i lambda_k tau / coupling_epsilon). B commutes with these rotations
/// (it is block diagonal on eigenvalue clusters), so the law is unchanged, but
/// paths are then coupled to a full run with the same seed and that epsilon.
Trajectory integrate_effective_stochastic(const CVec& v0, const SolverConfig& cfg,
                                          const EffectiveField& drift, const DiffusionSpec& diffusion,
                                          std::uint64_t seed,
                                          std::optional<double> coupling_epsilon = std::nullopt);

}  // namespace resavg

#include "resavg/integrate.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <sstream>

#include "resavg/error.hpp"
#include "resavg/rng.hpp"

namespace resavg {

std::string to_string(Scheme scheme) {
  switch (scheme) {
    case Scheme::lawson4:
      return "lawson4";
    case Scheme::exp_euler:
      return "exp_euler";
  }
  return "unknown";
}

Scheme scheme_from_string(const std::string& name) {
  if (name == "lawson4") return Scheme::lawson4;
  if (name == "exp_euler") return Scheme::exp_euler;
  throw ConfigError("unknown scheme '" + name + "' (expected lawson4 or exp_euler)");
}

void SolverConfig::validate() const {
  auto positive = [](double x, const char* what) {
    if (!(x > 0.0) || !std::isfinite(x)) throw ConfigError(std::string(what) + " must be positive and finite");
  };
  positive(epsilon, "solver.epsilon");
  positive(horizon, "solver.horizon");
  positive(step, "solver.step");
  positive(theta_osc, "solver.theta_osc");
  positive(blowup_factor, "solver.blowup_factor");
  if (!(blowup_offset >= 0.0)) throw ConfigError("solver.blowup_offset must be non-negative");
  if (record_stride < 1) throw ConfigError("solver.record_stride must be >= 1");
  if (samples < 0) throw ConfigError("solver.samples must be >= 0");
  if (!(s_star >= 0.0)) throw ConfigError("solver.s_star must be non-negative");
}

double oscillation_step_limit(const SolverConfig& cfg, double epsilon, double lambda_max) {
  return cfg.theta_osc * epsilon / std::max(1.0, std::abs(lambda_max));
}

StepGrid make_step_grid(const SolverConfig& cfg, double h_max) {
  if (!(h_max > 0.0)) throw ConfigError("step bound must be positive");
  StepGrid grid;
  // tolerate round-off so horizon / h that is integral in exact arithmetic stays so
  const double ratio = cfg.horizon / h_max;
  grid.steps = std::max<long>(1, static_cast<long>(std::ceil(ratio * (1.0 - 1e-12))));
  if (cfg.samples > 0) {
    const long s = cfg.samples;
    grid.steps = ((grid.steps + s - 1) / s) * s;
    grid.stride = grid.steps / s;
  } else {
    grid.stride = cfg.record_stride;
  }
  grid.h = cfg.horizon / static_cast<double>(grid.steps);
  return grid;
}

CVec Trajectory::physical_state(std::size_t j, const RVec& lambda) const {
  if (j >= states.size()) throw ValidationError("trajectory sample index out of range");
  if (representation == Representation::physical || meta.system != "full") return states[j];
  return rotate(states[j], lambda, -tau[j] / meta.epsilon);
}

namespace {

using Drift = std::function<CVec(const CVec&, double)>;

// Diagonal propagator E(h) = exp(-mu lambda h).
RVec decay_factors(const RVec& lambda, double mu, double h) {
  RVec e(lambda.size());
  for (Eigen::Index k = 0; k < lambda.size(); ++k) e[k] = std::exp(-mu * lambda[k] * h);
  return e;
}

struct Propagators {
  RVec full;
  RVec half;
};

CVec lawson4_step(const Drift& drift, const CVec& a, double tau, double h, const Propagators& E,
                  const CVec& k1) {
  const CVec k2 = drift(E.half.cwiseProduct(a + 0.5 * h * k1), tau + 0.5 * h);
  const CVec k3 = drift(E.half.cwiseProduct(a) + 0.5 * h * k2, tau + 0.5 * h);
  const CVec k4 = drift(E.full.cwiseProduct(a) + h * E.half.cwiseProduct(k3), tau + h);
  return E.full.cwiseProduct(a) +
         (h / 6.0) * (E.full.cwiseProduct(k1) + 2.0 * E.half.cwiseProduct(k2 + k3) + k4);
}

CVec deterministic_step(Scheme scheme, const Drift& drift, const CVec& a, double tau, double h,
                        const Propagators& E, const CVec& k1) {
  if (scheme == Scheme::lawson4) return lawson4_step(drift, a, tau, h, E, k1);
  return E.full.cwiseProduct(a + h * k1);
}

class BlowupGuard {
 public:
  BlowupGuard(const CVec& a0, const SolverConfig& cfg, const RVec& lambda)
      : lambda_(lambda), s_(cfg.s_star) {
    limit_ = cfg.blowup_factor * sobolev_norm(a0, s_, lambda_) + cfg.blowup_offset;
  }

  void check(const CVec& a, double tau) const {
    const double norm = sobolev_norm_unchecked(a);
    if (!std::isfinite(norm) || norm > limit_) {
      std::ostringstream msg;
      msg << "blow-up at tau=" << tau << ": |a|_" << s_ << " = " << norm << " exceeds " << limit_;
      throw NumericError(msg.str());
    }
  }

 private:
  double sobolev_norm_unchecked(const CVec& a) const {
    double acc = 0.0;
    for (Eigen::Index k = 0; k < a.size(); ++k) {
      acc += (std::pow(std::abs(lambda_[k]), s_) + 1.0) * std::norm(a[k]);
    }
    return std::sqrt(acc);
  }

  const RVec& lambda_;
  double s_;
  double limit_;
};

class Recorder {
 public:
  Recorder(Trajectory& out, long stride, long steps) : out_(out), stride_(stride), steps_(steps) {}

  void maybe_record(long n, double tau, const CVec& a) {
    if (n % stride_ != 0 && n != steps_) return;
    out_.tau.push_back(tau);
    out_.states.push_back(a);
    out_.actions.push_back(actions(a));
  }

 private:
  Trajectory& out_;
  long stride_;
  long steps_;
};

// Running max_tau |int_0^tau (Y - R)| by trapezoid on step endpoints.
class DisparityTracker {
 public:
  DisparityTracker(const EffectiveField* reference, Eigen::Index modes) : reference_(reference) {
    if (reference_ == nullptr) return;
    integral_ = CVec::Zero(modes);
    worst_ = RVec::Zero(modes);
  }

  bool active() const { return reference_ != nullptr; }

  // y is Y(a, tau / eps) at the current step endpoint
  void add_point(const CVec& a, const CVec& y, double h_left) {
    if (!active()) return;
    const CVec diff = y - (*reference_)(a);
    if (has_previous_) {
      integral_ += 0.5 * h_left * (previous_ + diff);
      worst_ = worst_.cwiseMax(integral_.cwiseAbs());
    }
    previous_ = diff;
    has_previous_ = true;
  }

  std::optional<RVec> result() const {
    if (!active()) return std::nullopt;
    return worst_;
  }

 private:
  const EffectiveField* reference_;
  CVec integral_;
  CVec previous_;
  RVec worst_;
  bool has_previous_ = false;
};

void check_initial(const CVec& v0, const SpectralFrame& frame) {
  if (v0.size() != static_cast<Eigen::Index>(frame.modes())) {
    throw ValidationError("initial state has " + std::to_string(v0.size()) + " entries, frame has " +
                          std::to_string(frame.modes()) + " modes");
  }
  if (!v0.allFinite()) throw ValidationError("initial state is not finite");
}

void check_epsilon(double epsilon) {
  if (!(epsilon > 0.0) || !std::isfinite(epsilon)) throw ConfigError("epsilon must be positive and finite");
}

Drift full_drift(const PerturbationField& field, double epsilon) {
  return [&field, epsilon](const CVec& a, double tau) { return field.rotated(a, tau / epsilon); };
}

TrajectoryMeta make_meta(const char* system, const SolverConfig& cfg, const StepGrid& grid, bool stochastic,
                         double epsilon, std::uint64_t seed) {
  TrajectoryMeta meta;
  meta.system = system;
  meta.scheme = stochastic ? "exp_euler_maruyama" : to_string(cfg.scheme);
  meta.stochastic = stochastic;
  meta.epsilon = epsilon;
  meta.seed = seed;
  meta.steps = grid.steps;
  meta.step = grid.h;
  return meta;
}

// complex increments sqrt(h) (xi_R + i xi_I) for processes [0, count)
CVec wiener_increments(const NoiseStream& noise, long step, Eigen::Index count, double h,
                       const RVec* amplitudes) {
  CVec dw = CVec::Zero(count);
  const double root_h = std::sqrt(h);
  for (Eigen::Index l = 0; l < count; ++l) {
    if (amplitudes != nullptr && (*amplitudes)[l] == 0.0) continue;
    const auto [re, im] = noise.normal_pair(static_cast<std::uint64_t>(step), static_cast<std::uint32_t>(l));
    dw[l] = root_h * Complex(re, im);
  }
  return dw;
}

}  // namespace

CVec step_full_deterministic(const CVec& a, double tau, double h, double epsilon, const SolverConfig& cfg,
                             const PerturbationField& field) {
  check_epsilon(epsilon);
  const SpectralFrame& frame = field.frame();
  check_initial(a, frame);
  const double limit = oscillation_step_limit(cfg, epsilon, frame.lambda_max());
  if (!(h > 0.0) || h > limit * (1.0 + 1e-12)) {
    std::ostringstream msg;
    msg << "step h=" << h << " violates the oscillation bound " << limit;
    throw ConfigError(msg.str());
  }
  const double mu = field.spec().mu;
  const Propagators E{decay_factors(frame.lambda(), mu, h), decay_factors(frame.lambda(), mu, 0.5 * h)};
  const Drift drift = full_drift(field, epsilon);
  return deterministic_step(cfg.scheme, drift, a, tau, h, E, drift(a, tau));
}

Trajectory integrate_full(const CVec& v0, double epsilon, const SolverConfig& cfg, const PerturbationField& field,
                          const EffectiveField* disparity_reference) {
  cfg.validate();
  check_epsilon(epsilon);
  const SpectralFrame& frame = field.frame();
  check_initial(v0, frame);
  const RVec& lambda = frame.lambda();
  const double h_max = std::min(cfg.step, oscillation_step_limit(cfg, epsilon, frame.lambda_max()));
  const StepGrid grid = make_step_grid(cfg, h_max);
  const double mu = field.spec().mu;
  const Propagators E{decay_factors(lambda, mu, grid.h), decay_factors(lambda, mu, 0.5 * grid.h)};
  const Drift drift = full_drift(field, epsilon);

  Trajectory out;
  out.representation = Representation::interaction;
  out.meta = make_meta("full", cfg, grid, false, epsilon, 0);
  Recorder recorder(out, grid.stride, grid.steps);
  BlowupGuard guard(v0, cfg, lambda);
  DisparityTracker disparity(disparity_reference, v0.size());

  CVec a = v0;
  recorder.maybe_record(0, 0.0, a);
  for (long n = 0; n < grid.steps; ++n) {
    const double tau = grid.h * static_cast<double>(n);
    const CVec k1 = drift(a, tau);
    disparity.add_point(a, k1, grid.h);
    a = deterministic_step(cfg.scheme, drift, a, tau, grid.h, E, k1);
    const double tau_next = grid.h * static_cast<double>(n + 1);
    guard.check(a, tau_next);
    recorder.maybe_record(n + 1, tau_next, a);
  }
  if (disparity.active()) disparity.add_point(a, drift(a, cfg.horizon), grid.h);
  out.disparity = disparity.result();
  return out;
}

Trajectory integrate_full(const CVec& v0, double epsilon, const SolverConfig& cfg, const NonlinearitySpec& spec,
                          const SpectralFrame& frame) {
  const PerturbationField field(frame, spec);
  return integrate_full(v0, epsilon, cfg, field);
}

Trajectory integrate_effective(const CVec& v0, const SolverConfig& cfg, const EffectiveField& drift_field) {
  cfg.validate();
  const SpectralFrame& frame = drift_field.frame();
  check_initial(v0, frame);
  const RVec& lambda = frame.lambda();
  const StepGrid grid = make_step_grid(cfg, cfg.step);
  const double mu = drift_field.spec().mu;
  const Propagators E{decay_factors(lambda, mu, grid.h), decay_factors(lambda, mu, 0.5 * grid.h)};
  const Drift drift = [&drift_field](const CVec& a, double) { return drift_field(a); };

  Trajectory out;
  out.representation = Representation::interaction;
  out.meta = make_meta("effective", cfg, grid, false, 0.0, 0);
  Recorder recorder(out, grid.stride, grid.steps);
  BlowupGuard guard(v0, cfg, lambda);

  CVec a = v0;
  recorder.maybe_record(0, 0.0, a);
  for (long n = 0; n < grid.steps; ++n) {
    const double tau = grid.h * static_cast<double>(n);
    a = deterministic_step(cfg.scheme, drift, a, tau, grid.h, E, drift(a, tau));
    const double tau_next = grid.h * static_cast<double>(n + 1);
    guard.check(a, tau_next);
    recorder.maybe_record(n + 1, tau_next, a);
  }
  return out;
}

Trajectory integrate_full_stochastic(const CVec& v0, double epsilon, const SolverConfig& cfg,
                                     const PerturbationField& field, const NoiseModel& noise,
                                     const EffectiveField* disparity_reference) {
  cfg.validate();
  check_epsilon(epsilon);
  const SpectralFrame& frame = field.frame();
  check_initial(v0, frame);
  const Eigen::Index n_pw = frame.psi().cols();
  if (noise.amplitudes.size() > n_pw) throw ValidationError("more noise amplitudes than plane waves");
  if (!noise.amplitudes.allFinite() || (noise.amplitudes.array() < 0.0).any()) {
    throw ValidationError("noise amplitudes must be finite and non-negative");
  }
  RVec b = RVec::Zero(n_pw);
  b.head(noise.amplitudes.size()) = noise.amplitudes;
  // Psi b, applied to the increments each step
  const CMat psi_b = (frame.psi() * b.asDiagonal()).cast<Complex>();

  const RVec& lambda = frame.lambda();
  const double h_max = std::min(cfg.step, oscillation_step_limit(cfg, epsilon, frame.lambda_max()));
  const StepGrid grid = make_step_grid(cfg, h_max);
  const RVec E = decay_factors(lambda, field.spec().mu, grid.h);
  const Drift drift = full_drift(field, epsilon);
  const NoiseStream stream(noise.seed);

  Trajectory out;
  out.representation = Representation::interaction;
  out.meta = make_meta("full", cfg, grid, true, epsilon, noise.seed);
  Recorder recorder(out, grid.stride, grid.steps);
  BlowupGuard guard(v0, cfg, lambda);
  DisparityTracker disparity(disparity_reference, v0.size());

  CVec a = v0;
  recorder.maybe_record(0, 0.0, a);
  for (long n = 0; n < grid.steps; ++n) {
    const double tau = grid.h * static_cast<double>(n);
    const CVec y = drift(a, tau);
    disparity.add_point(a, y, grid.h);
    CVec update = a + grid.h * y;
    if (b.any()) {
      const CVec kick = psi_b * wiener_increments(stream, n, n_pw, grid.h, &b);
      update += rotate(kick, lambda, tau / epsilon);
    }
    a = E.cwiseProduct(update);
    const double tau_next = grid.h * static_cast<double>(n + 1);
    guard.check(a, tau_next);
    recorder.maybe_record(n + 1, tau_next, a);
  }
  if (disparity.active()) disparity.add_point(a, drift(a, cfg.horizon), grid.h);
  out.disparity = disparity.result();
  return out;
}

Trajectory integrate_effective_stochastic(const CVec& v0, const SolverConfig& cfg, const EffectiveField& drift_field,
                                          const DiffusionSpec& diffusion, std::uint64_t seed,
                                          std::optional<double> coupling_epsilon) {
  cfg.validate();
  const SpectralFrame& frame = drift_field.frame();
  check_initial(v0, frame);
  const Eigen::Index m = v0.size();
  if (diffusion.B.rows() != m || diffusion.B.cols() != m) {
    throw ValidationError("diffusion matrix does not match the number of modes");
  }
  if (coupling_epsilon) check_epsilon(*coupling_epsilon);
  const CMat B = diffusion.B.cast<Complex>();
  const bool forced = diffusion.B.cwiseAbs().maxCoeff() > 0.0;

  const RVec& lambda = frame.lambda();
  const StepGrid grid = make_step_grid(cfg, cfg.step);
  const RVec E = decay_factors(lambda, drift_field.spec().mu, grid.h);
  const NoiseStream stream(seed);

  Trajectory out;
  out.representation = Representation::interaction;
  out.meta = make_meta("effective", cfg, grid, true, coupling_epsilon.value_or(0.0), seed);
  Recorder recorder(out, grid.stride, grid.steps);
  BlowupGuard guard(v0, cfg, lambda);

  CVec a = v0;
  recorder.maybe_record(0, 0.0, a);
  for (long n = 0; n < grid.steps; ++n) {
    CVec update = a + grid.h * drift_field(a);
    if (forced) {
      CVec dw = wiener_increments(stream, n, m, grid.h, nullptr);
      if (coupling_epsilon) dw = rotate(dw, lambda, grid.h * static_cast<double>(n) / *coupling_epsilon);
      update += B * dw;
    }
    a = E.cwiseProduct(update);
    const double tau_next = grid.h * static_cast<double>(n + 1);
    guard.check(a, tau_next);
    recorder.maybe_record(n + 1, tau_next, a);
  }
  return out;
}

}  // namespace resavg

#include "resavg/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <sstream>

#include "resavg/diffusion.hpp"
#include "resavg/ensemble.hpp"
#include "resavg/error.hpp"
#include "resavg/io.hpp"
#include "resavg/observable.hpp"

#ifndef RESAVG_VERSION
#define RESAVG_VERSION "unknown"
#endif

namespace resavg {

std::string ReportTable::to_csv() const {
  std::string out;
  for (std::size_t c = 0; c < columns.size(); ++c) out += (c ? "," : "") + columns[c];
  out += "\n";
  for (const auto& row : rows) {
    for (std::size_t c = 0; c < row.size(); ++c) out += (c ? "," : "") + format_double(row[c]);
    out += "\n";
  }
  return out;
}

std::size_t ReportTable::column(const std::string& name) const {
  for (std::size_t c = 0; c < columns.size(); ++c) {
    if (columns[c] == name) return c;
  }
  throw ValidationError("table '" + this->name + "' has no column '" + name + "'");
}

bool StudyReport::passed() const {
  if (inconclusive || verdicts.empty()) return false;
  return std::all_of(verdicts.begin(), verdicts.end(), [](const Verdict& v) { return v.pass; });
}

const ReportTable& StudyReport::table(const std::string& name) const {
  for (const auto& t : tables) {
    if (t.name == name) return t;
  }
  throw ValidationError("report '" + study + "' has no table '" + name + "'");
}

Json StudyReport::to_json() const {
  Json tabs = Json::object();
  for (const auto& t : tables) tabs[t.name] = Json{{"columns", t.columns}, {"rows", t.rows}};
  Json verdict_list = Json::array();
  for (const auto& v : verdicts) verdict_list.push_back(Json{{"name", v.name}, {"pass", v.pass}, {"detail", v.detail}});
  return Json{{"study", study},
              {"passed", passed()},
              {"conditional", conditional},
              {"inconclusive", inconclusive},
              {"verdicts", verdict_list},
              {"notes", notes},
              {"config", config},
              {"tables", tabs},
              {"provenance", provenance}};
}

namespace {

std::string fmt(double x) {
  std::ostringstream s;
  s.precision(4);
  s << std::scientific << x;
  return s.str();
}

struct Setup {
  std::shared_ptr<const SpectralFrame> frame;
  std::string frame_hash;
};

Setup make_setup(const RunConfig& cfg) {
  Setup s;
  s.frame = std::make_shared<const SpectralFrame>(build_problem_frame(cfg.problem));
  s.frame_hash = resavg::frame_hash(*s.frame);
  return s;
}

StudyReport new_report(const char* name, const RunConfig& cfg, const Setup& setup) {
  StudyReport r;
  r.study = name;
  r.config = cfg.snapshot.is_null() ? config_to_json(cfg) : cfg.snapshot;
  r.provenance = Json{{"version", RESAVG_VERSION},
                      {"config_hash", content_hash(r.config)},
                      {"frame_hash", setup.frame_hash},
                      {kNoiseConventionKey, kNoiseConvention},
                      {"trajectories", Json::object()}};
  return r;
}

void record_hash(StudyReport& r, const std::string& label, const Trajectory& t, const std::string& frame_hash) {
  r.provenance["trajectories"][label] = hash_hex(trajectory_to_jsonl(t, trajectory_header(t, Json(), frame_hash)));
}

void require_samples(const SolverConfig& s, const char* study) {
  if (s.samples <= 0) {
    throw ConfigError(std::string(study) + " study needs solver.samples > 0 so all runs share sample times");
  }
}

bool strictly_decreasing(const std::vector<double>& xs) {
  for (std::size_t i = 1; i < xs.size(); ++i) {
    if (!(xs[i] < xs[i - 1])) return false;
  }
  return true;
}

std::string list(const std::vector<double>& xs) {
  std::string out = "[";
  for (std::size_t i = 0; i < xs.size(); ++i) out += (i ? ", " : "") + fmt(xs[i]);
  return out + "]";
}

bool actions_sane(const Trajectory& t, double s1, const RVec& lambda) {
  for (const auto& I : t.actions) {
    if (!I.allFinite() || (I.array() < 0.0).any()) return false;
    if (!std::isfinite(action_distance(I, RVec::Zero(I.size()), s1, lambda))) return false;
  }
  return true;
}

// Full deterministic runs over (datum, epsilon) plus one effective run per datum.
struct LadderRuns {
  std::vector<CVec> data;
  std::vector<Trajectory> effective;            // per datum
  std::vector<std::vector<Trajectory>> full;    // [datum][epsilon]
};

LadderRuns run_ladder(const RunConfig& cfg, const Setup& setup, const EffectiveField& drift,
                      const PerturbationField& field, bool track_disparity) {
  LadderRuns runs;
  runs.data = initial_states(cfg.initial, *setup.frame);
  const auto& eps = cfg.study.epsilons;
  const int n_data = static_cast<int>(runs.data.size());
  const int per = static_cast<int>(eps.size()) + 1;
  runs.effective.resize(n_data);
  runs.full.assign(n_data, std::vector<Trajectory>(eps.size()));
  parallel_for(n_data * per, cfg.threads, [&](int task) {
    const int i = task / per;
    const int e = task % per;
    try {
      if (e == 0) {
        runs.effective[i] = integrate_effective(runs.data[i], cfg.solver, drift);
      } else {
        runs.full[i][e - 1] = integrate_full(runs.data[i], eps[e - 1], cfg.solver, field,
                                             track_disparity ? &drift : nullptr);
      }
    } catch (const NumericError& err) {
      throw NumericError("datum " + std::to_string(i) + (e ? ", epsilon " + fmt(eps[e - 1]) : ", effective run") +
                         ": " + err.what());
    }
  });
  return runs;
}

double deviation(const Trajectory& full, const Trajectory& eff, double s1, const RVec& lambda) {
  if (full.size() != eff.size()) throw ValidationError("full and effective runs have different sample grids");
  double worst = 0.0;
  for (std::size_t j = 0; j < full.size(); ++j) {
    worst = std::max(worst, action_distance(full.actions[j], eff.actions[j], s1, lambda));
  }
  return worst;
}

std::vector<int> sample_indices(const std::vector<double>& times, const SolverConfig& s) {
  std::vector<int> idx;
  for (double t : times) {
    const double x = t * s.samples / s.horizon;
    const double j = std::round(x);
    if (std::abs(x - j) > 1e-9 * std::max(1.0, x)) {
      throw ConfigError("sample time " + fmt(t) + " is not a multiple of solver.horizon / solver.samples");
    }
    idx.push_back(static_cast<int>(j));
  }
  return idx;
}

struct BatchStats {
  double mean = 0.0;
  double stderr_ = 0.0;
  double drift_t = 0.0;  // t statistic of the batch-mean slope
};

BatchStats batch_means(const std::vector<double>& xs, int batches) {
  const std::size_t per = xs.size() / static_cast<std::size_t>(batches);
  if (per < 1) throw ConfigError("stationary study: fewer post-burn-in samples than batches");
  std::vector<double> b(batches);
  for (int i = 0; i < batches; ++i) {
    b[i] = pairwise_sum(std::span<const double>(xs.data() + i * per, per)) / static_cast<double>(per);
  }
  BatchStats s;
  const double n = batches;
  s.mean = pairwise_sum(b) / n;
  std::vector<double> sq(batches);
  for (int i = 0; i < batches; ++i) sq[i] = (b[i] - s.mean) * (b[i] - s.mean);
  const double var = pairwise_sum(sq) / (n - 1.0);
  s.stderr_ = std::sqrt(var / n);
  // least-squares slope of batch means against batch index
  const double xbar = (n - 1.0) / 2.0;
  double sxx = 0.0, sxy = 0.0;
  for (int i = 0; i < batches; ++i) {
    sxx += (i - xbar) * (i - xbar);
    sxy += (i - xbar) * (b[i] - s.mean);
  }
  const double slope = sxy / sxx;
  double rss = 0.0;
  for (int i = 0; i < batches; ++i) {
    const double r = b[i] - s.mean - slope * (i - xbar);
    rss += r * r;
  }
  const double se_slope = std::sqrt(rss / (n - 2.0) / sxx);
  s.drift_t = se_slope > 0.0 ? slope / se_slope : 0.0;
  return s;
}

}  // namespace

StudyReport study_deterministic_convergence(const RunConfig& cfg) {
  require_samples(cfg.solver, "converge");
  if (cfg.study.epsilons.empty()) throw ConfigError("converge study needs study.epsilons");
  const Setup setup = make_setup(cfg);
  const auto& spec = cfg.problem.nonlinearity;
  const EffectiveField drift = make_effective_field(setup.frame, spec, cfg.drift, cfg.problem.eta_res);
  const PerturbationField field(setup.frame, spec);
  StudyReport r = new_report("converge", cfg, setup);
  const RVec& lambda = setup.frame->lambda();
  const auto& eps = cfg.study.epsilons;

  const LadderRuns runs = run_ladder(cfg, setup, drift, field, true);
  ReportTable deltas{"delta", {"datum", "epsilon", "delta", "steps", "step"}, {}};
  ReportTable disparity{"disparity", {"datum", "epsilon", "mode", "disparity"}, {}};
  std::vector<std::vector<double>> per_datum(runs.data.size());
  bool sane = true;
  for (std::size_t i = 0; i < runs.data.size(); ++i) {
    record_hash(r, "datum" + std::to_string(i) + "/effective", runs.effective[i], setup.frame_hash);
    sane = sane && actions_sane(runs.effective[i], cfg.study.s1, lambda);
    for (std::size_t e = 0; e < eps.size(); ++e) {
      const Trajectory& t = runs.full[i][e];
      record_hash(r, "datum" + std::to_string(i) + "/full/eps=" + format_double(eps[e]), t, setup.frame_hash);
      sane = sane && actions_sane(t, cfg.study.s1, lambda);
      const double d = deviation(t, runs.effective[i], cfg.study.s1, lambda);
      per_datum[i].push_back(d);
      deltas.rows.push_back({double(i), eps[e], d, double(t.meta.steps), t.meta.step});
      for (Eigen::Index k = 0; k < t.disparity->size(); ++k) {
        disparity.rows.push_back({double(i), eps[e], double(k), (*t.disparity)[k]});
      }
    }
  }
  ReportTable spread{"spread", {"epsilon", "delta_min", "delta_max", "max_over_min"}, {}};
  for (std::size_t e = 0; e < eps.size(); ++e) {
    double lo = std::numeric_limits<double>::infinity(), hi = 0.0;
    for (const auto& d : per_datum) {
      lo = std::min(lo, d[e]);
      hi = std::max(hi, d[e]);
    }
    spread.rows.push_back({eps[e], lo, hi, lo > 0.0 ? hi / lo : std::numeric_limits<double>::infinity()});
  }
  r.tables = {deltas, spread, disparity};

  for (std::size_t i = 0; i < per_datum.size(); ++i) {
    const auto& d = per_datum[i];
    const std::string tag = "datum " + std::to_string(i);
    r.verdicts.push_back({tag + ": delta strictly decreasing", strictly_decreasing(d), list(d)});
    if (eps.size() >= 2) {
      const bool ok = d.back() < cfg.study.ratio_threshold * d.front();
      r.verdicts.push_back({tag + ": delta(eps_min) < " + format_double(cfg.study.ratio_threshold) + " delta(eps_max)",
                            ok, "ratio " + fmt(d.front() > 0 ? d.back() / d.front() : 0.0)});
    }
  }
  r.verdicts.push_back({"actions nonnegative and finite", sane, ""});
  r.notes.push_back("sup over tau is the max over the recorded sample grid (solver.samples = " +
                    std::to_string(cfg.solver.samples) + ")");
  return r;
}

StudyReport study_disparity_decay(const RunConfig& cfg) {
  require_samples(cfg.solver, "disparity");
  const auto& eps = cfg.study.epsilons;
  if (eps.size() < 2) throw ConfigError("disparity study needs at least two epsilons");
  const Setup setup = make_setup(cfg);
  const auto& spec = cfg.problem.nonlinearity;
  const EffectiveField drift = make_effective_field(setup.frame, spec, cfg.drift, cfg.problem.eta_res);
  const PerturbationField field(setup.frame, spec);
  StudyReport r = new_report("disparity", cfg, setup);
  const int tracked = std::min(cfg.study.tracked_modes, setup.frame->modes());

  const LadderRuns runs = run_ladder(cfg, setup, drift, field, true);
  ReportTable det{"deterministic", {"datum", "epsilon", "mode", "disparity"}, {}};
  for (std::size_t i = 0; i < runs.data.size(); ++i) {
    for (std::size_t e = 0; e < eps.size(); ++e) {
      const Trajectory& t = runs.full[i][e];
      record_hash(r, "datum" + std::to_string(i) + "/full/eps=" + format_double(eps[e]), t, setup.frame_hash);
      for (Eigen::Index k = 0; k < t.disparity->size(); ++k) {
        det.rows.push_back({double(i), eps[e], double(k), (*t.disparity)[k]});
      }
    }
    double scale = 0.0;
    for (const auto& t : runs.full[i]) scale = std::max(scale, t.disparity->head(tracked).maxCoeff());
    for (int k = 0; k < tracked; ++k) {
      std::vector<double> d;
      for (const auto& t : runs.full[i]) d.push_back((*t.disparity)[k]);
      const std::string tag = "datum " + std::to_string(i) + ", mode " + std::to_string(k);
      // identically vanishing disparity (Y = R) counts as decreasing
      const bool vanishes = scale <= 1e-13;
      r.verdicts.push_back({tag + ": disparity decreasing", vanishes || strictly_decreasing(d), list(d)});
      r.verdicts.push_back({tag + ": decay factor >= " + format_double(cfg.study.decay_factor),
                            vanishes || d.front() >= cfg.study.decay_factor * d.back(),
                            "factor " + fmt(d.back() > 0 ? d.front() / d.back() : 0.0)});
    }
  }

  // step refinement at the largest epsilon: the disparity should not depend on h
  {
    RunConfig fine = cfg;
    const Trajectory& base = runs.full[0][0];
    fine.solver.step = 0.5 * base.meta.step;
    const Trajectory t = integrate_full(runs.data[0], eps[0], fine.solver, field, &drift);
    const RVec a = base.disparity->head(tracked);
    const RVec b = t.disparity->head(tracked);
    const double change = (a - b).cwiseAbs().maxCoeff() / std::max(1e-300, b.cwiseAbs().maxCoeff());
    r.tables.push_back(ReportTable{"refinement", {"step", "max_disparity"}, {{base.meta.step, a.maxCoeff()},
                                                                             {t.meta.step, b.maxCoeff()}}});
    r.verdicts.push_back({"disparity stable under step halving", b.maxCoeff() <= 1e-13 || change <= 1e-2,
                          "relative change " + fmt(change)});
  }
  r.tables.insert(r.tables.begin(), det);

  if (cfg.study.stochastic && cfg.noise.enabled) {
    const RVec b = noise_amplitudes(cfg.noise, *setup.frame);
    ReportTable sto{"stochastic", {"epsilon", "mode", "mean_disparity", "stderr", "members"}, {}};
    std::vector<std::vector<double>> means(tracked);
    for (double e : eps) {
      const Ensemble ens = run_ensemble(
          [&](std::uint64_t seed) {
            return integrate_full_stochastic(runs.data[0], e, cfg.solver, field, NoiseModel{b, seed}, &drift);
          },
          cfg.noise.members, cfg.noise.seed, cfg.threads);
      r.provenance["trajectories"]["ensemble/eps=" + format_double(e)] = hash_hex(ensemble_to_csv(ens.summary));
      const double n = static_cast<double>(ens.members.size());
      for (int k = 0; k < setup.frame->modes(); ++k) {
        std::vector<double> xs, sq;
        for (const auto& t : ens.members) xs.push_back((*t.disparity)[k]);
        const double mean = pairwise_sum(xs) / n;
        for (double x : xs) sq.push_back((x - mean) * (x - mean));
        const double se = n > 1 ? std::sqrt(pairwise_sum(sq) / (n - 1.0) / n) : 0.0;
        sto.rows.push_back({e, double(k), mean, se, n});
        if (k < tracked) means[k].push_back(mean);
      }
      if (!ens.failures.empty()) {
        r.notes.push_back(std::to_string(ens.failures.size()) + " members excluded at epsilon " + fmt(e));
      }
    }
    for (int k = 0; k < tracked; ++k) {
      r.verdicts.push_back({"stochastic mode " + std::to_string(k) + ": ensemble mean disparity decreasing",
                            strictly_decreasing(means[k]), list(means[k])});
    }
    r.tables.push_back(sto);
  }
  return r;
}

StudyReport study_operator_convergence(const RunConfig& cfg) {
  const auto& windows = cfg.study.windows;
  if (windows.size() < 2) throw ConfigError("operator study needs at least two windows");
  const Setup setup = make_setup(cfg);
  const SpectralFrame& frame = *setup.frame;
  const RVec& w = frame.lambda();
  const int m = frame.modes();
  StudyReport r = new_report("operator", cfg, setup);
  const double eta = cfg.problem.eta_res;
  const double wmax = std::max(1.0, w.cwiseAbs().maxCoeff());

  int other = -1;
  for (int k = 1; k < m && other < 0; ++k) {
    if (std::abs(w[k] - w[0]) > eta * wmax) other = k;
  }
  if (other < 0) throw ConfigError("operator study needs at least two distinct eigenvalues");

  struct Probe {
    std::string name;
    Observable f;
    std::optional<int> l;
    bool resonant;
  };
  std::vector<Probe> battery;
  battery.push_back({"coordinate v_" + std::to_string(other) + " weighted by mode 0", Observable::coordinate(other),
                     0, false});
  battery.push_back({"coordinate v_0 weighted by mode 0", Observable::coordinate(0), 0, true});
  battery.push_back({"action I_" + std::to_string(other), Observable::action(other), std::nullopt, true});
  const ResonanceTable cubic = build_resonance_table(frame, {1, -1, 1}, eta);
  for (const auto& entry : cubic.resonances) {
    const IndexTuple* pick = nullptr;
    for (const auto& t : entry.tuples) {
      if (!(t[0] == t[1] && t[2] == entry.target) && !(t[2] == t[1] && t[0] == entry.target)) {
        pick = &t;
        break;
      }
    }
    if (pick == nullptr && !entry.tuples.empty()) pick = &entry.tuples.front();
    if (pick == nullptr) continue;
    const auto& t = *pick;
    battery.push_back({"resonant cubic v_" + std::to_string(t[0]) + " conj(v_" + std::to_string(t[1]) + ") v_" +
                           std::to_string(t[2]) + " weighted by mode " + std::to_string(entry.target),
                       Observable::monomial({{t[0], 1}, {t[2], 1}}, {{t[1], 1}}), entry.target, true});
    break;
  }
  battery.push_back({"nonresonant v_0 conj(v_" + std::to_string(other) + ")",
                     Observable::monomial({{0, 1}}, {{other, 1}}), std::nullopt, false});

  const auto probes = sample_sphere(frame, cfg.study.probes, cfg.initial.seed, cfg.initial.radius,
                                    cfg.initial.norm_index);
  ReportTable errors{"errors", {"observable", "T", "n_quad", "max_error", "max_bound"}, {}};
  std::vector<std::vector<double>> err(battery.size());
  std::vector<bool> within(battery.size(), true);
  std::vector<double> resonant_worst(battery.size(), 0.0);
  for (std::size_t o = 0; o < battery.size(); ++o) {
    const auto& p = battery[o];
    double omega = 0.0;
    for (const auto& term : p.f.terms) {
      omega = std::max(omega, std::abs((p.l ? w[*p.l] : 0.0) - term.rotation_frequency(w)));
    }
    for (double T : windows) {
      // 64 nodes per period of the fastest phase
      const int n_quad = static_cast<int>(std::ceil(64.0 * T * std::max(omega, 1.0) / kTwoPi)) + 1;
      const double h = T / (n_quad - 1);
      double worst = 0.0, bound = 0.0;
      for (const auto& v : probes) {
        const Complex finite = scalar_average(p.f, w, p.l, v, T, n_quad);
        const Complex limit = resonant_average(p.f, w, p.l, v, eta);
        const double e = std::abs(finite - limit);
        // closed-form oscillation bound plus the trapezoid error of each oscillating term
        double b = oscillation_bound(p.f, w, p.l, v, T, eta);
        double scale = 0.0;
        for (const auto& term : p.f.terms) {
          const double om = (p.l ? w[*p.l] : 0.0) - term.rotation_frequency(w);
          b += std::abs(term(v)) * (h * om) * (h * om) / 12.0;
          scale += std::abs(term(v));
        }
        b += 1e-12 * std::max(1.0, scale);
        worst = std::max(worst, e);
        bound = std::max(bound, b);
        within[o] = within[o] && e <= b;
        if (p.resonant) resonant_worst[o] = std::max(resonant_worst[o], e / std::max(1.0, scale));
      }
      err[o].push_back(worst);
      errors.rows.push_back({double(o), T, double(n_quad), worst, bound});
    }
  }
  r.tables.push_back(errors);
  for (std::size_t o = 0; o < battery.size(); ++o) {
    const auto& p = battery[o];
    r.notes.push_back("observable " + std::to_string(o) + ": " + p.name);
    r.verdicts.push_back({p.name + ": error within closed-form bound", within[o], list(err[o])});
    if (p.resonant) {
      r.verdicts.push_back({p.name + ": error at round-off for every T", resonant_worst[o] <= 1e-12,
                            "max relative error " + fmt(resonant_worst[o])});
    } else {
      r.verdicts.push_back({p.name + ": max error decreases to the largest T", err[o].back() < err[o].front(),
                            list(err[o])});
    }
  }
  return r;
}

StudyReport study_stochastic_actions(const RunConfig& cfg) {
  require_samples(cfg.solver, "stochastic");
  const auto& eps = cfg.study.epsilons;
  if (eps.empty()) throw ConfigError("stochastic study needs study.epsilons");
  if (!cfg.noise.enabled) throw ConfigError("stochastic study needs a noise section");
  const Setup setup = make_setup(cfg);
  const SpectralFrame& frame = *setup.frame;
  const auto& spec = cfg.problem.nonlinearity;
  const EffectiveField drift = make_effective_field(setup.frame, spec, cfg.drift, cfg.problem.eta_res);
  const PerturbationField field(setup.frame, spec);
  StudyReport r = new_report("stochastic", cfg, setup);
  if (!(spec.mu > 0.0)) r.notes.push_back("mu = 0: averaging of the forced system is only expected for mu > 0");

  const RVec b = noise_amplitudes(cfg.noise, frame);
  const DiffusionSpec diffusion = build_diffusion(frame, b, eigenvalue_clusters(frame.lambda(), cfg.problem.eta_res));
  const CVec v0 = initial_states(cfg.initial, frame).front();
  std::vector<double> times = cfg.study.sample_times;
  if (times.empty()) times = {cfg.solver.horizon};
  const std::vector<int> idx = sample_indices(times, cfg.solver);
  const int tracked = std::min(cfg.study.tracked_modes, frame.modes());

  // one step grid for every run: the oscillation bound of the smallest epsilon
  SolverConfig solver = cfg.solver;
  solver.step = std::min(cfg.solver.step, oscillation_step_limit(cfg.solver, eps.back(), frame.lambda_max()));
  r.notes.push_back("common step " + fmt(make_step_grid(solver, solver.step).h) + " for all runs");
  if (cfg.study.coupled_noise) {
    r.notes.push_back("effective ensembles use increments rotated by exp(i lambda tau / eps) of the full run with the "
                      "same seed; the effective law is unchanged");
  }

  auto run_effective = [&](std::optional<double> coupling) {
    return run_ensemble(
        [&](std::uint64_t seed) {
          return integrate_effective_stochastic(v0, solver, drift, diffusion, seed, coupling);
        },
        cfg.noise.members, cfg.noise.seed, cfg.threads, false);
  };
  std::optional<Ensemble> shared_effective;
  if (!cfg.study.coupled_noise) shared_effective = run_effective(std::nullopt);

  ReportTable moments{"moments",
                      {"epsilon", "tau", "mode", "mean_full", "stderr_full", "mean_eff", "stderr_eff", "discrepancy",
                       "band", "var_full", "var_eff"},
                      {}};
  std::vector<std::vector<double>> worst(eps.size(), std::vector<double>(tracked, 0.0));
  bool in_band = true;
  std::string band_detail;
  for (std::size_t e = 0; e < eps.size(); ++e) {
    const Ensemble full = run_ensemble(
        [&](std::uint64_t seed) {
          return integrate_full_stochastic(v0, eps[e], solver, field, NoiseModel{b, seed});
        },
        cfg.noise.members, cfg.noise.seed, cfg.threads, false);
    const Ensemble eff = shared_effective ? *shared_effective : run_effective(eps[e]);
    const std::string tag = "eps=" + format_double(eps[e]);
    r.provenance["trajectories"]["full/" + tag] = hash_hex(ensemble_to_csv(full.summary));
    r.provenance["trajectories"]["effective/" + tag] = hash_hex(ensemble_to_csv(eff.summary));
    for (const auto* ens : {&full, &eff}) {
      if (!ens->failures.empty()) {
        r.notes.push_back(std::to_string(ens->failures.size()) + " members excluded at " + tag);
      }
    }
    const auto& F = full.summary;
    const auto& E = eff.summary;
    for (std::size_t q = 0; q < idx.size(); ++q) {
      const int j = idx[q];
      for (int k = 0; k < frame.modes(); ++k) {
        const double d = std::abs(F.mean(j, k) - E.mean(j, k));
        const double band = cfg.study.band_sigma * std::hypot(F.stderr_(j, k), E.stderr_(j, k));
        moments.rows.push_back({eps[e], F.tau[j], double(k), F.mean(j, k), F.stderr_(j, k), E.mean(j, k),
                                E.stderr_(j, k), d, band, F.var(j, k), E.var(j, k)});
        if (k < tracked) {
          worst[e][k] = std::max(worst[e][k], d);
          if (e + 1 == eps.size() && d > band) {
            in_band = false;
            band_detail += "mode " + std::to_string(k) + " tau " + fmt(F.tau[j]) + ": " + fmt(d) + " > " + fmt(band) +
                           "; ";
          }
        }
      }
    }
  }
  r.tables.push_back(moments);
  r.verdicts.push_back({"E I_k within " + format_double(cfg.study.band_sigma) +
                            " combined standard errors at the smallest epsilon",
                        in_band, band_detail.empty() ? "all tracked modes and sample times inside" : band_detail});
  if (eps.size() >= 2) {
    int improved = 0;
    std::string detail;
    for (int k = 0; k < tracked; ++k) {
      const bool better = worst.back()[k] < worst.front()[k];
      improved += better ? 1 : 0;
      detail += "mode " + std::to_string(k) + ": " + fmt(worst.front()[k]) + " -> " + fmt(worst.back()[k]) + "; ";
    }
    r.verdicts.push_back({"discrepancy smaller at the smallest epsilon for >= " +
                              std::to_string(cfg.study.trend_min) + " tracked modes",
                          improved >= cfg.study.trend_min, detail});
  }
  return r;
}

StudyReport study_stationary_measure(const RunConfig& cfg) {
  require_samples(cfg.solver, "stationary");
  const auto& eps = cfg.study.epsilons;
  if (eps.empty()) throw ConfigError("stationary study needs study.epsilons");
  if (!cfg.noise.enabled) throw ConfigError("stationary study needs a noise section");
  const Setup setup = make_setup(cfg);
  const SpectralFrame& frame = *setup.frame;
  const auto& spec = cfg.problem.nonlinearity;
  const EffectiveField drift = make_effective_field(setup.frame, spec, cfg.drift, cfg.problem.eta_res);
  const PerturbationField field(setup.frame, spec);
  StudyReport r = new_report("stationary", cfg, setup);
  r.conditional = true;
  r.notes.push_back("conditional on uniqueness and mixing of the stationary measures, which are not checked");
  if (!(cfg.study.burn_in < cfg.solver.horizon)) throw ConfigError("study.burn_in must be below solver.horizon");

  const RVec b = noise_amplitudes(cfg.noise, frame);
  for (int k = 0; k < std::min<int>(frame.modes(), static_cast<int>(b.size())); ++k) {
    if (!(b[k] > 0.0)) throw ConfigError("stationary study needs nondegenerate noise (b_l > 0 on the retained modes)");
  }
  const DiffusionSpec diffusion = build_diffusion(frame, b, eigenvalue_clusters(frame.lambda(), cfg.problem.eta_res));
  const CVec v0 = initial_states(cfg.initial, frame).front();
  const int tracked = std::min(cfg.study.tracked_modes, frame.modes());
  const RVec& w = frame.lambda();
  const double wmax = std::max(1.0, w.cwiseAbs().maxCoeff());

  struct Item {
    std::string name;
    Observable f;
  };
  std::vector<Item> battery;
  for (int k = 0; k < tracked; ++k) battery.push_back({"I_" + std::to_string(k), Observable::action(k)});
  for (int k = 0; k < tracked; ++k) {
    Observable sq = Observable::monomial({{k, 2}}, {{k, 2}}, 0.25);
    battery.push_back({"I_" + std::to_string(k) + "^2", sq});
  }
  const ResonanceTable cubic = build_resonance_table(frame, {1, -1, 1}, cfg.problem.eta_res);
  int picked = 0;
  for (const auto& entry : cubic.resonances) {
    if (entry.target >= tracked) continue;
    for (const auto& t : entry.tuples) {
      if (picked >= 3) break;
      const bool trivial = (t[0] == t[1] && t[2] == entry.target) || (t[2] == t[1] && t[0] == entry.target);
      if (trivial) continue;
      battery.push_back({"v_" + std::to_string(t[0]) + " conj(v_" + std::to_string(t[1]) + ") v_" +
                             std::to_string(t[2]) + " conj(v_" + std::to_string(entry.target) + ")",
                         Observable::monomial({{t[0], 1}, {t[2], 1}}, {{t[1], 1}, {entry.target, 1}})});
      ++picked;
    }
  }
  int other = -1;
  for (int k = 1; k < frame.modes() && other < 0; ++k) {
    if (std::abs(w[k] - w[0]) > cfg.problem.eta_res * wmax) other = k;
  }
  if (other < 0) throw ConfigError("stationary study needs at least two distinct eigenvalues");
  const std::size_t nonresonant = battery.size();
  battery.push_back({"v_0 conj(v_" + std::to_string(other) + ") (nonresonant)",
                     Observable::monomial({{0, 1}}, {{other, 1}})});

  struct Estimate {
    std::vector<BatchStats> re, im;
  };
  auto estimate = [&](const Trajectory& t) {
    Estimate est;
    for (const auto& item : battery) {
      std::vector<double> xr, xi;
      for (std::size_t j = 0; j < t.size(); ++j) {
        if (!(t.tau[j] > cfg.study.burn_in)) continue;
        const Complex x = item.f(t.states[j]);
        xr.push_back(x.real());
        xi.push_back(x.imag());
      }
      est.re.push_back(batch_means(xr, cfg.study.batches));
      est.im.push_back(batch_means(xi, cfg.study.batches));
    }
    return est;
  };
  // interaction and physical states give identical actions; resonant
  // monomials are phase invariant, the nonresonant one is tested on the effective chain
  const int chains = static_cast<int>(eps.size()) + 2;
  std::vector<Trajectory> runs(chains);
  parallel_for(chains, cfg.threads, [&](int c) {
    if (c < static_cast<int>(eps.size())) {
      runs[c] = integrate_full_stochastic(v0, eps[c], cfg.solver, field, NoiseModel{b, cfg.noise.seed});
    } else {
      const std::uint64_t seed = cfg.noise.seed + static_cast<std::uint64_t>(c - eps.size() + 1);
      runs[c] = integrate_effective_stochastic(v0, cfg.solver, drift, diffusion, seed);
    }
  });
  std::vector<Estimate> est;
  for (const auto& t : runs) est.push_back(estimate(t));
  for (std::size_t e = 0; e < eps.size(); ++e) record_hash(r, "full/eps=" + format_double(eps[e]), runs[e], setup.frame_hash);
  record_hash(r, "effective/seed+1", runs[eps.size()], setup.frame_hash);
  record_hash(r, "effective/seed+2", runs[eps.size() + 1], setup.frame_hash);
  const Estimate& eff = est[eps.size()];
  const Estimate& eff2 = est[eps.size() + 1];

  ReportTable table{"estimates",
                    {"observable", "epsilon", "full_re", "full_im", "full_stderr", "eff_re", "eff_im", "eff_stderr",
                     "discrepancy", "combined_stderr"},
                    {}};
  auto se = [](const Estimate& x, std::size_t o) { return std::hypot(x.re[o].stderr_, x.im[o].stderr_); };
  for (std::size_t e = 0; e < eps.size(); ++e) {
    for (std::size_t o = 0; o < battery.size(); ++o) {
      const auto& f = est[e];
      const double d = std::hypot(f.re[o].mean - eff.re[o].mean, f.im[o].mean - eff.im[o].mean);
      table.rows.push_back({double(o), eps[e], f.re[o].mean, f.im[o].mean, se(f, o), eff.re[o].mean, eff.im[o].mean,
                            se(eff, o), d, std::hypot(se(f, o), se(eff, o))});
    }
  }
  ReportTable seeds{"seed_independence", {"observable", "eff_seed1", "eff_seed2", "difference", "combined_stderr"}, {}};
  for (std::size_t o = 0; o < battery.size(); ++o) {
    seeds.rows.push_back({double(o), eff.re[o].mean, eff2.re[o].mean,
                          std::hypot(eff.re[o].mean - eff2.re[o].mean, eff.im[o].mean - eff2.im[o].mean),
                          std::hypot(se(eff, o), se(eff2, o))});
  }
  r.tables = {table, seeds};
  for (std::size_t o = 0; o < battery.size(); ++o) r.notes.push_back("observable " + std::to_string(o) + ": " + battery[o].name);

  const double sigma = cfg.study.band_sigma;
  const Estimate& smallest = est[eps.size() - 1];
  for (int k = 0; k < tracked; ++k) {
    const double d = std::abs(smallest.re[k].mean - eff.re[k].mean);
    const double band = sigma * std::hypot(smallest.re[k].stderr_, eff.re[k].stderr_);
    r.verdicts.push_back({"E I_" + std::to_string(k) + " full (eps=" + format_double(eps.back()) + ") vs effective",
                          d <= band, fmt(d) + " vs band " + fmt(band)});
  }
  {
    const double m = std::hypot(eff.re[nonresonant].mean, eff.im[nonresonant].mean);
    const double s = se(eff, nonresonant);
    r.verdicts.push_back({"nonresonant monomial vanishes under the effective stationary state", m <= sigma * s,
                          "|E| = " + fmt(m) + ", stderr " + fmt(s)});
  }
  // batch-mean drift of the actions flags chains that have not reached stationarity
  constexpr double kDriftT = 4.0;
  for (std::size_t c = 0; c < est.size(); ++c) {
    for (int k = 0; k < tracked; ++k) {
      const double t = est[c].re[k].drift_t;
      if (std::abs(t) > kDriftT) {
        r.inconclusive = true;
        r.notes.push_back("nonstationarity: chain " + std::to_string(c) + ", I_" + std::to_string(k) +
                          " batch-mean slope t = " + fmt(t));
      }
    }
  }
  if (eps.size() >= 2) {
    std::string trend;
    for (int k = 0; k < tracked; ++k) {
      trend += "I_" + std::to_string(k) + ":";
      for (std::size_t e = 0; e < eps.size(); ++e) {
        trend += " " + fmt(std::abs(est[e].re[k].mean - eff.re[k].mean));
      }
      trend += "; ";
    }
    r.notes.push_back("full-vs-effective discrepancy along the ladder: " + trend);
  }
  return r;
}

StudyReport run_study(const RunConfig& cfg) {
  if (!cfg.study.kind) throw ConfigError("study.kind is required");
  switch (*cfg.study.kind) {
    case StudyKind::converge: return study_deterministic_convergence(cfg);
    case StudyKind::operator_limit: return study_operator_convergence(cfg);
    case StudyKind::stochastic: return study_stochastic_actions(cfg);
    case StudyKind::stationary: return study_stationary_measure(cfg);
    case StudyKind::disparity: return study_disparity_decay(cfg);
  }
  throw ConfigError("unknown study kind");
}

}  // namespace resavg

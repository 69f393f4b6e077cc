#include "resavg/config.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "json_util.hpp"
#include "resavg/io.hpp"
#include "resavg/rng.hpp"

namespace resavg {

using namespace detail;

namespace {

struct KeyDoc {
  const char* key;
  const char* text;
};

// every accepted key; config_help prints this table
const KeyDoc kKeys[] = {
    {"geometry.dim", "torus dimension, 1 or 2 (default 1)"},
    {"geometry.lengths", "side lengths, one per axis (default 2 pi)"},
    {"geometry.grid", "collocation points per axis, even, >= 4 (default 32)"},
    {"potential", "array of {m: [m1(, m2)], re, im}: plane-wave coefficients of V, real V needs c(-m) = conj c(m)"},
    {"frame.modes", "number M of eigenmodes kept (default 9)"},
    {"frame.cutoff", "plane-wave window |m_i| <= cutoff (default: smallest with (2K+1)^d >= M)"},
    {"frame.file", "reuse an exported frame file instead of rebuilding"},
    {"frame.hash", "expected hash of frame.file; a mismatch refuses the run"},
    {"nonlinearity.kind", "cubic_focusing | smoothed_monomial | diagonal | polynomial"},
    {"nonlinearity.mu", "dissipation mu >= 0 of the mu Laplacian term (default 0)"},
    {"nonlinearity.gamma_r", "smoothed_monomial: coefficient of -f_p(|u|^2) u"},
    {"nonlinearity.gamma_i", "smoothed_monomial: coefficient of -i f_q(|u|^2) u"},
    {"nonlinearity.p", "smoothed_monomial: power p"},
    {"nonlinearity.q", "smoothed_monomial: power q"},
    {"nonlinearity.gamma", "diagonal: {re: [...], im: [...]}, one entry per mode"},
    {"nonlinearity.monomials",
     "polynomial: [{coeff: [re, im], factors: [\"u\", \"ubar\", \"u_x0\", \"ubar_x1\", ...]}]"},
    {"resonance.eta", "relative tolerance for frequency resonances (default 1e-8)"},
    {"solver.epsilon", "perturbation size epsilon for simulate (default 0.1)"},
    {"solver.horizon", "slow time horizon T (default 1)"},
    {"solver.step", "base step h (default 1e-3)"},
    {"solver.theta_osc", "full runs use h <= theta_osc eps / max(1, lambda_M) (default 0.2)"},
    {"solver.scheme", "lawson4 | exp_euler (default lawson4; stochastic runs use exponential Euler-Maruyama)"},
    {"solver.record_stride", "record every n-th step (default 1)"},
    {"solver.samples", "if > 0, record exactly at tau = T j / samples (default 0)"},
    {"solver.s_star", "Sobolev index of the blow-up guard (default 2)"},
    {"solver.blowup_factor", "abort when |a|_s* > factor |a0|_s* + offset (default 100)"},
    {"solver.blowup_offset", "see blowup_factor (default 100)"},
    {"drift.route", "analytic | numerical (default analytic)"},
    {"drift.t_avg", "numerical route: averaging window (default 50 * 2 pi / gamma_min)"},
    {"drift.n_quad", "numerical route: trapezoid nodes (default resolves the fastest frequency)"},
    {"initial.kind", "random | explicit | zero (default random)"},
    {"initial.seed", "random: seed (default 1)"},
    {"initial.radius", "random: |v|_s = radius (default 1)"},
    {"initial.norm_index", "random: Sobolev index s of the radius (default 2)"},
    {"initial.count", "random: number of initial states used by studies (default 1)"},
    {"initial.re", "explicit: real parts, one per mode"},
    {"initial.im", "explicit: imaginary parts, one per mode"},
    {"noise.amplitudes", "b_l per plane wave (shorter lists are zero padded)"},
    {"noise.scale", "b_l = scale (1 + |k_l|^2)^exponent when amplitudes are absent"},
    {"noise.exponent", "see noise.scale (default -3)"},
    {"noise.seed", "base seed; member i uses seed + i (default 1)"},
    {"noise.members", "ensemble size for simulate/effective (default 1)"},
    {"study.kind", "converge | operator | stochastic | stationary | disparity"},
    {"study.epsilons", "strictly decreasing epsilon ladder (default [0.1, 0.05, 0.025, 0.0125])"},
    {"study.s1", "Sobolev index of the action distance, < solver.s_star (default 1.6)"},
    {"study.sample_times", "stochastic: times at which moments are compared"},
    {"study.tracked_modes", "number of leading modes entering verdicts (default 4)"},
    {"study.coupled_noise", "couple effective and full noise through the phase rotation (default true)"},
    {"study.stochastic", "disparity: also run the stochastic ensembles (default true)"},
    {"study.burn_in", "stationary: discarded initial time"},
    {"study.batches", "stationary: number of batch means (default 20)"},
    {"study.windows", "operator: averaging windows T (default [10, 20, 40, 80, 160])"},
    {"study.probes", "operator: random states per window (default 8)"},
    {"study.ratio_threshold", "converge: require delta(eps_min) < ratio delta(eps_max) (default 0.5)"},
    {"study.decay_factor", "disparity: require deterministic decay by this factor (default 2)"},
    {"study.band_sigma", "width of Monte Carlo bands in standard errors (default 3)"},
    {"study.trend_min", "stochastic: modes that must improve from largest to smallest epsilon (default 3)"},
    {"threads", "worker threads for ensembles and ladders (default 1)"},
};

void check_section(const Json& doc, const std::string& section) {
  require_object(doc, section);
  const std::string prefix = section + ".";
  for (const auto& item : doc.items()) {
    const std::string full = prefix + item.key();
    const bool known =
        std::any_of(std::begin(kKeys), std::end(kKeys), [&](const KeyDoc& k) { return full == k.key; });
    if (!known) throw ConfigError("unknown key '" + full + "'");
  }
}

Factor parse_factor(const std::string& text, const std::string& where) {
  Factor f;
  std::string rest = text;
  if (rest.rfind("ubar", 0) == 0) {
    f.conjugate = true;
    rest = rest.substr(4);
  } else if (rest.rfind("u", 0) == 0) {
    rest = rest.substr(1);
  } else {
    throw ConfigError("'" + where + "': bad factor '" + text + "'");
  }
  if (rest == "_x0") {
    f.derivative_axis = 0;
  } else if (rest == "_x1") {
    f.derivative_axis = 1;
  } else if (!rest.empty()) {
    throw ConfigError("'" + where + "': bad factor '" + text + "'");
  }
  return f;
}

std::string factor_name(const Factor& f) {
  std::string s = f.conjugate ? "ubar" : "u";
  if (f.derivative_axis >= 0) s += "_x" + std::to_string(f.derivative_axis);
  return s;
}

CVec complex_list(const Json& doc, const std::string& where) {
  check_keys(doc, {"re", "im"}, where);
  const auto re = find(doc, "re") ? as_number_list(doc["re"], where + ".re") : std::vector<double>{};
  auto im = find(doc, "im") ? as_number_list(doc["im"], where + ".im") : std::vector<double>{};
  if (im.empty()) im.assign(re.size(), 0.0);
  if (re.size() != im.size()) throw ConfigError("'" + where + "': re and im differ in length");
  CVec out(static_cast<Eigen::Index>(re.size()));
  for (std::size_t i = 0; i < re.size(); ++i) out[static_cast<Eigen::Index>(i)] = Complex(re[i], im[i]);
  return out;
}

Json complex_to_json(const CVec& v) {
  return Json{{"re", from_rvec(v.real())}, {"im", from_rvec(v.imag())}};
}

NonlinearitySpec parse_nonlinearity(const Json& doc) {
  const std::string where = "nonlinearity";
  check_section(doc, where);
  NonlinearitySpec s;
  if (const Json* k = find(doc, "kind")) s.kind = nonlinearity_kind_from_string(as_string(*k, "nonlinearity.kind"));
  read(doc, "mu", where, s.mu);
  read(doc, "gamma_r", where, s.gamma_r);
  read(doc, "gamma_i", where, s.gamma_i);
  read(doc, "p", where, s.p);
  read(doc, "q", where, s.q);
  if (const Json* g = find(doc, "gamma")) s.gamma = complex_list(*g, "nonlinearity.gamma");
  if (const Json* list = find(doc, "monomials")) {
    if (!list->is_array()) throw ConfigError("'nonlinearity.monomials' must be an array");
    for (std::size_t i = 0; i < list->size(); ++i) {
      const std::string at = "nonlinearity.monomials[" + std::to_string(i) + "]";
      check_keys((*list)[i], {"coeff", "factors"}, at);
      Monomial m;
      if (const Json* c = find((*list)[i], "coeff")) {
        const auto parts = as_number_list(*c, at + ".coeff");
        if (parts.size() != 2) throw ConfigError("'" + at + ".coeff' must be [re, im]");
        m.coeff = Complex(parts[0], parts[1]);
      }
      const Json* factors = find((*list)[i], "factors");
      if (factors == nullptr || !factors->is_array()) throw ConfigError("'" + at + ".factors' must be an array");
      for (const auto& f : *factors) m.factors.push_back(parse_factor(as_string(f, at + ".factors"), at));
      s.monomials.push_back(m);
    }
  }
  return s;
}

Json nonlinearity_to_json(const NonlinearitySpec& s) {
  Json out{{"kind", to_string(s.kind)}, {"mu", s.mu}};
  switch (s.kind) {
    case NonlinearityKind::smoothed_monomial:
      out["gamma_r"] = s.gamma_r;
      out["gamma_i"] = s.gamma_i;
      out["p"] = s.p;
      out["q"] = s.q;
      break;
    case NonlinearityKind::diagonal:
      out["gamma"] = complex_to_json(s.gamma);
      break;
    case NonlinearityKind::polynomial: {
      Json list = Json::array();
      for (const auto& m : s.monomials) {
        Json factors = Json::array();
        for (const auto& f : m.factors) factors.push_back(factor_name(f));
        list.push_back(Json{{"coeff", {m.coeff.real(), m.coeff.imag()}}, {"factors", factors}});
      }
      out["monomials"] = list;
      break;
    }
    case NonlinearityKind::cubic_focusing:
      break;
  }
  return out;
}

std::string route_name(EffectiveField::Route r) {
  return r == EffectiveField::Route::analytic ? "analytic" : "numerical";
}

std::string initial_kind_name(InitialSpec::Kind k) {
  switch (k) {
    case InitialSpec::Kind::random: return "random";
    case InitialSpec::Kind::explicit_values: return "explicit";
    case InitialSpec::Kind::zero: return "zero";
  }
  return "random";
}

}  // namespace

std::string to_string(StudyKind kind) {
  switch (kind) {
    case StudyKind::converge: return "converge";
    case StudyKind::operator_limit: return "operator";
    case StudyKind::stochastic: return "stochastic";
    case StudyKind::stationary: return "stationary";
    case StudyKind::disparity: return "disparity";
  }
  return "unknown";
}

StudyKind study_kind_from_string(const std::string& name) {
  for (auto k : {StudyKind::converge, StudyKind::operator_limit, StudyKind::stochastic, StudyKind::stationary,
                 StudyKind::disparity}) {
    if (to_string(k) == name) return k;
  }
  throw ConfigError("unknown study kind '" + name + "' (converge|operator|stochastic|stationary|disparity)");
}

void RunConfig::validate() const {
  solver.validate();
  problem.geometry.validate();
  problem.potential.validate(problem.geometry);
  problem.nonlinearity.validate(problem.geometry.dim);
  if (problem.modes < 1) throw ConfigError("frame.modes must be >= 1");
  if (problem.cutoff && *problem.cutoff < 0) throw ConfigError("frame.cutoff must be >= 0");
  if (!(problem.eta_res > 0.0)) throw ConfigError("resonance.eta must be > 0");
  if (threads < 1) throw ConfigError("threads must be >= 1");
  if (noise.members < 1) throw ConfigError("noise.members must be >= 1");
  if (initial.count < 1) throw ConfigError("initial.count must be >= 1");
  if (!(initial.radius >= 0.0) || !(initial.norm_index >= 0.0)) {
    throw ConfigError("initial.radius and initial.norm_index must be >= 0");
  }
  if (drift.t_avg && !(*drift.t_avg > 0.0)) throw ConfigError("drift.t_avg must be > 0");
  if (drift.n_quad && *drift.n_quad < 2) throw ConfigError("drift.n_quad must be >= 2");
  const auto& e = study.epsilons;
  for (std::size_t i = 0; i < e.size(); ++i) {
    if (!(e[i] > 0.0)) throw ConfigError("study.epsilons must be positive");
    if (i > 0 && !(e[i] < e[i - 1])) throw ConfigError("study.epsilons must be strictly decreasing");
  }
  if (!(study.s1 >= 0.0) || !(study.s1 < solver.s_star)) {
    throw ConfigError("study.s1 must satisfy 0 <= s1 < solver.s_star");
  }
  if (study.tracked_modes < 1) throw ConfigError("study.tracked_modes must be >= 1");
  if (study.batches < 2) throw ConfigError("study.batches must be >= 2");
  if (study.probes < 1) throw ConfigError("study.probes must be >= 1");
  if (!(study.burn_in >= 0.0)) throw ConfigError("study.burn_in must be >= 0");
  for (double t : study.sample_times) {
    if (!(t > 0.0) || t > solver.horizon * (1.0 + 1e-12)) {
      throw ConfigError("study.sample_times must lie in (0, solver.horizon]");
    }
  }
  for (double w : study.windows) {
    if (!(w > 0.0)) throw ConfigError("study.windows must be positive");
  }
}

RunConfig parse_config(const Json& doc) {
  require_object(doc, "config");
  static const char* sections[] = {"geometry", "potential", "frame", "nonlinearity", "resonance", "solver",
                                   "drift", "initial", "noise", "study", "threads"};
  for (const auto& item : doc.items()) {
    if (std::find_if(std::begin(sections), std::end(sections),
                     [&](const char* s) { return item.key() == s; }) == std::end(sections)) {
      throw ConfigError("unknown key '" + item.key() + "'");
    }
  }
  RunConfig cfg;
  if (const Json* g = find(doc, "geometry")) {
    check_section(*g, "geometry");
    cfg.problem.geometry = geometry_from_json(*g, "geometry");
  }
  if (const Json* p = find(doc, "potential")) cfg.problem.potential = potential_from_json(*p, "potential");
  if (const Json* f = find(doc, "frame")) {
    check_section(*f, "frame");
    read(*f, "modes", "frame", cfg.problem.modes);
    if (const Json* c = find(*f, "cutoff")) cfg.problem.cutoff = static_cast<int>(as_integer(*c, "frame.cutoff"));
    if (const Json* file = find(*f, "file")) cfg.problem.frame_file = as_string(*file, "frame.file");
    if (const Json* h = find(*f, "hash")) cfg.problem.frame_hash = as_string(*h, "frame.hash");
  }
  if (const Json* n = find(doc, "nonlinearity")) cfg.problem.nonlinearity = parse_nonlinearity(*n);
  if (const Json* r = find(doc, "resonance")) {
    check_section(*r, "resonance");
    read(*r, "eta", "resonance", cfg.problem.eta_res);
  }
  if (const Json* s = find(doc, "solver")) {
    check_section(*s, "solver");
    auto& v = cfg.solver;
    read(*s, "epsilon", "solver", v.epsilon);
    read(*s, "horizon", "solver", v.horizon);
    read(*s, "step", "solver", v.step);
    read(*s, "theta_osc", "solver", v.theta_osc);
    if (const Json* x = find(*s, "scheme")) v.scheme = scheme_from_string(as_string(*x, "solver.scheme"));
    read(*s, "record_stride", "solver", v.record_stride);
    read(*s, "samples", "solver", v.samples);
    read(*s, "s_star", "solver", v.s_star);
    read(*s, "blowup_factor", "solver", v.blowup_factor);
    read(*s, "blowup_offset", "solver", v.blowup_offset);
  }
  if (const Json* d = find(doc, "drift")) {
    check_section(*d, "drift");
    if (const Json* r = find(*d, "route")) {
      const std::string name = as_string(*r, "drift.route");
      if (name == "analytic") {
        cfg.drift.route = EffectiveField::Route::analytic;
      } else if (name == "numerical") {
        cfg.drift.route = EffectiveField::Route::numerical;
      } else {
        throw ConfigError("'drift.route' must be analytic or numerical");
      }
    }
    if (const Json* t = find(*d, "t_avg")) cfg.drift.t_avg = as_number(*t, "drift.t_avg");
    if (const Json* q = find(*d, "n_quad")) cfg.drift.n_quad = static_cast<int>(as_integer(*q, "drift.n_quad"));
  }
  if (const Json* i = find(doc, "initial")) {
    check_section(*i, "initial");
    auto& v = cfg.initial;
    if (const Json* k = find(*i, "kind")) {
      const std::string name = as_string(*k, "initial.kind");
      if (name == "random") {
        v.kind = InitialSpec::Kind::random;
      } else if (name == "explicit") {
        v.kind = InitialSpec::Kind::explicit_values;
      } else if (name == "zero") {
        v.kind = InitialSpec::Kind::zero;
      } else {
        throw ConfigError("'initial.kind' must be random, explicit or zero");
      }
    }
    read(*i, "seed", "initial", v.seed);
    read(*i, "radius", "initial", v.radius);
    read(*i, "norm_index", "initial", v.norm_index);
    read(*i, "count", "initial", v.count);
    if (find(*i, "re") || find(*i, "im")) {
      Json parts = Json::object();
      if (const Json* re = find(*i, "re")) parts["re"] = *re;
      if (const Json* im = find(*i, "im")) parts["im"] = *im;
      v.values = complex_list(parts, "initial");
    }
    if (v.kind == InitialSpec::Kind::explicit_values && v.values.size() == 0) {
      throw ConfigError("'initial.kind' explicit needs initial.re (and optionally initial.im)");
    }
  }
  if (const Json* n = find(doc, "noise")) {
    check_section(*n, "noise");
    auto& v = cfg.noise;
    v.enabled = true;
    if (const Json* a = find(*n, "amplitudes")) v.amplitudes = to_rvec(as_number_list(*a, "noise.amplitudes"));
    read(*n, "scale", "noise", v.scale);
    read(*n, "exponent", "noise", v.exponent);
    read(*n, "seed", "noise", v.seed);
    read(*n, "members", "noise", v.members);
    if (v.amplitudes && ((v.amplitudes->array() < 0.0).any() || !v.amplitudes->allFinite())) {
      throw ConfigError("'noise.amplitudes' must be finite and non-negative");
    }
    if (!(v.scale >= 0.0)) throw ConfigError("'noise.scale' must be >= 0");
  }
  if (const Json* s = find(doc, "study")) {
    check_section(*s, "study");
    auto& v = cfg.study;
    if (const Json* k = find(*s, "kind")) v.kind = study_kind_from_string(as_string(*k, "study.kind"));
    if (const Json* e = find(*s, "epsilons")) v.epsilons = as_number_list(*e, "study.epsilons");
    read(*s, "s1", "study", v.s1);
    if (const Json* t = find(*s, "sample_times")) v.sample_times = as_number_list(*t, "study.sample_times");
    read(*s, "tracked_modes", "study", v.tracked_modes);
    read(*s, "coupled_noise", "study", v.coupled_noise);
    read(*s, "stochastic", "study", v.stochastic);
    read(*s, "burn_in", "study", v.burn_in);
    read(*s, "batches", "study", v.batches);
    if (const Json* w = find(*s, "windows")) v.windows = as_number_list(*w, "study.windows");
    read(*s, "probes", "study", v.probes);
    read(*s, "ratio_threshold", "study", v.ratio_threshold);
    read(*s, "decay_factor", "study", v.decay_factor);
    read(*s, "band_sigma", "study", v.band_sigma);
    read(*s, "trend_min", "study", v.trend_min);
  }
  read(doc, "threads", "", cfg.threads);
  cfg.validate();
  cfg.snapshot = config_to_json(cfg);
  return cfg;
}

RunConfig load_config(const std::string& path) {
  const std::string text = read_text_file(path);
  Json doc;
  try {
    doc = Json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError("'" + path + "': " + e.what());
  }
  return parse_config(doc);
}

Json config_to_json(const RunConfig& cfg) {
  const auto& p = cfg.problem;
  Json frame{{"modes", p.modes}};
  if (p.cutoff) frame["cutoff"] = *p.cutoff;
  if (p.frame_file) frame["file"] = *p.frame_file;
  if (p.frame_hash) frame["hash"] = *p.frame_hash;
  const auto& s = cfg.solver;
  Json solver{{"epsilon", s.epsilon},
              {"horizon", s.horizon},
              {"step", s.step},
              {"theta_osc", s.theta_osc},
              {"scheme", to_string(s.scheme)},
              {"record_stride", s.record_stride},
              {"samples", s.samples},
              {"s_star", s.s_star},
              {"blowup_factor", s.blowup_factor},
              {"blowup_offset", s.blowup_offset}};
  Json drift{{"route", route_name(cfg.drift.route)}};
  if (cfg.drift.t_avg) drift["t_avg"] = *cfg.drift.t_avg;
  if (cfg.drift.n_quad) drift["n_quad"] = *cfg.drift.n_quad;
  const auto& i = cfg.initial;
  Json initial{{"kind", initial_kind_name(i.kind)}};
  if (i.kind == InitialSpec::Kind::random) {
    initial["seed"] = i.seed;
    initial["radius"] = i.radius;
    initial["norm_index"] = i.norm_index;
    initial["count"] = i.count;
  } else if (i.kind == InitialSpec::Kind::explicit_values) {
    initial["re"] = from_rvec(i.values.real());
    initial["im"] = from_rvec(i.values.imag());
  }
  Json doc{{"geometry", geometry_to_json(p.geometry)},
           {"potential", potential_to_json(p.potential)},
           {"frame", frame},
           {"nonlinearity", nonlinearity_to_json(p.nonlinearity)},
           {"resonance", {{"eta", p.eta_res}}},
           {"solver", solver},
           {"drift", drift},
           {"initial", initial}};
  if (cfg.noise.enabled) {
    const auto& n = cfg.noise;
    Json noise = Json::object();
    if (n.amplitudes) {
      noise["amplitudes"] = from_rvec(*n.amplitudes);
    } else {
      noise["scale"] = n.scale;
      noise["exponent"] = n.exponent;
    }
    noise["seed"] = n.seed;
    noise["members"] = n.members;
    doc["noise"] = noise;
  }
  const auto& st = cfg.study;
  Json study{{"epsilons", st.epsilons},
             {"s1", st.s1},
             {"sample_times", st.sample_times},
             {"tracked_modes", st.tracked_modes},
             {"coupled_noise", st.coupled_noise},
             {"stochastic", st.stochastic},
             {"burn_in", st.burn_in},
             {"batches", st.batches},
             {"windows", st.windows},
             {"probes", st.probes},
             {"ratio_threshold", st.ratio_threshold},
             {"decay_factor", st.decay_factor},
             {"band_sigma", st.band_sigma},
             {"trend_min", st.trend_min}};
  if (st.kind) study["kind"] = to_string(*st.kind);
  doc["study"] = study;
  return doc;
}

std::string config_help() {
  std::ostringstream out;
  out << "Configuration keys (JSON; unknown keys are rejected):\n";
  for (const auto& k : kKeys) {
    out << "  " << k.key;
    const std::size_t width = std::string(k.key).size();
    out << std::string(width < 24 ? 24 - width : 1, ' ') << k.text << "\n";
  }
  return out.str();
}

SpectralFrame build_problem_frame(const ProblemSpec& problem) {
  if (!problem.frame_file) return build_frame(problem.geometry, problem.potential, problem.modes, problem.cutoff);
  Json doc;
  try {
    doc = Json::parse(read_text_file(*problem.frame_file));
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError("frame file '" + *problem.frame_file + "': " + e.what());
  }
  SpectralFrame frame = frame_from_json(doc);
  const std::string hash = frame_hash(frame);
  if (problem.frame_hash && *problem.frame_hash != hash) {
    throw ValidationError("frame file '" + *problem.frame_file + "' has hash " + hash + ", config expects " +
                          *problem.frame_hash + " (stale artifact)");
  }
  if (geometry_to_json(frame.geometry()) != geometry_to_json(problem.geometry) ||
      potential_to_json(frame.potential()) != potential_to_json(problem.potential) ||
      frame.modes() != problem.modes || (problem.cutoff && *problem.cutoff != frame.cutoff())) {
    throw ValidationError("frame file '" + *problem.frame_file +
                          "' was built for a different geometry, potential or mode count (stale artifact)");
  }
  return frame;
}

EffectiveField make_effective_field(std::shared_ptr<const SpectralFrame> frame, const NonlinearitySpec& spec,
                                    const DriftSpec& drift, double eta) {
  if (drift.route == EffectiveField::Route::analytic) return EffectiveField::analytic(std::move(frame), spec, eta);
  const double t_avg = drift.t_avg.value_or(default_averaging_window(*frame, spec, eta));
  const int n_quad = drift.n_quad.value_or(default_quadrature_nodes(*frame, spec, t_avg));
  return EffectiveField::numerical(std::move(frame), spec, t_avg, n_quad);
}

RVec noise_amplitudes(const NoiseSpec& noise, const SpectralFrame& frame) {
  const int n_pw = frame.plane_waves();
  RVec b = RVec::Zero(n_pw);
  if (!noise.enabled) return b;
  if (noise.amplitudes) {
    if (noise.amplitudes->size() > n_pw) {
      throw ConfigError("noise.amplitudes has " + std::to_string(noise.amplitudes->size()) + " entries, frame has " +
                        std::to_string(n_pw) + " plane waves");
    }
    b.head(noise.amplitudes->size()) = *noise.amplitudes;
    return b;
  }
  for (int l = 0; l < n_pw; ++l) b[l] = noise.scale * std::pow(1.0 + frame.basis()[l].symbol, noise.exponent);
  return b;
}

std::vector<CVec> sample_sphere(const SpectralFrame& frame, int count, std::uint64_t seed, double radius,
                                double norm_index) {
  const NoiseStream stream(seed);
  std::vector<CVec> out;
  for (int i = 0; i < count; ++i) {
    CVec v(frame.modes());
    for (int k = 0; k < frame.modes(); ++k) {
      const auto [re, im] = stream.normal_pair(static_cast<std::uint64_t>(i), static_cast<std::uint32_t>(k));
      v[k] = Complex(re, im);
    }
    v *= radius / sobolev_norm(v, norm_index, frame);
    out.push_back(v);
  }
  return out;
}

std::vector<CVec> initial_states(const InitialSpec& initial, const SpectralFrame& frame) {
  switch (initial.kind) {
    case InitialSpec::Kind::zero:
      return std::vector<CVec>(initial.count, CVec::Zero(frame.modes()));
    case InitialSpec::Kind::explicit_values:
      if (initial.values.size() != frame.modes()) {
        throw ConfigError("initial.re has " + std::to_string(initial.values.size()) + " entries, frame has " +
                          std::to_string(frame.modes()) + " modes");
      }
      return {initial.values};
    case InitialSpec::Kind::random:
      break;
  }
  return sample_sphere(frame, initial.count, initial.seed, initial.radius, initial.norm_index);
}

}  // namespace resavg

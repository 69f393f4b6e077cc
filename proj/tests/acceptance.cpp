// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit if any fails.
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <functional>
#include <iomanip>
#include <iostream>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <tuple>
#include <vector>

#include "CLI11.hpp"
#include "resavg/cli.hpp"
#include "resavg/config.hpp"
#include "resavg/diffusion.hpp"
#include "resavg/ensemble.hpp"
#include "resavg/error.hpp"
#include "resavg/experiments.hpp"
#include "resavg/integrate.hpp"
#include "resavg/io.hpp"
#include "resavg/rng.hpp"
#include "resavg/state.hpp"

using namespace resavg;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

struct Context {
  fs::path configs;
  fs::path workdir;
  int threads = 1;
};

std::string sci(double x) {
  std::ostringstream s;
  s << std::scientific << std::setprecision(3) << x;
  return s.str();
}

TorusGeometry line(int grid) {
  TorusGeometry g;
  g.dim = 1;
  g.grid = grid;
  return g;
}

TorusGeometry square(int grid) {
  TorusGeometry g;
  g.dim = 2;
  g.grid = grid;
  return g;
}

// ---------------------------------------------------------------- 1

Outcome spectral(const Context&) {
  double err1 = 0.0;
  const auto f1 = build_frame(line(64), Potential{}, 17);
  std::vector<double> expect1{0.0};
  for (int j = 1; j <= 8; ++j) expect1.insert(expect1.end(), {double(j * j), double(j * j)});
  for (int k = 0; k < 17; ++k) err1 = std::max(err1, std::abs(f1.lambda()[k] - expect1[k]));

  // lowest 25 values of |m|^2 over a lattice much larger than the window
  std::vector<double> expect2;
  for (int a = -6; a <= 6; ++a)
    for (int b = -6; b <= 6; ++b) expect2.push_back(a * a + b * b);
  std::sort(expect2.begin(), expect2.end());
  const auto f2 = build_frame(square(16), Potential{}, 25);
  double err2 = 0.0;
  for (int k = 0; k < 25; ++k) err2 = std::max(err2, std::abs(f2.lambda()[k] - expect2[k]));
  return {err1 <= 1e-10 && err2 <= 1e-10, "d=1 max error " + sci(err1) + ", d=2 max error " + sci(err2)};
}

// ---------------------------------------------------------------- 2

using TripleKey = std::tuple<int, int, int, int, int, int>;

Outcome resonance_oracle(const Context&) {
  int targets = 0;
  int mismatches = 0;
  std::size_t tuples = 0;
  for (const auto& [dim, w] : {std::pair{1, 4}, std::pair{2, 2}}) {
    const TorusGeometry g = dim == 1 ? line(16) : square(16);
    std::vector<Lattice> pts;
    const int w1 = dim == 2 ? w : 0;
    for (int a = -w; a <= w; ++a)
      for (int b = -w1; b <= w1; ++b) pts.push_back({a, b});
    auto n2 = [](const Lattice& k) { return k[0] * k[0] + k[1] * k[1]; };
    for (const auto& t : pts) {
      std::set<TripleKey> brute;
      for (const auto& k1 : pts)
        for (const auto& k2 : pts)
          for (const auto& k3 : pts)
            if (k1[0] - k2[0] + k3[0] == t[0] && k1[1] - k2[1] + k3[1] == t[1] &&
                n2(k1) - n2(k2) + n2(k3) == n2(t))
              brute.insert({k1[0], k1[1], k2[0], k2[1], k3[0], k3[1]});
      for (auto mode : {ArithmeticMode::exact_integer, ArithmeticMode::tolerance}) {
        const auto found = enumerate_cubic_resonances(g, w, t, mode);
        std::set<TripleKey> got;
        for (const auto& x : found) got.insert({x[0][0], x[0][1], x[1][0], x[1][1], x[2][0], x[2][1]});
        if (got != brute || got.size() != found.size()) ++mismatches;
      }
      tuples += brute.size();
      ++targets;
    }
  }
  return {mismatches == 0, std::to_string(targets) + " targets, " + std::to_string(tuples) + " tuples, " +
                               std::to_string(mismatches) + " mismatching sets"};
}

// ---------------------------------------------------------------- 3

Outcome drift_routes(const Context&) {
  const auto frame = build_frame(line(32), Potential{}, 9);
  const auto spec = NonlinearitySpec::cubic_focusing_nls();
  const double t_avg = default_averaging_window(frame, spec);
  const double s1 = 1.6;
  const auto probes = sample_sphere(frame, 5, 2024, 2.0, 2.0);
  double worst = 0.0;
  double worst_ratio = 1e300;
  for (const auto& v : probes) {
    const auto at = effective_drift_numerical(v, spec, frame, t_avg, default_quadrature_nodes(frame, spec, t_avg), s1);
    const auto twice =
        effective_drift_numerical(v, spec, frame, 2 * t_avg, default_quadrature_nodes(frame, spec, 2 * t_avg), s1);
    worst = std::max(worst, *at.residual);
    worst_ratio = std::min(worst_ratio, *at.residual / *twice.residual);
  }
  const bool bound = worst <= 1e-6;
  const bool halves = worst_ratio >= 1.8;
  return {bound && halves, "max residual at T_avg " + sci(worst) + (bound ? " (<= 1e-6)" : " (> 1e-6)") +
                               "; min decrease factor on doubling T_avg " + sci(worst_ratio) +
                               (halves ? " (>= 1.8)" : " (< 1.8)")};
}

// ---------------------------------------------------------------- 4

Outcome commutation(const Context&) {
  const auto frame = build_frame(line(32), Potential{}, 9);
  const auto r = EffectiveField::analytic(frame, NonlinearitySpec::cubic_focusing_nls());
  const auto probes = sample_sphere(frame, 10, 77, 2.0, 2.0);
  NoiseStream times(78);
  double worst = 0.0;
  for (int i = 0; i < 10; ++i) {
    const double t = 20.0 * std::abs(times.normal_pair(i, 0).first);
    const CVec lhs = r(rotate(probes[i], frame.lambda(), t));
    const CVec rhs = rotate(r(probes[i]), frame.lambda(), t);
    worst = std::max(worst, sobolev_norm(lhs - rhs, 1.6, frame.lambda()));
  }
  return {worst <= 1e-10, "max |R(Phi v) - Phi R(v)|_s1 = " + sci(worst)};
}

// ---------------------------------------------------------------- 5

Outcome diagonal(const Context&) {
  const auto frame = std::make_shared<const SpectralFrame>(build_frame(line(32), Potential{}, 9));
  CVec gamma(9);
  for (int k = 0; k < 9; ++k) gamma[k] = Complex(0.2 * std::sin(1.0 + k), 2.0 * std::cos(3.0 * k));
  const auto spec = NonlinearitySpec::diagonal_field(gamma, 0.1);
  const PerturbationField field(frame, spec);
  const auto eff = EffectiveField::analytic(frame, spec);
  SolverConfig cfg;
  cfg.horizon = 1.0;
  cfg.step = 0.01;
  cfg.samples = 20;
  const CVec v0 = sample_sphere(*frame, 1, 5, 1.0, 2.0).front();
  const auto red = integrate_effective(v0, cfg, eff);
  std::string detail;
  bool ok = true;
  for (double eps : {0.1, 0.01}) {
    const auto full = integrate_full(v0, eps, cfg, field);
    double worst = 0.0;
    for (std::size_t j = 0; j < full.size(); ++j)
      worst = std::max(worst, (full.actions[j] - red.actions[j]).cwiseAbs().maxCoeff());
    ok = ok && worst <= 1e-8;
    detail += "eps=" + format_double(eps) + ": " + sci(worst) + "  ";
  }
  return {ok, "max action difference " + detail};
}

// ---------------------------------------------------------------- 6, 7, 9, 10

Outcome study(const Context& ctx, const std::string& file, bool expect_conditional = false) {
  RunConfig cfg = load_config((ctx.configs / file).string());
  cfg.threads = ctx.threads;
  const auto report = run_study(cfg);
  int passed = 0;
  std::string failed;
  for (const auto& v : report.verdicts) {
    if (v.pass) {
      ++passed;
    } else {
      failed += "; failed: " + v.name + " (" + v.detail + ")";
    }
  }
  std::string detail = std::to_string(passed) + "/" + std::to_string(report.verdicts.size()) + " verdicts pass";
  if (report.inconclusive) detail += ", INCONCLUSIVE";
  if (report.conditional) detail += ", conditional on uniqueness and mixing of the stationary measures";
  bool ok = report.passed();
  if (expect_conditional && !report.conditional) {
    ok = false;
    detail += ", missing conditional label";
  }
  return {ok, detail + failed};
}

// ---------------------------------------------------------------- 8

Outcome ornstein_uhlenbeck(const Context& ctx) {
  const auto frame = std::make_shared<const SpectralFrame>(build_frame(line(32), Potential{}, 9));
  const double mu = 0.5;
  const auto spec = NonlinearitySpec::diagonal_field(CVec::Zero(9), mu);
  RVec b(frame->plane_waves());
  for (int l = 0; l < b.size(); ++l) {
    const double lam = frame->basis()[l].symbol;
    b[l] = lam > 0.0 ? 1.0 / (lam * lam) : 1.0;
  }
  SolverConfig cfg;
  cfg.horizon = 1.0;
  cfg.step = 1e-3;
  cfg.samples = 1;
  const CVec v0 = sample_sphere(*frame, 1, 8, 1.0, 0.0).front();
  const PerturbationField field(frame, spec);
  const auto eff = EffectiveField::analytic(frame, spec);
  const auto diffusion = build_diffusion(*frame, b, eigenvalue_clusters(frame->lambda(), 1e-8));
  const int n = 2000;
  const double eps = 0.1;
  const auto full = run_ensemble(
      [&](std::uint64_t s) { return integrate_full_stochastic(v0, eps, cfg, field, NoiseModel{b, s}); }, n, 80000,
      ctx.threads, false);
  const auto red = run_ensemble(
      [&](std::uint64_t s) { return integrate_effective_stochastic(v0, cfg, eff, diffusion, s); }, n, 90000,
      ctx.threads, false);
  bool ok = true;
  double worst = 0.0;
  for (const auto* e : {&full, &red}) {
    const auto& s = e->summary;
    const int last = static_cast<int>(s.tau.size()) - 1;
    for (int k = 0; k < 9; ++k) {
      const double lam = frame->lambda()[k];
      const double decay = std::exp(-2.0 * mu * lam);
      // Psi = I, so mode k is driven by plane wave k alone
      const double closed = lam > 0.0 ? decay * std::norm(v0[k]) + b[k] * b[k] * (1.0 - decay) / (mu * lam)
                                      : std::norm(v0[k]) + 2.0 * b[k] * b[k];
      const double z = std::abs(2.0 * s.mean(last, k) - closed) / (2.0 * s.stderr_(last, k));
      worst = std::max(worst, z);
      ok = ok && z <= 3.0;
    }
  }
  return {ok, "N=" + std::to_string(n) + ", max |E|v_k(1)|^2 - closed form| / stderr over 9 modes and both integrators = " +
                  sci(worst)};
}

// ---------------------------------------------------------------- 11

std::map<std::string, std::string> snapshot(const fs::path& dir) {
  std::map<std::string, std::string> out;
  for (const auto& e : fs::recursive_directory_iterator(dir)) {
    if (e.is_regular_file()) out[fs::relative(e.path(), dir).string()] = read_text_file(e.path().string());
  }
  return out;
}

Outcome determinism(const Context& ctx) {
  setenv("SOURCE_DATE_EPOCH", "1700000000", 1);
  const std::vector<std::vector<std::string>> commands{
      {"basis", "basis_d1.json"},
      {"basis", "basis_d2.json"},
      {"resonances", "resonances_d1.json"},
      {"resonances", "resonances_d2.json"},
      {"effective", "effective_numerical_d1.json"},
      {"effective", "effective_cubic_d1.json"},
      {"simulate", "simulate_diagonal_d1.json"},
      {"effective", "simulate_diagonal_d1.json"},
      {"study", "converge", "converge_cubic_d1.json"},
      {"study", "disparity", "disparity_cubic_d1.json"},
  };
  const fs::path root = ctx.workdir / "determinism";
  fs::remove_all(root);
  int files = 0;
  std::string problems;
  for (std::size_t c = 0; c < commands.size(); ++c) {
    std::vector<std::string> args(commands[c].begin(), commands[c].end() - 1);
    const fs::path out = root / ("run" + std::to_string(c));
    args.insert(args.end(), {"--config", (ctx.configs / commands[c].back()).string(), "--out", out.string(),
                             "--threads", std::to_string(ctx.threads)});
    std::map<std::string, std::string> first;
    for (int pass = 0; pass < 2; ++pass) {
      std::ostringstream o, e;
      const int code = run_cli(args, o, e);
      if (code != kExitOk) problems += "; " + commands[c].back() + " exited " + std::to_string(code) + " " + e.str();
      const auto files_now = snapshot(out);
      if (pass == 0) {
        first = files_now;
      } else if (files_now != first) {
        problems += "; outputs of " + commands[c].front() + " " + commands[c].back() + " differ";
      } else {
        files += static_cast<int>(files_now.size());
      }
    }
  }
  return {problems.empty(), std::to_string(files) + " files reproduced bitwise across " +
                                std::to_string(commands.size()) + " commands" + problems};
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"acceptance suite"};
  Context ctx;
  std::string configs = RESAVG_CONFIG_DIR;
  std::string workdir = (fs::temp_directory_path() / "resavg_acceptance").string();
  std::vector<int> only;
  app.add_option("--configs", configs, "directory holding the study configurations");
  app.add_option("--workdir", workdir, "scratch directory for CLI outputs");
  app.add_option("--threads", ctx.threads, "worker threads")->check(CLI::PositiveNumber);
  app.add_option("--only", only, "run only these criteria");
  CLI11_PARSE(app, argc, argv);
  ctx.configs = configs;
  ctx.workdir = workdir;
  fs::create_directories(ctx.workdir);

  struct Criterion {
    int id;
    std::string name;
    double budget;  // seconds
    std::function<Outcome(const Context&)> run;
  };
  const std::vector<Criterion> criteria{
      {1, "spectral correctness", 1.0, spectral},
      {2, "resonance enumeration equals brute force", 5.0, resonance_oracle},
      {3, "analytic and numerical drift agree", 30.0, drift_routes},
      {4, "resonant average commutes with the linear flow", 5.0, commutation},
      {5, "diagonal field: full and effective actions coincide", 10.0, diagonal},
      {6, "deterministic convergence study", 600.0, [](const Context& c) { return study(c, "converge_cubic_d1.json"); }},
      {7, "disparity decay", 1200.0, [](const Context& c) { return study(c, "disparity_cubic_d1.json"); }},
      {8, "Ornstein-Uhlenbeck second moments", 120.0, ornstein_uhlenbeck},
      {9, "stochastic action moments", 1800.0, [](const Context& c) { return study(c, "stochastic_cubic_d1.json"); }},
      {10, "stationary diagnostics", 1800.0, [](const Context& c) { return study(c, "stationary_d1.json", true); }},
      {11, "bitwise reproducibility of outputs", 1800.0, determinism},
  };

  int failures = 0;
  for (const auto& c : criteria) {
    if (!only.empty() && std::find(only.begin(), only.end(), c.id) == only.end()) continue;
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run(ctx);
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    const bool in_time = secs <= c.budget;
    const bool pass = o.pass && in_time;
    failures += pass ? 0 : 1;
    std::cout << (pass ? "PASS" : "FAIL") << "  criterion " << std::setw(2) << c.id << "  " << c.name << "  ["
              << std::fixed << std::setprecision(2) << secs << " s of " << c.budget << " s"
              << (in_time ? "" : ", over budget") << "]  " << o.detail << std::endl;
  }
  std::cout << (failures == 0 ? "all criteria pass" : std::to_string(failures) + " criteria fail") << std::endl;
  return failures == 0 ? 0 : 1;
}

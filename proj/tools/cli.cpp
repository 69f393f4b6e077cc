#include "resavg/cli.hpp"

#include <chrono>
#include <cstdlib>
#include <ctime>
#include <filesystem>
#include <map>
#include <thread>

#include "CLI11.hpp"
#include "resavg/error.hpp"
#include "resavg/experiments.hpp"
#include "resavg/io.hpp"

namespace resavg {

namespace {

namespace fs = std::filesystem;

struct Options {
  std::string config;
  std::string out = ".";
  std::optional<std::uint64_t> seed;
  std::optional<int> threads;
  bool verbose = false;
};

// UTC timestamp; SOURCE_DATE_EPOCH pins it for reproducible manifests
std::string timestamp() {
  std::time_t t = std::time(nullptr);
  if (const char* fixed = std::getenv("SOURCE_DATE_EPOCH")) t = static_cast<std::time_t>(std::atoll(fixed));
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

class OutputDir {
 public:
  explicit OutputDir(const std::string& dir) : dir_(dir) {
    std::error_code ec;
    fs::create_directories(dir_, ec);
    if (ec) throw ConfigError("cannot create output directory '" + dir + "': " + ec.message());
  }

  void write(const std::string& name, const std::string& content) {
    write_text_file((dir_ / name).string(), content);
    files_[name] = hash_hex(content);
  }

  void manifest(const std::string& command, const Options& opt, const RunConfig& cfg) {
    Json files = Json::object();
    for (const auto& [name, hash] : files_) files[name] = hash;
    const Json doc{{"command", command},
                   {"config_path", opt.config},
                   {"config", cfg.snapshot},
                   {"output_dir", opt.out},
                   {"tool_version", RESAVG_VERSION},
                   {"timestamp", timestamp()},
                   {"seed", cfg.noise.seed},
                   {"threads", cfg.threads},
                   {"files", files}};
    write_text_file((dir_ / "manifest.json").string(), doc.dump(2) + "\n");
  }

 private:
  fs::path dir_;
  std::map<std::string, std::string> files_;
};

RunConfig load(const Options& opt) {
  RunConfig cfg = load_config(opt.config);
  if (opt.seed) cfg.noise.seed = *opt.seed;
  cfg.threads = opt.threads.value_or(std::max(1u, std::thread::hardware_concurrency()));
  cfg.validate();
  cfg.snapshot = config_to_json(cfg);
  return cfg;
}

int cmd_basis(const Options& opt, std::ostream& out) {
  const RunConfig cfg = load(opt);
  const SpectralFrame frame = build_problem_frame(cfg.problem);
  OutputDir dir(opt.out);
  const std::string summary = spectrum_summary(frame);
  dir.write("frame.json", frame_to_json(frame).dump(2) + "\n");
  dir.write("spectrum.txt", summary);
  dir.manifest("basis", opt, cfg);
  out << "frame hash " << frame_hash(frame) << "\n" << summary;
  return kExitOk;
}

int cmd_resonances(const Options& opt, std::ostream& out) {
  const RunConfig cfg = load(opt);
  const SpectralFrame frame = build_problem_frame(cfg.problem);
  const auto& spec = cfg.problem.nonlinearity;
  std::vector<ConjugationPattern> patterns;
  for (const auto& m : spec.polynomial_terms()) {
    if (std::find(patterns.begin(), patterns.end(), m.pattern()) == patterns.end()) patterns.push_back(m.pattern());
  }
  if (patterns.empty()) patterns.push_back({1, -1, 1});
  Json tables = Json::array();
  for (const auto& p : patterns) {
    const ResonanceTable table = build_resonance_table(frame, p, cfg.problem.eta_res);
    tables.push_back(resonance_table_to_json(table));
    out << "pattern [";
    for (std::size_t i = 0; i < p.size(); ++i) out << (i ? "," : "") << p[i];
    out << "]: " << table.tuple_count() << " resonant tuples, gamma_min " << format_double(table.gamma_min) << "\n";
  }
  OutputDir dir(opt.out);
  dir.write("resonances.json", Json{{"frame_hash", frame_hash(frame)}, {"tables", tables}}.dump(2) + "\n");
  dir.manifest("resonances", opt, cfg);
  return kExitOk;
}

int cmd_run(const Options& opt, bool effective, std::ostream& out) {
  const RunConfig cfg = load(opt);
  auto frame = std::make_shared<const SpectralFrame>(build_problem_frame(cfg.problem));
  const std::string fhash = frame_hash(*frame);
  const auto& spec = cfg.problem.nonlinearity;
  const CVec v0 = initial_states(cfg.initial, *frame).front();
  const double eps = cfg.solver.epsilon;
  OutputDir dir(opt.out);

  std::optional<EffectiveField> drift;
  if (effective) drift.emplace(make_effective_field(frame, spec, cfg.drift, cfg.problem.eta_res));
  const PerturbationField field(frame, spec);

  if (!cfg.noise.enabled) {
    const Trajectory t = effective ? integrate_effective(v0, cfg.solver, *drift) : integrate_full(v0, eps, cfg.solver, field);
    dir.write("trajectory.jsonl", trajectory_to_jsonl(t, trajectory_header(t, cfg.snapshot, fhash)));
    out << (effective ? "effective" : "full") << " run: " << t.meta.steps << " steps of " << format_double(t.meta.step)
        << ", " << t.size() << " samples\n";
  } else {
    const RVec b = noise_amplitudes(cfg.noise, *frame);
    std::optional<DiffusionSpec> diffusion;
    if (effective) diffusion = build_diffusion(*frame, b, eigenvalue_clusters(frame->lambda(), cfg.problem.eta_res));
    const Ensemble ens = run_ensemble(
        [&](std::uint64_t seed) {
          return effective ? integrate_effective_stochastic(v0, cfg.solver, *drift, *diffusion, seed)
                           : integrate_full_stochastic(v0, eps, cfg.solver, field, NoiseModel{b, seed});
        },
        cfg.noise.members, cfg.noise.seed, cfg.threads);
    for (std::size_t i = 0; i < ens.members.size(); ++i) {
      const Trajectory& t = ens.members[i];
      dir.write("trajectory_" + std::to_string(ens.member_index[i]) + ".jsonl",
                trajectory_to_jsonl(t, trajectory_header(t, cfg.snapshot, fhash)));
    }
    dir.write("ensemble.csv", ensemble_to_csv(ens.summary));
    out << ens.members.size() << " of " << ens.requested << " members completed\n";
    for (const auto& f : ens.failures) out << "excluded: " << f << "\n";
  }
  dir.manifest(effective ? "effective" : "simulate", opt, cfg);
  return kExitOk;
}

int cmd_study(const Options& opt, const std::string& kind, std::ostream& out) {
  RunConfig cfg = load(opt);
  const StudyKind requested = study_kind_from_string(kind);
  if (cfg.study.kind && *cfg.study.kind != requested) {
    throw ConfigError("config declares study.kind '" + to_string(*cfg.study.kind) + "' but command asks for '" +
                      kind + "'");
  }
  cfg.study.kind = requested;
  cfg.snapshot = config_to_json(cfg);
  const StudyReport report = run_study(cfg);
  OutputDir dir(opt.out);
  dir.write("report.json", report.to_json().dump(2) + "\n");
  for (const auto& t : report.tables) dir.write(kind + "_" + t.name + ".csv", t.to_csv());
  dir.manifest("study " + kind, opt, cfg);
  for (const auto& v : report.verdicts) {
    out << (v.pass ? "PASS " : "FAIL ") << v.name << (v.detail.empty() ? "" : "  (" + v.detail + ")") << "\n";
  }
  if (report.conditional) out << "verdict is conditional (see notes in report.json)\n";
  if (report.inconclusive) out << "INCONCLUSIVE: nonstationarity detected\n";
  return report.passed() ? kExitOk : kExitCriteria;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Resonant averaging of weakly nonlinear CGL equations on tori", "resavg"};
  app.footer("\n" + config_help() +
             "\nExit codes: 0 success, 1 usage or configuration error, 2 numeric failure, 3 study criteria failed.");
  app.require_subcommand(1);
  Options opt;
  std::uint64_t seed = 0;
  int threads = 0;
  auto common = [&](CLI::App* sub) {
    sub->add_option("--config", opt.config, "JSON configuration file")->required()->check(CLI::ExistingFile);
    sub->add_option("--out", opt.out, "output directory (default .)");
    sub->add_option("--seed", seed, "override noise.seed");
    sub->add_option("--threads", threads, "worker threads (default: available cores)")->check(CLI::PositiveNumber);
    sub->add_flag("--verbose", opt.verbose, "print the resolved configuration");
  };
  auto* basis = app.add_subcommand("basis", "build and export the spectral frame");
  auto* resonances = app.add_subcommand("resonances", "enumerate and export resonance tables");
  auto* simulate = app.add_subcommand("simulate", "integrate the full system (ensemble when noise is set)");
  auto* effective = app.add_subcommand("effective", "integrate the effective equation");
  auto* study = app.add_subcommand("study", "run a study: converge | operator | stochastic | stationary | disparity");
  std::string kind;
  study->add_option("kind", kind, "study kind")
      ->required()
      ->check(CLI::IsMember({"converge", "operator", "stochastic", "stationary", "disparity"}));
  for (auto* sub : {basis, resonances, simulate, effective, study}) common(sub);

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    return kExitConfig;
  }
  const auto chosen = app.get_subcommands();
  if (std::any_of(chosen.begin(), chosen.end(), [](const CLI::App* s) { return s->count("--seed") > 0; })) {
    opt.seed = seed;
  }
  if (threads > 0) opt.threads = threads;

  try {
    if (opt.verbose) err << config_to_json(load(opt)).dump(2) << "\n";
    if (*basis) return cmd_basis(opt, out);
    if (*resonances) return cmd_resonances(opt, out);
    if (*simulate) return cmd_run(opt, false, out);
    if (*effective) return cmd_run(opt, true, out);
    return cmd_study(opt, kind, out);
  } catch (const NumericError& e) {
    err << "numeric failure: " << e.what() << "\n";
    return kExitNumeric;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const Json::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitConfig;
  }
}

}  // namespace resavg

#include <filesystem>
#include <sstream>
#include <string>

#include "doctest.h"
#include "resavg/cli.hpp"
#include "resavg/config.hpp"
#include "resavg/error.hpp"
#include "resavg/io.hpp"

using namespace resavg;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("resavg_unit_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

std::string write_config(const fs::path& dir, const Json& doc) {
  const auto path = (dir / "config.json").string();
  write_text_file(path, doc.dump(2));
  return path;
}

struct CliResult {
  int code;
  std::string out;
  std::string err;
};

CliResult cli(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = run_cli(args, out, err);
  return {code, out.str(), err.str()};
}

Json small_problem() {
  return Json::parse(R"({
    "geometry": {"dim": 1, "grid": 32},
    "frame": {"modes": 9},
    "nonlinearity": {"kind": "cubic_focusing", "mu": 0.1},
    "solver": {"epsilon": 0.1, "horizon": 0.2, "step": 0.01, "samples": 4},
    "initial": {"kind": "random", "seed": 3, "radius": 1.0}
  })");
}

}  // namespace

TEST_CASE("FNV-1a reference values") {
  CHECK(fnv1a64("") == 0xcbf29ce484222325ull);
  CHECK(fnv1a64("a") == 0xaf63dc4c8601ec8cull);
  CHECK(hash_hex("a") == "af63dc4c8601ec8c");
}

TEST_CASE("frame export round trip and tamper detection") {
  TorusGeometry g;
  Potential v;
  v.terms = {{{1, 0}, {0.4, 0.0}}, {{-1, 0}, {0.4, 0.0}}};
  const auto frame = build_frame(g, v, 7, 5);
  const Json doc = frame_to_json(frame);
  const auto back = frame_from_json(Json::parse(doc.dump()));
  CHECK(back.lambda() == frame.lambda());
  CHECK(back.psi() == frame.psi());
  CHECK(frame_hash(back) == frame_hash(frame));
  Json tampered = doc;
  tampered["lambda"][2] = tampered["lambda"][2].get<double>() + 1e-9;
  CHECK_THROWS_AS(frame_from_json(tampered), ValidationError);
}

TEST_CASE("spectrum summary lists multiplicities") {
  TorusGeometry g;
  const auto s = spectrum_summary(build_frame(g, Potential{}, 9));
  CHECK(s.find("multiplicities: 1,2,2,2,2") != std::string::npos);
}

TEST_CASE("config parsing is strict and idempotent") {
  Json doc = small_problem();
  const auto cfg = parse_config(doc);
  const Json resolved = config_to_json(cfg);
  CHECK(config_to_json(parse_config(resolved)).dump() == resolved.dump());
  doc["solver"]["stepp"] = 0.1;
  try {
    parse_config(doc);
    FAIL("unknown key accepted");
  } catch (const ConfigError& e) {
    CHECK(std::string(e.what()).find("solver.stepp") != std::string::npos);
  }
  Json wrong = small_problem();
  wrong["solver"]["horizon"] = "long";
  CHECK_THROWS_AS(parse_config(wrong), ConfigError);
  Json neg = small_problem();
  neg["solver"]["horizon"] = -1.0;
  CHECK_THROWS_AS(parse_config(neg), ConfigError);
}

TEST_CASE("help documents every key") {
  const std::string help = config_help();
  const Json resolved = config_to_json(parse_config(small_problem()));
  for (const auto& [section, body] : resolved.items()) {
    if (body.is_object()) {
      for (const auto& [key, value] : body.items()) {
        const std::string full = section + "." + key;
        CHECK_MESSAGE(help.find(full) != std::string::npos, full);
      }
    } else {
      CHECK_MESSAGE(help.find(section) != std::string::npos, section);
    }
  }
  const auto r = cli({"--help"});
  CHECK(r.code == kExitOk);
  CHECK(r.out.find("noise.exponent") != std::string::npos);
}

TEST_CASE("observable serialisation") {
  const Observable f{{ObservableTerm{Complex(1.0, -2.0), {{0, 2}}, {{3, 1}}}}};
  const auto back = observable_from_json(observable_to_json(f));
  REQUIRE(back.terms.size() == 1);
  CHECK(back.terms[0].coeff == f.terms[0].coeff);
  CHECK(back.terms[0].v_powers == f.terms[0].v_powers);
  CHECK(back.terms[0].vbar_powers == f.terms[0].vbar_powers);
}

TEST_CASE("cli basis: stable hash, manifest and malformed keys") {
  const auto dir = scratch("basis");
  const auto path = write_config(dir, small_problem());
  const auto a = cli({"basis", "--config", path, "--out", (dir / "a").string()});
  const auto b = cli({"basis", "--config", path, "--out", (dir / "b").string()});
  REQUIRE(a.code == kExitOk);
  CHECK(a.out.find("multiplicities: 1,2,2") != std::string::npos);
  CHECK(read_text_file((dir / "a" / "frame.json").string()) == read_text_file((dir / "b" / "frame.json").string()));
  CHECK(fs::exists(dir / "a" / "manifest.json"));
  const Json manifest = Json::parse(read_text_file((dir / "a" / "manifest.json").string()));
  CHECK(manifest["files"].contains("frame.json"));

  Json bad = small_problem();
  bad["geometry"]["gird"] = 32;
  const auto r = cli({"basis", "--config", write_config(dir, bad), "--out", (dir / "c").string()});
  CHECK(r.code == kExitConfig);
  CHECK(r.err.find("geometry.gird") != std::string::npos);
  CHECK(cli({"basis", "--config", (dir / "missing.json").string()}).code == kExitConfig);
}

TEST_CASE("cli refuses missing and stale frame files") {
  const auto dir = scratch("stale");
  const auto path = write_config(dir, small_problem());
  REQUIRE(cli({"basis", "--config", path, "--out", dir.string()}).code == kExitOk);
  const Json frame = Json::parse(read_text_file((dir / "frame.json").string()));

  Json reuse = small_problem();
  reuse["frame"]["file"] = (dir / "frame.json").string();
  reuse["frame"]["hash"] = frame["hash"];
  CHECK(cli({"simulate", "--config", write_config(dir, reuse), "--out", (dir / "ok").string()}).code == kExitOk);

  reuse["frame"]["hash"] = "0000000000000000";
  auto r = cli({"simulate", "--config", write_config(dir, reuse), "--out", (dir / "x").string()});
  CHECK(r.code == kExitConfig);
  CHECK(r.err.find("stale") != std::string::npos);

  reuse["frame"].erase("hash");
  reuse["frame"]["file"] = (dir / "nowhere.json").string();
  r = cli({"simulate", "--config", write_config(dir, reuse), "--out", (dir / "y").string()});
  CHECK(r.code == kExitConfig);
  CHECK(r.err.find("nowhere.json") != std::string::npos);
}

TEST_CASE("cli simulate: zero noise equals the deterministic run") {
  const auto dir = scratch("simulate");
  Json det = small_problem();
  det["solver"]["scheme"] = "exp_euler";
  REQUIRE(cli({"simulate", "--config", write_config(dir, det), "--out", (dir / "det").string()}).code == kExitOk);
  Json noisy = det;
  noisy["noise"] = Json::parse(R"({"amplitudes": [0, 0, 0], "seed": 4})");
  REQUIRE(cli({"simulate", "--config", write_config(dir, noisy), "--out", (dir / "sto").string()}).code == kExitOk);
  auto records = [](const std::string& text) { return text.substr(text.find('\n') + 1); };
  CHECK(records(read_text_file((dir / "det" / "trajectory.jsonl").string())) ==
        records(read_text_file((dir / "sto" / "trajectory_0.jsonl").string())));
  const std::string header = read_text_file((dir / "sto" / "trajectory_0.jsonl").string());
  CHECK(header.find("noise_convention") != std::string::npos);
  CHECK(fs::exists(dir / "sto" / "ensemble.csv"));
}

TEST_CASE("cli study exit code follows the verdicts") {
  const auto dir = scratch("study");
  Json doc = small_problem();
  doc["solver"]["horizon"] = 0.5;
  doc["solver"]["samples"] = 5;
  doc["study"] = Json::parse(R"({"epsilons": [0.1, 0.05], "ratio_threshold": 0.9})");
  auto r = cli({"study", "converge", "--config", write_config(dir, doc), "--out", (dir / "pass").string()});
  CHECK(r.code == kExitOk);
  CHECK(r.out.find("PASS") != std::string::npos);
  CHECK(fs::exists(dir / "pass" / "report.json"));
  doc["study"]["ratio_threshold"] = 1e-6;
  r = cli({"study", "converge", "--config", write_config(dir, doc), "--out", (dir / "fail").string()});
  CHECK(r.code == kExitCriteria);
  CHECK(r.out.find("FAIL") != std::string::npos);
}

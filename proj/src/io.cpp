#include "resavg/io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include "json_util.hpp"

namespace resavg {

using namespace detail;

std::uint64_t fnv1a64(std::string_view bytes) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  return h;
}

std::string hash_hex(std::string_view bytes) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(fnv1a64(bytes)));
  return buf;
}

std::string content_hash(const Json& doc) { return hash_hex(doc.dump()); }

std::string format_double(double x) { return Json(x).dump(); }

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw ConfigError("cannot write '" + path + "'");
  out << content;
  if (!out) throw ConfigError("write to '" + path + "' failed");
}

Json geometry_to_json(const TorusGeometry& geometry) {
  Json lengths = Json::array();
  for (int i = 0; i < geometry.dim; ++i) lengths.push_back(geometry.lengths[i]);
  return Json{{"dim", geometry.dim}, {"lengths", lengths}, {"grid", geometry.grid}};
}

TorusGeometry geometry_from_json(const Json& doc, const std::string& where) {
  check_keys(doc, {"dim", "lengths", "grid"}, where);
  TorusGeometry g;
  read(doc, "dim", where, g.dim);
  if (g.dim != 1 && g.dim != 2) throw ConfigError("'" + where + ".dim' must be 1 or 2");
  g.lengths = {kTwoPi, kTwoPi};
  if (const Json* v = find(doc, "lengths")) {
    const auto lengths = as_number_list(*v, where + ".lengths");
    if (static_cast<int>(lengths.size()) != g.dim) {
      throw ConfigError("'" + where + ".lengths' must have " + std::to_string(g.dim) + " entries");
    }
    for (int i = 0; i < g.dim; ++i) g.lengths[i] = lengths[i];
  }
  read(doc, "grid", where, g.grid);
  try {
    g.validate();
  } catch (const Error& e) {
    throw ConfigError("'" + where + "': " + e.what());
  }
  return g;
}

Json potential_to_json(const Potential& potential) {
  Json out = Json::array();
  for (const auto& term : potential.terms) {
    out.push_back(Json{{"m", {term.m[0], term.m[1]}}, {"re", term.coeff.real()}, {"im", term.coeff.imag()}});
  }
  return out;
}

Potential potential_from_json(const Json& doc, const std::string& where) {
  if (!doc.is_array()) throw ConfigError("'" + where + "' must be an array of {m, re, im}");
  Potential p;
  for (std::size_t i = 0; i < doc.size(); ++i) {
    const std::string at = where + "[" + std::to_string(i) + "]";
    check_keys(doc[i], {"m", "re", "im"}, at);
    PotentialTerm term;
    const Json* m = find(doc[i], "m");
    if (m == nullptr || !m->is_array() || m->empty() || m->size() > 2) {
      throw ConfigError("'" + at + ".m' must be an array of 1 or 2 integers");
    }
    for (std::size_t a = 0; a < m->size(); ++a) term.m[a] = static_cast<int>(as_integer((*m)[a], at + ".m"));
    double re = 0.0, im = 0.0;
    read(doc[i], "re", at, re);
    read(doc[i], "im", at, im);
    term.coeff = Complex(re, im);
    p.terms.push_back(term);
  }
  return p;
}

namespace {

Json frame_body(const SpectralFrame& frame) {
  Json psi = Json::array();
  for (Eigen::Index k = 0; k < frame.psi().rows(); ++k) psi.push_back(from_rvec(frame.psi().row(k).transpose()));
  return Json{{"geometry", geometry_to_json(frame.geometry())},
              {"potential", potential_to_json(frame.potential())},
              {"cutoff", frame.cutoff()},
              {"modes", frame.modes()},
              {"ordering", "constant; then |m|^2 ascending, lexicographic half-lattice tie-break; cos before sin"},
              {"lambda", from_rvec(frame.lambda())},
              {"psi", psi}};
}

}  // namespace

std::string frame_hash(const SpectralFrame& frame) { return content_hash(frame_body(frame)); }

Json frame_to_json(const SpectralFrame& frame) {
  Json doc = frame_body(frame);
  doc["hash"] = content_hash(doc);
  return doc;
}

SpectralFrame frame_from_json(const Json& doc) {
  check_keys(doc, {"geometry", "potential", "cutoff", "modes", "ordering", "lambda", "psi", "hash"}, "frame");
  for (const char* key : {"geometry", "cutoff", "lambda", "psi", "hash"}) {
    if (find(doc, key) == nullptr) throw ConfigError(std::string("frame file lacks '") + key + "'");
  }
  Json body = doc;
  body.erase("hash");
  const std::string stored = as_string(doc["hash"], "frame.hash");
  if (content_hash(body) != stored) {
    throw ValidationError("frame file hash mismatch: stored " + stored + ", content " + content_hash(body));
  }
  const TorusGeometry geometry = geometry_from_json(doc["geometry"], "frame.geometry");
  const Potential potential =
      find(doc, "potential") ? potential_from_json(doc["potential"], "frame.potential") : Potential{};
  const int cutoff = static_cast<int>(as_integer(doc["cutoff"], "frame.cutoff"));
  const RVec lambda = to_rvec(as_number_list(doc["lambda"], "frame.lambda"));
  const Json& rows = doc["psi"];
  if (!rows.is_array() || static_cast<Eigen::Index>(rows.size()) != lambda.size()) {
    throw ConfigError("'frame.psi' must have one row per eigenvalue");
  }
  RMat psi;
  for (std::size_t k = 0; k < rows.size(); ++k) {
    const auto row = as_number_list(rows[k], "frame.psi");
    if (k == 0) psi = RMat::Zero(lambda.size(), static_cast<Eigen::Index>(row.size()));
    if (static_cast<Eigen::Index>(row.size()) != psi.cols()) throw ConfigError("'frame.psi' rows differ in length");
    for (std::size_t l = 0; l < row.size(); ++l) psi(k, l) = row[l];
  }
  return SpectralFrame(geometry, potential, cutoff, lambda, psi);
}

std::string spectrum_summary(const SpectralFrame& frame, double eta) {
  std::ostringstream out;
  const auto clusters = eigenvalue_clusters(frame.lambda(), eta);
  out << "modes " << frame.modes() << ", plane waves " << frame.plane_waves() << ", cutoff " << frame.cutoff()
      << "\n";
  out << "multiplicities:";
  for (std::size_t c = 0; c < clusters.size(); ++c) out << (c ? "," : " ") << clusters[c].size();
  out << "\n";
  for (const auto& c : clusters) {
    out << "  lambda " << format_double(frame.lambda()[c.front()]) << "  x" << c.size() << "  modes " << c.front();
    if (c.size() > 1) out << ".." << c.back();
    out << "\n";
  }
  return out.str();
}

Json resonance_table_to_json(const ResonanceTable& table) {
  Json clusters = Json::array();
  for (const auto& c : table.clusters) clusters.push_back(c);
  Json resonances = Json::array();
  for (const auto& r : table.resonances) resonances.push_back(Json{{"target", r.target}, {"tuples", r.tuples}});
  return Json{{"lambda", from_rvec(table.lambda)},
              {"eta_res", table.eta_res},
              {"mode", table.mode == ArithmeticMode::exact_integer ? "exact_integer" : "tolerance"},
              {"integer_scale", table.integer_scale},
              {"pattern", table.pattern},
              {"gamma_min", table.gamma_min},
              {"tuple_count", table.tuple_count()},
              {"clusters", clusters},
              {"resonances", resonances}};
}

Json trajectory_header(const Trajectory& t, const Json& config, const std::string& frame_hash_value) {
  Json header{{"type", "header"},
              {"system", t.meta.system},
              {"scheme", t.meta.scheme},
              {"stochastic", t.meta.stochastic},
              {"epsilon", t.meta.epsilon},
              {"seed", t.meta.seed},
              {"steps", t.meta.steps},
              {"step", t.meta.step},
              {"representation", t.representation == Representation::interaction ? "interaction" : "physical"},
              {"frame_hash", frame_hash_value},
              {kNoiseConventionKey, kNoiseConvention},
              {"config", config}};
  if (t.disparity) header["disparity"] = from_rvec(*t.disparity);
  return header;
}

std::string trajectory_to_jsonl(const Trajectory& t, const Json& header) {
  std::string out = header.dump() + "\n";
  for (std::size_t j = 0; j < t.size(); ++j) {
    const CVec& a = t.states[j];
    out += Json{{"tau", t.tau[j]},
                {"re", from_rvec(a.real())},
                {"im", from_rvec(a.imag())},
                {"actions", from_rvec(t.actions[j])}}
               .dump();
    out += "\n";
  }
  return out;
}

std::string ensemble_to_csv(const EnsembleSummary& s) {
  std::string out = "tau,k,mean_I,var_I,stderr_I\n";
  for (std::size_t j = 0; j < s.tau.size(); ++j) {
    for (Eigen::Index k = 0; k < s.mean.cols(); ++k) {
      out += format_double(s.tau[j]) + "," + std::to_string(k) + "," + format_double(s.mean(j, k)) + "," +
             format_double(s.var(j, k)) + "," + format_double(s.stderr_(j, k)) + "\n";
    }
  }
  return out;
}

Json observable_to_json(const Observable& f) {
  Json out = Json::array();
  for (const auto& term : f.terms) {
    Json v = Json::array(), vbar = Json::array();
    for (const auto& [mode, power] : term.v_powers) v.push_back({mode, power});
    for (const auto& [mode, power] : term.vbar_powers) vbar.push_back({mode, power});
    out.push_back(Json{{"coeff", {term.coeff.real(), term.coeff.imag()}}, {"v", v}, {"vbar", vbar}});
  }
  return out;
}

Observable observable_from_json(const Json& doc) {
  if (!doc.is_array()) throw ConfigError("observable must be an array of monomial terms");
  Observable f;
  for (std::size_t i = 0; i < doc.size(); ++i) {
    const std::string at = "observable[" + std::to_string(i) + "]";
    check_keys(doc[i], {"coeff", "v", "vbar"}, at);
    ObservableTerm term;
    if (const Json* c = find(doc[i], "coeff")) {
      const auto parts = as_number_list(*c, at + ".coeff");
      if (parts.size() != 2) throw ConfigError("'" + at + ".coeff' must be [re, im]");
      term.coeff = Complex(parts[0], parts[1]);
    }
    auto powers = [&](const char* key, std::vector<std::pair<int, int>>& dst) {
      const Json* list = find(doc[i], key);
      if (list == nullptr) return;
      if (!list->is_array()) throw ConfigError("'" + at + "." + key + "' must be an array of [mode, power]");
      for (const auto& entry : *list) {
        if (!entry.is_array() || entry.size() != 2) {
          throw ConfigError("'" + at + "." + key + "' entries must be [mode, power]");
        }
        const auto mode = as_integer(entry[0], at + "." + key);
        const auto power = as_integer(entry[1], at + "." + key);
        if (mode < 0 || power < 0) throw ConfigError("'" + at + "." + key + "' entries must be non-negative");
        dst.emplace_back(static_cast<int>(mode), static_cast<int>(power));
      }
    };
    powers("v", term.v_powers);
    powers("vbar", term.vbar_powers);
    f.terms.push_back(term);
  }
  return f;
}

}  // namespace resavg

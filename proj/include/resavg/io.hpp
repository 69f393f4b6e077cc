#pragma once

#include <cstdint>
#include <string>
#include <string_view>

#include "resavg/config.hpp"
#include "resavg/ensemble.hpp"
#include "resavg/observable.hpp"
#include "resavg/resonance.hpp"

namespace resavg {

/// 64-bit FNV-1a.
std::uint64_t fnv1a64(std::string_view bytes);
/// 16 lowercase hex digits of fnv1a64.
std::string hash_hex(std::string_view bytes);
/// Hash of the compact serialisation of `doc`.
std::string content_hash(const Json& doc);

std::string read_text_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& content);

Json geometry_to_json(const TorusGeometry& geometry);
TorusGeometry geometry_from_json(const Json& doc, const std::string& where = "geometry");
Json potential_to_json(const Potential& potential);
Potential potential_from_json(const Json& doc, const std::string& where = "potential");

/// {geometry, potential, cutoff, modes, ordering, lambda, psi, hash}.
Json frame_to_json(const SpectralFrame& frame);
/// Hash over everything in frame_to_json except the hash field itself.
std::string frame_hash(const SpectralFrame& frame);
/// Rebuilds a frame from its export; refuses documents whose stored hash
/// does not match their content.
SpectralFrame frame_from_json(const Json& doc);
/// Eigenvalues grouped by cluster with multiplicities, one line per cluster.
std::string spectrum_summary(const SpectralFrame& frame, double eta = kFrameDegeneracyTol);

/// {lambda, eta_res, mode, pattern, gamma_min, clusters, resonances: [{target, tuples}]}.
Json resonance_table_to_json(const ResonanceTable& table);

inline constexpr const char* kNoiseConventionKey = "noise_convention";

/// Header record {config, frame_hash, seed, scheme, noise_convention, ...}.
Json trajectory_header(const Trajectory& trajectory, const Json& config, const std::string& frame_hash);
/// Header line followed by one {tau, re, im, actions} record per sample.
std::string trajectory_to_jsonl(const Trajectory& trajectory, const Json& header);

/// Columns tau, k, mean_I, var_I, stderr_I (mode index k is zero-based).
std::string ensemble_to_csv(const EnsembleSummary& summary);

/// [{coeff: [re, im], v: [[mode, power], ...], vbar: [[mode, power], ...]}, ...]
Json observable_to_json(const Observable& f);
Observable observable_from_json(const Json& doc);

/// Shortest round-trip decimal form, as used by the JSON writer.
std::string format_double(double x);

}  // namespace resavg

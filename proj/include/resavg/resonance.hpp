#pragma once

#include <array>
#include <optional>
#include <vector>

#include "resavg/frame.hpp"
#include "resavg/geometry.hpp"

namespace resavg {

inline constexpr double kDefaultEtaRes = 1e-8;

enum class ArithmeticMode { exact_integer, tolerance };

using Cluster = std::vector<int>;
/// Mode indices (zero-based) filling the slots of a monomial.
using IndexTuple = std::vector<int>;
/// Sign per monomial slot: +1 for v, -1 for conj(v).
using ConjugationPattern = std::vector<int>;

/// Partition of {0..M-1} into runs of equal eigenvalues. In tolerance mode
/// adjacent sorted entries are merged when |l_{k+1} - l_k| <= eta max(1, |l_{k+1}|);
/// exact mode merges only identical values.
std::vector<Cluster> eigenvalue_clusters(const RVec& lambda, double eta,
                                         ArithmeticMode mode = ArithmeticMode::tolerance);

/// All tuples (i_1..i_n) with |sum_r s_r lambda_{i_r} - lambda_target| <= eta * scale,
/// scale = max(1, max |lambda| over the indices involved). Sorted lexicographically.
std::vector<IndexTuple> enumerate_frequency_resonances(const RVec& lambda,
                                                       const ConjugationPattern& pattern,
                                                       int target, double eta);

/// Same relation with exact integer frequencies.
std::vector<IndexTuple> enumerate_integer_resonances(const std::vector<long long>& frequencies,
                                                     const ConjugationPattern& pattern, int target);

/// Minimal nonzero |sum_r s_r lambda_{i_r} - lambda_l| over all targets l and
/// tuples; combinations within tolerance count as resonant and are skipped.
/// Returns +infinity if every combination is resonant.
double minimal_frequency_gap(const RVec& lambda, const ConjugationPattern& pattern, double eta);

struct TargetResonances {
  int target = 0;
  std::vector<IndexTuple> tuples;
};

/// Resonant index tuples of one conjugation pattern for every target mode.
struct ResonanceTable {
  RVec lambda;
  double eta_res = kDefaultEtaRes;
  ArithmeticMode mode = ArithmeticMode::tolerance;
  /// Factor mapping lambda to exact integers in integer mode.
  double integer_scale = 1.0;
  std::vector<Cluster> clusters;
  ConjugationPattern pattern;
  std::vector<TargetResonances> resonances;
  double gamma_min = 0.0;

  const std::vector<IndexTuple>& tuples_for(int target) const;
  std::size_t tuple_count() const;
};

/// Scale s with s * lambda_k integer for every k, available on square tori
/// with zero potential (s = (L / 2 pi)^2).
std::optional<double> integer_frequency_scale(const SpectralFrame& frame);

ResonanceTable build_resonance_table(const RVec& lambda, ConjugationPattern pattern, double eta,
                                     std::optional<double> integer_scale = std::nullopt);
/// Uses the exact-integer path automatically when the frame admits it.
ResonanceTable build_resonance_table(const SpectralFrame& frame, ConjugationPattern pattern,
                                     double eta = kDefaultEtaRes);

using LatticeTriple = std::array<Lattice, 3>;

/// Lattice quadruplets for the cubic (+,-,+) nonlinearity on a torus with zero
/// potential: k1 - k2 + k3 = target and |k1|^2 - |k2|^2 + |k3|^2 = |target|^2,
/// all |k_i|_inf <= window. Exact mode needs a square torus.
std::vector<LatticeTriple> enumerate_cubic_resonances(const TorusGeometry& geometry, int window,
                                                      const Lattice& target,
                                                      ArithmeticMode mode = ArithmeticMode::exact_integer,
                                                      double eta = kDefaultEtaRes);

}  // namespace resavg

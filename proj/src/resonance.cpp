#include "resavg/resonance.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "resavg/error.hpp"

namespace resavg {

namespace {

void require_sorted(const RVec& lambda) {
  for (Eigen::Index k = 1; k < lambda.size(); ++k) {
    if (lambda[k] < lambda[k - 1]) throw ValidationError("frequency vector must be sorted ascending");
  }
}

void require_pattern(const ConjugationPattern& pattern) {
  if (pattern.empty()) throw ConfigError("conjugation pattern must have at least one slot");
  for (int s : pattern) {
    if (s != 1 && s != -1) throw ConfigError("conjugation pattern entries must be +1 or -1");
  }
}

// Walks every prefix (i_1..i_{n-1}) and hands (prefix, partial sum) to visit.
template <typename Visit>
void for_each_prefix(int m, std::size_t slots, IndexTuple& prefix, Visit&& visit) {
  if (prefix.size() + 1 == slots) {
    visit(prefix);
    return;
  }
  for (int i = 0; i < m; ++i) {
    prefix.push_back(i);
    for_each_prefix(m, slots, prefix, visit);
    prefix.pop_back();
  }
}

}  // namespace

std::vector<Cluster> eigenvalue_clusters(const RVec& lambda, double eta, ArithmeticMode mode) {
  require_sorted(lambda);
  if (!(eta >= 0.0)) throw ValidationError("eta_res must be >= 0");
  std::vector<Cluster> clusters;
  for (Eigen::Index k = 0; k < lambda.size(); ++k) {
    bool join = false;
    if (k > 0) {
      join = mode == ArithmeticMode::exact_integer
                 ? lambda[k] == lambda[k - 1]
                 : lambda[k] - lambda[k - 1] <= eta * std::max(1.0, std::abs(lambda[k]));
    }
    if (join) {
      clusters.back().push_back(static_cast<int>(k));
    } else {
      clusters.push_back({static_cast<int>(k)});
    }
  }
  return clusters;
}

std::vector<IndexTuple> enumerate_frequency_resonances(const RVec& lambda,
                                                       const ConjugationPattern& pattern,
                                                       int target, double eta) {
  require_pattern(pattern);
  require_sorted(lambda);
  const int m = static_cast<int>(lambda.size());
  if (target < 0 || target >= m) throw ConfigError("resonance target out of range");
  const double global_scale = std::max(1.0, lambda.size() ? lambda.cwiseAbs().maxCoeff() : 0.0);
  const double slack = eta * global_scale;
  const int last_sign = pattern.back();

  std::vector<IndexTuple> out;
  IndexTuple prefix;
  for_each_prefix(m, pattern.size(), prefix, [&](const IndexTuple& p) {
    double partial = 0.0;
    double scale = std::max(1.0, std::abs(lambda[target]));
    for (std::size_t r = 0; r < p.size(); ++r) {
      partial += pattern[r] * lambda[p[r]];
      scale = std::max(scale, std::abs(lambda[p[r]]));
    }
    // need last_sign * lambda_j = lambda_target - partial
    const double want = last_sign * (lambda[target] - partial);
    const double* begin = lambda.data();
    const double* end = begin + m;
    const double* lo = std::lower_bound(begin, end, want - slack);
    for (const double* it = lo; it != end && *it <= want + slack; ++it) {
      const int j = static_cast<int>(it - begin);
      const double s = std::max(scale, std::abs(lambda[j]));
      const double residual = partial + last_sign * lambda[j] - lambda[target];
      if (std::abs(residual) <= eta * s) {
        IndexTuple t = p;
        t.push_back(j);
        out.push_back(std::move(t));
      }
    }
  });
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<IndexTuple> enumerate_integer_resonances(const std::vector<long long>& frequencies,
                                                     const ConjugationPattern& pattern, int target) {
  require_pattern(pattern);
  const int m = static_cast<int>(frequencies.size());
  if (target < 0 || target >= m) throw ConfigError("resonance target out of range");
  if (!std::is_sorted(frequencies.begin(), frequencies.end())) {
    throw ValidationError("frequency vector must be sorted ascending");
  }
  const int last_sign = pattern.back();
  std::vector<IndexTuple> out;
  IndexTuple prefix;
  for_each_prefix(m, pattern.size(), prefix, [&](const IndexTuple& p) {
    long long partial = 0;
    for (std::size_t r = 0; r < p.size(); ++r) partial += pattern[r] * frequencies[p[r]];
    const long long want = last_sign * (frequencies[target] - partial);
    auto range = std::equal_range(frequencies.begin(), frequencies.end(), want);
    for (auto it = range.first; it != range.second; ++it) {
      IndexTuple t = p;
      t.push_back(static_cast<int>(it - frequencies.begin()));
      out.push_back(std::move(t));
    }
  });
  std::sort(out.begin(), out.end());
  return out;
}

double minimal_frequency_gap(const RVec& lambda, const ConjugationPattern& pattern, double eta) {
  require_pattern(pattern);
  require_sorted(lambda);
  const int m = static_cast<int>(lambda.size());
  double best = std::numeric_limits<double>::infinity();
  const int last_sign = pattern.back();
  const double* begin = lambda.data();
  const double* end = begin + m;
  for (int target = 0; target < m; ++target) {
    IndexTuple prefix;
    for_each_prefix(m, pattern.size(), prefix, [&](const IndexTuple& p) {
      double partial = 0.0;
      double scale = std::max(1.0, std::abs(lambda[target]));
      for (std::size_t r = 0; r < p.size(); ++r) {
        partial += pattern[r] * lambda[p[r]];
        scale = std::max(scale, std::abs(lambda[p[r]]));
      }
      const double want = last_sign * (lambda[target] - partial);
      const double* pos = std::lower_bound(begin, end, want);
      // scan outwards until one non-resonant neighbour on each side is found
      for (const double* it = pos; it != end; ++it) {
        const double gap = std::abs(*it - want);
        if (gap > eta * std::max(scale, std::abs(*it))) {
          best = std::min(best, gap);
          break;
        }
      }
      for (const double* it = pos; it != begin;) {
        --it;
        const double gap = std::abs(*it - want);
        if (gap > eta * std::max(scale, std::abs(*it))) {
          best = std::min(best, gap);
          break;
        }
      }
    });
  }
  return best;
}

const std::vector<IndexTuple>& ResonanceTable::tuples_for(int target) const {
  for (const auto& r : resonances) {
    if (r.target == target) return r.tuples;
  }
  throw ConfigError("resonance table has no entry for target " + std::to_string(target));
}

std::size_t ResonanceTable::tuple_count() const {
  std::size_t n = 0;
  for (const auto& r : resonances) n += r.tuples.size();
  return n;
}

std::optional<double> integer_frequency_scale(const SpectralFrame& frame) {
  const auto& g = frame.geometry();
  if (!g.is_square() || !frame.potential().is_zero()) return std::nullopt;
  const double scale = (g.lengths[0] / kTwoPi) * (g.lengths[0] / kTwoPi);
  for (Eigen::Index k = 0; k < frame.lambda().size(); ++k) {
    const double x = frame.lambda()[k] * scale;
    if (std::abs(x - std::round(x)) > 1e-9 * std::max(1.0, std::abs(x))) return std::nullopt;
  }
  return scale;
}

ResonanceTable build_resonance_table(const RVec& lambda, ConjugationPattern pattern, double eta,
                                     std::optional<double> integer_scale) {
  require_pattern(pattern);
  ResonanceTable table;
  table.lambda = lambda;
  table.eta_res = eta;
  table.pattern = std::move(pattern);
  const int m = static_cast<int>(lambda.size());
  if (integer_scale) {
    table.mode = ArithmeticMode::exact_integer;
    table.integer_scale = *integer_scale;
    std::vector<long long> freq(m);
    RVec exact(m);
    for (int k = 0; k < m; ++k) {
      const double x = lambda[k] * *integer_scale;
      if (std::abs(x - std::round(x)) > 1e-9 * std::max(1.0, std::abs(x))) {
        throw UnsupportedError("integer resonance mode requires integer scaled frequencies");
      }
      freq[k] = std::llround(x);
      exact[k] = static_cast<double>(freq[k]);
    }
    table.clusters = eigenvalue_clusters(exact, 0.0, ArithmeticMode::exact_integer);
    for (int k = 0; k < m; ++k) {
      table.resonances.push_back({k, enumerate_integer_resonances(freq, table.pattern, k)});
    }
    // integer gaps are >= 1 unit; eta only guards the float representation
    table.gamma_min = minimal_frequency_gap(exact, table.pattern, 0.25 / std::max(1.0, exact.cwiseAbs().maxCoeff())) /
                      *integer_scale;
  } else {
    table.mode = ArithmeticMode::tolerance;
    table.clusters = eigenvalue_clusters(lambda, eta, ArithmeticMode::tolerance);
    for (int k = 0; k < m; ++k) {
      table.resonances.push_back({k, enumerate_frequency_resonances(lambda, table.pattern, k, eta)});
    }
    table.gamma_min = minimal_frequency_gap(lambda, table.pattern, eta);
  }
  return table;
}

ResonanceTable build_resonance_table(const SpectralFrame& frame, ConjugationPattern pattern, double eta) {
  return build_resonance_table(frame.lambda(), std::move(pattern), eta, integer_frequency_scale(frame));
}

std::vector<LatticeTriple> enumerate_cubic_resonances(const TorusGeometry& geometry, int window,
                                                      const Lattice& target, ArithmeticMode mode,
                                                      double eta) {
  geometry.validate();
  if (window < 0) throw ConfigError("lattice window must be >= 0");
  if (mode == ArithmeticMode::exact_integer && !geometry.is_square()) {
    throw UnsupportedError(
        "exact lattice enumeration needs a square torus; use frequency-based enumeration");
  }
  const int d = geometry.dim;
  auto inside = [&](const Lattice& k) {
    for (int i = 0; i < d; ++i) {
      if (std::abs(k[i]) > window) return false;
    }
    return true;
  };
  if (!inside(target)) return {};
  std::vector<Lattice> points;
  const int w1 = d == 2 ? window : 0;
  for (int a = -window; a <= window; ++a) {
    for (int b = -w1; b <= w1; ++b) points.push_back({a, b});
  }
  auto norm2 = [](const Lattice& k) { return static_cast<long long>(k[0]) * k[0] + static_cast<long long>(k[1]) * k[1]; };

  std::vector<LatticeTriple> out;
  for (const auto& k1 : points) {
    for (const auto& k2 : points) {
      const Lattice k3{target[0] - k1[0] + k2[0], target[1] - k1[1] + k2[1]};
      if (!inside(k3)) continue;
      bool resonant;
      if (mode == ArithmeticMode::exact_integer) {
        resonant = norm2(k1) - norm2(k2) + norm2(k3) - norm2(target) == 0;
      } else {
        const double s1 = geometry.laplacian_symbol(k1);
        const double s2 = geometry.laplacian_symbol(k2);
        const double s3 = geometry.laplacian_symbol(k3);
        const double s0 = geometry.laplacian_symbol(target);
        const double scale = std::max({1.0, s0, s1, s2, s3});
        resonant = std::abs(s1 - s2 + s3 - s0) <= eta * scale;
      }
      if (resonant) out.push_back({k1, k2, k3});
    }
  }
  return out;
}

}  // namespace resavg

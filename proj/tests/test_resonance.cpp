#include <algorithm>
#include <set>
#include <tuple>
#include <vector>

#include "doctest.h"
#include "resavg/error.hpp"
#include "resavg/frame.hpp"
#include "resavg/resonance.hpp"

using namespace resavg;

namespace {

using Key = std::tuple<int, int, int, int, int, int>;

Key key_of(const LatticeTriple& t) {
  return {t[0][0], t[0][1], t[1][0], t[1][1], t[2][0], t[2][1]};
}

std::vector<Lattice> window_points(int dim, int w) {
  std::vector<Lattice> out;
  const int w1 = dim == 2 ? w : 0;
  for (int a = -w; a <= w; ++a) {
    for (int b = -w1; b <= w1; ++b) out.push_back({a, b});
  }
  return out;
}

long long n2(const Lattice& k) { return 1LL * k[0] * k[0] + 1LL * k[1] * k[1]; }

// every (k1, k2, k3) in the window, both conditions checked directly
std::set<Key> brute_force(int dim, int w, const Lattice& target) {
  std::set<Key> out;
  const auto pts = window_points(dim, w);
  for (const auto& k1 : pts) {
    for (const auto& k2 : pts) {
      for (const auto& k3 : pts) {
        const bool momentum = k1[0] - k2[0] + k3[0] == target[0] && k1[1] - k2[1] + k3[1] == target[1];
        if (momentum && n2(k1) - n2(k2) + n2(k3) == n2(target)) {
          out.insert(key_of({k1, k2, k3}));
        }
      }
    }
  }
  return out;
}

TorusGeometry torus(int dim, double l1 = kTwoPi) {
  TorusGeometry g;
  g.dim = dim;
  g.lengths = {kTwoPi, l1};
  g.grid = 16;
  return g;
}

std::set<Key> as_set(const std::vector<LatticeTriple>& v) {
  std::set<Key> out;
  for (const auto& t : v) out.insert(key_of(t));
  return out;
}

}  // namespace

TEST_CASE("lattice enumeration equals brute force") {
  for (const auto& [dim, w] : {std::pair{1, 4}, std::pair{2, 2}}) {
    for (const auto& target : window_points(dim, w)) {
      const auto found = enumerate_cubic_resonances(torus(dim), w, target);
      const auto set = as_set(found);
      CHECK(set.size() == found.size());
      CHECK(set == brute_force(dim, w, target));
      const auto tol = enumerate_cubic_resonances(torus(dim), w, target, ArithmeticMode::tolerance);
      CHECK(as_set(tol) == set);
    }
  }
}

TEST_CASE("one-dimensional cubic resonances are trivial") {
  for (const auto& target : window_points(1, 4)) {
    for (const auto& t : enumerate_cubic_resonances(torus(1), 4, target)) {
      CHECK((t[1] == t[0] || t[1] == t[2]));
    }
  }
}

TEST_CASE("two-dimensional tori carry nontrivial resonances") {
  const auto found = as_set(enumerate_cubic_resonances(torus(2), 2, {1, 1}));
  CHECK(found.count(Key{1, 0, 0, 0, 0, 1}) == 1);
  // (1,1) - (1,-1) + (0,0) vanishes in momentum only; energy 2 - 2 + 0 != 0
  CHECK(found.count(Key{1, 1, 1, -1, 0, 0}) == 0);
  const auto rect = enumerate_cubic_resonances(torus(2, 2.0 * kTwoPi), 2, {1, 1}, ArithmeticMode::tolerance);
  CHECK(!rect.empty());
  CHECK_THROWS_AS(enumerate_cubic_resonances(torus(2, 2.0 * kTwoPi), 2, {1, 1}), UnsupportedError);
}

TEST_CASE("frequency resonances: integer and tolerance paths agree") {
  const std::vector<long long> freq{0, 1, 1, 4, 4, 9, 9, 16, 16};
  RVec lambda(9);
  for (int k = 0; k < 9; ++k) lambda[k] = static_cast<double>(freq[k]);
  const ConjugationPattern pattern{1, -1, 1};
  for (int target = 0; target < 9; ++target) {
    const auto exact = enumerate_integer_resonances(freq, pattern, target);
    const auto tol = enumerate_frequency_resonances(lambda, pattern, target, 1e-8);
    CHECK(exact == tol);
    std::vector<IndexTuple> brute;
    for (int i = 0; i < 9; ++i)
      for (int j = 0; j < 9; ++j)
        for (int k = 0; k < 9; ++k)
          if (freq[i] - freq[j] + freq[k] == freq[target]) brute.push_back({i, j, k});
    CHECK(exact == brute);
  }
}

TEST_CASE("tolerance decides near-resonances") {
  RVec lambda(3);
  lambda << 1.0, 2.0, 3.0 + 1e-10;
  const auto loose = enumerate_frequency_resonances(lambda, {1, 1}, 2, 1e-8);
  const auto tight = enumerate_frequency_resonances(lambda, {1, 1}, 2, 1e-12);
  CHECK(std::find(loose.begin(), loose.end(), IndexTuple{0, 1}) != loose.end());
  CHECK(std::find(tight.begin(), tight.end(), IndexTuple{0, 1}) == tight.end());
}

TEST_CASE("eigenvalue clusters") {
  RVec lambda(6);
  lambda << 0.0, 1.0, 1.0 + 1e-12, 4.0, 4.0, 9.0;
  const auto tol = eigenvalue_clusters(lambda, 1e-8);
  REQUIRE(tol.size() == 4);
  CHECK(tol[1] == Cluster{1, 2});
  CHECK(tol[2] == Cluster{3, 4});
  CHECK(eigenvalue_clusters(lambda, 1e-8, ArithmeticMode::exact_integer).size() == 5);
}

TEST_CASE("resonance table of the free circle") {
  TorusGeometry g = torus(1);
  g.grid = 32;
  const auto frame = build_frame(g, Potential{}, 9);
  REQUIRE(integer_frequency_scale(frame).has_value());
  const auto table = build_resonance_table(frame, {1, -1, 1});
  CHECK(table.mode == ArithmeticMode::exact_integer);
  CHECK(table.gamma_min == doctest::Approx(1.0));
  CHECK(table.resonances.size() == 9);
  const auto tol = build_resonance_table(frame.lambda(), {1, -1, 1}, 1e-8);
  CHECK(tol.tuple_count() == table.tuple_count());
  for (int t = 0; t < 9; ++t) CHECK(tol.tuples_for(t) == table.tuples_for(t));
  CHECK(minimal_frequency_gap(frame.lambda(), {1, -1, 1}, 1e-8) == doctest::Approx(1.0));
}

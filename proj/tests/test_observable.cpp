#include <cmath>

#include "doctest.h"
#include "resavg/observable.hpp"
#include "resavg/state.hpp"

using namespace resavg;

namespace {

RVec free_lambda() {
  RVec w(9);
  w << 0, 1, 1, 4, 4, 9, 9, 16, 16;
  return w;
}

CVec probe() {
  CVec v(9);
  for (int k = 0; k < 9; ++k) v[k] = Complex(0.3 + 0.1 * k, -0.2 * k + 0.5);
  return v;
}

}  // namespace

TEST_CASE("coordinate weighted by its own frequency is exact") {
  const RVec w = free_lambda();
  const CVec v = probe();
  for (double t : {3.3, 17.0, 101.5}) {
    for (int l : {0, 3}) {
      const Complex avg = scalar_average(Observable::coordinate(l), w, l, v, t, 2001);
      CHECK(std::abs(avg - v[l]) < 1e-13);
    }
  }
  // degenerate partner enters the limit too
  const Complex limit = resonant_average(Observable::coordinate(4), w, 3, v);
  CHECK(std::abs(limit - v[4]) < 1e-15);
}

TEST_CASE("oscillating coordinate obeys the closed-form bound") {
  const RVec w = free_lambda();
  const CVec v = probe();
  const auto f = Observable::coordinate(5);
  CHECK(std::abs(resonant_average(f, w, 1, v)) == 0.0);
  for (double t : {10.0, 20.0, 40.0}) {
    const double err = std::abs(scalar_average(f, w, 1, v, t, 8001));
    const double bound = oscillation_bound(f, w, 1, v, t);
    CHECK(bound == doctest::Approx(2.0 * std::abs(v[5]) / (t * 8.0)));
    CHECK(err <= bound + 1e-10);
  }
}

TEST_CASE("actions are invariant and resonant monomials average to themselves") {
  const RVec w = free_lambda();
  const CVec v = probe();
  const auto action = Observable::action(3);
  CHECK(std::abs(action(v) - 0.5 * std::norm(v[3])) < 1e-15);
  CHECK(std::abs(resonant_average(action, w, std::nullopt, v) - action(v)) < 1e-15);
  const auto quartic = Observable::monomial({{1, 1}, {3, 1}}, {{2, 1}, {4, 1}});
  CHECK(quartic.terms[0].rotation_frequency(w) == doctest::Approx(0.0));
  CHECK(std::abs(scalar_average(quartic, w, std::nullopt, v, 13.7, 101) - quartic(v)) < 1e-14);
}

TEST_CASE("limit average is equivariant under the linear flow") {
  const RVec w = free_lambda();
  const CVec v = probe();
  const Observable f{{ObservableTerm{1.0, {{0, 1}, {1, 1}}, {{2, 1}}},
                      ObservableTerm{2.0, {{1, 1}, {3, 1}}, {{4, 1}}},
                      ObservableTerm{2.0, {{3, 1}}, {{0, 1}}},
                      ObservableTerm{0.5, {{5, 1}}, {}}}};
  CHECK(std::abs(resonant_average(f, w, 1, v)) > 0.0);
  for (double t : {0.4, 2.2}) {
    const CVec shifted = rotate(v, w, t);
    CHECK(std::abs(resonant_average(f, w, 1, shifted) - std::exp(kI * t) * resonant_average(f, w, 1, v)) < 1e-14);
    CHECK(std::abs(resonant_average(f, w, std::nullopt, shifted) - resonant_average(f, w, std::nullopt, v)) < 1e-14);
  }
}

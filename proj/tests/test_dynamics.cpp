#include <cmath>
#include <vector>

#include "doctest.h"
#include "resavg/dynamics.hpp"
#include "resavg/error.hpp"
#include "resavg/state.hpp"

using namespace resavg;

namespace {

TorusGeometry line(int grid = 32) {
  TorusGeometry g;
  g.grid = grid;
  return g;
}

CVec sample(int m, double scale, int salt = 0) {
  CVec v(m);
  for (int k = 0; k < m; ++k) {
    v[k] = scale * Complex(std::sin(1.3 * k + 0.7 + salt), std::cos(2.1 * k * k + 0.2 + salt)) / (1.0 + k);
  }
  return v;
}

// normalised real Fourier mode k of the free circle, in the frame ordering
double circle_mode(int k, double x) {
  if (k == 0) return 1.0 / std::sqrt(kTwoPi);
  const int j = (k + 1) / 2;
  return (k % 2 == 1 ? std::cos(j * x) : std::sin(j * x)) / std::sqrt(kPi);
}

// i |u|^2 u projected on the first m modes with a 512-point rule (exact for these degrees)
CVec cubic_by_quadrature(const CVec& v) {
  const int n = 512;
  const int m = static_cast<int>(v.size());
  CVec out = CVec::Zero(m);
  for (int j = 0; j < n; ++j) {
    const double x = kTwoPi * j / n;
    Complex u = 0.0;
    for (int k = 0; k < m; ++k) u += v[k] * circle_mode(k, x);
    const Complex g = kI * std::norm(u) * u;
    for (int k = 0; k < m; ++k) out[k] += (kTwoPi / n) * g * circle_mode(k, x);
  }
  return out;
}

double l2_inner_real(const CVec& a, const CVec& b) { return a.dot(b).real(); }

}  // namespace

TEST_CASE("cubic field matches direct quadrature") {
  const auto frame = build_frame(line(), Potential{}, 9);
  const auto spec = NonlinearitySpec::cubic_focusing_nls();
  const CVec v = sample(9, 0.8);
  CHECK((eval_P(v, spec, frame) - cubic_by_quadrature(v)).cwiseAbs().maxCoeff() < 1e-12);
  CHECK((eval_Y(v, 0.0, spec, frame) - eval_P(v, spec, frame)).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("rotated field definition") {
  const auto frame = build_frame(line(), Potential{}, 9);
  const auto spec = NonlinearitySpec::cubic_focusing_nls();
  const CVec a = sample(9, 1.0, 3);
  const double t = 0.731;
  const CVec expect = rotate(eval_P(rotate(a, frame.lambda(), -t), spec, frame), frame.lambda(), t);
  CHECK((eval_Y(a, t, spec, frame) - expect).cwiseAbs().maxCoeff() < 1e-15);
}

TEST_CASE("analytic and numerical resonant averages agree") {
  const auto frame = build_frame(line(), Potential{}, 9);
  const auto spec = NonlinearitySpec::cubic_focusing_nls();
  const double t_avg = default_averaging_window(frame, spec);
  CHECK(t_avg == doctest::Approx(50.0 * kTwoPi));
  const int n = default_quadrature_nodes(frame, spec, t_avg);
  for (int salt = 0; salt < 3; ++salt) {
    CVec v = sample(9, 1.0, salt);
    v *= 2.0 / sobolev_norm(v, 2.0, frame.lambda());
    const auto num = effective_drift_numerical(v, spec, frame, t_avg, n, 1.6);
    REQUIRE(num.residual.has_value());
    CHECK(*num.residual <= 1e-6);
    CHECK(sobolev_norm(num.drift - effective_drift_analytic(v, spec, frame), 1.6, frame.lambda()) <= 1e-6);
  }
}

TEST_CASE("numerical average converges on a potential frame") {
  Potential v2;
  v2.terms = {{{1, 0}, {0.3, 0.0}}, {{-1, 0}, {0.3, 0.0}}};
  const auto frame = build_frame(line(), v2, 5, 4);
  const auto spec = NonlinearitySpec::cubic_focusing_nls();
  const auto analytic = EffectiveField::analytic(frame, spec);
  const CVec v = sample(5, 0.5);
  double prev = 1e300;
  for (double t : {200.0, 800.0, 3200.0}) {
    const int n = default_quadrature_nodes(frame, spec, t);
    const double err = sobolev_norm(time_average(analytic.field(), v, t, n) - analytic(v), 1.0, frame.lambda());
    CHECK(err < prev);
    prev = err;
  }
  CHECK(prev < 1e-3);
}

TEST_CASE("resonant average commutes with the linear flow") {
  const auto frame = build_frame(line(), Potential{}, 9);
  const auto r = EffectiveField::analytic(frame, NonlinearitySpec::cubic_focusing_nls());
  for (int i = 0; i < 5; ++i) {
    const CVec v = sample(9, 1.0, i);
    const double t = 0.37 + 1.9 * i;
    const CVec lhs = r(rotate(v, frame.lambda(), t));
    const CVec rhs = rotate(r(v), frame.lambda(), t);
    CHECK(sobolev_norm(lhs - rhs, 1.6, frame.lambda()) <= 1e-10);
  }
}

TEST_CASE("cubic field and its average conserve the l2 norm") {
  const auto frame = build_frame(line(), Potential{}, 9);
  const auto spec = NonlinearitySpec::cubic_focusing_nls();
  const auto r = EffectiveField::analytic(frame, spec);
  const CVec v = sample(9, 1.5);
  CHECK(std::abs(l2_inner_real(v, eval_P(v, spec, frame))) < 1e-12);
  CHECK(std::abs(l2_inner_real(v, r(v))) < 1e-12);
}

TEST_CASE("diagonal fields are their own average") {
  const auto frame = build_frame(line(), Potential{}, 9);
  CVec gamma(9);
  for (int k = 0; k < 9; ++k) gamma[k] = Complex(-0.1 * k, 0.3 + k);
  const auto spec = NonlinearitySpec::diagonal_field(gamma, 0.2);
  const auto r = EffectiveField::analytic(frame, spec);
  const CVec v = sample(9, 1.0);
  CHECK((r(v) - eval_P(v, spec, frame)).cwiseAbs().maxCoeff() < 1e-15);
  CHECK((eval_Y(v, 2.5, spec, frame) - eval_P(v, spec, frame)).cwiseAbs().maxCoeff() < 1e-14);
}

TEST_CASE("first-derivative monomial maps cosine to sine") {
  const auto frame = build_frame(line(), Potential{}, 9);
  const auto spec = NonlinearitySpec::polynomial_field({Monomial{1.0, {Factor{false, 0}}}}, 0.1);
  const CVec v = sample(9, 1.0);
  const CVec p = eval_P(v, spec, frame);
  CHECK(std::abs(p[0]) < 1e-13);
  for (int j = 1; j <= 4; ++j) {
    CHECK(std::abs(p[2 * j - 1] - double(j) * v[2 * j]) < 1e-12);
    CHECK(std::abs(p[2 * j] + double(j) * v[2 * j - 1]) < 1e-12);
  }
  const auto r = EffectiveField::analytic(frame, spec);
  CHECK((r(v) - p).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("configuration errors") {
  const auto frame = build_frame(line(16), Potential{}, 9);
  CHECK_THROWS_AS(PerturbationField(frame, NonlinearitySpec::cubic_focusing_nls()), ConfigError);
  const auto ok = build_frame(line(), Potential{}, 9);
  const auto smooth = NonlinearitySpec::smoothed(1.0, 0.5, 1.0, 1.5, 0.1);
  CHECK_THROWS_AS(EffectiveField::analytic(ok, smooth), UnsupportedError);
  CHECK_NOTHROW(eval_P(sample(9, 1.0), smooth, ok));
  CHECK_THROWS_AS(PerturbationField(ok, NonlinearitySpec::polynomial_field({Monomial{1.0, {Factor{false, 0}}}}, 0.0)),
                  ConfigError);
  CHECK_THROWS_AS(PerturbationField(ok, NonlinearitySpec::diagonal_field(CVec::Zero(3))), ConfigError);
  CHECK_THROWS_AS(EffectiveField::numerical(ok, NonlinearitySpec::cubic_focusing_nls(), 0.0, 10), ConfigError);
}

TEST_CASE("smoothed power is C2 at one and flat at zero") {
  for (double p : {0.5, 1.0, 1.5, 2.0, 3.0}) {
    const double h = 1e-5;
    CHECK(smoothed_power(1.0, p) == doctest::Approx(1.0));
    CHECK(smoothed_power(0.0, p) == 0.0);
    const double below = (smoothed_power(1.0, p) - smoothed_power(1.0 - h, p)) / h;
    CHECK(below == doctest::Approx(p).epsilon(1e-3));
    const double second = (smoothed_power(1.0 - 2 * h, p) - 2 * smoothed_power(1.0 - h, p) + smoothed_power(1.0, p)) / (h * h);
    CHECK(second == doctest::Approx(p * (p - 1.0)).epsilon(1e-2).scale(1.0));
    CHECK(std::abs(smoothed_power(1e-3, p)) < 1e-7);
    CHECK(smoothed_power(2.0, p) == doctest::Approx(std::pow(2.0, p)));
  }
}

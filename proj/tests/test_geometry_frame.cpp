#include <algorithm>
#include <cmath>
#include <complex>
#include <vector>

#include <Eigen/Eigenvalues>

#include "doctest.h"
#include "resavg/error.hpp"
#include "resavg/frame.hpp"

using namespace resavg;

namespace {

TorusGeometry line(int grid = 32) {
  TorusGeometry g;
  g.dim = 1;
  g.grid = grid;
  return g;
}

TorusGeometry plane(double l0, double l1, int grid = 16) {
  TorusGeometry g;
  g.dim = 2;
  g.lengths = {l0, l1};
  g.grid = grid;
  return g;
}

// sorted symbols |2 pi m / L|^2 over the full window
std::vector<double> window_symbols(const TorusGeometry& g, int k) {
  std::vector<double> out;
  const int w1 = g.dim == 2 ? k : 0;
  for (int a = -k; a <= k; ++a) {
    for (int b = -w1; b <= w1; ++b) {
      const double x = kTwoPi * a / g.lengths[0];
      const double y = g.dim == 2 ? kTwoPi * b / g.lengths[1] : 0.0;
      out.push_back(x * x + y * y);
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

// -d^2 + 2 cos x in the complex exponential basis e^{i n x}, |n| <= k
Eigen::VectorXd mathieu_eigenvalues(int k) {
  const int n = 2 * k + 1;
  Eigen::MatrixXd h = Eigen::MatrixXd::Zero(n, n);
  for (int i = 0; i < n; ++i) {
    const int m = i - k;
    h(i, i) = m * m;
    if (i + 1 < n) h(i, i + 1) = h(i + 1, i) = 1.0;
  }
  return Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(h).eigenvalues();
}

Potential two_cos() {
  Potential v;
  v.terms = {{{1, 0}, {1.0, 0.0}}, {{-1, 0}, {1.0, 0.0}}};
  return v;
}

}  // namespace

TEST_CASE("plane-wave basis ordering and count") {
  const auto g = line();
  const auto basis = plane_wave_basis(g, 3);
  REQUIRE(basis.size() == 7);
  CHECK(plane_wave_count(1, 3) == 7);
  CHECK(plane_wave_count(2, 2) == 25);
  CHECK(basis[0].kind == WaveKind::constant);
  for (int j = 1; j <= 3; ++j) {
    CHECK(basis[2 * j - 1].m[0] == j);
    CHECK(basis[2 * j - 1].kind == WaveKind::cosine);
    CHECK(basis[2 * j].kind == WaveKind::sine);
    CHECK(basis[2 * j].symbol == doctest::Approx(j * j));
  }
  const auto b2 = plane_wave_basis(plane(kTwoPi, kTwoPi), 2);
  REQUIRE(b2.size() == 25);
  for (std::size_t i = 1; i < b2.size(); ++i) CHECK(b2[i - 1].symbol <= b2[i].symbol + 1e-12);
}

TEST_CASE("basis functions are orthonormal on the grid") {
  const auto g = plane(kTwoPi, 2.0 * kTwoPi, 16);
  const auto basis = plane_wave_basis(g, 3);
  const RMat z = basis_on_grid(g, basis);
  const RMat gram = g.cell_weight() * z.transpose() * z;
  CHECK((gram - RMat::Identity(gram.rows(), gram.cols())).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("free spectrum on the circle") {
  const auto frame = build_frame(line(64), Potential{}, 17);
  REQUIRE(frame.modes() == 17);
  CHECK(frame.lambda()[0] == doctest::Approx(0.0));
  for (int j = 1; j <= 8; ++j) {
    CHECK(std::abs(frame.lambda()[2 * j - 1] - j * j) < 1e-10);
    CHECK(std::abs(frame.lambda()[2 * j] - j * j) < 1e-10);
  }
  CHECK((frame.psi() - RMat::Identity(17, 17)).cwiseAbs().maxCoeff() < 1e-12);
  CHECK(orthonormality_defect(frame) < 1e-12);
  CHECK(eigen_residual(frame) < 1e-10);
}

TEST_CASE("free spectrum on square and rectangular tori") {
  for (const auto& g : {plane(kTwoPi, kTwoPi), plane(kTwoPi, 2.0 * kTwoPi)}) {
    const auto frame = build_frame(g, Potential{}, 25, 2);
    const auto expect = window_symbols(g, 2);
    REQUIRE(frame.modes() == 25);
    for (int k = 0; k < 25; ++k) CHECK(std::abs(frame.lambda()[k] - expect[k]) < 1e-10);
  }
}

TEST_CASE("fewer modes than plane waves") {
  const auto frame = build_frame(line(), Potential{}, 8);
  CHECK(frame.modes() == 8);
  CHECK(frame.plane_waves() == 9);
  CHECK(frame.psi().rows() == 8);
  CHECK(frame.psi().cols() == 9);
  CHECK(minimal_cutoff(1, 8) == 4);
  CHECK(minimal_cutoff(2, 10) == 2);
}

TEST_CASE("Mathieu operator against an exponential-basis Galerkin solve") {
  const int modes = 9;
  const auto frame20 = build_frame(line(64), two_cos(), modes, 20);
  const auto frame40 = build_frame(line(128), two_cos(), modes, 40);
  const auto ref20 = mathieu_eigenvalues(20);
  const auto ref40 = mathieu_eigenvalues(40);
  for (int k = 0; k < modes; ++k) {
    CHECK(std::abs(frame20.lambda()[k] - ref20[k]) < 1e-10);
    CHECK(std::abs(frame40.lambda()[k] - ref40[k]) < 1e-10);
    CHECK(std::abs(frame20.lambda()[k] - frame40.lambda()[k]) < 1e-10);
  }
  CHECK(orthonormality_defect(frame20) < 1e-12);
  CHECK(eigen_residual(frame20) < 1e-9);
}

TEST_CASE("frame construction is deterministic") {
  const auto a = build_frame(line(64), two_cos(), 9, 12);
  const auto b = build_frame(line(64), two_cos(), 9, 12);
  CHECK(a.lambda() == b.lambda());
  CHECK(a.psi() == b.psi());
}

TEST_CASE("coefficient round trip") {
  const auto frame = build_frame(line(64), two_cos(), 9, 12);
  CVec v(9);
  for (int k = 0; k < 9; ++k) v[k] = Complex(std::cos(1.0 + k), std::sin(0.3 * k * k));
  const CVec u = from_coefficients(v, frame);
  CHECK((to_coefficients(u, frame) - v).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("invalid inputs") {
  CHECK_THROWS_AS(build_frame(line(), Potential{}, 0), ConfigError);
  CHECK_THROWS_AS(build_frame(line(), Potential{}, 10, 2), ConfigError);
  TorusGeometry bad = line();
  bad.dim = 3;
  CHECK_THROWS_AS(build_frame(bad, Potential{}, 3), ConfigError);
  Potential complex_v;
  complex_v.terms = {{{1, 0}, {1.0, 0.0}}, {{-1, 0}, {0.5, 0.0}}};
  CHECK_THROWS_AS(build_frame(line(), complex_v, 5), ValidationError);
}

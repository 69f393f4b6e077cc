#include <cmath>

#include "doctest.h"
#include "resavg/diffusion.hpp"
#include "resavg/error.hpp"
#include "resavg/state.hpp"

using namespace resavg;

namespace {

SpectralFrame mathieu() {
  TorusGeometry g;
  g.grid = 32;
  Potential v;
  v.terms = {{{1, 0}, {0.7, 0.0}}, {{-1, 0}, {0.7, 0.0}}};
  return build_frame(g, v, 9, 6);
}

}  // namespace

TEST_CASE("norms and actions") {
  RVec lambda(3);
  lambda << 0.0, 1.0, 4.0;
  CVec v(3);
  v << Complex(1, 0), Complex(0, 2), Complex(1, 1);
  CHECK(sobolev_norm(v, 2.0, lambda) == doctest::Approx(std::sqrt(1.0 + 2.0 * 4.0 + 17.0 * 2.0)));
  const RVec i = actions(v);
  CHECK(i[1] == doctest::Approx(2.0));
  RVec j = i;
  j[2] += 0.25;
  CHECK(action_distance(i, j, 1.0, lambda) == doctest::Approx(2.0 * 5.0 * 0.25));
  CHECK(sobolev_norm(rotate(v, lambda, 3.1), 2.0, lambda) == doctest::Approx(sobolev_norm(v, 2.0, lambda)));
  RVec theta(3);
  theta << 0.0, kPi, 0.5 * kPi;
  const CVec shifted = phase_shift(v, theta);
  CHECK(std::abs(shifted[1] - Complex(0, -2)) < 1e-15);
  CHECK(std::abs(shifted[2] - Complex(-1, 1)) < 1e-15);
}

TEST_CASE("principal square root of a 2x2 matrix") {
  RMat s(2, 2);
  s << 5.0, 2.0, 2.0, 3.0;
  const double det = std::sqrt(s.determinant());
  const RMat expect = (s + det * RMat::Identity(2, 2)) / std::sqrt(s.trace() + 2.0 * det);
  const RMat r = principal_sqrt_psd(s);
  CHECK((r - expect).cwiseAbs().maxCoeff() < 1e-14);
  RMat bad(2, 2);
  bad << 1.0, 2.0, 2.0, 1.0;
  CHECK_THROWS_AS(principal_sqrt_psd(bad), ValidationError);
  RMat nearly(2, 2);
  nearly << 1.0, 1.0, 1.0, 1.0 - 1e-15;
  CHECK_NOTHROW(principal_sqrt_psd(nearly));
}

TEST_CASE("effective diffusion is block diagonal on clusters") {
  const auto frame = mathieu();
  RVec b(frame.plane_waves());
  for (int l = 0; l < b.size(); ++l) b[l] = 1.0 / (1.0 + l);
  const auto clusters = eigenvalue_clusters(frame.lambda(), 1e-8);
  const auto d = build_diffusion(frame, b, clusters);
  std::vector<int> owner(frame.modes());
  for (std::size_t c = 0; c < clusters.size(); ++c) {
    for (int k : clusters[c]) owner[k] = static_cast<int>(c);
  }
  const RMat full = frame.psi() * b.cwiseAbs2().asDiagonal() * frame.psi().transpose();
  for (int k = 0; k < frame.modes(); ++k) {
    for (int r = 0; r < frame.modes(); ++r) {
      if (owner[k] == owner[r]) {
        CHECK(std::abs(d.A(k, r) - full(k, r)) < 1e-14);
      } else {
        CHECK(d.A(k, r) == 0.0);
      }
    }
  }
  CHECK((d.B * d.B - d.A).cwiseAbs().maxCoeff() < 1e-13);
  CHECK((d.B - d.B.transpose()).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("free frame diffusion is the amplitude square") {
  TorusGeometry g;
  const auto frame = build_frame(g, Potential{}, 8);
  RVec b(frame.plane_waves());
  for (int l = 0; l < b.size(); ++l) b[l] = 0.5 + l;
  const auto d = build_diffusion(frame, b, eigenvalue_clusters(frame.lambda(), 1e-8));
  for (int k = 0; k < 8; ++k) CHECK(d.B(k, k) == doctest::Approx(b[k]));
  CHECK(noise_smoothness(frame, b, 1.0) ==
        doctest::Approx(2.0 * (0.0 + 1.0 * (1.5 * 1.5 + 2.5 * 2.5) + 16.0 * (3.5 * 3.5 + 4.5 * 4.5) +
                               81.0 * (5.5 * 5.5 + 6.5 * 6.5) + 256.0 * (7.5 * 7.5 + 8.5 * 8.5))));
}

#include "resavg/state.hpp"

#include <cmath>
#include <string>

#include "resavg/error.hpp"

namespace resavg {

namespace {

void require_size(Eigen::Index got, Eigen::Index want, const char* what) {
  if (got != want) {
    throw ValidationError(std::string(what) + ": length mismatch (" + std::to_string(got) +
                          " vs " + std::to_string(want) + ")");
  }
}

}  // namespace

double sobolev_norm(const CVec& v, double s, const RVec& lambda) {
  require_size(v.size(), lambda.size(), "sobolev_norm");
  if (!(s >= 0.0)) throw ValidationError("sobolev_norm: s must be >= 0");
  double sum = 0.0;
  for (Eigen::Index k = 0; k < v.size(); ++k) {
    sum += (std::pow(std::abs(lambda[k]), s) + 1.0) * std::norm(v[k]);
  }
  if (std::isnan(sum)) throw ValidationError("sobolev_norm: NaN in coefficients");
  return std::sqrt(sum);
}

RVec actions(const CVec& v) { return 0.5 * v.cwiseAbs2(); }

double action_distance(const RVec& I, const RVec& J, double s, const RVec& lambda) {
  require_size(I.size(), lambda.size(), "action_distance");
  require_size(J.size(), lambda.size(), "action_distance");
  double sum = 0.0;
  for (Eigen::Index k = 0; k < I.size(); ++k) {
    sum += 2.0 * (std::pow(std::abs(lambda[k]), s) + 1.0) * std::abs(I[k] - J[k]);
  }
  return sum;
}

CVec phase_shift(const CVec& v, const RVec& theta) {
  require_size(theta.size(), v.size(), "phase_shift");
  CVec out(v.size());
  for (Eigen::Index k = 0; k < v.size(); ++k) out[k] = std::polar(1.0, theta[k]) * v[k];
  return out;
}

CVec rotate(const CVec& v, const RVec& frequencies, double t) {
  require_size(frequencies.size(), v.size(), "rotate");
  CVec out(v.size());
  for (Eigen::Index k = 0; k < v.size(); ++k) out[k] = std::polar(1.0, frequencies[k] * t) * v[k];
  return out;
}

}  // namespace resavg

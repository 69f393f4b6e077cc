#pragma once

#include "resavg/frame.hpp"
#include "resavg/types.hpp"

namespace resavg {

enum class Representation { physical, interaction };

/// Coefficient vector in the eigenbasis, tagged with its representation
/// (physical v or interaction a) and the slow time it belongs to.
struct CoefficientState {
  CVec values;
  Representation representation = Representation::physical;
  double tau = 0.0;
};

/// |v|_s^2 = sum_k (|lambda_k|^s + 1) |v_k|^2, returned as |v|_s.
double sobolev_norm(const CVec& v, double s, const RVec& lambda);
inline double sobolev_norm(const CVec& v, double s, const SpectralFrame& frame) {
  return sobolev_norm(v, s, frame.lambda());
}

/// I_k = |v_k|^2 / 2.
RVec actions(const CVec& v);

/// Weighted l1 distance sum_k 2 (|lambda_k|^s + 1) |I_k - J_k|.
double action_distance(const RVec& I, const RVec& J, double s, const RVec& lambda);

/// (Phi_theta v)_k = exp(i theta_k) v_k.
CVec phase_shift(const CVec& v, const RVec& theta);

/// Phi_{t W} v, i.e. phase_shift with theta = t W; phases computed directly
/// from t so long runs do not accumulate rotation error.
CVec rotate(const CVec& v, const RVec& frequencies, double t);

}  // namespace resavg

#pragma once

#include <vector>

#include "resavg/frame.hpp"
#include "resavg/resonance.hpp"

namespace resavg {

/// Effective diffusion of the averaged SDE.
///
/// `A(k, r) = sum_l b_l^2 Psi(k, l) Psi(r, l)` when modes k and r share an
/// eigenvalue cluster and zero otherwise; `B` is its principal (symmetric PSD)
/// square root, computed block by block.
struct DiffusionSpec {
  RVec amplitudes;  // b_l, one per plane wave
  RMat A;
  RMat B;
};

/// Principal square root of a symmetric PSD matrix. Negative eigenvalues of
/// magnitude <= 1e-12 * max(1, ||S||) are clamped to zero; larger ones raise
/// ValidationError.
RMat principal_sqrt_psd(const RMat& s);

/// Amplitudes may be given per plane wave (length M_pw) or for the first M
/// plane waves only; missing entries are zero.
DiffusionSpec build_diffusion(const SpectralFrame& frame, const RVec& amplitudes,
                              const std::vector<Cluster>& clusters);

/// 2 sum_l lambda_l^{2s} b_l^2 using the plane-wave symbols.
double noise_smoothness(const SpectralFrame& frame, const RVec& amplitudes, double s);

}  // namespace resavg

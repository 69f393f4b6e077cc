#include "resavg/diffusion.hpp"

#include <cmath>
#include <string>

#include <Eigen/Eigenvalues>

#include "resavg/error.hpp"

namespace resavg {

RMat principal_sqrt_psd(const RMat& s) {
  if (s.rows() != s.cols()) throw ValidationError("principal_sqrt_psd: matrix not square");
  if (s.size() == 0) return s;
  const RMat sym = 0.5 * (s + s.transpose());
  Eigen::SelfAdjointEigenSolver<RMat> solver(sym);
  if (solver.info() != Eigen::Success) throw NumericError("principal_sqrt_psd: eigensolver failed");
  RVec ev = solver.eigenvalues();
  const double clamp = 1e-12 * std::max(1.0, ev.cwiseAbs().maxCoeff());
  for (Eigen::Index i = 0; i < ev.size(); ++i) {
    if (ev[i] < -clamp) throw ValidationError("principal_sqrt_psd: matrix is not positive semidefinite");
    ev[i] = std::sqrt(std::max(ev[i], 0.0));
  }
  const RMat& q = solver.eigenvectors();
  RMat root = q * ev.asDiagonal() * q.transpose();
  return 0.5 * (root + root.transpose());
}

namespace {

RVec padded_amplitudes(const SpectralFrame& frame, const RVec& b) {
  const int n_pw = frame.plane_waves();
  if (b.size() > n_pw) {
    throw ValidationError("noise amplitudes: got " + std::to_string(b.size()) +
                          " entries for " + std::to_string(n_pw) + " plane waves");
  }
  RVec out = RVec::Zero(n_pw);
  out.head(b.size()) = b;
  for (Eigen::Index l = 0; l < out.size(); ++l) {
    if (!(out[l] >= 0.0) || !std::isfinite(out[l])) {
      throw ValidationError("noise amplitudes must be finite and >= 0");
    }
  }
  return out;
}

}  // namespace

DiffusionSpec build_diffusion(const SpectralFrame& frame, const RVec& amplitudes,
                              const std::vector<Cluster>& clusters) {
  const int m = frame.modes();
  std::vector<int> owner(m, -1);
  for (std::size_t c = 0; c < clusters.size(); ++c) {
    for (int k : clusters[c]) {
      if (k < 0 || k >= m || owner[k] != -1) {
        throw ValidationError("diffusion: cluster partition inconsistent with frame");
      }
      owner[k] = static_cast<int>(c);
    }
  }
  for (int k = 0; k < m; ++k) {
    if (owner[k] == -1) throw ValidationError("diffusion: cluster partition does not cover every mode");
  }

  DiffusionSpec spec;
  spec.amplitudes = padded_amplitudes(frame, amplitudes);
  const RMat weighted = frame.psi() * spec.amplitudes.cwiseAbs2().asDiagonal();
  const RMat full = weighted * frame.psi().transpose();
  spec.A = RMat::Zero(m, m);
  spec.B = RMat::Zero(m, m);
  for (const auto& cluster : clusters) {
    const auto n = static_cast<Eigen::Index>(cluster.size());
    RMat block(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
      for (Eigen::Index j = 0; j < n; ++j) block(i, j) = full(cluster[i], cluster[j]);
    }
    block = 0.5 * (block + block.transpose());
    const RMat root = principal_sqrt_psd(block);
    for (Eigen::Index i = 0; i < n; ++i) {
      for (Eigen::Index j = 0; j < n; ++j) {
        spec.A(cluster[i], cluster[j]) = block(i, j);
        spec.B(cluster[i], cluster[j]) = root(i, j);
      }
    }
  }
  return spec;
}

double noise_smoothness(const SpectralFrame& frame, const RVec& amplitudes, double s) {
  const RVec b = padded_amplitudes(frame, amplitudes);
  double sum = 0.0;
  for (Eigen::Index l = 0; l < b.size(); ++l) {
    sum += std::pow(frame.basis()[l].symbol, 2.0 * s) * b[l] * b[l];
  }
  return 2.0 * sum;
}

}  // namespace resavg

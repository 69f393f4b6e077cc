#pragma once

#include <optional>
#include <vector>

#include "resavg/geometry.hpp"

namespace resavg {

/// Relative tolerance used to detect degenerate eigenvalues while building a frame.
inline constexpr double kFrameDegeneracyTol = 1e-9;

/// Truncated eigenbasis of A_V = -Laplacian + V on a rectangular torus.
///
/// Row k of `psi()` holds the coefficients of the eigenfunction zeta_k in the
/// real plane-wave basis, so psi() is an M x M_pw matrix with orthonormal rows.
/// Eigenvalues are sorted ascending. Immutable once constructed; grid tables
/// used by the pseudospectral evaluators are cached at construction.
class SpectralFrame {
 public:
  SpectralFrame(TorusGeometry geometry, Potential potential, int cutoff, RVec lambda, RMat psi);

  const TorusGeometry& geometry() const { return geometry_; }
  const Potential& potential() const { return potential_; }
  int cutoff() const { return cutoff_; }
  int modes() const { return static_cast<int>(lambda_.size()); }
  int plane_waves() const { return static_cast<int>(basis_.size()); }
  const std::vector<PlaneWave>& basis() const { return basis_; }
  const RVec& lambda() const { return lambda_; }
  const RMat& psi() const { return psi_; }
  double lambda_max() const { return lambda_.size() ? lambda_.cwiseAbs().maxCoeff() : 0.0; }

  /// Eigenfunctions on the grid, grid_points x M.
  const RMat& zeta_grid() const { return zeta_grid_; }
  /// Gradient component `axis` of the eigenfunctions on the grid.
  const RMat& zeta_derivative_grid(int axis) const { return dzeta_grid_.at(axis); }
  /// V(x_j) on the grid.
  const RVec& potential_grid() const { return potential_grid_; }

 private:
  TorusGeometry geometry_;
  Potential potential_;
  int cutoff_;
  std::vector<PlaneWave> basis_;
  RVec lambda_;
  RMat psi_;
  RMat zeta_grid_;
  std::vector<RMat> dzeta_grid_;
  RVec potential_grid_;
};

/// Galerkin matrix of A_V in the real plane-wave basis of the given cutoff.
RMat galerkin_operator(const TorusGeometry& geometry, const Potential& potential, int cutoff);

/// Smallest window cutoff K with (2K+1)^d >= modes.
int minimal_cutoff(int dim, int modes);

/// Assembles A_V on the plane-wave window, diagonalises it and keeps the M
/// lowest eigenpairs. Degenerate clusters are given a deterministic basis by
/// Gram-Schmidt against the plane-wave ordering, and each eigenvector is
/// sign-fixed so its first largest-magnitude coefficient is positive.
SpectralFrame build_frame(const TorusGeometry& geometry, const Potential& potential, int modes,
                          std::optional<int> cutoff = std::nullopt);

/// Coefficients v_k = <u, zeta_k> of a grid function (trapezoid quadrature).
CVec to_coefficients(const CVec& u_grid, const SpectralFrame& frame);
/// Grid values of u = sum_k v_k zeta_k.
CVec from_coefficients(const CVec& v, const SpectralFrame& frame);

/// max |Psi Psi^T - I|.
double orthonormality_defect(const SpectralFrame& frame);
/// max_k |A_V zeta_k - lambda_k zeta_k| inside the truncated plane-wave space.
double eigen_residual(const SpectralFrame& frame);

}  // namespace resavg

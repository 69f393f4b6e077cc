#include "resavg/frame.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include <Eigen/Eigenvalues>

#include "resavg/error.hpp"

namespace resavg {

SpectralFrame::SpectralFrame(TorusGeometry geometry, Potential potential, int cutoff, RVec lambda,
                             RMat psi)
    : geometry_(geometry),
      potential_(std::move(potential)),
      cutoff_(cutoff),
      lambda_(std::move(lambda)),
      psi_(std::move(psi)) {
  geometry_.validate();
  basis_ = plane_wave_basis(geometry_, cutoff_);
  if (psi_.cols() != static_cast<Eigen::Index>(basis_.size()) || psi_.rows() != lambda_.size()) {
    throw ValidationError("frame: psi must be M x M_pw with M_pw = " +
                          std::to_string(basis_.size()));
  }
  if (2 * cutoff_ + 1 > geometry_.grid) {
    throw ConfigError("frame: plane-wave window with cutoff " + std::to_string(cutoff_) +
                      " is not representable on a grid of " + std::to_string(geometry_.grid));
  }
  for (Eigen::Index k = 1; k < lambda_.size(); ++k) {
    if (lambda_[k] < lambda_[k - 1]) throw ValidationError("frame: eigenvalues not sorted");
  }
  const RMat e = basis_on_grid(geometry_, basis_);
  zeta_grid_ = e * psi_.transpose();
  for (int axis = 0; axis < geometry_.dim; ++axis) {
    dzeta_grid_.push_back(basis_derivative_on_grid(geometry_, basis_, axis) * psi_.transpose());
  }
  potential_grid_ = potential_.on_grid(geometry_);
}

int minimal_cutoff(int dim, int modes) {
  int k = 0;
  while (plane_wave_count(dim, k) < modes) ++k;
  return k;
}

RMat galerkin_operator(const TorusGeometry& geometry, const Potential& potential, int cutoff) {
  const auto basis = plane_wave_basis(geometry, cutoff);
  const auto n = static_cast<Eigen::Index>(basis.size());
  RMat h = RMat::Zero(n, n);
  for (Eigen::Index a = 0; a < n; ++a) h(a, a) = basis[a].symbol;
  if (!potential.is_zero()) {
    const RMat e = basis_on_grid(geometry, basis);
    const RVec v = potential.on_grid(geometry);
    // exact when grid > 2 cutoff + window (trapezoid on trigonometric polynomials)
    const RMat ve = v.asDiagonal() * e;
    RMat pot = geometry.cell_weight() * (e.transpose() * ve);
    h += 0.5 * (pot + pot.transpose());
  }
  return h;
}

namespace {

// Orthonormal basis of span(q) built by projecting plane-wave unit vectors in
// order and orthogonalising; reproduces the plane waves themselves when q is
// spanned by them.
RMat canonical_cluster_basis(const RMat& q) {
  const Eigen::Index n = q.rows();
  const Eigen::Index c = q.cols();
  RMat out(n, c);
  Eigen::Index found = 0;
  for (Eigen::Index j = 0; j < n && found < c; ++j) {
    RVec p = q * q.row(j).transpose();  // projection of e_j
    for (Eigen::Index r = 0; r < found; ++r) p -= out.col(r).dot(p) * out.col(r);
    for (Eigen::Index r = 0; r < found; ++r) p -= out.col(r).dot(p) * out.col(r);
    const double norm = p.norm();
    if (norm > 1e-6) out.col(found++) = p / norm;
  }
  if (found < c) throw NumericError("frame: degenerate cluster basis construction failed");
  return out;
}

void fix_sign(Eigen::Ref<RVec> vec) {
  const double peak = vec.cwiseAbs().maxCoeff();
  for (Eigen::Index i = 0; i < vec.size(); ++i) {
    if (std::abs(vec[i]) >= peak * (1.0 - 1e-9)) {
      if (vec[i] < 0) vec = -vec;
      return;
    }
  }
}

}  // namespace

SpectralFrame build_frame(const TorusGeometry& geometry, const Potential& potential, int modes,
                          std::optional<int> cutoff) {
  geometry.validate();
  if (modes < 1) throw ConfigError("frame.modes must be >= 1");
  potential.validate(geometry);
  const int k_cut = cutoff.value_or(std::max(minimal_cutoff(geometry.dim, modes), potential.window()));
  if (k_cut < potential.window()) {
    throw ConfigError("potential window exceeds the truncation window");
  }
  const int n_pw = plane_wave_count(geometry.dim, k_cut);
  if (modes > n_pw) {
    throw ConfigError("frame.modes = " + std::to_string(modes) + " exceeds the " +
                      std::to_string(n_pw) + " plane waves of cutoff " + std::to_string(k_cut));
  }
  if (2 * k_cut + potential.window() + 1 > geometry.grid) {
    throw ConfigError("frame.modes too large for grid: need grid > 2*cutoff + potential window = " +
                      std::to_string(2 * k_cut + potential.window()));
  }

  const RMat h = galerkin_operator(geometry, potential, k_cut);
  Eigen::SelfAdjointEigenSolver<RMat> solver(h);
  if (solver.info() != Eigen::Success) throw NumericError("frame: eigendecomposition failed");
  const RVec evals = solver.eigenvalues();
  RMat evecs = solver.eigenvectors();  // columns

  for (Eigen::Index start = 0; start < evals.size();) {
    Eigen::Index end = start + 1;
    while (end < evals.size() &&
           evals[end] - evals[end - 1] <= kFrameDegeneracyTol * std::max(1.0, std::abs(evals[end]))) {
      ++end;
    }
    if (end - start > 1) {
      evecs.middleCols(start, end - start) = canonical_cluster_basis(evecs.middleCols(start, end - start));
    }
    start = end;
  }
  for (Eigen::Index c = 0; c < evecs.cols(); ++c) fix_sign(evecs.col(c));

  RVec lambda = evals.head(modes);
  RMat psi = evecs.leftCols(modes).transpose();
  return SpectralFrame(geometry, potential, k_cut, std::move(lambda), std::move(psi));
}

CVec to_coefficients(const CVec& u_grid, const SpectralFrame& frame) {
  if (u_grid.size() != frame.geometry().grid_points()) {
    throw ValidationError("to_coefficients: grid function has " + std::to_string(u_grid.size()) +
                          " points, frame grid has " +
                          std::to_string(frame.geometry().grid_points()));
  }
  return frame.geometry().cell_weight() * (frame.zeta_grid().transpose() * u_grid);
}

CVec from_coefficients(const CVec& v, const SpectralFrame& frame) {
  if (v.size() != frame.modes()) {
    throw ValidationError("from_coefficients: expected " + std::to_string(frame.modes()) +
                          " coefficients, got " + std::to_string(v.size()));
  }
  return frame.zeta_grid() * v;
}

double orthonormality_defect(const SpectralFrame& frame) {
  const RMat g = frame.psi() * frame.psi().transpose();
  return (g - RMat::Identity(g.rows(), g.cols())).cwiseAbs().maxCoeff();
}

double eigen_residual(const SpectralFrame& frame) {
  const RMat h = galerkin_operator(frame.geometry(), frame.potential(), frame.cutoff());
  double worst = 0.0;
  for (int k = 0; k < frame.modes(); ++k) {
    const RVec z = frame.psi().row(k).transpose();
    worst = std::max(worst, (h * z - frame.lambda()[k] * z).norm());
  }
  return worst;
}

}  // namespace resavg

#pragma once

#include <array>
#include <vector>

#include "resavg/types.hpp"

namespace resavg {

/// Integer lattice index; only the first `dim` entries are meaningful.
using Lattice = std::array<int, 2>;

/// Rectangular torus R/(L_1 Z) x ... x R/(L_d Z), d in {1, 2}, with a uniform
/// collocation grid of `grid` points per axis (x_j = j L_i / grid).
struct TorusGeometry {
  int dim = 1;
  std::array<double, 2> lengths{kTwoPi, kTwoPi};
  int grid = 32;

  void validate() const;
  double volume() const;
  int grid_points() const;
  /// Trapezoid weight of one grid cell.
  double cell_weight() const { return volume() / grid_points(); }
  /// Coordinates of flat grid point `j` (axis 0 varies slowest).
  std::array<double, 2> point(int j) const;
  /// Physical wave vector 2 pi m_i / L_i.
  std::array<double, 2> wave_vector(const Lattice& m) const;
  /// |2 pi m / L|^2, the Laplacian symbol of lattice index m.
  double laplacian_symbol(const Lattice& m) const;
  bool is_square() const;
};

/// One plane-wave coefficient of V(x) = sum_m coeff(m) exp(i 2 pi m.x / L).
struct PotentialTerm {
  Lattice m{0, 0};
  Complex coeff{0.0, 0.0};
};

/// Real potential given by a finite set of plane-wave coefficients. Real-ness
/// requires coeff(-m) = conj(coeff(m)); `validate` enforces it.
struct Potential {
  std::vector<PotentialTerm> terms;

  bool is_zero() const;
  /// Largest |m_i| over the nonzero terms.
  int window() const;
  void validate(const TorusGeometry& geometry) const;
  /// V on the collocation grid. Throws ValidationError if V is not real.
  RVec on_grid(const TorusGeometry& geometry) const;
};

enum class WaveKind { constant, cosine, sine };

/// Real trigonometric basis function, L2-normalised on the torus.
struct PlaneWave {
  Lattice m{0, 0};
  WaveKind kind = WaveKind::constant;
  double symbol = 0.0;  // |2 pi m / L|^2
};

/// Real basis {1, cos(k.x), sin(k.x)} over all lattice points with
/// |m_i| <= cutoff. Ordering: constant, then increasing |m|^2 with
/// lexicographic tie-break on the half-lattice representative (first nonzero
/// component positive), cosine before sine.
std::vector<PlaneWave> plane_wave_basis(const TorusGeometry& geometry, int cutoff);

/// Number of real basis functions in the window, (2 cutoff + 1)^d.
int plane_wave_count(int dim, int cutoff);

/// Values of every basis function on the grid: grid_points x basis.size().
RMat basis_on_grid(const TorusGeometry& geometry, const std::vector<PlaneWave>& basis);

/// Partial derivative along `axis` of every basis function on the grid.
RMat basis_derivative_on_grid(const TorusGeometry& geometry,
                              const std::vector<PlaneWave>& basis, int axis);

}  // namespace resavg

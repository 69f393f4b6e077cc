#include "resavg/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <string>

#include "resavg/error.hpp"

namespace resavg {

void TorusGeometry::validate() const {
  if (dim != 1 && dim != 2) {
    throw ConfigError("geometry.dim must be 1 or 2, got " + std::to_string(dim));
  }
  for (int i = 0; i < dim; ++i) {
    if (!(lengths[i] > 0.0) || !std::isfinite(lengths[i])) {
      throw ConfigError("geometry.lengths must be positive and finite");
    }
  }
  if (grid < 4 || grid % 2 != 0) {
    throw ConfigError("geometry.grid must be an even integer >= 4, got " +
                      std::to_string(grid));
  }
}

double TorusGeometry::volume() const {
  double v = 1.0;
  for (int i = 0; i < dim; ++i) v *= lengths[i];
  return v;
}

int TorusGeometry::grid_points() const { return dim == 1 ? grid : grid * grid; }

std::array<double, 2> TorusGeometry::point(int j) const {
  if (dim == 1) return {j * lengths[0] / grid, 0.0};
  const int i0 = j / grid;
  const int i1 = j % grid;
  return {i0 * lengths[0] / grid, i1 * lengths[1] / grid};
}

std::array<double, 2> TorusGeometry::wave_vector(const Lattice& m) const {
  std::array<double, 2> k{0.0, 0.0};
  for (int i = 0; i < dim; ++i) k[i] = kTwoPi * m[i] / lengths[i];
  return k;
}

double TorusGeometry::laplacian_symbol(const Lattice& m) const {
  const auto k = wave_vector(m);
  return k[0] * k[0] + k[1] * k[1];
}

bool TorusGeometry::is_square() const { return dim == 1 || lengths[0] == lengths[1]; }

bool Potential::is_zero() const {
  return std::all_of(terms.begin(), terms.end(),
                     [](const PotentialTerm& t) { return t.coeff == Complex{}; });
}

int Potential::window() const {
  int w = 0;
  for (const auto& t : terms) {
    if (t.coeff == Complex{}) continue;
    w = std::max({w, std::abs(t.m[0]), std::abs(t.m[1])});
  }
  return w;
}

void Potential::validate(const TorusGeometry& geometry) const {
  for (const auto& t : terms) {
    if (!std::isfinite(t.coeff.real()) || !std::isfinite(t.coeff.imag())) {
      throw ValidationError("potential coefficient is not finite");
    }
    if (geometry.dim == 1 && t.m[1] != 0) {
      throw ValidationError("potential index has a second component on a 1-torus");
    }
  }
  (void)on_grid(geometry);
}

RVec Potential::on_grid(const TorusGeometry& geometry) const {
  const int n = geometry.grid_points();
  CVec values = CVec::Zero(n);
  for (const auto& t : terms) {
    if (t.coeff == Complex{}) continue;
    const auto k = geometry.wave_vector(t.m);
    for (int j = 0; j < n; ++j) {
      const auto x = geometry.point(j);
      values[j] += t.coeff * std::polar(1.0, k[0] * x[0] + k[1] * x[1]);
    }
  }
  double vmax = 0.0;
  double imax = 0.0;
  for (int j = 0; j < n; ++j) {
    vmax = std::max(vmax, std::abs(values[j]));
    imax = std::max(imax, std::abs(values[j].imag()));
  }
  if (imax > 1e-12 * std::max(vmax, 1e-300) && imax > 0.0) {
    throw ValidationError("potential is not real: coefficients must satisfy V(-m) = conj(V(m))");
  }
  return values.real();
}

int plane_wave_count(int dim, int cutoff) {
  const int side = 2 * cutoff + 1;
  return dim == 1 ? side : side * side;
}

std::vector<PlaneWave> plane_wave_basis(const TorusGeometry& geometry, int cutoff) {
  std::vector<Lattice> half;
  if (geometry.dim == 1) {
    for (int m = 1; m <= cutoff; ++m) half.push_back({m, 0});
  } else {
    for (int m0 = -cutoff; m0 <= cutoff; ++m0) {
      for (int m1 = -cutoff; m1 <= cutoff; ++m1) {
        // half-lattice representative: first nonzero component positive
        if (m0 > 0 || (m0 == 0 && m1 > 0)) half.push_back({m0, m1});
      }
    }
  }
  std::sort(half.begin(), half.end(), [](const Lattice& a, const Lattice& b) {
    const int na = a[0] * a[0] + a[1] * a[1];
    const int nb = b[0] * b[0] + b[1] * b[1];
    if (na != nb) return na < nb;
    return a < b;
  });

  std::vector<PlaneWave> basis;
  basis.reserve(1 + 2 * half.size());
  basis.push_back({{0, 0}, WaveKind::constant, 0.0});
  for (const auto& m : half) {
    const double symbol = geometry.laplacian_symbol(m);
    basis.push_back({m, WaveKind::cosine, symbol});
    basis.push_back({m, WaveKind::sine, symbol});
  }
  return basis;
}

namespace {

double wave_phase(const TorusGeometry& geometry, const Lattice& m, int j) {
  const auto k = geometry.wave_vector(m);
  const auto x = geometry.point(j);
  return k[0] * x[0] + k[1] * x[1];
}

}  // namespace

RMat basis_on_grid(const TorusGeometry& geometry, const std::vector<PlaneWave>& basis) {
  const int n = geometry.grid_points();
  const double c0 = 1.0 / std::sqrt(geometry.volume());
  const double c1 = std::sqrt(2.0 / geometry.volume());
  RMat values(n, static_cast<Eigen::Index>(basis.size()));
  for (std::size_t b = 0; b < basis.size(); ++b) {
    const auto& w = basis[b];
    for (int j = 0; j < n; ++j) {
      switch (w.kind) {
        case WaveKind::constant: values(j, b) = c0; break;
        case WaveKind::cosine: values(j, b) = c1 * std::cos(wave_phase(geometry, w.m, j)); break;
        case WaveKind::sine: values(j, b) = c1 * std::sin(wave_phase(geometry, w.m, j)); break;
      }
    }
  }
  return values;
}

RMat basis_derivative_on_grid(const TorusGeometry& geometry,
                              const std::vector<PlaneWave>& basis, int axis) {
  if (axis < 0 || axis >= geometry.dim) throw ConfigError("derivative axis out of range");
  const int n = geometry.grid_points();
  const double c1 = std::sqrt(2.0 / geometry.volume());
  RMat values = RMat::Zero(n, static_cast<Eigen::Index>(basis.size()));
  for (std::size_t b = 0; b < basis.size(); ++b) {
    const auto& w = basis[b];
    if (w.kind == WaveKind::constant) continue;
    const double k = geometry.wave_vector(w.m)[axis];
    for (int j = 0; j < n; ++j) {
      const double phase = wave_phase(geometry, w.m, j);
      values(j, b) = w.kind == WaveKind::cosine ? -c1 * k * std::sin(phase)
                                                : c1 * k * std::cos(phase);
    }
  }
  return values;
}

}  // namespace resavg

#pragma once

#include <string>
#include <vector>

#include "resavg/types.hpp"

namespace resavg {

enum class NonlinearityKind {
  cubic_focusing,     // i |u|^2 u
  smoothed_monomial,  // -gamma_R f_p(|u|^2) u - i gamma_I f_q(|u|^2) u
  diagonal,           // P_k(v) = gamma_k v_k
  polynomial,         // finite sum of monomials in u, conj(u) and first derivatives
};

/// One factor of a monomial: u, conj(u), d_axis u or d_axis conj(u).
struct Factor {
  bool conjugate = false;
  int derivative_axis = -1;  // -1: no derivative
};

struct Monomial {
  Complex coeff{1.0, 0.0};
  std::vector<Factor> factors;

  /// +1 per plain factor, -1 per conjugated factor.
  std::vector<int> pattern() const;
  bool has_derivative() const;
};

/// Perturbation P(grad u, u) together with the dissipation mu of mu Laplacian u.
/// The mu V u term produced by splitting mu Laplacian = -mu A_V + mu V is part of
/// P, so the linear part of the coefficient equations is exactly -mu lambda_k.
struct NonlinearitySpec {
  NonlinearityKind kind = NonlinearityKind::cubic_focusing;
  double mu = 0.0;
  double gamma_r = 0.0;
  double gamma_i = 0.0;
  double p = 1.0;
  double q = 1.0;
  CVec gamma;                       // diagonal kind
  std::vector<Monomial> monomials;  // polynomial kind

  bool depends_on_gradient() const;
  /// True for kinds with an analytic resonant average (cubic, diagonal, polynomial).
  bool is_polynomial() const;
  /// Monomial expansion of cubic/polynomial kinds (empty for the others).
  std::vector<Monomial> polynomial_terms() const;
  /// Highest monomial degree (1 for diagonal, 3 for cubic).
  int degree() const;
  void validate(int dim) const;

  static NonlinearitySpec cubic_focusing_nls(double mu = 0.0);
  static NonlinearitySpec diagonal_field(CVec gamma, double mu = 0.0);
  static NonlinearitySpec polynomial_field(std::vector<Monomial> monomials, double mu = 0.0);
  static NonlinearitySpec smoothed(double gamma_r, double gamma_i, double p, double q, double mu);
};

/// f_p(x): x^p for x >= 1 and, on [0, 1], the quintic a x^3 + b x^4 + c x^5
/// matching value, first and second derivative at 1 (C^2 match, vanishing to
/// second order at 0).
double smoothed_power(double x, double p);

std::string to_string(NonlinearityKind kind);
NonlinearityKind nonlinearity_kind_from_string(const std::string& name);

}  // namespace resavg

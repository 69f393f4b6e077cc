#include "resavg/nonlinearity.hpp"

#include <algorithm>
#include <cmath>

#include "resavg/error.hpp"

namespace resavg {

std::vector<int> Monomial::pattern() const {
  std::vector<int> out;
  out.reserve(factors.size());
  for (const auto& f : factors) out.push_back(f.conjugate ? -1 : 1);
  return out;
}

bool Monomial::has_derivative() const {
  return std::any_of(factors.begin(), factors.end(),
                     [](const Factor& f) { return f.derivative_axis >= 0; });
}

bool NonlinearitySpec::depends_on_gradient() const {
  if (kind != NonlinearityKind::polynomial) return false;
  return std::any_of(monomials.begin(), monomials.end(),
                     [](const Monomial& m) { return m.has_derivative(); });
}

bool NonlinearitySpec::is_polynomial() const { return kind != NonlinearityKind::smoothed_monomial; }

std::vector<Monomial> NonlinearitySpec::polynomial_terms() const {
  switch (kind) {
    case NonlinearityKind::cubic_focusing:
      return {Monomial{kI, {Factor{false, -1}, Factor{true, -1}, Factor{false, -1}}}};
    case NonlinearityKind::polynomial:
      return monomials;
    default:
      return {};
  }
}

int NonlinearitySpec::degree() const {
  switch (kind) {
    case NonlinearityKind::cubic_focusing: return 3;
    case NonlinearityKind::diagonal: return 1;
    case NonlinearityKind::smoothed_monomial:
      return 1 + 2 * static_cast<int>(std::ceil(std::max(p, q)));
    case NonlinearityKind::polynomial: {
      int d = 1;
      for (const auto& m : monomials) d = std::max(d, static_cast<int>(m.factors.size()));
      return d;
    }
  }
  return 1;
}

void NonlinearitySpec::validate(int dim) const {
  if (!(mu >= 0.0)) throw ConfigError("nonlinearity.mu must be >= 0");
  if (depends_on_gradient() && !(mu > 0.0)) {
    throw ConfigError("gradient-dependent nonlinearity requires mu > 0");
  }
  if (kind == NonlinearityKind::polynomial) {
    for (const auto& m : monomials) {
      if (m.factors.empty()) throw ConfigError("polynomial monomial needs at least one factor");
      for (const auto& f : m.factors) {
        if (f.derivative_axis >= dim) throw ConfigError("monomial derivative axis exceeds torus dimension");
      }
    }
  }
  if (kind == NonlinearityKind::smoothed_monomial && (p < 0.0 || q < 0.0)) {
    throw ConfigError("smoothed monomial powers p, q must be >= 0");
  }
}

NonlinearitySpec NonlinearitySpec::cubic_focusing_nls(double mu) {
  NonlinearitySpec s;
  s.kind = NonlinearityKind::cubic_focusing;
  s.mu = mu;
  return s;
}

NonlinearitySpec NonlinearitySpec::diagonal_field(CVec gamma, double mu) {
  NonlinearitySpec s;
  s.kind = NonlinearityKind::diagonal;
  s.gamma = std::move(gamma);
  s.mu = mu;
  return s;
}

NonlinearitySpec NonlinearitySpec::polynomial_field(std::vector<Monomial> monomials, double mu) {
  NonlinearitySpec s;
  s.kind = NonlinearityKind::polynomial;
  s.monomials = std::move(monomials);
  s.mu = mu;
  return s;
}

NonlinearitySpec NonlinearitySpec::smoothed(double gamma_r, double gamma_i, double p, double q, double mu) {
  NonlinearitySpec s;
  s.kind = NonlinearityKind::smoothed_monomial;
  s.gamma_r = gamma_r;
  s.gamma_i = gamma_i;
  s.p = p;
  s.q = q;
  s.mu = mu;
  return s;
}

double smoothed_power(double x, double p) {
  if (x >= 1.0) return std::pow(x, p);
  if (x <= 0.0) return 0.0;
  // a + b + c = 1, 3a + 4b + 5c = p, 6a + 12b + 20c = p(p-1)
  const double f1 = p;
  const double f2 = p * (p - 1.0);
  const double a = 10.0 - 4.0 * f1 + 0.5 * f2;
  const double b = -15.0 + 7.0 * f1 - f2;
  const double c = 6.0 - 3.0 * f1 + 0.5 * f2;
  const double x3 = x * x * x;
  return x3 * (a + x * (b + x * c));
}

std::string to_string(NonlinearityKind kind) {
  switch (kind) {
    case NonlinearityKind::cubic_focusing: return "cubic_focusing";
    case NonlinearityKind::smoothed_monomial: return "smoothed_monomial";
    case NonlinearityKind::diagonal: return "diagonal";
    case NonlinearityKind::polynomial: return "polynomial";
  }
  return "unknown";
}

NonlinearityKind nonlinearity_kind_from_string(const std::string& name) {
  if (name == "cubic_focusing") return NonlinearityKind::cubic_focusing;
  if (name == "smoothed_monomial") return NonlinearityKind::smoothed_monomial;
  if (name == "diagonal") return NonlinearityKind::diagonal;
  if (name == "polynomial") return NonlinearityKind::polynomial;
  throw ConfigError("unknown nonlinearity kind '" + name + "'");
}

}  // namespace resavg

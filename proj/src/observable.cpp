#include "resavg/observable.hpp"

#include <cmath>

#include "resavg/error.hpp"
#include "resavg/state.hpp"

namespace resavg {

namespace {

void check_index(int k, const CVec& v) {
  if (k < 0 || k >= v.size()) throw ValidationError("observable refers to a mode outside the state");
}

Complex ipow(Complex x, int p) {
  Complex r{1.0, 0.0};
  for (int i = 0; i < p; ++i) r *= x;
  return r;
}

double weight_frequency(const RVec& w, std::optional<int> l) {
  if (!l) return 0.0;
  if (*l < 0 || *l >= w.size()) throw ValidationError("averaging mode index out of range");
  return w[*l];
}

}  // namespace

Complex ObservableTerm::operator()(const CVec& v) const {
  Complex r = coeff;
  for (const auto& [k, p] : v_powers) {
    check_index(k, v);
    r *= ipow(v[k], p);
  }
  for (const auto& [k, p] : vbar_powers) {
    check_index(k, v);
    r *= ipow(std::conj(v[k]), p);
  }
  return r;
}

double ObservableTerm::rotation_frequency(const RVec& w) const {
  double omega = 0.0;
  for (const auto& [k, p] : v_powers) omega += p * w[k];
  for (const auto& [k, p] : vbar_powers) omega -= p * w[k];
  return omega;
}

Complex Observable::operator()(const CVec& v) const {
  Complex r{};
  for (const auto& t : terms) r += t(v);
  return r;
}

Observable Observable::coordinate(int i, Complex coeff) {
  return Observable{{ObservableTerm{coeff, {{i, 1}}, {}}}};
}

Observable Observable::action(int j) { return Observable{{ObservableTerm{0.5, {{j, 1}}, {{j, 1}}}}}; }

Observable Observable::monomial(std::vector<std::pair<int, int>> v_powers,
                                std::vector<std::pair<int, int>> vbar_powers, Complex coeff) {
  return Observable{{ObservableTerm{coeff, std::move(v_powers), std::move(vbar_powers)}}};
}

Complex scalar_average(const Observable& f, const RVec& w, std::optional<int> l, const CVec& v,
                       double t, int n_quad) {
  if (w.size() != v.size()) throw ValidationError("scalar_average: frequency length mismatch");
  if (!(t > 0.0) || n_quad < 2) throw ConfigError("scalar_average: need T > 0 and n_quad >= 2");
  const double wl = weight_frequency(w, l);
  const double step = t / (n_quad - 1);
  // pairwise over fixed-size blocks
  std::vector<Complex> partial;
  Complex acc{};
  for (int q = 0; q < n_quad; ++q) {
    const double s = q * step;
    const double weight = (q == 0 || q == n_quad - 1) ? 0.5 : 1.0;
    acc += weight * std::polar(1.0, wl * s) * f(rotate(v, w, -s));
    if ((q + 1) % 64 == 0) {
      partial.push_back(acc);
      acc = Complex{};
    }
  }
  partial.push_back(acc);
  while (partial.size() > 1) {
    std::vector<Complex> next;
    for (std::size_t i = 0; i < partial.size(); i += 2) {
      next.push_back(i + 1 < partial.size() ? partial[i] + partial[i + 1] : partial[i]);
    }
    partial.swap(next);
  }
  return partial.front() * (step / t);
}

Complex resonant_average(const Observable& f, const RVec& w, std::optional<int> l, const CVec& v,
                         double eta) {
  const double wl = weight_frequency(w, l);
  const double scale = std::max(1.0, w.size() ? w.cwiseAbs().maxCoeff() : 0.0);
  Complex r{};
  for (const auto& t : f.terms) {
    if (std::abs(wl - t.rotation_frequency(w)) <= eta * scale) r += t(v);
  }
  return r;
}

double oscillation_bound(const Observable& f, const RVec& w, std::optional<int> l, const CVec& v,
                         double t, double eta) {
  const double wl = weight_frequency(w, l);
  const double scale = std::max(1.0, w.size() ? w.cwiseAbs().maxCoeff() : 0.0);
  double bound = 0.0;
  for (const auto& term : f.terms) {
    const double omega = std::abs(wl - term.rotation_frequency(w));
    if (omega > eta * scale) bound += 2.0 * std::abs(term(v)) / (t * omega);
  }
  return bound;
}

}  // namespace resavg

#pragma once

#include <optional>
#include <utility>
#include <vector>

#include "resavg/types.hpp"

namespace resavg {

/// coeff * prod_k v_k^{a_k} * prod_k conj(v_k)^{b_k}.
struct ObservableTerm {
  Complex coeff{1.0, 0.0};
  std::vector<std::pair<int, int>> v_powers;     // (mode, power)
  std::vector<std::pair<int, int>> vbar_powers;  // (mode, power)

  Complex operator()(const CVec& v) const;
  /// Omega with term(Phi_{-W t} v) = exp(-i Omega t) term(v).
  double rotation_frequency(const RVec& w) const;
};

/// Polynomial observable in v, conj(v) (actions are I_k = v_k conj(v_k) / 2).
struct Observable {
  std::vector<ObservableTerm> terms;

  Complex operator()(const CVec& v) const;

  static Observable coordinate(int i, Complex coeff = 1.0);
  static Observable action(int j);
  static Observable monomial(std::vector<std::pair<int, int>> v_powers,
                             std::vector<std::pair<int, int>> vbar_powers, Complex coeff = 1.0);
};

/// Finite-window average (1/T) int_0^T e^{i w_l t} f(Phi_{-W t} v) dt; with
/// `l` empty the weight e^{i w_l t} is dropped. Composite trapezoid with n_quad nodes.
Complex scalar_average(const Observable& f, const RVec& w, std::optional<int> l, const CVec& v,
                       double t, int n_quad);

/// T -> infinity limit: the sum of the terms whose phase frequency
/// w_l - Omega vanishes within eta * max(1, |w|_inf).
Complex resonant_average(const Observable& f, const RVec& w, std::optional<int> l, const CVec& v,
                         double eta = 1e-8);

/// Closed-form bound on |<f>^T - <f>| from the oscillating terms:
/// sum 2 |term(v)| / (T |w_l - Omega|).
double oscillation_bound(const Observable& f, const RVec& w, std::optional<int> l, const CVec& v,
                         double t, double eta = 1e-8);

}  // namespace resavg

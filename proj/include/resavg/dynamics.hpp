#pragma once

#include <memory>
#include <optional>
#include <vector>

#include "resavg/frame.hpp"
#include "resavg/nonlinearity.hpp"
#include "resavg/resonance.hpp"

namespace resavg {

/// Pseudospectral evaluator of P(v) = Psi(mu V u + P(grad u, u)), u = Psi^{-1} v.
///
/// Polynomial kinds require grid >= 2 * degree * cutoff so products are
/// projected back without aliasing. The diagonal kind bypasses the grid.
class PerturbationField {
 public:
  PerturbationField(const SpectralFrame& frame, const NonlinearitySpec& spec);
  PerturbationField(std::shared_ptr<const SpectralFrame> frame, const NonlinearitySpec& spec);

  /// P(v).
  CVec operator()(const CVec& v) const;
  /// Y(a, t) = Phi_{t Lambda} P(Phi_{-t Lambda} a).
  CVec rotated(const CVec& a, double t) const;

  const SpectralFrame& frame() const { return *frame_; }
  std::shared_ptr<const SpectralFrame> frame_ptr() const { return frame_; }
  const NonlinearitySpec& spec() const { return spec_; }

 private:
  CVec pointwise(const CVec& u, const std::vector<CVec>& grad) const;

  std::shared_ptr<const SpectralFrame> frame_;
  NonlinearitySpec spec_;
  std::vector<Monomial> terms_;
  RVec mu_potential_;  // mu V(x_j); empty when the term vanishes
  bool needs_gradient_ = false;
};

CVec eval_P(const CVec& v, const NonlinearitySpec& spec, const SpectralFrame& frame);
CVec eval_Y(const CVec& a, double t, const NonlinearitySpec& spec, const SpectralFrame& frame);

/// One resonant monomial coeff * prod_r (conj? conj(v_j) : v_j) contributing to R_target.
struct ResonantTerm {
  int target = 0;
  Complex coeff{};
  std::vector<int> indices;
  std::vector<char> conjugate;
};

/// Resonant average R(v) = lim (1/T) int_0^T Phi_{Lambda t} P(Phi_{-Lambda t} v) dt.
///
/// The analytic route sums the monomials whose signed frequency combination
/// vanishes (couplings are grid integrals of eigenfunction products). The
/// numerical route evaluates the finite-T average by composite trapezoid
/// quadrature; the two are independent and serve as oracles for each other.
class EffectiveField {
 public:
  enum class Route { analytic, numerical };

  static EffectiveField analytic(const SpectralFrame& frame, const NonlinearitySpec& spec,
                                 double eta = kDefaultEtaRes);
  static EffectiveField analytic(std::shared_ptr<const SpectralFrame> frame,
                                 const NonlinearitySpec& spec, double eta = kDefaultEtaRes);
  static EffectiveField numerical(const SpectralFrame& frame, const NonlinearitySpec& spec,
                                  double t_avg, int n_quad);
  static EffectiveField numerical(std::shared_ptr<const SpectralFrame> frame,
                                  const NonlinearitySpec& spec, double t_avg, int n_quad);

  CVec operator()(const CVec& v) const;

  Route route() const { return route_; }
  double t_avg() const { return t_avg_; }
  int n_quad() const { return n_quad_; }
  double gamma_min() const { return gamma_min_; }
  const std::vector<ResonanceTable>& tables() const { return tables_; }
  const std::vector<ResonantTerm>& terms() const { return terms_; }
  const PerturbationField& field() const { return field_; }
  const SpectralFrame& frame() const { return field_.frame(); }
  const NonlinearitySpec& spec() const { return field_.spec(); }

 private:
  explicit EffectiveField(PerturbationField field) : field_(std::move(field)) {}

  PerturbationField field_;
  Route route_ = Route::analytic;
  std::vector<ResonanceTable> tables_;
  std::vector<ResonantTerm> terms_;
  double gamma_min_ = 0.0;
  double t_avg_ = 0.0;
  int n_quad_ = 0;
};

/// Minimal nonzero frequency gap over the conjugation patterns used by `spec`.
double frequency_gap(const SpectralFrame& frame, const NonlinearitySpec& spec,
                     double eta = kDefaultEtaRes);
/// 50 * 2 pi / gamma_min.
double default_averaging_window(const SpectralFrame& frame, const NonlinearitySpec& spec,
                                double eta = kDefaultEtaRes);
/// Node count resolving the fastest rotated frequency with 4 nodes per period.
int default_quadrature_nodes(const SpectralFrame& frame, const NonlinearitySpec& spec, double t_avg);

/// Finite-window average <P>^T_Lambda(v) = (1/T) int_0^T Y(v, t) dt by
/// composite trapezoid with n_quad >= 2 nodes, summed pairwise.
CVec time_average(const PerturbationField& field, const CVec& v, double t_avg, int n_quad);

CVec effective_drift_analytic(const CVec& v, const NonlinearitySpec& spec, const SpectralFrame& frame,
                              double eta = kDefaultEtaRes);

struct NumericalDrift {
  CVec drift;
  /// |numerical - analytic|_{s1}, present for polynomial kinds.
  std::optional<double> residual;
};

NumericalDrift effective_drift_numerical(const CVec& v, const NonlinearitySpec& spec,
                                         const SpectralFrame& frame, double t_avg, int n_quad,
                                         double s1 = 1.0);

}  // namespace resavg

#include "resavg/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <string>

#include "resavg/error.hpp"
#include "resavg/state.hpp"

namespace resavg {

PerturbationField::PerturbationField(const SpectralFrame& frame, const NonlinearitySpec& spec)
    : PerturbationField(std::make_shared<const SpectralFrame>(frame), spec) {}

PerturbationField::PerturbationField(std::shared_ptr<const SpectralFrame> frame,
                                     const NonlinearitySpec& spec)
    : frame_(std::move(frame)), spec_(spec) {
  const auto& g = frame_->geometry();
  spec_.validate(g.dim);
  if (spec_.kind == NonlinearityKind::diagonal) {
    if (spec_.gamma.size() != frame_->modes()) {
      throw ConfigError("diagonal nonlinearity needs " + std::to_string(frame_->modes()) +
                        " gamma entries, got " + std::to_string(spec_.gamma.size()));
    }
    return;
  }
  terms_ = spec_.polynomial_terms();
  needs_gradient_ = spec_.depends_on_gradient();
  if (spec_.kind != NonlinearityKind::smoothed_monomial) {
    const int need = 2 * spec_.degree() * frame_->cutoff();
    if (g.grid < need) {
      throw ConfigError("grid of " + std::to_string(g.grid) + " points aliases a degree-" +
                        std::to_string(spec_.degree()) + " nonlinearity; need grid >= " +
                        std::to_string(need));
    }
  }
  if (spec_.mu > 0.0 && !frame_->potential().is_zero()) {
    mu_potential_ = spec_.mu * frame_->potential_grid();
  }
}

CVec PerturbationField::pointwise(const CVec& u, const std::vector<CVec>& grad) const {
  const Eigen::Index n = u.size();
  CVec g = CVec::Zero(n);
  if (spec_.kind == NonlinearityKind::smoothed_monomial) {
    for (Eigen::Index j = 0; j < n; ++j) {
      const double r = std::norm(u[j]);
      g[j] = (-spec_.gamma_r * smoothed_power(r, spec_.p) -
              kI * (spec_.gamma_i * smoothed_power(r, spec_.q))) * u[j];
    }
  } else {
    for (const auto& m : terms_) {
      for (Eigen::Index j = 0; j < n; ++j) {
        Complex prod = m.coeff;
        for (const auto& f : m.factors) {
          const Complex x = f.derivative_axis < 0 ? u[j] : grad[f.derivative_axis][j];
          prod *= f.conjugate ? std::conj(x) : x;
        }
        g[j] += prod;
      }
    }
  }
  if (mu_potential_.size() > 0) g += (mu_potential_.array() * u.array()).matrix();
  return g;
}

CVec PerturbationField::operator()(const CVec& v) const {
  if (v.size() != frame_->modes()) throw ValidationError("P(v): coefficient length mismatch");
  if (spec_.kind == NonlinearityKind::diagonal) return spec_.gamma.cwiseProduct(v);
  const CVec u = frame_->zeta_grid() * v;
  std::vector<CVec> grad;
  if (needs_gradient_) {
    for (int axis = 0; axis < frame_->geometry().dim; ++axis) {
      grad.push_back(frame_->zeta_derivative_grid(axis) * v);
    }
  }
  const CVec g = pointwise(u, grad);
  return frame_->geometry().cell_weight() * (frame_->zeta_grid().transpose() * g);
}

CVec PerturbationField::rotated(const CVec& a, double t) const {
  const RVec& lambda = frame_->lambda();
  return rotate((*this)(rotate(a, lambda, -t)), lambda, t);
}

CVec eval_P(const CVec& v, const NonlinearitySpec& spec, const SpectralFrame& frame) {
  return PerturbationField(frame, spec)(v);
}

CVec eval_Y(const CVec& a, double t, const NonlinearitySpec& spec, const SpectralFrame& frame) {
  return PerturbationField(frame, spec).rotated(a, t);
}

namespace {

std::vector<ConjugationPattern> patterns_of(const NonlinearitySpec& spec) {
  std::vector<ConjugationPattern> out;
  auto add = [&](ConjugationPattern p) {
    if (std::find(out.begin(), out.end(), p) == out.end()) out.push_back(std::move(p));
  };
  switch (spec.kind) {
    case NonlinearityKind::diagonal: add({1}); break;
    case NonlinearityKind::smoothed_monomial: add({1, -1, 1}); break;
    default:
      for (const auto& m : spec.polynomial_terms()) add(m.pattern());
      break;
  }
  if (out.empty()) add({1});
  return out;
}

const ResonanceTable& table_for(std::vector<ResonanceTable>& tables, const SpectralFrame& frame,
                                const ConjugationPattern& pattern, double eta) {
  for (const auto& t : tables) {
    if (t.pattern == pattern) return t;
  }
  tables.push_back(build_resonance_table(frame, pattern, eta));
  return tables.back();
}

}  // namespace

double frequency_gap(const SpectralFrame& frame, const NonlinearitySpec& spec, double eta) {
  double gap = std::numeric_limits<double>::infinity();
  for (const auto& p : patterns_of(spec)) {
    gap = std::min(gap, build_resonance_table(frame, p, eta).gamma_min);
  }
  return gap;
}

double default_averaging_window(const SpectralFrame& frame, const NonlinearitySpec& spec, double eta) {
  const double gap = frequency_gap(frame, spec, eta);
  if (!std::isfinite(gap) || gap <= 0.0) return 50.0 * kTwoPi;
  return 50.0 * kTwoPi / gap;
}

int default_quadrature_nodes(const SpectralFrame& frame, const NonlinearitySpec& spec, double t_avg) {
  const double omega = (spec.degree() + 1) * std::max(1.0, frame.lambda_max());
  const double nodes = 4.0 * t_avg * omega / kTwoPi;
  return static_cast<int>(std::ceil(nodes)) + 1;
}

EffectiveField EffectiveField::analytic(const SpectralFrame& frame, const NonlinearitySpec& spec, double eta) {
  return analytic(std::make_shared<const SpectralFrame>(frame), spec, eta);
}

EffectiveField EffectiveField::analytic(std::shared_ptr<const SpectralFrame> frame_ptr,
                                        const NonlinearitySpec& spec, double eta) {
  if (!spec.is_polynomial()) {
    throw UnsupportedError("analytic resonant average needs a polynomial nonlinearity, got " +
                           to_string(spec.kind));
  }
  EffectiveField out(PerturbationField(std::move(frame_ptr), spec));
  out.route_ = Route::analytic;
  const SpectralFrame& frame = out.frame();
  const RMat& z = frame.zeta_grid();
  const double w = frame.geometry().cell_weight();
  const int m = frame.modes();

  if (spec.kind == NonlinearityKind::diagonal) {
    table_for(out.tables_, frame, {1}, eta);
    for (int k = 0; k < m; ++k) out.terms_.push_back({k, spec.gamma[k], {k}, {0}});
  } else {
    for (const auto& mono : spec.polynomial_terms()) {
      const auto& table = table_for(out.tables_, frame, mono.pattern(), eta);
      std::vector<ResonantTerm> found;
      double cmax = 0.0;
      for (const auto& entry : table.resonances) {
        for (const auto& tuple : entry.tuples) {
          RVec prod = z.col(entry.target);
          for (std::size_t r = 0; r < tuple.size(); ++r) {
            const auto& f = mono.factors[r];
            const RMat& g = f.derivative_axis < 0 ? z : frame.zeta_derivative_grid(f.derivative_axis);
            prod = prod.cwiseProduct(g.col(tuple[r]));
          }
          const double integral = w * prod.sum();
          cmax = std::max(cmax, std::abs(integral));
          ResonantTerm term{entry.target, mono.coeff * integral, tuple, {}};
          for (const auto& f : mono.factors) term.conjugate.push_back(f.conjugate ? 1 : 0);
          found.push_back(std::move(term));
        }
      }
      for (auto& t : found) {
        if (std::abs(t.coeff) > 1e-13 * cmax * std::abs(mono.coeff)) out.terms_.push_back(std::move(t));
      }
    }
    if (spec.mu > 0.0 && !frame.potential().is_zero()) {
      const auto& table = table_for(out.tables_, frame, {1}, eta);
      const RVec& vgrid = frame.potential_grid();
      for (const auto& entry : table.resonances) {
        for (const auto& tuple : entry.tuples) {
          const double c = spec.mu * w * (z.col(entry.target).cwiseProduct(vgrid).cwiseProduct(z.col(tuple[0]))).sum();
          if (c != 0.0) out.terms_.push_back({entry.target, Complex{c, 0.0}, tuple, {0}});
        }
      }
    }
  }
  out.gamma_min_ = std::numeric_limits<double>::infinity();
  for (const auto& t : out.tables_) out.gamma_min_ = std::min(out.gamma_min_, t.gamma_min);
  return out;
}

EffectiveField EffectiveField::numerical(const SpectralFrame& frame, const NonlinearitySpec& spec,
                                         double t_avg, int n_quad) {
  return numerical(std::make_shared<const SpectralFrame>(frame), spec, t_avg, n_quad);
}

EffectiveField EffectiveField::numerical(std::shared_ptr<const SpectralFrame> frame_ptr,
                                         const NonlinearitySpec& spec, double t_avg, int n_quad) {
  if (!(t_avg > 0.0)) throw ConfigError("averaging window T_avg must be > 0");
  if (n_quad < 2) throw ConfigError("n_quad must be >= 2");
  EffectiveField out(PerturbationField(std::move(frame_ptr), spec));
  out.route_ = Route::numerical;
  out.t_avg_ = t_avg;
  out.n_quad_ = n_quad;
  out.gamma_min_ = frequency_gap(out.frame(), spec);
  return out;
}

CVec EffectiveField::operator()(const CVec& v) const {
  if (route_ == Route::numerical) return time_average(field_, v, t_avg_, n_quad_);
  if (v.size() != frame().modes()) throw ValidationError("R(v): coefficient length mismatch");
  CVec out = CVec::Zero(v.size());
  for (const auto& t : terms_) {
    Complex prod = t.coeff;
    for (std::size_t r = 0; r < t.indices.size(); ++r) {
      const Complex x = v[t.indices[r]];
      prod *= t.conjugate[r] ? std::conj(x) : x;
    }
    out[t.target] += prod;
  }
  return out;
}

namespace {

CVec pairwise_sum(const PerturbationField& field, const CVec& v, double step, int first, int last,
                  int n_quad) {
  if (last - first <= 8) {
    CVec acc = CVec::Zero(v.size());
    for (int q = first; q < last; ++q) {
      const double weight = (q == 0 || q == n_quad - 1) ? 0.5 : 1.0;
      acc += weight * field.rotated(v, q * step);
    }
    return acc;
  }
  const int mid = first + (last - first) / 2;
  return pairwise_sum(field, v, step, first, mid, n_quad) + pairwise_sum(field, v, step, mid, last, n_quad);
}

}  // namespace

CVec time_average(const PerturbationField& field, const CVec& v, double t_avg, int n_quad) {
  if (!(t_avg > 0.0)) throw ConfigError("averaging window T_avg must be > 0");
  if (n_quad < 2) throw ConfigError("n_quad must be >= 2");
  const double step = t_avg / (n_quad - 1);
  return (step / t_avg) * pairwise_sum(field, v, step, 0, n_quad, n_quad);
}

CVec effective_drift_analytic(const CVec& v, const NonlinearitySpec& spec, const SpectralFrame& frame,
                              double eta) {
  return EffectiveField::analytic(frame, spec, eta)(v);
}

NumericalDrift effective_drift_numerical(const CVec& v, const NonlinearitySpec& spec,
                                         const SpectralFrame& frame, double t_avg, int n_quad,
                                         double s1) {
  auto shared = std::make_shared<const SpectralFrame>(frame);
  NumericalDrift out;
  out.drift = time_average(PerturbationField(shared, spec), v, t_avg, n_quad);
  if (spec.is_polynomial()) {
    const CVec exact = EffectiveField::analytic(shared, spec)(v);
    out.residual = sobolev_norm(out.drift - exact, s1, frame.lambda());
  }
  return out;
}

}  // namespace resavg

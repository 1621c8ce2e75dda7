#include "apwave/waveop.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

namespace apwave {

void WaveParams::validate() const {
  if (!(g > 0.0) || !std::isfinite(g))
    throw std::invalid_argument("params: g must be strictly positive");
  if (!(h > 0.0) || !std::isfinite(h))
    throw std::invalid_argument("params: h must be strictly positive");
  if (!std::isfinite(gamma))
    throw std::invalid_argument("params: gamma must be finite");
}

namespace {

constexpr int kSurfaceGridPoints = 4096;

// Cheap sup bound first; only if it reaches the bed, sample a grid.
void check_surface_above_bed(const WaveParams& p, const TrigSum& w) {
  if (w.sup_bound() < p.h) return;
  const double g1 = w.basis()->generators.front();
  const double window = 2.0 * std::numbers::pi / g1;
  for (int i = 0; i < kSurfaceGridPoints; ++i) {
    const double x = window * i / kSurfaceGridPoints;
    if (eval(w, x) <= -p.h)
      throw std::domain_error("residual_F: surface touches the bed (w <= -h)");
  }
}

BasisPtr working_basis_for(const BasisPtr& band) {
  // Quartic terms of a band-limited w reach 4x the band cutoff; beyond that
  // nothing is generated, so this working window makes the assembly exact.
  return std::make_shared<GeneratorBasis>(band->with_cutoff(4.0 * band->cutoff));
}

}  // namespace

TrigSum residual_F(const WaveParams& p, const TrialState& st) {
  p.validate();
  if (std::abs(mean(st.w)) > 1e-9)
    throw std::invalid_argument("residual_F: w must have zero mean");
  check_surface_above_bed(p, st.w);

  const StripGeometry strip{p.h};
  const BasisPtr work = working_basis_for(st.w.basis());
  const TrigSum w = st.w.rebased(work);

  const TrigSum Gw = dn_apply(strip, w);
  const TrigSum w2 = mul(w, w);
  // G(w^2/2) - w - w G(w)
  const TrigSum brace_inner =
      sub(scale(0.5, dn_apply(strip, w2)), add(w, mul(w, Gw)));
  const TrigSum brace =
      add(TrigSum::constant(work, st.lambda), scale(p.gamma, brace_inner));
  const TrigSum lhs = mul(brace, brace);

  const TrigSum wp = derivative(w);
  // w'^2 + G(w)^2 + 2 G(w) + 1
  const TrigSum dyn = add(add(mul(wp, wp), mul(Gw, Gw)),
                          add(scale(2.0, Gw), TrigSum::constant(work, 1.0)));
  const TrigSum pref = add(TrigSum::constant(work, st.lambda * st.lambda + st.mu),
                           scale(-2.0 * p.g, w));
  return sub(lhs, mul(pref, dyn));
}

double linearized_multiplier(const WaveParams& p, double lambda, double k) {
  const StripGeometry strip{p.h};
  return 2.0 * ((p.g - lambda * p.gamma) -
                lambda * lambda * dn_multiplier(strip, k));
}

std::pair<double, double> bifurcation_lambdas(const WaveParams& p, double k) {
  p.validate();
  if (!(k > 0.0)) throw std::invalid_argument("bifurcation_lambdas: k must be > 0");
  const double t = std::tanh(k * p.h);
  const double half_gamma_term = p.gamma * t / (2.0 * k);
  const double disc = std::sqrt(half_gamma_term * half_gamma_term + p.g * t / k);
  return {-half_gamma_term + disc, -half_gamma_term - disc};
}

double dispersion_residual(const WaveParams& p, double lambda, double k) {
  if (!(k > 0.0)) throw std::invalid_argument("dispersion_residual: k must be > 0");
  const StripGeometry strip{p.h};
  return lambda * lambda * dn_multiplier(strip, k) + lambda * p.gamma - p.g;
}

double transversality(const WaveParams& p, double lambda_star, double k0) {
  if (lambda_star == 0.0)
    throw std::invalid_argument("transversality: lambda* must be nonzero");
  const StripGeometry strip{p.h};
  return -2.0 * lambda_star *
         (dn_multiplier(strip, k0) + p.g / (lambda_star * lambda_star));
}

std::vector<ModeId> resonance_scan(const WaveParams& p, double lambda_star,
                                   const AdmissiblePair& pair, double tol) {
  std::vector<ModeId> hits;
  for (const auto& m : enumerate_modes(pair)) {
    if (m.kind == ModeKind::Mean) continue;
    if (std::abs(linearized_multiplier(p, lambda_star, m.freq)) < tol)
      hits.push_back(m);
  }
  return hits;
}

std::pair<double, double> derived_constants(const WaveParams& p, double lambda,
                                            double mu) {
  const double m = p.h * (lambda + p.gamma * p.h / 2.0);
  const double Q = mu + lambda * lambda + 2.0 * p.g * p.h;
  return {m, Q};
}

bool stagnation_indicator(const WaveParams& p, double lambda) {
  return lambda * (lambda + p.gamma * p.h) <= 0.0;
}

GalerkinSystem::GalerkinSystem(WaveParams p, AdmissiblePair pair)
    : params_(std::move(p)), pair_(std::move(pair)) {
  params_.validate();
  const auto all = enumerate_modes(pair_);  // validates structure, Mean first
  modes_.assign(all.begin() + 1, all.end());
}

Eigen::VectorXd GalerkinSystem::residual(const TrialState& s,
                                         double* out_of_band) const {
  const TrigSum F = residual_F(params_, s);
  auto [banded, beyond] = truncate_at(F, pair_.basis->cutoff);
  if (out_of_band) *out_of_band = beyond + F.truncation_mass();

  Eigen::VectorXd r(1 + modes_.size());
  r[0] = banded.mean_value();
  for (std::size_t i = 0; i < modes_.size(); ++i)
    r[1 + i] = banded.coeff(modes_[i]);
  return r;
}

TrigSum GalerkinSystem::make_w(const Eigen::VectorXd& coeffs) const {
  if (coeffs.size() != static_cast<Eigen::Index>(modes_.size()))
    throw std::invalid_argument("make_w: coefficient count mismatch");
  TrigSum w(pair_.basis);
  for (std::size_t i = 0; i < modes_.size(); ++i)
    w.accumulate(modes_[i].kind, modes_[i].vec, coeffs[i]);
  w.sparsify();
  return w;
}

Eigen::VectorXd GalerkinSystem::pack_w(const TrigSum& w) const {
  Eigen::VectorXd c(modes_.size());
  for (std::size_t i = 0; i < modes_.size(); ++i) c[i] = w.coeff(modes_[i]);
  return c;
}

double GalerkinSystem::norm_b2(const Eigen::VectorXd& r) const {
  double s = r[0] * r[0];
  for (Eigen::Index i = 1; i < r.size(); ++i) s += 0.5 * r[i] * r[i];
  return std::sqrt(s);
}

Eigen::MatrixXd galerkin_jacobian_muw(const GalerkinSystem& sys,
                                      const TrialState& s, FdScheme scheme,
                                      double base_step) {
  const std::size_t n = sys.n_modes();
  Eigen::MatrixXd J(1 + n, 1 + n);
  const Eigen::VectorXd coeffs0 = sys.pack_w(s.w);
  const Eigen::VectorXd r0 =
      (scheme == FdScheme::Forward) ? sys.residual(s) : Eigen::VectorXd();

  // Unknowns are [mu, mode coefficients...]; perturb one at a time and
  // difference the band residual.  Steps scale with coefficient magnitude.
  auto state_at = [&](std::size_t unknown, double delta) {
    TrialState probe = s;
    if (unknown == 0) {
      probe.mu += delta;
    } else {
      Eigen::VectorXd c = coeffs0;
      c[unknown - 1] += delta;
      probe.w = sys.make_w(c);
    }
    return probe;
  };

  for (std::size_t col = 0; col <= n; ++col) {
    const double at = (col == 0) ? s.mu : coeffs0[col - 1];
    const double step = std::max(base_step, base_step * std::abs(at));
    if (scheme == FdScheme::Forward) {
      J.col(col) = (sys.residual(state_at(col, step)) - r0) / step;
    } else {
      J.col(col) = (sys.residual(state_at(col, step)) -
                    sys.residual(state_at(col, -step))) /
                   (2.0 * step);
    }
  }
  return J;
}

KernelCertificate certify_kernel(const GalerkinSystem& sys, double lambda_star,
                                 double k0_freq, double sv_tol) {
  TrialState origin;
  origin.lambda = lambda_star;
  origin.mu = 0.0;
  origin.w = TrigSum(sys.band_basis());

  // Central differences: forward stencils at w = 0 are contaminated by the
  // quadratic terms at O(step), far above the 1e-8 certification scale.
  const Eigen::MatrixXd J =
      galerkin_jacobian_muw(sys, origin, FdScheme::Central, 3e-6);

  Eigen::JacobiSVD<Eigen::MatrixXd> svd(J);
  const Eigen::VectorXd& sv = svd.singularValues();  // descending

  KernelCertificate cert;
  cert.lambda_star = lambda_star;
  cert.k0 = k0_freq;
  cert.singular_values = sv;
  const Eigen::Index m = sv.size();
  cert.sigma_min = sv[m - 1];
  cert.sigma_next = (m >= 2) ? sv[m - 2] : 0.0;
  cert.gap = (cert.sigma_min > 0.0)
                 ? cert.sigma_next / cert.sigma_min
                 : std::numeric_limits<double>::infinity();
  cert.n_below_tol = 0;
  for (Eigen::Index i = 0; i < m; ++i)
    if (sv[i] < sv_tol) ++cert.n_below_tol;
  cert.transversality_value = transversality(sys.params(), lambda_star, k0_freq);
  cert.kernel_one_dimensional =
      cert.n_below_tol == 1 && cert.gap >= 1e3 && cert.transversality_value != 0.0;
  return cert;
}

}  // namespace apwave

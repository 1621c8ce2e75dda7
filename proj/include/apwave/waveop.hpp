#pragma once

#include <Eigen/Dense>

#include "apwave/dno.hpp"
#include "apwave/freqset.hpp"
#include "apwave/trig.hpp"

namespace apwave {

/// Physical constants of one problem instance.
struct WaveParams {
  double gamma = 0.0;  // constant vorticity, 1/s
  double g = 9.8;      // gravitational acceleration, m/s^2
  double h = 1.0;      // conformal mean depth, m

  void validate() const;
};

/// One candidate (lambda, mu, w) with w a zero-mean surface deviation.
struct TrialState {
  double lambda = 0.0;  // relative surface speed parameter, m/s
  double mu = 0.0;      // Bernoulli offset, m^2/s^2
  TrigSum w;            // surface elevation deviation, m (zero mean)
};

/// The bifurcation functional
///   F = {lambda + gamma (G(w^2/2) - w - w G(w))}^2
///       - (lambda^2 + mu - 2 g w)(w'^2 + G(w)^2 + 2 G(w) + 1)
/// assembled exactly from the trig/dno primitives.  The result lives on a
/// working basis whose cutoff is 4x the solution cutoff, which is enough for
/// the quartic terms of a band-limited w, so no product mass is lost before
/// the caller projects back.
TrigSum residual_F(const WaveParams& p, const TrialState& s);

/// Diagonal action of the linearization at (lambda, (0,0)) on a frequency-k
/// mode: 2[(g - lambda gamma) - lambda^2 k coth(k h)] (same for cos and sin).
double linearized_multiplier(const WaveParams& p, double lambda, double k);

/// Roots of lambda^2 k coth(kh) + lambda gamma - g = 0, returned (plus, minus).
std::pair<double, double> bifurcation_lambdas(const WaveParams& p, double k);

double dispersion_residual(const WaveParams& p, double lambda, double k);

/// Crandall-Rabinowitz transversality value -2 lambda* (k0 coth(k0 h) + g/lambda*^2);
/// nonzero whenever lambda* != 0, with sign opposite to lambda*.
double transversality(const WaveParams& p, double lambda_star, double k0);

/// Modes of the pair whose linearized multiplier is within tol of zero.
std::vector<ModeId> resonance_scan(const WaveParams& p, double lambda_star,
                                   const AdmissiblePair& pair, double tol);

/// (m, Q): mass flux m = h(lambda + gamma h/2), Bernoulli constant
/// Q = mu + lambda^2 + 2 g h.
std::pair<double, double> derived_constants(const WaveParams& p, double lambda,
                                            double mu);

/// Stagnation points occur along the constructed branches iff
/// lambda (lambda + gamma h) <= 0.
bool stagnation_indicator(const WaveParams& p, double lambda);

/// Galerkin view of F on the band of an admissible pair: residual vectors
/// ordered [mean, modes...] and finite-difference Jacobians.
class GalerkinSystem {
 public:
  GalerkinSystem(WaveParams p, AdmissiblePair pair);

  const WaveParams& params() const { return params_; }
  const AdmissiblePair& pair() const { return pair_; }
  /// Positive-frequency modes, sorted; the Mean row is handled separately.
  const std::vector<ModeId>& modes() const { return modes_; }
  std::size_t n_modes() const { return modes_.size(); }
  const BasisPtr& band_basis() const { return pair_.basis; }

  /// Band projection of residual_F: [mean coefficient, mode coefficients...].
  /// out_of_band, when given, receives the B2 mass of F beyond the band plus
  /// any product receipts.
  Eigen::VectorXd residual(const TrialState& s, double* out_of_band = nullptr) const;

  /// w from per-mode coefficients (ordering of modes()).
  TrigSum make_w(const Eigen::VectorXd& coeffs) const;
  Eigen::VectorXd pack_w(const TrigSum& w) const;

  /// B2 norm of a band residual vector.
  double norm_b2(const Eigen::VectorXd& r) const;

 private:
  WaveParams params_;
  AdmissiblePair pair_;
  std::vector<ModeId> modes_;
};

enum class FdScheme { Forward, Central };

/// Finite-difference Jacobian of the band residual with respect to (mu, w):
/// columns [mu, each mode coefficient], rows [mean, modes...].  Forward
/// differences use step max(base, base*|coeff|); central differences are for
/// certification near w = 0 where forward stencils are poisoned by the
/// quadratic terms.
Eigen::MatrixXd galerkin_jacobian_muw(const GalerkinSystem& sys,
                                      const TrialState& s, FdScheme scheme,
                                      double base_step = 1e-7);

/// Numerical certificate of the Crandall-Rabinowitz hypotheses at a
/// bifurcation point: the (mu,w)-Jacobian at (lambda*, 0, 0) must have
/// exactly one near-zero singular value, well separated from the rest, and
/// the transversality value must be nonzero.
struct KernelCertificate {
  double lambda_star = 0.0;
  double k0 = 0.0;
  double sigma_min = 0.0;
  double sigma_next = 0.0;
  double gap = 0.0;  // sigma_next / sigma_min
  int n_below_tol = 0;
  double transversality_value = 0.0;
  bool kernel_one_dimensional = false;
  Eigen::VectorXd singular_values;  // descending
};

KernelCertificate certify_kernel(const GalerkinSystem& sys, double lambda_star,
                                 double k0_freq, double sv_tol = 1e-8);

}  // namespace apwave

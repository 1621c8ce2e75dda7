#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include "apwave/waveop.hpp"

namespace apwave {

/// One continuation run: kernel mode, dispersion root, amplitude schedule.
struct BranchConfig {
  AdmissiblePair pair;
  ModeId k0;                     // Cos or Sin kernel mode, must be enumerable
  int root_sign = +1;            // +1 -> lambda_plus, -1 -> lambda_minus
  double s_max = 1e-2;
  int n_steps = 20;
  double newton_tol = 1e-11;     // B2 norm of the band residual
  int newton_max_iter = 25;
  double cutoff = 0.0;           // solution band; 0 keeps the pair's cutoff
  double resonance_tol = 1e-6;   // |multiplier| below this flags resonance
  bool include_negative = false; // also continue toward s < 0

  void validate() const;
  /// Pair with the run cutoff applied to its basis.
  AdmissiblePair effective_pair() const;
};

/// One accepted point of the local bifurcation curve.  The coefficient of w
/// on the kernel mode equals s exactly (amplitude pinning); amplitudes below
/// the coefficient drop tolerance (kDropTol) are not representable.
struct BranchPoint {
  double s = 0.0;
  double lambda = 0.0;
  double mu = 0.0;
  TrigSum w;
  double residual_norm = 0.0;
  int newton_iters = 0;
  double truncation_mass = 0.0;  // B2 mass of F beyond the band at the point
  double min_surface = 0.0;      // min_x w(x) over the verification grid
};

/// Kernel at lambda* is not one-dimensional (or the Jacobian went singular).
class ResonanceError : public std::runtime_error {
 public:
  ResonanceError(std::string msg, std::vector<ModeId> modes)
      : std::runtime_error(std::move(msg)), resonant_modes(std::move(modes)) {}
  std::vector<ModeId> resonant_modes;
};

/// Newton failed to converge at the given amplitude.
class ConvergenceError : public std::runtime_error {
 public:
  ConvergenceError(std::string msg, double s_value)
      : std::runtime_error(std::move(msg)), s(s_value) {}
  double s;
};

/// Continuation aborted; carries everything accepted before the failure.
class ContinuationError : public std::runtime_error {
 public:
  ContinuationError(std::string msg, std::vector<BranchPoint> pts, double at)
      : std::runtime_error(std::move(msg)), accepted(std::move(pts)), failed_s(at) {}
  std::vector<BranchPoint> accepted;
  double failed_s;
};

/// Bifurcation point (s=0, lambda*, mu=0, w=0) after certifying that the
/// resonance scan at lambda* hits exactly the configured kernel mode.
BranchPoint seed(const WaveParams& p, const BranchConfig& cfg);

/// Damped Newton on the square system {band projections of F} = 0 for
/// (lambda, mu, free w coefficients), with the kernel coefficient pinned to s.
BranchPoint newton_correct(const WaveParams& p, const BranchConfig& cfg,
                           const TrialState& guess, double s);

/// Predictor-corrector sweep s = ds, 2ds, ..., s_max with step halving on
/// rejection (floor ds/64); returns points sorted by s, seed included.
std::vector<BranchPoint> continue_branch(const WaveParams& p, const BranchConfig& cfg);

struct DemoOptions {
  double s_max = 1e-2;
  int n_steps = 20;
  double cutoff = 0.0;  // 0 -> demo-specific default
  double newton_tol = 1e-11;
  int newton_max_iter = 25;
};

/// Per-amplitude comparison of the two branches sharing one lambda*.
struct NonuniquenessRow {
  double s = 0.0;
  double lambda_cos = 0.0, mu_cos = 0.0;
  double lambda_sin = 0.0, mu_sin = 0.0;
  double b2_distance = 0.0;   // ||w_cos - w_sin|| in B2
  double defect_cos = 0.0;    // B2 mass of sin modes of the cos branch
  double defect_sin = 0.0;    // same for the sin branch (>= s/2 expected)
};

/// Two distinct waves at one bifurcation value: the even (pure cosine)
/// branch and the non-even branch led by sin(x), both at root_sign = -1.
struct NonuniquenessReport {
  WaveParams params;
  double lambda_star = 0.0;
  BranchConfig cos_config, sin_config;
  std::vector<BranchPoint> cos_branch;
  std::vector<BranchPoint> sin_branch;
  std::vector<NonuniquenessRow> rows;
  bool sin_defect_ok = false;  // defect_sin >= s/2 at every emitted s
  bool cos_even_exact = false; // cos branch carries no sin mass at all
};

NonuniquenessReport nonuniqueness_demo(const WaveParams& p,
                                       const DemoOptions& opts = {});

/// Branch over the (1, sqrt 5) lattice at kernel frequency 2*sqrt(5), plus a
/// structural non-periodicity certificate by exact integer rank.
struct AlmostPeriodicReport {
  WaveParams params;
  double lambda_star = 0.0;
  double k0_freq = 0.0;
  BranchConfig config;
  std::vector<BranchPoint> branch;
  std::vector<FreqVector> support;       // modes of the final point
  int support_rank = 0;                  // rank over Q of the support vectors
  int closure_rank = 0;                  // support closed under one product
  int pair_rank = 0;                     // closure against the pair's mode set
  std::string certificate;               // which level certified rank >= 2
  std::vector<FreqVector> witness;       // two rationally independent vectors
  bool second_harmonic_populated = false;
};

AlmostPeriodicReport almost_periodic_demo(const WaveParams& p,
                                          const DemoOptions& opts = {});

/// Rank over Q of a set of integer vectors (exact fraction-free elimination).
int integer_rank(const std::vector<FreqVector>& vectors);

}  // namespace apwave

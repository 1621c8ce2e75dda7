#pragma once

#include <map>
#include <utility>
#include <vector>

#include "apwave/freqset.hpp"

namespace apwave {

/// Coefficients below this magnitude are pruned (canonical sparsity).
inline constexpr double kDropTol = 1e-14;

/// Finite trigonometric sum  mean + sum a_v cos(e(v) x) + sum b_v sin(e(v) x)
/// over canonical lattice vectors v with signed embedding e(v).
///
/// This is the computational stand-in for a Besicovitch-space element: each
/// sum is the canonical representative of its class, so no quotient
/// machinery is needed.  Values are immutable in spirit; all algebra returns
/// fresh sums.  Products truncate at the basis cutoff and the discarded
/// B2 mass is carried along as a truncation receipt (it is an annotation,
/// not part of the value: comparisons and serialization ignore it).
class TrigSum {
 public:
  TrigSum() = default;
  explicit TrigSum(BasisPtr basis, double mean = 0.0)
      : basis_(std::move(basis)), mean_(mean) {}

  static TrigSum constant(BasisPtr basis, double c) { return TrigSum(basis, c); }
  /// Single cos/sin term; the vector is folded to canonical form.
  static TrigSum harmonic(BasisPtr basis, const FreqVector& vec, ModeKind kind,
                          double coeff);

  const BasisPtr& basis() const { return basis_; }
  double mean_value() const { return mean_; }
  const std::map<FreqVector, double>& cos_terms() const { return cos_; }
  const std::map<FreqVector, double>& sin_terms() const { return sin_; }
  std::size_t term_count() const { return cos_.size() + sin_.size(); }

  double truncation_mass() const { return trunc_; }
  void add_truncation_mass(double m) { trunc_ += m; }

  /// Coefficient on a canonical vector (0 if absent).
  double coeff(ModeKind kind, const FreqVector& vec) const;
  double coeff(const ModeId& mode) const;

  /// Accumulate value onto a term; raw vector is folded (sin picks up the
  /// fold sign, a zero-vector cos feeds the mean, a zero-vector sin is 0).
  void accumulate(ModeKind kind, const FreqVector& raw, double value);
  void set_mean(double m) { mean_ = m; }

  /// Prune entries below kDropTol.
  void sparsify();

  /// Same generators and same cutoff; required by all binary operations.
  bool compatible(const TrigSum& o) const;

  /// Sum recast onto a basis with the same generators but another cutoff;
  /// modes beyond the new cutoff are dropped into the truncation receipt.
  TrigSum rebased(const BasisPtr& nb) const;

  /// max_x |u(x)| upper bound: sum of absolute coefficients.
  double sup_bound() const;

 private:
  friend TrigSum add(const TrigSum&, const TrigSum&);
  friend TrigSum sub(const TrigSum&, const TrigSum&);
  friend TrigSum scale(double, const TrigSum&);
  friend TrigSum mul(const TrigSum&, const TrigSum&);
  friend TrigSum derivative(const TrigSum&);

  BasisPtr basis_;
  double mean_ = 0.0;
  std::map<FreqVector, double> cos_;  // canonical nonzero vectors only
  std::map<FreqVector, double> sin_;
  double trunc_ = 0.0;  // accumulated discarded B2 mass
};

TrigSum add(const TrigSum& u, const TrigSum& v);
TrigSum sub(const TrigSum& u, const TrigSum& v);
TrigSum scale(double c, const TrigSum& u);

/// Exact product-to-sum expansion; frequencies beyond the basis cutoff are
/// dropped and their B2 mass added to the receipt.
TrigSum mul(const TrigSum& u, const TrigSum& v);

/// Termwise derivative: cos -> -e sin, sin -> e cos on the same vector
/// (signed embeddings keep the bookkeeping exact).
TrigSum derivative(const TrigSum& u);

double mean(const TrigSum& u);

/// B2 inner product: <u,v> = mean*mean + (1/2) sum a a' + (1/2) sum b b'.
double inner(const TrigSum& u, const TrigSum& v);
double norm_b2(const TrigSum& u);

/// Pointwise evaluation, summed in ascending-frequency order.
double eval(const TrigSum& u, double x);
std::vector<double> eval_grid(const TrigSum& u, const std::vector<double>& xs);

/// Zero the mean and drop modes the pair classifies Excluded; returns the
/// projected sum and the B2 norm of everything dropped.
std::pair<TrigSum, double> project_zero_mean(const TrigSum& u, const AdmissiblePair& pair);

/// Split u at the given frequency: (part <= cutoff, B2 mass above it).
std::pair<TrigSum, double> truncate_at(const TrigSum& u, double cutoff);

/// Flattened positive-frequency view used by evaluators: one row per term.
struct TermView {
  double freq;   // |embedding| > 0
  double a = 0;  // cos coefficient
  double b = 0;  // sin coefficient (sign folded for negative embeddings)
  FreqVector vec;
};

/// Terms merged per vector, sorted by frequency ascending.
std::vector<TermView> term_views(const TrigSum& u);

}  // namespace apwave

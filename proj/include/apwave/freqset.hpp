#pragma once

#include <array>
#include <compare>
#include <cstdint>
#include <memory>
#include <set>
#include <string>
#include <vector>

namespace apwave {

/// Hard ceiling on the number of lattice generators.
inline constexpr std::size_t kMaxGenerators = 4;

/// Two embedded frequencies closer than this are treated as aliased.
inline constexpr double kCollisionTol = 1e-9;

/// Integer coordinates of one frequency over the generator list.
///
/// Canonical form: the first nonzero coefficient is positive (or the vector
/// is zero).  Since cos is even and sin is odd, v and -v describe the same
/// mode up to the sign of a sine coefficient; fold() picks the canonical
/// representative and reports the sign flip.
class FreqVector {
 public:
  FreqVector() = default;
  explicit FreqVector(const std::vector<int>& coeffs);

  static FreqVector zero(std::size_t dim);

  /// Canonicalize a raw integer vector; sign is -1 iff the vector was negated.
  static std::pair<FreqVector, int> fold(const std::vector<int>& raw);
  static std::pair<FreqVector, int> fold(const FreqVector& raw);

  std::size_t dim() const { return dim_; }
  int operator[](std::size_t i) const { return c_[i]; }
  bool is_zero() const;
  bool is_canonical() const;
  FreqVector negated() const;

  /// Bit i set iff coefficient i is odd.
  unsigned parity() const;

  std::vector<int> coeffs() const;

  /// Componentwise sum/difference (no folding).
  FreqVector plus(const FreqVector& o) const;
  FreqVector minus(const FreqVector& o) const;

  std::string str() const;

  auto operator<=>(const FreqVector& o) const = default;

 private:
  std::array<std::int16_t, kMaxGenerators> c_{};
  std::uint8_t dim_ = 0;
};

/// Positive real generators plus the truncation knobs of one run.
///
/// The generators span the frequency lattice; coeff_bound and cutoff select
/// the finite Galerkin window.  Embeddings are signed; the frequency of a
/// canonical vector is the absolute value of its embedding (mixed-sign
/// vectors may embed negatively even in canonical form).
struct GeneratorBasis {
  std::vector<double> generators;  // strictly increasing, all > 0, rad/m
  int coeff_bound = 0;             // max |coefficient| per generator
  double cutoff = 0.0;             // max retained frequency, rad/m

  std::size_t dim() const { return generators.size(); }

  /// Signed sum of coeff*generator; no bound check.
  double embedding(const FreqVector& v) const;

  /// |embedding|, the nonnegative frequency of the mode.
  double frequency(const FreqVector& v) const;

  bool same_generators(const GeneratorBasis& o) const;

  /// Throws std::invalid_argument on any structural violation, including
  /// embedding collisions within the coeff_bound box (injectivity check).
  void validate() const;

  /// Same generators/coeff_bound with a different cutoff.
  GeneratorBasis with_cutoff(double c) const;
};

using BasisPtr = std::shared_ptr<const GeneratorBasis>;

BasisPtr make_basis(std::vector<double> generators, int coeff_bound, double cutoff);

/// Bound-checked embedding (the user-facing operation).
double embed(const GeneratorBasis& basis, const FreqVector& v);

enum class ModeKind { Mean, Cos, Sin, Excluded };

const char* to_string(ModeKind k);

/// One basis function of the truncated space: the mean, or cos/sin on a
/// canonical lattice vector.
struct ModeId {
  FreqVector vec;
  ModeKind kind = ModeKind::Mean;
  double freq = 0.0;  // cached |embedding|

  static ModeId mean(std::size_t dim);

  std::string str() const;

  friend bool operator==(const ModeId& a, const ModeId& b) {
    return a.kind == b.kind && a.vec == b.vec;
  }
};

/// Frequency-sequence pair encoded as parity classes over the lattice.
///
/// cos_parities is a subgroup of (Z/2)^d, sin_parities is empty or a single
/// nontrivial coset; together these give the sum/difference closure the
/// cos-on-alpha / sin-on-beta algebra needs.
struct AdmissiblePair {
  BasisPtr basis;
  std::set<unsigned> cos_parities;  // bit i = parity of coefficient i
  std::set<unsigned> sin_parities;
};

/// Classify a canonical vector: Mean for the zero vector, Cos/Sin by parity
/// class, Excluded otherwise.
ModeKind classify(const AdmissiblePair& pair, const FreqVector& v);

struct Violation {
  std::string law;
  std::string witness;
};

struct ValidationReport {
  bool valid = true;
  std::vector<Violation> violations;
  std::string summary() const;
};

/// Full admissibility check: (a) cos subgroup, (b) sin coset laws,
/// (c) a Cos frequency within cutoff distinct from every Sin frequency,
/// (d) injective embedding on the truncated box.
ValidationReport check_admissible(const AdmissiblePair& pair);

/// Structural subset of check_admissible: (a), (b), (d) but not the
/// cutoff-dependent witness (c).  Used as the precondition of enumeration.
ValidationReport check_structure(const AdmissiblePair& pair);

/// All modes of the pair with |coeffs| <= coeff_bound and frequency in
/// (0, cutoff], sorted by frequency (ties broken lexicographically), with
/// the Mean mode first.
std::vector<ModeId> enumerate_modes(const AdmissiblePair& pair);

}  // namespace apwave

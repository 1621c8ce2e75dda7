#include "apwave/freqset.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace apwave {

namespace {

constexpr std::int64_t kBoxEnumerationCap = 5'000'000;

std::string join_ints(const std::vector<int>& v) {
  std::ostringstream os;
  os << "(";
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) os << ",";
    os << v[i];
  }
  os << ")";
  return os.str();
}

std::string parity_str(unsigned p, std::size_t dim) {
  std::ostringstream os;
  os << "(";
  for (std::size_t i = 0; i < dim; ++i) {
    if (i) os << ",";
    os << ((p >> i) & 1u);
  }
  os << ")";
  return os.str();
}

}  // namespace

FreqVector::FreqVector(const std::vector<int>& coeffs) {
  if (coeffs.size() > kMaxGenerators)
    throw std::invalid_argument("FreqVector: more than " +
                                std::to_string(kMaxGenerators) + " coordinates");
  dim_ = static_cast<std::uint8_t>(coeffs.size());
  for (std::size_t i = 0; i < coeffs.size(); ++i) {
    if (coeffs[i] < std::numeric_limits<std::int16_t>::min() ||
        coeffs[i] > std::numeric_limits<std::int16_t>::max())
      throw std::invalid_argument("FreqVector: coefficient out of int16 range");
    c_[i] = static_cast<std::int16_t>(coeffs[i]);
  }
}

FreqVector FreqVector::zero(std::size_t dim) {
  return FreqVector(std::vector<int>(dim, 0));
}

std::pair<FreqVector, int> FreqVector::fold(const std::vector<int>& raw) {
  return fold(FreqVector(raw));
}

std::pair<FreqVector, int> FreqVector::fold(const FreqVector& raw) {
  for (std::size_t i = 0; i < raw.dim(); ++i) {
    if (raw[i] > 0) return {raw, +1};
    if (raw[i] < 0) return {raw.negated(), -1};
  }
  return {raw, +1};  // zero vector
}

bool FreqVector::is_zero() const {
  for (std::size_t i = 0; i < dim_; ++i)
    if (c_[i] != 0) return false;
  return true;
}

bool FreqVector::is_canonical() const {
  for (std::size_t i = 0; i < dim_; ++i) {
    if (c_[i] > 0) return true;
    if (c_[i] < 0) return false;
  }
  return true;
}

FreqVector FreqVector::negated() const {
  FreqVector r(*this);
  for (std::size_t i = 0; i < dim_; ++i)
    r.c_[i] = static_cast<std::int16_t>(-r.c_[i]);
  return r;
}

unsigned FreqVector::parity() const {
  unsigned p = 0;
  for (std::size_t i = 0; i < dim_; ++i)
    p |= static_cast<unsigned>(c_[i] & 1) << i;
  return p;
}

std::vector<int> FreqVector::coeffs() const {
  std::vector<int> out(dim_);
  for (std::size_t i = 0; i < dim_; ++i) out[i] = c_[i];
  return out;
}

FreqVector FreqVector::plus(const FreqVector& o) const {
  if (dim_ != o.dim_) throw std::invalid_argument("FreqVector: dimension mismatch");
  FreqVector r(*this);
  for (std::size_t i = 0; i < dim_; ++i)
    r.c_[i] = static_cast<std::int16_t>(r.c_[i] + o.c_[i]);
  return r;
}

FreqVector FreqVector::minus(const FreqVector& o) const {
  if (dim_ != o.dim_) throw std::invalid_argument("FreqVector: dimension mismatch");
  FreqVector r(*this);
  for (std::size_t i = 0; i < dim_; ++i)
    r.c_[i] = static_cast<std::int16_t>(r.c_[i] - o.c_[i]);
  return r;
}

std::string FreqVector::str() const { return join_ints(coeffs()); }

double GeneratorBasis::embedding(const FreqVector& v) const {
  double s = 0.0;
  for (std::size_t i = 0; i < dim(); ++i) s += v[i] * generators[i];
  return s;
}

double GeneratorBasis::frequency(const FreqVector& v) const {
  return std::abs(embedding(v));
}

bool GeneratorBasis::same_generators(const GeneratorBasis& o) const {
  return generators == o.generators;
}

void GeneratorBasis::validate() const {
  if (generators.empty())
    throw std::invalid_argument("basis: generator list is empty");
  if (generators.size() > kMaxGenerators)
    throw std::invalid_argument("basis: more than " +
                                std::to_string(kMaxGenerators) + " generators");
  for (std::size_t i = 0; i < generators.size(); ++i) {
    if (!(generators[i] > 0.0) || !std::isfinite(generators[i]))
      throw std::invalid_argument("basis: generator " + std::to_string(i) +
                                  " is not strictly positive");
    if (i > 0 && !(generators[i] > generators[i - 1]))
      throw std::invalid_argument("basis: generators not strictly increasing");
  }
  if (coeff_bound < 0)
    throw std::invalid_argument("basis: coeff_bound must be nonnegative");
  if (!(cutoff >= 0.0) || !std::isfinite(cutoff))
    throw std::invalid_argument("basis: cutoff must be finite and nonnegative");

  // Injectivity on the truncated box: distinct integer vectors must embed
  // at least kCollisionTol apart, otherwise modes alias.
  const std::size_t d = dim();
  std::int64_t box = 1;
  for (std::size_t i = 0; i < d; ++i) {
    box *= 2 * static_cast<std::int64_t>(coeff_bound) + 1;
    if (box > kBoxEnumerationCap)
      throw std::invalid_argument(
          "basis: coeff_bound too large for exhaustive collision check");
  }
  std::vector<std::pair<double, FreqVector>> embeds;
  embeds.reserve(static_cast<std::size_t>(box));
  std::vector<int> c(d, -coeff_bound);
  while (true) {
    FreqVector v(c);
    embeds.emplace_back(embedding(v), v);
    std::size_t i = 0;
    for (; i < d; ++i) {
      if (c[i] < coeff_bound) {
        ++c[i];
        break;
      }
      c[i] = -coeff_bound;
    }
    if (i == d) break;
  }
  std::sort(embeds.begin(), embeds.end(),
            [](const auto& a, const auto& b) { return a.first < b.first; });
  for (std::size_t i = 1; i < embeds.size(); ++i) {
    if (embeds[i].first - embeds[i - 1].first < kCollisionTol) {
      throw std::invalid_argument(
          "basis: embedding collision between " + embeds[i - 1].second.str() +
          " and " + embeds[i].second.str() + " (|delta| < 1e-9)");
    }
  }
}

GeneratorBasis GeneratorBasis::with_cutoff(double c) const {
  GeneratorBasis b(*this);
  b.cutoff = c;
  return b;
}

BasisPtr make_basis(std::vector<double> generators, int coeff_bound, double cutoff) {
  auto b = std::make_shared<GeneratorBasis>();
  b->generators = std::move(generators);
  b->coeff_bound = coeff_bound;
  b->cutoff = cutoff;
  b->validate();
  return b;
}

double embed(const GeneratorBasis& basis, const FreqVector& v) {
  if (v.dim() != basis.dim())
    throw std::invalid_argument("embed: vector dimension does not match basis");
  for (std::size_t i = 0; i < v.dim(); ++i)
    if (std::abs(v[i]) > basis.coeff_bound)
      throw std::invalid_argument("embed: coefficient " + std::to_string(v[i]) +
                                  " exceeds coeff_bound " +
                                  std::to_string(basis.coeff_bound));
  return basis.embedding(v);
}

const char* to_string(ModeKind k) {
  switch (k) {
    case ModeKind::Mean: return "mean";
    case ModeKind::Cos: return "cos";
    case ModeKind::Sin: return "sin";
    case ModeKind::Excluded: return "excluded";
  }
  return "?";
}

ModeId ModeId::mean(std::size_t dim) {
  return ModeId{FreqVector::zero(dim), ModeKind::Mean, 0.0};
}

std::string ModeId::str() const {
  std::ostringstream os;
  os << to_string(kind) << vec.str();
  return os.str();
}

ModeKind classify(const AdmissiblePair& pair, const FreqVector& v) {
  if (v.is_zero()) return ModeKind::Mean;
  const unsigned p = v.parity();
  if (pair.cos_parities.count(p)) return ModeKind::Cos;
  if (pair.sin_parities.count(p)) return ModeKind::Sin;
  return ModeKind::Excluded;
}

std::string ValidationReport::summary() const {
  if (valid) return "valid";
  std::ostringstream os;
  os << violations.size() << " violation(s):";
  for (const auto& v : violations) os << "\n  [" << v.law << "] " << v.witness;
  return os.str();
}

namespace {

void check_parity_range(const AdmissiblePair& pair, ValidationReport& rep) {
  const unsigned limit = 1u << pair.basis->dim();
  for (unsigned p : pair.cos_parities)
    if (p >= limit)
      rep.violations.push_back({"parity-range",
                                "cos parity " + std::to_string(p) +
                                    " has more bits than generators"});
  for (unsigned p : pair.sin_parities)
    if (p >= limit)
      rep.violations.push_back({"parity-range",
                                "sin parity " + std::to_string(p) +
                                    " has more bits than generators"});
}

// Reports the first witness of "a xor b lands outside target".
bool xor_closed(const std::set<unsigned>& lhs, const std::set<unsigned>& rhs,
                const std::set<unsigned>& target, std::size_t d,
                const char* law, const char* where, ValidationReport& rep) {
  for (unsigned a : lhs)
    for (unsigned b : rhs)
      if (!target.count(a ^ b)) {
        rep.violations.push_back(
            {law, parity_str(a, d) + " + " + parity_str(b, d) + " -> " +
                      parity_str(a ^ b, d) + " not in " + where});
        return false;
      }
  return true;
}

void check_group_laws(const AdmissiblePair& pair, ValidationReport& rep) {
  const std::size_t d = pair.basis->dim();
  const auto& cos = pair.cos_parities;
  if (!cos.count(0u))
    rep.violations.push_back({"cos-identity", "cos class lacks the zero parity"});
  xor_closed(cos, cos, cos, d, "cos-closure", "cos", rep);
}

void check_coset_laws(const AdmissiblePair& pair, ValidationReport& rep) {
  const std::size_t d = pair.basis->dim();
  const auto& cos = pair.cos_parities;
  const auto& sin = pair.sin_parities;
  if (sin.empty()) return;

  xor_closed(sin, sin, cos, d, "sin-sin-closure", "cos", rep);
  xor_closed(cos, sin, sin, d, "cos-sin-closure", "sin", rep);
  for (unsigned p : sin)
    if (cos.count(p)) {
      rep.violations.push_back(
          {"class-overlap", "parity " + parity_str(p, d) +
                                " lies in both cos and sin classes"});
      return;
    }
  // Coset completeness: sin must be exactly s0 ^ cos.
  const unsigned s0 = *sin.begin();
  std::set<unsigned> coset;
  for (unsigned c : cos) coset.insert(s0 ^ c);
  if (coset != sin)
    rep.violations.push_back(
        {"sin-coset", "sin class is not a single coset of the cos subgroup"});
}

}  // namespace

ValidationReport check_structure(const AdmissiblePair& pair) {
  ValidationReport rep;
  if (!pair.basis) {
    rep.valid = false;
    rep.violations.push_back({"basis", "missing generator basis"});
    return rep;
  }
  try {
    pair.basis->validate();
  } catch (const std::invalid_argument& e) {
    rep.violations.push_back({"embedding-injectivity", e.what()});
  }
  check_parity_range(pair, rep);
  if (rep.violations.empty()) {
    check_group_laws(pair, rep);
    check_coset_laws(pair, rep);
  }
  rep.valid = rep.violations.empty();
  return rep;
}

ValidationReport check_admissible(const AdmissiblePair& pair) {
  ValidationReport rep = check_structure(pair);
  if (!rep.valid) return rep;

  // Condition (i): within the cutoff there must be a Cos frequency that no
  // Sin frequency aliases.  With injective embedding and disjoint parity
  // classes any Cos mode qualifies; the check stays constructive.
  const auto modes = enumerate_modes(pair);
  std::vector<double> sin_freqs;
  for (const auto& m : modes)
    if (m.kind == ModeKind::Sin) sin_freqs.push_back(m.freq);
  bool found = false;
  for (const auto& m : modes) {
    if (m.kind != ModeKind::Cos) continue;
    bool clashes = false;
    for (double f : sin_freqs)
      if (std::abs(f - m.freq) < kCollisionTol) clashes = true;
    if (!clashes) {
      found = true;
      break;
    }
  }
  if (!found) {
    rep.valid = false;
    rep.violations.push_back(
        {"alpha-witness",
         "no Cos frequency within cutoff is distinct from every Sin frequency"});
  }
  return rep;
}

std::vector<ModeId> enumerate_modes(const AdmissiblePair& pair) {
  ValidationReport rep = check_structure(pair);
  if (!rep.valid)
    throw std::invalid_argument("enumerate: pair is not admissible: " +
                                rep.summary());
  const GeneratorBasis& basis = *pair.basis;
  const std::size_t d = basis.dim();
  const int B = basis.coeff_bound;

  std::vector<ModeId> out;
  out.push_back(ModeId::mean(d));

  std::vector<int> c(d, -B);
  while (true) {
    FreqVector v(c);
    if (v.is_canonical() && !v.is_zero()) {
      const double f = basis.frequency(v);
      if (f > 0.0 && f <= basis.cutoff) {
        const ModeKind k = classify(pair, v);
        if (k == ModeKind::Cos || k == ModeKind::Sin)
          out.push_back(ModeId{v, k, f});
      }
    }
    std::size_t i = 0;
    for (; i < d; ++i) {
      if (c[i] < B) {
        ++c[i];
        break;
      }
      c[i] = -B;
    }
    if (i == d) break;
  }

  std::sort(out.begin() + 1, out.end(), [](const ModeId& a, const ModeId& b) {
    if (a.freq != b.freq) return a.freq < b.freq;
    return a.vec < b.vec;
  });
  return out;
}

}  // namespace apwave

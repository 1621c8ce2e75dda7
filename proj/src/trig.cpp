#include "apwave/trig.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace apwave {

namespace {

void require_compatible(const TrigSum& u, const TrigSum& v) {
  if (!u.compatible(v))
    throw std::invalid_argument("trig: basis mismatch between operands");
}

double half_mass_sq(double coeff) { return 0.5 * coeff * coeff; }

}  // namespace

TrigSum TrigSum::harmonic(BasisPtr basis, const FreqVector& vec, ModeKind kind,
                          double coeff) {
  TrigSum u(std::move(basis));
  u.accumulate(kind, vec, coeff);
  u.sparsify();
  return u;
}

double TrigSum::coeff(ModeKind kind, const FreqVector& vec) const {
  if (kind == ModeKind::Mean) return mean_;
  const auto& m = (kind == ModeKind::Cos) ? cos_ : sin_;
  auto it = m.find(vec);
  return it == m.end() ? 0.0 : it->second;
}

double TrigSum::coeff(const ModeId& mode) const { return coeff(mode.kind, mode.vec); }

void TrigSum::accumulate(ModeKind kind, const FreqVector& raw, double value) {
  if (value == 0.0) return;
  if (kind == ModeKind::Mean) {
    mean_ += value;
    return;
  }
  auto [vec, sign] = FreqVector::fold(raw);
  if (vec.is_zero()) {
    if (kind == ModeKind::Cos) mean_ += value;  // cos(0) = 1
    return;                                     // sin(0) = 0
  }
  if (kind == ModeKind::Cos)
    cos_[vec] += value;
  else
    sin_[vec] += sign * value;
}

void TrigSum::sparsify() {
  for (auto it = cos_.begin(); it != cos_.end();)
    it = (std::abs(it->second) < kDropTol) ? cos_.erase(it) : std::next(it);
  for (auto it = sin_.begin(); it != sin_.end();)
    it = (std::abs(it->second) < kDropTol) ? sin_.erase(it) : std::next(it);
}

bool TrigSum::compatible(const TrigSum& o) const {
  if (!basis_ || !o.basis_) return false;
  if (basis_ == o.basis_) return true;
  return basis_->same_generators(*o.basis_) && basis_->cutoff == o.basis_->cutoff;
}

TrigSum TrigSum::rebased(const BasisPtr& nb) const {
  if (!nb || !basis_ || !nb->same_generators(*basis_))
    throw std::invalid_argument("rebase: generator mismatch");
  TrigSum r(nb, mean_);
  r.trunc_ = trunc_;
  double dropped_sq = 0.0;
  for (const auto& [v, c] : cos_) {
    if (nb->frequency(v) <= nb->cutoff)
      r.cos_[v] = c;
    else
      dropped_sq += half_mass_sq(c);
  }
  for (const auto& [v, c] : sin_) {
    if (nb->frequency(v) <= nb->cutoff)
      r.sin_[v] = c;
    else
      dropped_sq += half_mass_sq(c);
  }
  r.trunc_ += std::sqrt(dropped_sq);
  return r;
}

double TrigSum::sup_bound() const {
  double s = std::abs(mean_);
  for (const auto& [v, c] : cos_) s += std::abs(c);
  for (const auto& [v, c] : sin_) s += std::abs(c);
  return s;
}

TrigSum add(const TrigSum& u, const TrigSum& v) {
  require_compatible(u, v);
  TrigSum r = u;
  r.mean_ += v.mean_;
  for (const auto& [vec, c] : v.cos_) r.cos_[vec] += c;
  for (const auto& [vec, c] : v.sin_) r.sin_[vec] += c;
  r.trunc_ = u.trunc_ + v.trunc_;
  r.sparsify();
  return r;
}

TrigSum sub(const TrigSum& u, const TrigSum& v) { return add(u, scale(-1.0, v)); }

TrigSum scale(double c, const TrigSum& u) {
  TrigSum r = u;
  r.mean_ *= c;
  for (auto& [vec, val] : r.cos_) val *= c;
  for (auto& [vec, val] : r.sin_) val *= c;
  r.trunc_ = std::abs(c) * u.trunc_;
  r.sparsify();
  return r;
}

TrigSum mul(const TrigSum& u, const TrigSum& v) {
  require_compatible(u, v);
  const double cutoff = u.basis_->cutoff;
  TrigSum r(u.basis_);

  r.mean_ = u.mean_ * v.mean_;
  for (const auto& [vec, c] : v.cos_) r.cos_[vec] += u.mean_ * c;
  for (const auto& [vec, c] : v.sin_) r.sin_[vec] += u.mean_ * c;
  for (const auto& [vec, c] : u.cos_) r.cos_[vec] += v.mean_ * c;
  for (const auto& [vec, c] : u.sin_) r.sin_[vec] += v.mean_ * c;

  // Product-to-sum on lattice vectors; folding keeps everything canonical.
  for (const auto& [p, a] : u.cos_) {
    for (const auto& [q, b] : v.cos_) {
      const double half = 0.5 * a * b;
      r.accumulate(ModeKind::Cos, p.plus(q), half);
      r.accumulate(ModeKind::Cos, p.minus(q), half);
    }
    for (const auto& [q, b] : v.sin_) {
      const double half = 0.5 * a * b;
      r.accumulate(ModeKind::Sin, p.plus(q), half);
      r.accumulate(ModeKind::Sin, p.minus(q), -half);
    }
  }
  for (const auto& [p, a] : u.sin_) {
    for (const auto& [q, b] : v.cos_) {
      const double half = 0.5 * a * b;
      r.accumulate(ModeKind::Sin, p.plus(q), half);
      r.accumulate(ModeKind::Sin, p.minus(q), half);
    }
    for (const auto& [q, b] : v.sin_) {
      const double half = 0.5 * a * b;
      r.accumulate(ModeKind::Cos, p.minus(q), half);
      r.accumulate(ModeKind::Cos, p.plus(q), -half);
    }
  }

  // Truncate after full accumulation so cancellations are not lost.
  double dropped_sq = 0.0;
  for (auto it = r.cos_.begin(); it != r.cos_.end();) {
    if (u.basis_->frequency(it->first) > cutoff) {
      dropped_sq += half_mass_sq(it->second);
      it = r.cos_.erase(it);
    } else {
      ++it;
    }
  }
  for (auto it = r.sin_.begin(); it != r.sin_.end();) {
    if (u.basis_->frequency(it->first) > cutoff) {
      dropped_sq += half_mass_sq(it->second);
      it = r.sin_.erase(it);
    } else {
      ++it;
    }
  }
  r.trunc_ = std::sqrt(dropped_sq) + u.trunc_ * norm_b2(v) + v.trunc_ * norm_b2(u);
  r.sparsify();
  return r;
}

TrigSum derivative(const TrigSum& u) {
  TrigSum r(u.basis_);
  for (const auto& [v, a] : u.cos_)
    r.sin_[v] = -a * u.basis_->embedding(v);
  for (const auto& [v, b] : u.sin_)
    r.cos_[v] = b * u.basis_->embedding(v);
  r.trunc_ = u.trunc_;  // receipt carried, not amplified
  r.sparsify();
  return r;
}

double mean(const TrigSum& u) { return u.mean_value(); }

double inner(const TrigSum& u, const TrigSum& v) {
  require_compatible(u, v);
  double s = u.mean_value() * v.mean_value();
  for (const auto& [vec, a] : u.cos_terms()) {
    auto it = v.cos_terms().find(vec);
    if (it != v.cos_terms().end()) s += 0.5 * a * it->second;
  }
  for (const auto& [vec, b] : u.sin_terms()) {
    auto it = v.sin_terms().find(vec);
    if (it != v.sin_terms().end()) s += 0.5 * b * it->second;
  }
  return s;
}

double norm_b2(const TrigSum& u) {
  double s = u.mean_value() * u.mean_value();
  for (const auto& [vec, a] : u.cos_terms()) s += 0.5 * a * a;
  for (const auto& [vec, b] : u.sin_terms()) s += 0.5 * b * b;
  return std::sqrt(s);
}

std::vector<TermView> term_views(const TrigSum& u) {
  std::map<FreqVector, TermView> merged;
  const GeneratorBasis& basis = *u.basis();
  for (const auto& [vec, a] : u.cos_terms()) {
    TermView& t = merged[vec];
    t.vec = vec;
    t.a = a;
  }
  for (const auto& [vec, b] : u.sin_terms()) {
    TermView& t = merged[vec];
    t.vec = vec;
    const double e = basis.embedding(vec);
    t.b = (e < 0.0) ? -b : b;
  }
  std::vector<TermView> out;
  out.reserve(merged.size());
  for (auto& [vec, t] : merged) {
    t.freq = basis.frequency(vec);
    out.push_back(t);
  }
  std::sort(out.begin(), out.end(), [](const TermView& x, const TermView& y) {
    if (x.freq != y.freq) return x.freq < y.freq;
    return x.vec < y.vec;
  });
  return out;
}

double eval(const TrigSum& u, double x) {
  double s = u.mean_value();
  for (const auto& t : term_views(u))
    s += t.a * std::cos(t.freq * x) + t.b * std::sin(t.freq * x);
  return s;
}

std::vector<double> eval_grid(const TrigSum& u, const std::vector<double>& xs) {
  const auto terms = term_views(u);
  std::vector<double> out(xs.size());
  for (std::size_t i = 0; i < xs.size(); ++i) {
    double s = u.mean_value();
    for (const auto& t : terms)
      s += t.a * std::cos(t.freq * xs[i]) + t.b * std::sin(t.freq * xs[i]);
    out[i] = s;
  }
  return out;
}

std::pair<TrigSum, double> project_zero_mean(const TrigSum& u, const AdmissiblePair& pair) {
  if (!u.basis() || !pair.basis || !u.basis()->same_generators(*pair.basis))
    throw std::invalid_argument("project_zero_mean: generator mismatch");
  TrigSum r(u.basis());
  double dropped_sq = u.mean_value() * u.mean_value();
  for (const auto& [vec, a] : u.cos_terms()) {
    if (classify(pair, vec) == ModeKind::Cos)
      r.accumulate(ModeKind::Cos, vec, a);
    else
      dropped_sq += half_mass_sq(a);
  }
  for (const auto& [vec, b] : u.sin_terms()) {
    if (classify(pair, vec) == ModeKind::Sin)
      r.accumulate(ModeKind::Sin, vec, b);
    else
      dropped_sq += half_mass_sq(b);
  }
  r.add_truncation_mass(u.truncation_mass());
  return {r, std::sqrt(dropped_sq)};
}

std::pair<TrigSum, double> truncate_at(const TrigSum& u, double cutoff) {
  TrigSum r(u.basis(), u.mean_value());
  double dropped_sq = 0.0;
  for (const auto& [vec, a] : u.cos_terms()) {
    if (u.basis()->frequency(vec) <= cutoff)
      r.accumulate(ModeKind::Cos, vec, a);
    else
      dropped_sq += half_mass_sq(a);
  }
  for (const auto& [vec, b] : u.sin_terms()) {
    if (u.basis()->frequency(vec) <= cutoff)
      r.accumulate(ModeKind::Sin, vec, b);
    else
      dropped_sq += half_mass_sq(b);
  }
  r.add_truncation_mass(u.truncation_mass());
  return {r, std::sqrt(dropped_sq)};
}

}  // namespace apwave

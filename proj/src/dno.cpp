#include "apwave/dno.hpp"

#include <cmath>
#include <stdexcept>

namespace apwave {

void StripGeometry::validate() const {
  if (!(h > 0.0) || !std::isfinite(h))
    throw std::invalid_argument("strip: depth h must be strictly positive");
}

double dn_multiplier(const StripGeometry& strip, double k) {
  strip.validate();
  if (k < 0.0) throw std::invalid_argument("dn_multiplier: k must be >= 0");
  if (k == 0.0) return 1.0 / strip.h;
  // k/tanh(kh) is overflow-free: tanh saturates to 1 for large kh and
  // tanh(kh) ~ kh for tiny kh, reproducing the 1/h limit.
  return k / std::tanh(k * strip.h);
}

TrigSum dn_apply(const StripGeometry& strip, const TrigSum& w) {
  strip.validate();
  TrigSum r(w.basis(), w.mean_value() / strip.h);
  const GeneratorBasis& basis = *w.basis();
  for (const auto& [vec, a] : w.cos_terms())
    r.accumulate(ModeKind::Cos, vec, a * dn_multiplier(strip, basis.frequency(vec)));
  for (const auto& [vec, b] : w.sin_terms())
    r.accumulate(ModeKind::Sin, vec, b * dn_multiplier(strip, basis.frequency(vec)));
  r.add_truncation_mass(w.truncation_mass());
  r.sparsify();
  return r;
}

// Both ratios are computed from a = k(y+h), b = kh with 0 <= a <= b:
//   sinh(a)/sinh(b) = e^{a-b} expm1(-2a)/expm1(-2b)
//   cosh(a)/sinh(b) = e^{a-b} (1 + e^{-2a})/(-expm1(-2b))
// so nothing overflows no matter how large kh gets.

double sinh_ratio(double k, double y, double h) {
  const double a = k * (y + h);
  const double b = k * h;
  if (a == 0.0) return 0.0;
  return std::exp(a - b) * std::expm1(-2.0 * a) / std::expm1(-2.0 * b);
}

double cosh_ratio(double k, double y, double h) {
  const double a = k * (y + h);
  const double b = k * h;
  return std::exp(a - b) * (1.0 + std::exp(-2.0 * a)) / (-std::expm1(-2.0 * b));
}

namespace {

void check_y(const StripGeometry& strip, double y) {
  if (y < -strip.h || y > 0.0)
    throw std::invalid_argument("extension: y outside [-h, 0]");
}

}  // namespace

double extend(const StripGeometry& strip, const TrigSum& w, double x, double y) {
  strip.validate();
  check_y(strip, y);
  double s = w.mean_value() / strip.h * (y + strip.h);
  for (const auto& t : term_views(w)) {
    const double ratio = sinh_ratio(t.freq, y, strip.h);
    s += ratio * (t.a * std::cos(t.freq * x) + t.b * std::sin(t.freq * x));
  }
  return s;
}

double conjugate_extend(const StripGeometry& strip, const TrigSum& w, double x,
                        double y) {
  strip.validate();
  check_y(strip, y);
  double s = w.mean_value() / strip.h * x;
  for (const auto& t : term_views(w)) {
    const double ratio = cosh_ratio(t.freq, y, strip.h);
    s += ratio * (t.a * std::sin(t.freq * x) - t.b * std::cos(t.freq * x));
  }
  return s;
}

}  // namespace apwave

#pragma once

#include "apwave/trig.hpp"

namespace apwave {

/// Conformal strip R_h = { (x,y) : -h < y < 0 }.
struct StripGeometry {
  double h = 1.0;  // conformal mean depth, m

  void validate() const;
};

/// Diagonal symbol of the strip Dirichlet-Neumann map: k*coth(k h) for
/// k > 0, continued to 1/h at k = 0.
double dn_multiplier(const StripGeometry& strip, double k);

/// Apply the Dirichlet-Neumann operator mode-wise: the mean maps to mean/h,
/// a frequency-k cos or sin mode is scaled by k*coth(k h).
///
/// Note: the sin branch uses the same multiplier as the cos branch, as the
/// sinh-ratio harmonic extension forces.
TrigSum dn_apply(const StripGeometry& strip, const TrigSum& w);

/// sinh(k(y+h))/sinh(k h) evaluated overflow-free for any k > 0, y in [-h,0].
double sinh_ratio(double k, double y, double h);

/// cosh(k(y+h))/sinh(k h), same domain.
double cosh_ratio(double k, double y, double h);

/// Harmonic extension W of boundary data w: W(x,0) = w(x), W(x,-h) = 0.
double extend(const StripGeometry& strip, const TrigSum& w, double x, double y);

/// Harmonic conjugate U of the extension V of w, normalized so that
/// U - (mean(w)/h) x is almost periodic with zero mean; (U,V) satisfies the
/// Cauchy-Riemann equations U_x = V_y, U_y = -V_x.
double conjugate_extend(const StripGeometry& strip, const TrigSum& w, double x,
                        double y);

}  // namespace apwave

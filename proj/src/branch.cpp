#include "apwave/branch.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <numbers>
#include <set>
#include <sstream>

namespace apwave {

namespace {

constexpr int kMinSurfaceGrid = 4096;
constexpr int kMaxHalvings = 6;

double min_surface_value(const TrigSum& w) {
  const double g1 = w.basis()->generators.front();
  const double window = 2.0 * std::numbers::pi / g1;
  double lo = std::numeric_limits<double>::infinity();
  const auto terms = term_views(w);
  for (int i = 0; i < kMinSurfaceGrid; ++i) {
    const double x = window * i / kMinSurfaceGrid;
    double v = w.mean_value();
    for (const auto& t : terms)
      v += t.a * std::cos(t.freq * x) + t.b * std::sin(t.freq * x);
    lo = std::min(lo, v);
  }
  return lo;
}

// Square Newton system around one pinned amplitude: unknowns
// [lambda, mu, w coefficients except k0], equations [mean row, all modes].
class BranchSolver {
 public:
  BranchSolver(const WaveParams& p, const BranchConfig& cfg)
      : params_(p), cfg_(cfg), sys_(p, cfg.effective_pair()) {
    const auto& modes = sys_.modes();
    k0_index_ = -1;
    for (std::size_t i = 0; i < modes.size(); ++i)
      if (modes[i] == cfg.k0) k0_index_ = static_cast<int>(i);
    if (k0_index_ < 0)
      throw std::invalid_argument("branch: k0 " + cfg.k0.str() +
                                  " is not an enumerated mode of the pair");
    k0_freq_ = modes[static_cast<std::size_t>(k0_index_)].freq;
  }

  const GalerkinSystem& system() const { return sys_; }
  double k0_freq() const { return k0_freq_; }

  double lambda_star() const {
    auto [plus, minus] = bifurcation_lambdas(params_, k0_freq_);
    return cfg_.root_sign >= 0 ? plus : minus;
  }

  BranchPoint make_seed() const {
    const double ls = lambda_star();
    auto hits = resonance_scan(params_, ls, sys_.pair(), cfg_.resonance_tol);
    const bool only_k0 = hits.size() == 1 && hits.front() == cfg_.k0;
    if (!only_k0) {
      std::ostringstream os;
      os << "branch: kernel at lambda* = " << ls << " is not the single mode "
         << cfg_.k0.str() << "; resonant modes:";
      for (const auto& m : hits) os << " " << m.str();
      throw ResonanceError(os.str(), hits);
    }
    BranchPoint pt;
    pt.s = 0.0;
    pt.lambda = ls;
    pt.mu = 0.0;
    pt.w = TrigSum(sys_.band_basis());
    pt.residual_norm = 0.0;
    pt.newton_iters = 0;
    pt.truncation_mass = 0.0;
    pt.min_surface = 0.0;
    return pt;
  }

  // State vector layout: x[0]=lambda, x[1]=mu, x[2..]=free mode coefficients.
  Eigen::VectorXd pack(const TrialState& st) const {
    const Eigen::VectorXd c = sys_.pack_w(st.w);
    Eigen::VectorXd x(1 + c.size());
    x[0] = st.lambda;
    x[1] = st.mu;
    Eigen::Index j = 2;
    for (Eigen::Index i = 0; i < c.size(); ++i)
      if (i != k0_index_) x[j++] = c[i];
    return x;
  }

  TrialState unpack(const Eigen::VectorXd& x, double s) const {
    Eigen::VectorXd c(sys_.n_modes());
    Eigen::Index j = 2;
    for (Eigen::Index i = 0; i < c.size(); ++i)
      c[i] = (i == k0_index_) ? s : x[j++];
    TrialState st;
    st.lambda = x[0];
    st.mu = x[1];
    st.w = sys_.make_w(c);
    // Re-pin: make_w sparsifies, but s >= ds stays far above the drop tol.
    return st;
  }

  Eigen::VectorXd residual_of(const Eigen::VectorXd& x, double s,
                              double* mass = nullptr) const {
    return sys_.residual(unpack(x, s), mass);
  }

  Eigen::MatrixXd jacobian(const Eigen::VectorXd& x, double s,
                           const Eigen::VectorXd& r0) const {
    const Eigen::Index n = x.size();
    Eigen::MatrixXd J(n, n);
    for (Eigen::Index col = 0; col < n; ++col) {
      const double step = std::max(1e-7, 1e-7 * std::abs(x[col]));
      Eigen::VectorXd xp = x;
      xp[col] += step;
      J.col(col) = (residual_of(xp, s) - r0) / step;
    }
    return J;
  }

  BranchPoint correct(const TrialState& guess, double s) const {
    Eigen::VectorXd x = pack(guess);
    double mass = 0.0;
    Eigen::VectorXd r = residual_of(x, s, &mass);
    double rn = sys_.norm_b2(r);
    int iters = 0;
    while (rn > cfg_.newton_tol) {
      if (iters >= cfg_.newton_max_iter)
        throw ConvergenceError("newton: no convergence after " +
                                   std::to_string(iters) + " iterations at s = " +
                                   std::to_string(s),
                               s);
      const Eigen::MatrixXd J = jacobian(x, s, r);
      Eigen::FullPivLU<Eigen::MatrixXd> lu(J);
      if (!lu.isInvertible())
        throw ResonanceError(
            "newton: singular Jacobian at s = " + std::to_string(s), {});
      const Eigen::VectorXd d = lu.solve(-r);

      double alpha = 1.0;
      bool accepted = false;
      for (int halving = 0; halving <= kMaxHalvings; ++halving) {
        double mass_try = 0.0;
        const Eigen::VectorXd x_try = x + alpha * d;
        const Eigen::VectorXd r_try = residual_of(x_try, s, &mass_try);
        const double rn_try = sys_.norm_b2(r_try);
        if (rn_try < rn) {
          x = x_try;
          r = r_try;
          rn = rn_try;
          mass = mass_try;
          accepted = true;
          break;
        }
        alpha *= 0.5;
      }
      ++iters;
      if (!accepted)
        throw ConvergenceError(
            "newton: damping failed to reduce the residual at s = " +
                std::to_string(s),
            s);
    }

    const TrialState st = unpack(x, s);
    BranchPoint pt;
    pt.s = s;
    pt.lambda = st.lambda;
    pt.mu = st.mu;
    pt.w = st.w;
    pt.residual_norm = rn;
    pt.newton_iters = iters;
    pt.truncation_mass = mass;
    pt.min_surface = min_surface_value(st.w);
    if (pt.min_surface <= -params_.h)
      throw ConvergenceError("branch: surface reached the bed at s = " +
                                 std::to_string(s),
                             s);
    return pt;
  }

 private:
  WaveParams params_;
  BranchConfig cfg_;
  GalerkinSystem sys_;
  int k0_index_ = -1;
  double k0_freq_ = 0.0;
};

TrialState state_of(const BranchPoint& pt) {
  TrialState st;
  st.lambda = pt.lambda;
  st.mu = pt.mu;
  st.w = pt.w;
  return st;
}

// Linear extrapolation of (lambda, mu, w) from the last two points.
TrialState predict(const GalerkinSystem& sys, const BranchPoint& p0,
                   const BranchPoint& p1, double s) {
  if (p1.s == p0.s) return state_of(p1);
  const double t = (s - p1.s) / (p1.s - p0.s);
  TrialState st;
  st.lambda = p1.lambda + t * (p1.lambda - p0.lambda);
  st.mu = p1.mu + t * (p1.mu - p0.mu);
  const Eigen::VectorXd c0 = sys.pack_w(p0.w);
  const Eigen::VectorXd c1 = sys.pack_w(p1.w);
  st.w = sys.make_w(c1 + t * (c1 - c0));
  return st;
}

// One signed sweep from the seed to sign*s_max.
void sweep(const BranchSolver& solver, const BranchConfig& cfg,
           const BranchPoint& seed_pt, int sign, std::vector<BranchPoint>& out) {
  const double ds = sign * cfg.s_max / cfg.n_steps;
  const double ds_min = std::abs(ds) / 64.0;

  std::deque<double> targets;
  for (int i = 1; i <= cfg.n_steps; ++i) targets.push_back(i * ds);

  BranchPoint prev2 = seed_pt;
  BranchPoint prev = seed_pt;
  while (!targets.empty()) {
    const double s = targets.front();
    TrialState guess = (prev.s == prev2.s)
                           ? state_of(prev)
                           : predict(solver.system(), prev2, prev, s);
    try {
      BranchPoint pt = solver.correct(guess, s);
      out.push_back(pt);
      prev2 = prev;
      prev = pt;
      targets.pop_front();
    } catch (const ConvergenceError&) {
      const double gap = std::abs(s - prev.s);
      if (gap / 2.0 < ds_min)
        throw ContinuationError(
            "continuation: step floor reached near s = " + std::to_string(s),
            out, s);
      targets.push_front(prev.s + 0.5 * (s - prev.s));
    }
  }
}

}  // namespace

void BranchConfig::validate() const {
  if (!(s_max >= 0.0)) throw std::invalid_argument("branch: s_max must be >= 0");
  if (n_steps < 1) throw std::invalid_argument("branch: n_steps must be >= 1");
  if (!(newton_tol > 0.0))
    throw std::invalid_argument("branch: newton_tol must be > 0");
  if (newton_max_iter < 1)
    throw std::invalid_argument("branch: newton_max_iter must be >= 1");
  if (k0.kind != ModeKind::Cos && k0.kind != ModeKind::Sin)
    throw std::invalid_argument("branch: k0 must be a Cos or Sin mode");
  if (cutoff < 0.0) throw std::invalid_argument("branch: cutoff must be >= 0");
}

AdmissiblePair BranchConfig::effective_pair() const {
  if (cutoff == 0.0 || cutoff == pair.basis->cutoff) return pair;
  AdmissiblePair p = pair;
  p.basis = std::make_shared<GeneratorBasis>(pair.basis->with_cutoff(cutoff));
  return p;
}

BranchPoint seed(const WaveParams& p, const BranchConfig& cfg) {
  cfg.validate();
  return BranchSolver(p, cfg).make_seed();
}

BranchPoint newton_correct(const WaveParams& p, const BranchConfig& cfg,
                           const TrialState& guess, double s) {
  cfg.validate();
  return BranchSolver(p, cfg).correct(guess, s);
}

std::vector<BranchPoint> continue_branch(const WaveParams& p,
                                         const BranchConfig& cfg) {
  cfg.validate();
  BranchSolver solver(p, cfg);
  BranchPoint seed_pt = solver.make_seed();

  std::vector<BranchPoint> pts{seed_pt};
  if (cfg.s_max > 0.0) {
    sweep(solver, cfg, seed_pt, +1, pts);
    if (cfg.include_negative) sweep(solver, cfg, seed_pt, -1, pts);
  }
  std::sort(pts.begin(), pts.end(),
            [](const BranchPoint& a, const BranchPoint& b) { return a.s < b.s; });
  return pts;
}

int integer_rank(const std::vector<FreqVector>& vectors) {
  if (vectors.empty()) return 0;
  const std::size_t d = vectors.front().dim();
  std::vector<std::vector<long long>> m;
  for (const auto& v : vectors) {
    std::vector<long long> row(d);
    for (std::size_t i = 0; i < d; ++i) row[i] = v[i];
    m.push_back(std::move(row));
  }
  // Fraction-free Gaussian elimination; entries stay exact.
  int rank = 0;
  for (std::size_t col = 0; col < d && rank < static_cast<int>(m.size()); ++col) {
    std::size_t pivot = m.size();
    for (std::size_t r = rank; r < m.size(); ++r)
      if (m[r][col] != 0) {
        pivot = r;
        break;
      }
    if (pivot == m.size()) continue;
    std::swap(m[static_cast<std::size_t>(rank)], m[pivot]);
    const auto& prow = m[static_cast<std::size_t>(rank)];
    for (std::size_t r = rank + 1; r < m.size(); ++r) {
      if (m[r][col] == 0) continue;
      const long long a = prow[col], b = m[r][col];
      for (std::size_t j = 0; j < d; ++j) m[r][j] = a * m[r][j] - b * prow[j];
    }
    ++rank;
  }
  return rank;
}

namespace {

std::vector<FreqVector> support_of(const TrigSum& w) {
  std::vector<FreqVector> out;
  for (const auto& [vec, c] : w.cos_terms()) out.push_back(vec);
  for (const auto& [vec, c] : w.sin_terms()) out.push_back(vec);
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

std::vector<FreqVector> close_under_product(const std::vector<FreqVector>& a,
                                            const std::vector<FreqVector>& b) {
  std::set<FreqVector> out(a.begin(), a.end());
  for (const auto& u : a)
    for (const auto& v : b) {
      auto [sum, s1] = FreqVector::fold(u.plus(v));
      auto [diff, s2] = FreqVector::fold(u.minus(v));
      if (!sum.is_zero()) out.insert(sum);
      if (!diff.is_zero()) out.insert(diff);
    }
  return {out.begin(), out.end()};
}

// First pair of rationally independent vectors in the list, if any.
std::vector<FreqVector> rank2_witness(const std::vector<FreqVector>& vecs) {
  for (std::size_t i = 0; i < vecs.size(); ++i)
    for (std::size_t j = i + 1; j < vecs.size(); ++j)
      if (integer_rank({vecs[i], vecs[j]}) == 2) return {vecs[i], vecs[j]};
  return {};
}

double sin_mass(const TrigSum& w) {
  double s = 0.0;
  for (const auto& [vec, b] : w.sin_terms()) s += 0.5 * b * b;
  return std::sqrt(s);
}

}  // namespace

NonuniquenessReport nonuniqueness_demo(const WaveParams& p,
                                       const DemoOptions& opts) {
  const double cutoff = opts.cutoff > 0.0 ? opts.cutoff : 6.0;
  const auto basis =
      make_basis({1.0}, static_cast<int>(std::ceil(cutoff)), cutoff);

  // Same generators, two admissible structures: all integers on cos (the
  // even periodic family) versus even-on-cos / odd-on-sin.
  AdmissiblePair cos_pair{basis, {0u, 1u}, {}};
  AdmissiblePair sin_pair{basis, {0u}, {1u}};

  BranchConfig cfg_cos;
  cfg_cos.pair = cos_pair;
  cfg_cos.k0 = ModeId{FreqVector({1}), ModeKind::Cos, 1.0};
  cfg_cos.root_sign = -1;
  cfg_cos.s_max = opts.s_max;
  cfg_cos.n_steps = opts.n_steps;
  cfg_cos.newton_tol = opts.newton_tol;
  cfg_cos.newton_max_iter = opts.newton_max_iter;

  BranchConfig cfg_sin = cfg_cos;
  cfg_sin.pair = sin_pair;
  cfg_sin.k0 = ModeId{FreqVector({1}), ModeKind::Sin, 1.0};

  NonuniquenessReport rep;
  rep.params = p;
  rep.cos_config = cfg_cos;
  rep.sin_config = cfg_sin;
  rep.cos_branch = continue_branch(p, cfg_cos);
  rep.sin_branch = continue_branch(p, cfg_sin);
  rep.lambda_star = rep.cos_branch.front().lambda;

  rep.sin_defect_ok = true;
  rep.cos_even_exact = true;
  const std::size_t n = std::min(rep.cos_branch.size(), rep.sin_branch.size());
  for (std::size_t i = 0; i < n; ++i) {
    const BranchPoint& a = rep.cos_branch[i];
    const BranchPoint& b = rep.sin_branch[i];
    NonuniquenessRow row;
    row.s = a.s;
    row.lambda_cos = a.lambda;
    row.mu_cos = a.mu;
    row.lambda_sin = b.lambda;
    row.mu_sin = b.mu;
    row.b2_distance = norm_b2(sub(a.w, b.w));
    row.defect_cos = sin_mass(a.w);
    row.defect_sin = sin_mass(b.w);
    rep.rows.push_back(row);
    if (!a.w.sin_terms().empty()) rep.cos_even_exact = false;
    if (a.s > 0.0 && row.defect_sin < a.s / 2.0) rep.sin_defect_ok = false;
  }
  return rep;
}

AlmostPeriodicReport almost_periodic_demo(const WaveParams& p,
                                          const DemoOptions& opts) {
  const double k0_freq = 2.0 * std::sqrt(5.0);
  // The kernel ray's coefficients decay roughly one decade per harmonic;
  // nine harmonics keep the out-of-band residual safely under the 1e-8
  // verification budget at s = 1e-2.
  const double cutoff = opts.cutoff > 0.0 ? opts.cutoff : 9.0 * k0_freq;
  const int bound = static_cast<int>(std::ceil(cutoff / 2.0));
  const auto basis = make_basis({1.0, std::sqrt(5.0)}, bound, cutoff);

  // even/even on cos, odd/odd on sin: the two-generator admissible family.
  AdmissiblePair pair{basis, {0u}, {3u}};

  BranchConfig cfg;
  cfg.pair = pair;
  cfg.k0 = ModeId{FreqVector({0, 2}), ModeKind::Cos, k0_freq};
  cfg.root_sign = +1;
  cfg.s_max = opts.s_max;
  cfg.n_steps = opts.n_steps;
  cfg.newton_tol = opts.newton_tol;
  cfg.newton_max_iter = opts.newton_max_iter;

  AlmostPeriodicReport rep;
  rep.params = p;
  rep.k0_freq = k0_freq;
  rep.config = cfg;
  rep.branch = continue_branch(p, cfg);
  rep.lambda_star = rep.branch.front().lambda;

  const BranchPoint& last = rep.branch.back();
  rep.support = support_of(last.w);
  rep.support_rank = integer_rank(rep.support);
  const auto closure = close_under_product(rep.support, rep.support);
  rep.closure_rank = integer_rank(closure);

  std::vector<FreqVector> pair_vecs;
  for (const auto& m : enumerate_modes(pair))
    if (m.kind != ModeKind::Mean) pair_vecs.push_back(m.vec);
  const auto pair_closure = close_under_product(rep.support, pair_vecs);
  rep.pair_rank = integer_rank(pair_closure);

  if (rep.support_rank >= 2) {
    rep.certificate = "solution-support";
    rep.witness = rank2_witness(rep.support);
  } else if (rep.closure_rank >= 2) {
    rep.certificate = "support-closure";
    rep.witness = rank2_witness(closure);
  } else if (rep.pair_rank >= 2) {
    rep.certificate = "frequency-set";
    rep.witness = rank2_witness(pair_closure);
  } else {
    rep.certificate = "none";
  }

  rep.second_harmonic_populated =
      std::abs(last.w.coeff(ModeKind::Cos, FreqVector({0, 4}))) > 0.0;
  return rep;
}

}  // namespace apwave

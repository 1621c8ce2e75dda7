#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "apwave/branch.hpp"
#include "apwave/serialize.hpp"

using namespace apwave;

namespace {

AdmissiblePair periodic_pair(double cutoff) {
  return {make_basis({1.0}, static_cast<int>(std::ceil(cutoff)) + 1, cutoff),
          {0u, 1u},
          {}};
}

AdmissiblePair interleaved_pair(double cutoff) {
  return {make_basis({1.0}, static_cast<int>(std::ceil(cutoff)) + 1, cutoff),
          {0u},
          {1u}};
}

BranchConfig periodic_config(double cutoff = 6.0) {
  BranchConfig cfg;
  cfg.pair = periodic_pair(cutoff);
  cfg.k0 = ModeId{FreqVector({1}), ModeKind::Cos, 1.0};
  cfg.root_sign = +1;
  cfg.s_max = 1e-2;
  cfg.n_steps = 20;
  return cfg;
}

}  // namespace

TEST_CASE("seed sits at the dispersion root with zero residual") {
  const WaveParams p{1.0, 9.8, 1.0};
  const BranchConfig cfg = periodic_config();
  const BranchPoint s0 = seed(p, cfg);
  CHECK(s0.s == 0.0);
  CHECK(s0.mu == 0.0);
  CHECK(s0.residual_norm == 0.0);
  const auto [lp, lm] = bifurcation_lambdas(p, 1.0);
  CHECK(s0.lambda == lp);

  BranchConfig neg = cfg;
  neg.root_sign = -1;
  CHECK(seed(p, neg).lambda == lm);
}

TEST_CASE("seed at the sin mode uses the displayed bifurcation value") {
  const WaveParams p{1.0, 9.8, 1.0};
  BranchConfig cfg;
  cfg.pair = interleaved_pair(6.0);
  cfg.k0 = ModeId{FreqVector({1}), ModeKind::Sin, 1.0};
  cfg.root_sign = -1;
  const BranchPoint s0 = seed(p, cfg);
  const double t = std::tanh(1.0);
  const double expect =
      -p.gamma * t / 2.0 - std::sqrt(p.gamma * p.gamma * t * t / 4.0 + p.g * t);
  CHECK(s0.lambda == doctest::Approx(expect).epsilon(1e-15));
}

TEST_CASE("seed refuses resonant configurations with the mode list") {
  const WaveParams p{1.0, 9.8, 1.0};
  BranchConfig cfg = periodic_config();
  cfg.resonance_tol = 1e5;  // everything flags as resonant
  CHECK_THROWS_AS(seed(p, cfg), ResonanceError);
  try {
    seed(p, cfg);
  } catch (const ResonanceError& e) {
    CHECK(e.resonant_modes.size() > 1);
  }
}

TEST_CASE("newton_correct at s=0 returns the seed in 0 iterations") {
  const WaveParams p{0.0, 9.8, 1.0};
  const BranchConfig cfg = periodic_config();
  const BranchPoint s0 = seed(p, cfg);
  TrialState guess;
  guess.lambda = s0.lambda;
  guess.mu = 0.0;
  guess.w = s0.w;
  const BranchPoint back = newton_correct(p, cfg, guess, 0.0);
  CHECK(back.newton_iters == 0);
  CHECK(back.lambda == s0.lambda);
  CHECK(back.residual_norm == 0.0);
}

TEST_CASE("tiny amplitude stays pinned to the bifurcation point") {
  const WaveParams p{1.0, 9.8, 1.0};
  const BranchConfig cfg = periodic_config();
  const BranchPoint s0 = seed(p, cfg);
  TrialState guess;
  guess.lambda = s0.lambda;
  guess.mu = 0.0;
  guess.w = TrigSum::harmonic(cfg.pair.basis, FreqVector({1}), ModeKind::Cos, 1e-6);
  const BranchPoint pt = newton_correct(p, cfg, guess, 1e-6);
  CHECK(pt.residual_norm <= cfg.newton_tol);
  CHECK(std::abs(pt.lambda - s0.lambda) <= 1e-9);
  CHECK(pt.w.coeff(cfg.k0) == 1e-6);
}

TEST_CASE("continue_branch: pinning, residuals, continuity") {
  const WaveParams p{1.0, 9.8, 1.0};
  const BranchConfig cfg = periodic_config();
  const auto pts = continue_branch(p, cfg);
  REQUIRE(pts.size() == 21);  // seed + 20 steps

  std::vector<double> dlambda, dmu;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    const BranchPoint& pt = pts[i];
    CHECK(pt.residual_norm <= cfg.newton_tol);
    CHECK(pt.w.coeff(cfg.k0) == pt.s);  // exact pinning
    CHECK(std::abs(mean(pt.w)) == 0.0);
    CHECK(pt.min_surface > -p.h);
    if (i > 0) {
      CHECK(pts[i].s > pts[i - 1].s);
      dlambda.push_back(std::abs(pts[i].lambda - pts[i - 1].lambda));
      dmu.push_back(std::abs(pts[i].mu - pts[i - 1].mu));
    }
  }
  // continuity: no step jump exceeds 10x the median step difference
  auto median_ok = [](std::vector<double> d) {
    std::sort(d.begin(), d.end());
    const double med = d[d.size() / 2];
    return d.back() <= 10.0 * med;
  };
  CHECK(median_ok(dlambda));
  CHECK(median_ok(dmu));

  // s_max = 0 collapses to the seed alone
  BranchConfig trivial = cfg;
  trivial.s_max = 0.0;
  CHECK(continue_branch(p, trivial).size() == 1);
}

TEST_CASE("periodic-even pair branches carry no sine mass at all") {
  const WaveParams p{0.0, 9.8, 1.0};
  const auto pts = continue_branch(p, periodic_config());
  for (const auto& pt : pts) CHECK(pt.w.sin_terms().empty());
}

TEST_CASE("asymptotics: the branch leaves the kernel line quadratically") {
  const WaveParams p{1.0, 9.8, 1.0};
  const BranchConfig cfg = periodic_config();
  const auto pts = continue_branch(p, cfg);

  auto ratio_at = [&](const BranchPoint& pt) {
    TrigSum diff = pt.w;
    diff.accumulate(ModeKind::Cos, FreqVector({1}), -pt.s);
    diff.sparsify();
    return norm_b2(diff) / (pt.s * pt.s);
  };
  // s = 1e-2 and s = 5e-3 are on the grid
  const double r1 = ratio_at(pts.back());
  const double r2 = ratio_at(pts[10]);
  CHECK(r1 > 0.0);
  CHECK(std::abs(r1 - r2) / std::min(r1, r2) <= 0.2);
}

TEST_CASE("reversed amplitude gives the half-period translate") {
  const WaveParams p{1.0, 9.8, 1.0};
  BranchConfig cfg = periodic_config();
  cfg.include_negative = true;
  cfg.s_max = 5e-3;
  cfg.n_steps = 5;
  const auto pts = continue_branch(p, cfg);
  REQUIRE(pts.size() == 11);

  // points sorted by s; match s and -s
  for (std::size_t i = 0; i < pts.size(); ++i) {
    const BranchPoint& neg = pts[i];
    const BranchPoint& pos = pts[pts.size() - 1 - i];
    CHECK(neg.s == doctest::Approx(-pos.s).epsilon(1e-15));
    CHECK(norm_b2(neg.w) == doctest::Approx(norm_b2(pos.w)).epsilon(1e-9));
    CHECK(neg.lambda == doctest::Approx(pos.lambda).epsilon(1e-9));
    // coefficients flip sign exactly on odd modes: w(-s)(x) = w(s)(x - pi)
    for (const auto& [vec, a] : pos.w.cos_terms()) {
      const double expect = (vec[0] % 2 == 0) ? a : -a;
      CHECK(neg.w.coeff(ModeKind::Cos, vec) == doctest::Approx(expect).epsilon(1e-7));
    }
  }
}

TEST_CASE("branch emission is deterministic") {
  const WaveParams p{1.0, 9.8, 1.0};
  const BranchConfig cfg = periodic_config();
  BranchFile f1{p, cfg, 0.0, continue_branch(p, cfg)};
  BranchFile f2{p, cfg, 0.0, continue_branch(p, cfg)};
  f1.lambda_star = f1.points.front().lambda;
  f2.lambda_star = f2.points.front().lambda;
  CHECK(json_dump(branch_to_json(f1)) == json_dump(branch_to_json(f2)));
}

TEST_CASE("integer rank is exact") {
  CHECK(integer_rank({}) == 0);
  CHECK(integer_rank({FreqVector({0, 2})}) == 1);
  CHECK(integer_rank({FreqVector({0, 2}), FreqVector({0, 4})}) == 1);
  CHECK(integer_rank({FreqVector({0, 2}), FreqVector({1, 1})}) == 2);
  CHECK(integer_rank({FreqVector({2, 4}), FreqVector({3, 6})}) == 1);
  CHECK(integer_rank({FreqVector({2, 4}), FreqVector({3, 5})}) == 2);
}

TEST_CASE("nonuniqueness demo: two waves at one bifurcation value") {
  const WaveParams p{1.0, 9.8, 1.0};
  DemoOptions opts;
  opts.s_max = 5e-3;
  opts.n_steps = 10;
  const NonuniquenessReport rep = nonuniqueness_demo(p, opts);

  const double t = std::tanh(1.0);
  const double expect = -t / 2.0 - std::sqrt(t * t / 4.0 + 9.8 * t);
  CHECK(rep.lambda_star == doctest::Approx(expect).epsilon(1e-14));
  CHECK(rep.cos_even_exact);
  CHECK(rep.sin_defect_ok);
  REQUIRE(rep.rows.size() == 11);

  for (const auto& row : rep.rows) {
    if (row.s == 0.0) continue;
    // the sin branch is the half-period translate of the cos branch
    CHECK(row.lambda_sin == doctest::Approx(row.lambda_cos).epsilon(1e-8));
    CHECK(row.defect_cos == 0.0);
    CHECK(row.defect_sin >= row.s / 2.0);
    // orthogonal leading modes: distance ~ s at leading order
    CHECK(row.b2_distance >= row.s * (1.0 - 0.05));
  }

  // translate oracle: sin-branch coefficients mirror the cos branch
  const BranchPoint& a = rep.cos_branch.back();
  const BranchPoint& b = rep.sin_branch.back();
  // cos branch mode k maps to: k odd -> sin (sign (-1)^((k-1)/2)), k even ->
  // cos (sign (-1)^(k/2)) under x -> x - pi/2
  for (const auto& [vec, coeff] : a.w.cos_terms()) {
    const int k = vec[0];
    if (k % 2 == 1) {
      const double sign = ((k - 1) / 2 % 2 == 0) ? 1.0 : -1.0;
      CHECK(b.w.coeff(ModeKind::Sin, vec) ==
            doctest::Approx(sign * coeff).epsilon(1e-7));
    } else {
      const double sign = (k / 2 % 2 == 0) ? 1.0 : -1.0;
      CHECK(b.w.coeff(ModeKind::Cos, vec) ==
            doctest::Approx(sign * coeff).epsilon(1e-7));
    }
  }
}

TEST_CASE("almost periodic demo: support stays on the k0 ray, set certifies") {
  const WaveParams p{1.0, 9.8, 1.0};
  DemoOptions opts;
  opts.s_max = 5e-3;
  opts.n_steps = 10;
  const AlmostPeriodicReport rep = almost_periodic_demo(p, opts);

  CHECK(std::abs(dispersion_residual(p, rep.lambda_star, 2.0 * std::sqrt(5.0))) <=
        1e-12);
  // the pinned vector is present
  bool has_k0 = false;
  for (const auto& v : rep.support)
    if (v == FreqVector({0, 2})) has_k0 = true;
  CHECK(has_k0);
  CHECK(rep.second_harmonic_populated);

  // the solution itself is supported on multiples of (0,2): rank 1; the
  // certificate falls back to the frequency-set level
  CHECK(rep.support_rank == 1);
  CHECK(rep.closure_rank == 1);
  CHECK(rep.pair_rank == 2);
  CHECK(rep.certificate == "frequency-set");
  REQUIRE(rep.witness.size() == 2);
  CHECK(integer_rank(rep.witness) == 2);

  for (const auto& pt : rep.branch) CHECK(pt.residual_norm <= opts.newton_tol);
}

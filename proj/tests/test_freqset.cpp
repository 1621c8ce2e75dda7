#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "apwave/freqset.hpp"

using namespace apwave;

namespace {

const double kSqrt5 = std::sqrt(5.0);

AdmissiblePair periodic_pair(double cutoff) {
  // alpha_k = k: every parity on cos, no sines.
  return {make_basis({1.0}, static_cast<int>(std::ceil(cutoff)) + 1, cutoff),
          {0u, 1u},
          {}};
}

AdmissiblePair interleaved_pair(double cutoff) {
  // alpha = even integers, beta = odd integers.
  return {make_basis({1.0}, static_cast<int>(std::ceil(cutoff)) + 1, cutoff),
          {0u},
          {1u}};
}

AdmissiblePair root5_pair(int bound, double cutoff) {
  // even/even on cos, odd/odd on sin over generators (1, sqrt 5).
  return {make_basis({1.0, kSqrt5}, bound, cutoff), {0u}, {3u}};
}

}  // namespace

TEST_CASE("embed sums coefficients against generators") {
  auto basis = make_basis({1.0, kSqrt5}, 4, 100.0);
  CHECK(embed(*basis, FreqVector({2, 0})) == doctest::Approx(2.0).epsilon(1e-15));
  CHECK(embed(*basis, FreqVector({0, 2})) ==
        doctest::Approx(2.0 * kSqrt5).epsilon(1e-15));
  auto one = make_basis({1.0}, 4, 100.0);
  CHECK(embed(*one, FreqVector({0})) == 0.0);
  CHECK_THROWS_AS(embed(*basis, FreqVector({5, 0})), std::invalid_argument);
}

TEST_CASE("fold canonicalizes and reports the sign") {
  auto [v1, s1] = FreqVector::fold(std::vector<int>{-2, 0});
  CHECK(v1 == FreqVector({2, 0}));
  CHECK(s1 == -1);
  auto [v2, s2] = FreqVector::fold(std::vector<int>{0, 3});
  CHECK(v2 == FreqVector({0, 3}));
  CHECK(s2 == +1);
  auto [v3, s3] = FreqVector::fold(std::vector<int>{0, 0});
  CHECK(v3.is_zero());
  CHECK(s3 == +1);
}

TEST_CASE("folding is idempotent on random vectors") {
  std::mt19937 rng(7);
  std::uniform_int_distribution<int> coeff(-9, 9);
  for (int trial = 0; trial < 500; ++trial) {
    std::vector<int> raw(1 + trial % 4);
    for (auto& c : raw) c = coeff(rng);
    auto [v, s] = FreqVector::fold(raw);
    auto [v2, s2] = FreqVector::fold(v);
    CHECK(v2 == v);
    CHECK(s2 == +1);
    CHECK(v.is_canonical());
  }
}

TEST_CASE("classify follows the parity classes") {
  AdmissiblePair pair = root5_pair(4, 20.0);
  CHECK(classify(pair, FreqVector({0, 2})) == ModeKind::Cos);
  CHECK(classify(pair, FreqVector({1, 1})) == ModeKind::Sin);
  CHECK(classify(pair, FreqVector({1, 0})) == ModeKind::Excluded);
  CHECK(classify(pair, FreqVector({0, 0})) == ModeKind::Mean);
}

TEST_CASE("check_admissible accepts the three stock families") {
  CHECK(check_admissible({make_basis({0.7}, 8, 5.0), {0u}, {}}).valid);
  CHECK(check_admissible(interleaved_pair(6.0)).valid);
  CHECK(check_admissible(periodic_pair(6.0)).valid);
  CHECK(check_admissible(root5_pair(4, 10.0)).valid);
}

TEST_CASE("check_admissible rejects a broken coset with a witness") {
  // cos={(0,0),(1,1)}, sin={(1,0)}: sin+sin lands in cos, but cos+sin
  // escapes the sin class.
  AdmissiblePair bad{make_basis({1.0, kSqrt5}, 3, 10.0), {0u, 3u}, {1u}};
  const auto rep = check_admissible(bad);
  CHECK_FALSE(rep.valid);
  bool saw_cos_sin = false;
  for (const auto& v : rep.violations)
    if (v.law == "cos-sin-closure") saw_cos_sin = true;
  CHECK(saw_cos_sin);
}

TEST_CASE("check_admissible rejects non-subgroups and overlaps") {
  // {(1,0)} without identity.
  CHECK_FALSE(check_admissible({make_basis({1.0, kSqrt5}, 3, 10.0), {1u}, {}}).valid);
  // cos not closed: {(0,0),(1,0),(0,1)} lacks (1,1).
  CHECK_FALSE(
      check_admissible({make_basis({1.0, kSqrt5}, 3, 10.0), {0u, 1u, 2u}, {}}).valid);
  // sin equal to cos: overlap.
  CHECK_FALSE(
      check_admissible({make_basis({1.0, kSqrt5}, 3, 10.0), {0u}, {0u}}).valid);
}

TEST_CASE("fuzz: perturbed parity tables are rejected") {
  std::mt19937 rng(11);
  std::uniform_int_distribution<unsigned> pick(0u, 3u);
  int rejected = 0, total = 0;
  for (int trial = 0; trial < 64; ++trial) {
    AdmissiblePair pair = root5_pair(3, 10.0);
    // Random single-element mutation of either class.
    const unsigned p = pick(rng);
    if (trial % 2 == 0)
      pair.cos_parities.insert(p);
    else
      pair.sin_parities.insert(p);
    if (pair.cos_parities == std::set<unsigned>{0u} &&
        pair.sin_parities == std::set<unsigned>{3u})
      continue;  // mutation was a no-op
    ++total;
    if (!check_admissible(pair).valid) ++rejected;
  }
  // Any surviving table must still satisfy the group laws; most mutations break them.
  CHECK(rejected > total / 2);
}

TEST_CASE("collision check rejects rationally dependent generators") {
  CHECK_THROWS_AS(make_basis({1.0, 2.0}, 3, 10.0), std::invalid_argument);
  CHECK_THROWS_AS(make_basis({0.5, 1.0 + 1e-12}, 3, 10.0), std::invalid_argument);
  CHECK_NOTHROW(make_basis({1.0, kSqrt5}, 8, 30.0));
}

TEST_CASE("enumerate: periodic ladder") {
  const auto modes = enumerate_modes(periodic_pair(3.5));
  REQUIRE(modes.size() == 4);
  CHECK(modes[0].kind == ModeKind::Mean);
  for (int k = 1; k <= 3; ++k) {
    CHECK(modes[static_cast<std::size_t>(k)].kind == ModeKind::Cos);
    CHECK(modes[static_cast<std::size_t>(k)].freq == doctest::Approx(k));
  }
}

TEST_CASE("enumerate: interleaved even/odd ladder") {
  const auto modes = enumerate_modes(interleaved_pair(4.5));
  REQUIRE(modes.size() == 5);
  CHECK(modes[0].kind == ModeKind::Mean);
  CHECK(modes[1].kind == ModeKind::Sin);
  CHECK(modes[1].freq == doctest::Approx(1.0));
  CHECK(modes[2].kind == ModeKind::Cos);
  CHECK(modes[2].freq == doctest::Approx(2.0));
  CHECK(modes[3].kind == ModeKind::Sin);
  CHECK(modes[3].freq == doctest::Approx(3.0));
  CHECK(modes[4].kind == ModeKind::Cos);
  CHECK(modes[4].freq == doctest::Approx(4.0));
}

// Independent brute-force oracle: loop the whole box, fold by hand, classify
// by parity membership, sort by |embedding|.
namespace {
struct OracleMode {
  double freq;
  std::vector<int> coeffs;
  bool is_sin;
};

std::vector<OracleMode> oracle_enumerate(const AdmissiblePair& pair) {
  const auto& b = *pair.basis;
  std::vector<OracleMode> out;
  const int B = b.coeff_bound;
  for (int i = -B; i <= B; ++i)
    for (int j = -B; j <= B; ++j) {
      std::vector<int> c{i, j};
      if (c[0] < 0 || (c[0] == 0 && c[1] < 0)) continue;  // canonical half
      if (i == 0 && j == 0) continue;
      const double e = i * b.generators[0] + j * b.generators[1];
      const double f = std::abs(e);
      if (f <= 0.0 || f > b.cutoff) continue;
      const unsigned par =
          static_cast<unsigned>(std::abs(i) % 2) |
          (static_cast<unsigned>(std::abs(j) % 2) << 1);
      if (pair.cos_parities.count(par))
        out.push_back({f, c, false});
      else if (pair.sin_parities.count(par))
        out.push_back({f, c, true});
    }
  std::sort(out.begin(), out.end(),
            [](const OracleMode& a, const OracleMode& o) { return a.freq < o.freq; });
  return out;
}
}  // namespace

TEST_CASE("enumerate matches the brute-force oracle on the (1, sqrt 5) pair") {
  AdmissiblePair pair = root5_pair(2, 5.0);
  const auto modes = enumerate_modes(pair);
  const auto expect = oracle_enumerate(pair);
  REQUIRE(modes.size() == expect.size() + 1);  // + Mean
  for (std::size_t i = 0; i < expect.size(); ++i) {
    CHECK(modes[i + 1].freq == doctest::Approx(expect[i].freq).epsilon(1e-14));
    CHECK(modes[i + 1].vec == FreqVector(expect[i].coeffs));
    CHECK((modes[i + 1].kind == ModeKind::Sin) == expect[i].is_sin);
  }
  // Frozen from the oracle: Sin(1,-1) at sqrt5-1, Cos(2,0) at 2, Cos(2,-2)
  // at 2 sqrt5 - 2, Sin(1,1) at 1+sqrt5, Cos(0,2) at 2 sqrt5.
  REQUIRE(modes.size() >= 6);
  CHECK(modes[1].vec == FreqVector({1, -1}));
  CHECK(modes[1].freq == doctest::Approx(kSqrt5 - 1.0));
  CHECK(modes[2].vec == FreqVector({2, 0}));
  CHECK(modes[3].vec == FreqVector({2, -2}));
  CHECK(modes[4].vec == FreqVector({1, 1}));
  CHECK(modes[5].vec == FreqVector({0, 2}));
  CHECK(modes[5].freq == doctest::Approx(2.0 * kSqrt5));
}

TEST_CASE("enumerate is sorted and duplicate-free") {
  for (const auto& pair :
       {periodic_pair(12.0), interleaved_pair(12.0), root5_pair(5, 12.0)}) {
    const auto modes = enumerate_modes(pair);
    for (std::size_t i = 2; i < modes.size(); ++i) {
      CHECK(modes[i].freq > modes[i - 1].freq);
      CHECK(modes[i].freq - modes[i - 1].freq > kCollisionTol / 2);
    }
  }
}

TEST_CASE("enumerate with tiny cutoff yields only the Mean mode") {
  AdmissiblePair pair{make_basis({1.0}, 4, 0.0), {0u, 1u}, {}};
  const auto modes = enumerate_modes(pair);
  REQUIRE(modes.size() == 1);
  CHECK(modes[0].kind == ModeKind::Mean);
}

TEST_CASE("product closure: folded sums and differences stay in the classes") {
  AdmissiblePair pair = root5_pair(2, 8.0);
  const auto modes = enumerate_modes(pair);
  for (const auto& m1 : modes) {
    for (const auto& m2 : modes) {
      if (m1.kind == ModeKind::Mean || m2.kind == ModeKind::Mean) continue;
      for (const auto& image : {m1.vec.plus(m2.vec), m1.vec.minus(m2.vec)}) {
        auto [folded, sign] = FreqVector::fold(image);
        const ModeKind k = classify(pair, folded);
        const bool both_same_class = m1.kind == m2.kind;
        if (folded.is_zero()) {
          CHECK(k == ModeKind::Mean);
        } else if (both_same_class) {
          // cos*cos and sin*sin both land on cos frequencies
          CHECK(k == ModeKind::Cos);
        } else {
          CHECK(k == ModeKind::Sin);
        }
      }
    }
  }
}

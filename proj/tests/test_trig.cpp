#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "apwave/trig.hpp"

using namespace apwave;

namespace {

const double kSqrt5 = std::sqrt(5.0);

BasisPtr one_gen(double cutoff = 64.0) { return make_basis({1.0}, 70, cutoff); }
BasisPtr two_gen(double cutoff = 64.0) {
  return make_basis({1.0, kSqrt5}, 10, cutoff);
}

TrigSum random_sum(const BasisPtr& basis, std::mt19937& rng, int n_terms,
                   double max_freq) {
  std::uniform_real_distribution<double> coeff(-1.0, 1.0);
  std::uniform_int_distribution<int> c(-3, 3);
  TrigSum u(basis, coeff(rng));
  int added = 0;
  while (added < n_terms) {
    std::vector<int> raw(basis->dim());
    for (auto& v : raw) v = c(rng);
    FreqVector vec(raw);
    if (vec.is_zero()) continue;
    if (basis->frequency(vec) > max_freq) continue;
    u.accumulate(coeff(rng) > 0 ? ModeKind::Cos : ModeKind::Sin, vec, coeff(rng));
    ++added;
  }
  u.sparsify();
  return u;
}

}  // namespace

TEST_CASE("add and scale are exact coefficient algebra") {
  auto basis = one_gen();
  const TrigSum c1 = TrigSum::harmonic(basis, FreqVector({1}), ModeKind::Cos, 1.0);
  const TrigSum two = add(c1, c1);
  CHECK(two.coeff(ModeKind::Cos, FreqVector({1})) == 2.0);
  const TrigSum zero = add(c1, scale(-1.0, c1));
  CHECK(zero.term_count() == 0);
  CHECK(zero.mean_value() == 0.0);
  const TrigSum z2 = scale(0.0, two);
  CHECK(z2.term_count() == 0);
}

TEST_CASE("basis mismatch is refused") {
  const TrigSum a(one_gen());
  const TrigSum b(two_gen());
  CHECK_THROWS_AS(add(a, b), std::invalid_argument);
  CHECK_THROWS_AS(mul(a, b), std::invalid_argument);
  CHECK_THROWS_AS(inner(a, b), std::invalid_argument);
}

TEST_CASE("mul: double angle identities") {
  auto basis = one_gen();
  const TrigSum c = TrigSum::harmonic(basis, FreqVector({3}), ModeKind::Cos, 1.0);
  const TrigSum c2 = mul(c, c);
  CHECK(c2.mean_value() == doctest::Approx(0.5));
  CHECK(c2.coeff(ModeKind::Cos, FreqVector({6})) == doctest::Approx(0.5));
  CHECK(c2.term_count() == 1);

  const TrigSum s = TrigSum::harmonic(basis, FreqVector({1}), ModeKind::Sin, 1.0);
  const TrigSum s2 = mul(s, s);
  CHECK(s2.mean_value() == doctest::Approx(0.5));
  CHECK(s2.coeff(ModeKind::Cos, FreqVector({2})) == doctest::Approx(-0.5));
}

TEST_CASE("mul: cos(2x) sin(x) folds the negative-frequency sine") {
  auto basis = one_gen();
  const TrigSum c2 = TrigSum::harmonic(basis, FreqVector({2}), ModeKind::Cos, 1.0);
  const TrigSum s1 = TrigSum::harmonic(basis, FreqVector({1}), ModeKind::Sin, 1.0);
  const TrigSum p = mul(c2, s1);
  // cos(2x) sin(x) = (1/2)(sin 3x - sin x); folding sin(-x) flips the sign.
  CHECK(p.coeff(ModeKind::Sin, FreqVector({3})) == doctest::Approx(0.5));
  CHECK(p.coeff(ModeKind::Sin, FreqVector({1})) == doctest::Approx(-0.5));
}

TEST_CASE("ring law on a grid: eval(mul) = eval*eval without truncation") {
  std::mt19937 rng(3);
  for (auto basis : {one_gen(), two_gen()}) {
    for (int trial = 0; trial < 10; ++trial) {
      const TrigSum u = random_sum(basis, rng, 5, basis->cutoff / 2 - 1);
      const TrigSum v = random_sum(basis, rng, 5, basis->cutoff / 2 - 1);
      const TrigSum uv = mul(u, v);
      CHECK(uv.truncation_mass() == 0.0);
      for (int i = 0; i < 60; ++i) {
        const double x = -30.0 + i;
        CHECK(std::abs(eval(uv, x) - eval(u, x) * eval(v, x)) <= 1e-11);
      }
    }
  }
}

TEST_CASE("mul truncation receipt reports the discarded mass") {
  auto basis = make_basis({1.0}, 10, 3.0);
  const TrigSum c2 = TrigSum::harmonic(basis, FreqVector({2}), ModeKind::Cos, 1.0);
  const TrigSum p = mul(c2, c2);  // 1/2 + 1/2 cos(4x); cos(4x) beyond cutoff 3
  CHECK(p.mean_value() == doctest::Approx(0.5));
  CHECK(p.coeff(ModeKind::Cos, FreqVector({4})) == 0.0);
  // discarded mass: sqrt(1/2 * 0.25)
  CHECK(p.truncation_mass() == doctest::Approx(std::sqrt(0.125)));
}

TEST_CASE("derivative maps between the dual classes") {
  auto basis = one_gen();
  const TrigSum c = TrigSum::harmonic(basis, FreqVector({2}), ModeKind::Cos, 1.5);
  const TrigSum dc = derivative(c);
  CHECK(dc.coeff(ModeKind::Sin, FreqVector({2})) == doctest::Approx(-3.0));
  CHECK(dc.mean_value() == 0.0);
  CHECK(derivative(TrigSum::constant(basis, 4.0)).term_count() == 0);

  // (d/dx cos x)^2 = sin^2 = 1/2 - 1/2 cos 2x
  const TrigSum c1 = TrigSum::harmonic(basis, FreqVector({1}), ModeKind::Cos, 1.0);
  const TrigSum d2 = mul(derivative(c1), derivative(c1));
  CHECK(d2.mean_value() == doctest::Approx(0.5));
  CHECK(d2.coeff(ModeKind::Cos, FreqVector({2})) == doctest::Approx(-0.5));
}

TEST_CASE("derivative is linear and satisfies the product rule on a grid") {
  std::mt19937 rng(17);
  auto basis = two_gen();
  const TrigSum u = random_sum(basis, rng, 4, basis->cutoff / 2 - 1);
  const TrigSum v = random_sum(basis, rng, 4, basis->cutoff / 2 - 1);
  const TrigSum lhs = derivative(mul(u, v));
  const TrigSum rhs = add(mul(derivative(u), v), mul(u, derivative(v)));
  for (int i = 0; i < 40; ++i) {
    const double x = -10.0 + 0.5 * i;
    CHECK(std::abs(eval(lhs, x) - eval(rhs, x)) <= 1e-10);
  }
}

TEST_CASE("mean extracts the average term") {
  auto basis = one_gen();
  TrigSum u(basis, 5.0);
  u.accumulate(ModeKind::Cos, FreqVector({1}), 1.0);
  CHECK(mean(u) == 5.0);
  CHECK(mean(TrigSum::harmonic(basis, FreqVector({1}), ModeKind::Sin, 2.0)) == 0.0);
  const TrigSum c = TrigSum::harmonic(basis, FreqVector({1}), ModeKind::Cos, 1.0);
  CHECK(mean(mul(c, c)) == doctest::Approx(0.5));
}

TEST_CASE("inner product normalization") {
  auto basis = one_gen();
  const TrigSum one = TrigSum::constant(basis, 1.0);
  const TrigSum c = TrigSum::harmonic(basis, FreqVector({2}), ModeKind::Cos, 1.0);
  const TrigSum s = TrigSum::harmonic(basis, FreqVector({3}), ModeKind::Sin, 1.0);
  CHECK(inner(one, one) == doctest::Approx(1.0));
  CHECK(inner(c, c) == doctest::Approx(0.5));
  CHECK(inner(s, s) == doctest::Approx(0.5));
  CHECK(inner(c, s) == 0.0);
}

TEST_CASE("Parseval against long-window quadrature") {
  // Composite Simpson of u^2 over [-X, X], normalized by 2X, compared with
  // the coefficient formula; incommensurate cross terms decay like 1/X.
  std::mt19937 rng(23);
  auto basis = two_gen(12.0);
  const TrigSum u = random_sum(basis, rng, 6, 11.0);

  const double X = 1e5;
  const std::size_t n = 1 << 22;  // even
  const double dx = 2.0 * X / n;
  auto f2 = [&](double x) {
    const double v = eval(u, x);
    return v * v;
  };
  double sum = f2(-X) + f2(X);
  for (std::size_t i = 1; i < n; ++i)
    sum += f2(-X + dx * i) * ((i % 2) ? 4.0 : 2.0);
  const double quad = sum * dx / 3.0 / (2.0 * X);

  const double n2 = norm_b2(u) * norm_b2(u);
  CHECK(n2 == doctest::Approx(quad).epsilon(1e-3));
}

TEST_CASE("eval at stated points") {
  auto basis = one_gen();
  TrigSum u(basis, 1.0);
  u.accumulate(ModeKind::Cos, FreqVector({1}), 1.0);
  CHECK(eval(u, 0.0) == doctest::Approx(2.0));
  CHECK(eval(TrigSum::harmonic(basis, FreqVector({1}), ModeKind::Sin, 1.0), 0.0) ==
        0.0);
}

TEST_CASE("project_zero_mean strips the mean and the excluded modes") {
  auto basis = make_basis({1.0}, 10, 8.0);
  AdmissiblePair interleaved{basis, {0u}, {1u}};

  TrigSum u(basis, 3.0);
  u.accumulate(ModeKind::Cos, FreqVector({2}), 1.0);
  auto [p1, defect1] = project_zero_mean(u, interleaved);
  CHECK(p1.mean_value() == 0.0);
  CHECK(p1.coeff(ModeKind::Cos, FreqVector({2})) == 1.0);
  CHECK(defect1 == doctest::Approx(3.0));

  // A sin term on an even (cos-class) frequency is excluded.
  TrigSum v(basis, 0.0);
  v.accumulate(ModeKind::Sin, FreqVector({2}), 2.0);
  auto [p2, defect2] = project_zero_mean(v, interleaved);
  CHECK(p2.term_count() == 0);
  CHECK(defect2 == doctest::Approx(2.0 * std::sqrt(0.5)));

  // An already-admissible zero-mean sum passes through unchanged.
  TrigSum w(basis, 0.0);
  w.accumulate(ModeKind::Sin, FreqVector({1}), 0.7);
  w.accumulate(ModeKind::Cos, FreqVector({4}), -0.2);
  auto [p3, defect3] = project_zero_mean(w, interleaved);
  CHECK(defect3 == 0.0);
  CHECK(norm_b2(sub(p3, w)) == 0.0);
}

TEST_CASE("E-closure: products of admissible sums have zero excluded mass") {
  std::mt19937 rng(31);
  auto basis = make_basis({1.0, kSqrt5}, 8, 40.0);
  AdmissiblePair pair{basis, {0u}, {3u}};
  // Build sums supported on classified modes only.
  const auto modes = enumerate_modes(pair);
  std::uniform_real_distribution<double> coeff(-1.0, 1.0);
  for (int trial = 0; trial < 5; ++trial) {
    TrigSum u(basis), v(basis);
    for (const auto& m : modes) {
      if (m.kind == ModeKind::Mean || m.freq > 10.0) continue;
      u.accumulate(m.kind, m.vec, coeff(rng));
      v.accumulate(m.kind, m.vec, coeff(rng));
    }
    u.sparsify();
    v.sparsify();
    const TrigSum uv = mul(u, v);
    for (const auto& [vec, c] : uv.cos_terms())
      CHECK(classify(pair, vec) == ModeKind::Cos);
    for (const auto& [vec, c] : uv.sin_terms())
      CHECK(classify(pair, vec) == ModeKind::Sin);
  }
}

TEST_CASE("rebase drops out-of-window modes into the receipt") {
  auto wide = make_basis({1.0}, 10, 8.0);
  auto narrow = std::make_shared<const GeneratorBasis>(wide->with_cutoff(2.5));
  TrigSum u(wide, 1.0);
  u.accumulate(ModeKind::Cos, FreqVector({2}), 2.0);
  u.accumulate(ModeKind::Cos, FreqVector({5}), 1.0);
  const TrigSum r = u.rebased(narrow);
  CHECK(r.coeff(ModeKind::Cos, FreqVector({2})) == 2.0);
  CHECK(r.coeff(ModeKind::Cos, FreqVector({5})) == 0.0);
  CHECK(r.truncation_mass() == doctest::Approx(std::sqrt(0.5)));
}

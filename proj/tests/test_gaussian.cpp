#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "test_fixtures.hpp"

using namespace nilwalk;
using namespace nilwalk::fixtures;

namespace {

GaussianSpec unit_spec(const AlgebraPtr& g) {
  GaussianSpec s;
  s.A = RatMatrix::Identity(Eigen::Index(g->d1()), Eigen::Index(g->d1()));
  s.b = RatVector::Constant(Eigen::Index(g->d2()), Rational(0));
  return s;
}

Rational double_factorial_odd(int k) {
  // (2k-1)!!
  Rational r(1);
  for (int j = 2 * k - 1; j >= 1; j -= 2) r *= Rational(j);
  return r;
}

}  // namespace

TEST_CASE("abelian Wick moments") {
  auto g = abelian(1);
  GaussianMomentTable t(g, unit_spec(g), 10);
  CHECK(t.moment(MultiIndex({2})) == Rational(1));
  CHECK(t.moment(MultiIndex({4})) == Rational(3));
  CHECK(t.moment(MultiIndex({6})) == Rational(15));
  CHECK(t.moment(MultiIndex({8})) == Rational(105));
  CHECK(t.moment(MultiIndex({10})) == Rational(945));
  for (int k = 1; k <= 5; ++k)
    CHECK(t.moment(MultiIndex(std::vector<uint32_t>{uint32_t(2 * k)})) ==
          double_factorial_odd(k));
  // odd moments vanish exactly
  CHECK(t.moment(MultiIndex({1})) == Rational(0));
  CHECK(t.moment(MultiIndex({3})) == Rational(0));
  CHECK(t.moment(MultiIndex({7})) == Rational(0));
}

TEST_CASE("multivariate abelian Isserlis pairing") {
  auto g = abelian(3);
  GaussianSpec s;
  s.A = RatMatrix::Constant(3, 3, Rational(0));
  s.A(0, 0) = Rational(2); s.A(1, 1) = Rational(1); s.A(2, 2) = Rational(3);
  s.A(0, 1) = s.A(1, 0) = Rational(1, 2);
  s.A(1, 2) = s.A(2, 1) = Rational(-1, 3);
  s.A(0, 2) = s.A(2, 0) = Rational(0);
  s.b = RatVector(0);
  GaussianMomentTable t(g, s, 8);

  // Isserlis oracle by recursive pairing: E[x_i x^J] = sum_j i_j A_{i,j} E[x^{J-e_j}]
  std::function<Rational(const MultiIndex&)> isserlis = [&](const MultiIndex& I) -> Rational {
    if (I.is_zero()) return Rational(1);
    if (I.total_degree() % 2 == 1) return Rational(0);
    std::size_t first = 0;
    while (I[first] == 0) ++first;
    MultiIndex J = I;
    J[first] -= 1;
    Rational acc(0);
    for (std::size_t j = 0; j < 3; ++j) {
      if (J[j] == 0) continue;
      MultiIndex K = J;
      K[j] -= 1;
      acc += Rational(long(J[j])) * s.A(Eigen::Index(first), Eigen::Index(j)) * isserlis(K);
    }
    return acc;
  };
  for (const MultiIndex& I : enumerate_weighted(g->weights(), 8))
    CHECK(t.moment(I) == isserlis(I));
}

TEST_CASE("heisenberg base cases and recursion vs closed form") {
  auto h = heisenberg();
  GaussianSpec s = unit_spec(h);
  s.A(0, 1) = s.A(1, 0) = Rational(1, 3);
  s.b[0] = Rational(5);
  GaussianMomentTable t(h, s, 8);
  CHECK(t.moment(MultiIndex({0, 0, 1})) == Rational(5));  // b_i if I = [i]
  CHECK(t.moment(MultiIndex({1, 1, 0})) == Rational(1, 3));
  CHECK(t.moment(MultiIndex({2, 0, 0})) == Rational(1));

  // closed even-order form agrees with the recursion exactly through d = 8
  for (const MultiIndex& I : enumerate_weighted(h->weights(), 8)) {
    const uint64_t d = I.weighted_degree(h->weights());
    if (d % 2 == 1 || d < 4) continue;
    CHECK(gaussian_moment_closed_form(h, s, I) == t.moment(I));
  }
}

TEST_CASE("semigroup scaling") {
  auto g = abelian(1);
  GaussianMomentTable t(g, unit_spec(g), 6);
  CHECK(t.semigroup_moment(Rational(1), MultiIndex({2})) == Rational(1));
  CHECK(t.semigroup_moment(Rational(4), MultiIndex({2})) == Rational(4));
  CHECK(t.semigroup_moment(Rational(7, 3), MultiIndex({3})) == Rational(0));
  CHECK_THROWS_AS(t.semigroup_moment(Rational(0), MultiIndex({2})), std::domain_error);
}

TEST_CASE("chapman-kolmogorov at moment level") {
  for (const AlgebraPtr& g : {abelian(2), heisenberg()}) {
    GaussianSpec s = unit_spec(g);
    if (g->d2() > 0) s.b[0] = Rational(2, 7);
    GaussianMomentTable t(g, s, 6);
    const Rational ss(2, 3), tt(4, 5);
    for (const MultiIndex& I : enumerate_weighted(g->weights(), 6)) {
      Rational conv = convolution_moment(g, t, ss, tt, I);
      const uint64_t d = I.weighted_degree(g->weights());
      Rational direct = (d % 2 == 1) ? Rational(0) : t.moment(I) * (ss + tt).pow(long(d / 2));
      CHECK(conv == direct);
    }
  }
}

TEST_CASE("heat_apply") {
  auto g = abelian(1);
  GaussianMomentTable t(g, unit_spec(g), 6);
  auto sp = group_space(g);
  auto x = Polynomial::variable(sp, 0);
  // f = x^2, A = 1, g = 0, t = 1 -> 1
  CHECK(heat_apply(g, t, x * x, Rational(1), group_identity(*g)) == Rational(1));
  // f = x: martingale coordinate
  auto pt = ge(g, {Rational(7, 2)});
  CHECK(heat_apply(g, t, x, Rational(3), pt) == Rational(7, 2));
  // t = 0 evaluates f
  CHECK(heat_apply(g, t, x * x, Rational(0), pt) == Rational(49, 4));

  // Heisenberg drift: f = x3, b3 = beta, base identity -> beta * t
  auto h = heisenberg();
  GaussianSpec s = unit_spec(h);
  s.b[0] = Rational(5, 4);
  GaussianMomentTable th(h, s, 4);
  auto x3 = Polynomial::variable(group_space(h), 2);
  CHECK(heat_apply(h, th, x3, Rational(2), group_identity(*h)) == Rational(5, 2));
}

TEST_CASE("generator consistency: t-linear term of heat_apply equals A f") {
  // sum_{d(I)=2} m^I hatS^I f == generator_apply(f) as polynomials
  for (const AlgebraPtr& g : {abelian(2), heisenberg()}) {
    GaussianSpec s = unit_spec(g);
    if (g->d2() > 0) s.b[0] = Rational(-3, 2);
    s.A(0, 1) = s.A(1, 0) = Rational(1, 5);
    GaussianMomentTable t(g, s, 4);
    auto sp = group_space(g);
    std::mt19937_64 rng(41);
    std::uniform_int_distribution<long> cnum(-4, 4);
    for (int rep = 0; rep < 8; ++rep) {
      Polynomial f(sp);
      for (const MultiIndex& I : enumerate_weighted(g->weights(), 3))
        f.add_term(I, Rational(cnum(rng), 2));
      Polynomial viaMoments(sp);
      for (const auto& [I, coeff] : taylor_expansion(g, f, TaylorSide::right)) {
        if (I.weighted_degree(g->weights()) != 2) continue;
        Rational m = t.moment(I);
        if (m.is_zero()) continue;
        // re-home coeff (over block "g") onto sp
        Polynomial lifted(sp);
        for (const auto& [J, c] : coeff.terms()) lifted.add_term(J, c * m);
        viaMoments += lifted;
      }
      CHECK(viaMoments == generator_apply(g, s, f));
    }
  }
}

TEST_CASE("PSD validation") {
  GaussianSpec bad;
  bad.A = RatMatrix(2, 2);
  bad.A << Rational(1), Rational(2), Rational(2), Rational(1);  // indefinite
  bad.b = RatVector(0);
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
  GaussianSpec semi;
  semi.A = RatMatrix(2, 2);
  semi.A << Rational(1), Rational(1), Rational(1), Rational(1);  // rank 1 PSD
  semi.b = RatVector(0);
  CHECK_NOTHROW(semi.validate());
}

TEST_CASE("mc_heat abelian exactness and Heisenberg moments") {
  // abelian: sums of Gaussians, exact for any step count; check moments
  auto g = abelian(1);
  GaussianSpec s = unit_spec(g);
  auto samples = mc_heat(g, s, 1.0, 200000, 99, 4);
  double m2 = 0;
  for (const auto& v : samples) m2 += v[0] * v[0];
  m2 /= double(samples.size());
  CHECK(m2 == doctest::Approx(1.0).epsilon(0.02));

  // determinism: same seed, same stream
  auto again = mc_heat(g, s, 1.0, 10, 99, 4);
  for (int i = 0; i < 10; ++i) CHECK(again[std::size_t(i)][0] == samples[std::size_t(i)][0]);

  auto h = heisenberg();
  GaussianSpec sh = unit_spec(h);
  sh.b[0] = Rational(1, 4);
  auto hs = mc_heat(h, sh, 1.0, 100000, 7, 64);
  double m11 = 0, m3 = 0;
  for (const auto& v : hs) {
    m11 += v[0] * v[0];
    m3 += v[2];
  }
  m11 /= double(hs.size());
  m3 /= double(hs.size());
  CHECK(m11 == doctest::Approx(1.0).epsilon(0.03));
  CHECK(m3 == doctest::Approx(0.25).epsilon(0.05));
}

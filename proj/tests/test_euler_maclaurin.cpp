#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "nilwalk/euler_maclaurin.hpp"

using namespace nilwalk;

namespace {

Polynomial tmono(const VarSpacePtr& sp, std::vector<uint32_t> e, Rational c = Rational(1)) {
  return Polynomial::monomial(sp, MultiIndex(std::move(e)), c);
}

}  // namespace

TEST_CASE("frozen B polynomial values") {
  // Values frozen from the generating function, cross-checked against the
  // direct lattice-sum oracle below.
  auto t22 = em_polynomials(2, 2, 3);
  auto sp = t22.space();
  auto t1 = Polynomial::variable(sp, 0), t2 = Polynomial::variable(sp, 1);
  CHECK(t22.coeff(0) == Polynomial::constant(sp, Rational(1)));
  CHECK(t22.coeff(1) == (t1 + t2).scaled(Rational(-1, 2)));
  // B_2/2! = t1^2/12 + t1 t2/3 + t2^2/12
  Polynomial b2(sp);
  b2 += tmono(sp, {2, 0}, Rational(1, 12));
  b2 += tmono(sp, {1, 1}, Rational(1, 3));
  b2 += tmono(sp, {0, 2}, Rational(1, 12));
  CHECK(t22.coeff(2) == b2);
  // B_3/3! = -(t1^2 t2 + t1 t2^2)/12
  Polynomial b3(sp);
  b3 += tmono(sp, {2, 1}, Rational(-1, 12));
  b3 += tmono(sp, {1, 2}, Rational(-1, 12));
  CHECK(t22.coeff(3) == b3);

  auto t32 = em_polynomials(3, 2, 2);
  auto sp3 = t32.space();
  CHECK(t32.coeff(0).is_zero());
  CHECK(t32.coeff(1) == Polynomial::constant(sp3, Rational(-1, 2)));
  Polynomial c2(sp3);
  c2 += tmono(sp3, {1, 0, 0}, Rational(1, 3));
  c2 += tmono(sp3, {0, 1, 0}, Rational(1, 3));
  c2 += tmono(sp3, {0, 0, 1}, Rational(1, 3));
  CHECK(t32.coeff(2) == c2);

  auto t33 = em_polynomials(3, 3, 1);
  auto spc = t33.space();
  CHECK(t33.coeff(0) == Polynomial::constant(spc, Rational(1)));
  Polynomial d1(spc);
  d1 += tmono(spc, {1, 0, 0}, Rational(-1, 2));
  d1 += tmono(spc, {0, 1, 0}, Rational(-1, 2));
  d1 += tmono(spc, {0, 0, 1}, Rational(-1));
  CHECK(t33.coeff(1) == d1);

  // homogeneity: B_j^{(l,i)} has total degree j + i - l (or vanishes)
  for (auto [l, i] : {std::pair{3, 2}, std::pair{4, 2}, std::pair{4, 3}, std::pair{4, 4}}) {
    auto tbl = em_polynomials(l, i, 4);
    for (int j = 0; j <= 4; ++j) {
      if (tbl.coeff(j).is_zero()) continue;
      for (const auto& [I, c] : tbl.coeff(j).terms())
        CHECK(int(I.total_degree()) == j + i - l);
    }
  }
}

TEST_CASE("simplex integrals") {
  auto sp = VarSpace::make({VarBlock{"t", {1, 1, 1}}});
  // area of Delta(3) in its parameterization = 1/2
  CHECK(simplex_integral(Polynomial::constant(sp, Rational(1)), 3) == Rational(1, 2));
  // Int_{Delta(2)} t1 dt = 1/2; Int t1^2 = 1/3
  CHECK(simplex_integral(tmono(sp, {1, 0, 0}), 2) == Rational(1, 2));
  CHECK(simplex_integral(tmono(sp, {2, 0, 0}), 2) == Rational(1, 3));
  // Dirichlet: Int_{Delta(3)} t1 t2^2 = 1!2!/(3+2)! = 1/60
  CHECK(simplex_integral(tmono(sp, {1, 2, 0}), 3) == Rational(1, 60));
  // terms touching coordinates beyond the face vanish
  CHECK(simplex_integral(tmono(sp, {0, 0, 1}), 2) == Rational(0));
}

TEST_CASE("EM identity is exact for polynomial F at full order") {
  // The j = 0 term alone reproduces the plain simplex integral; with all
  // orders through deg F + l - 2 the lattice identity is exact.
  auto sp2 = VarSpace::make({VarBlock{"t", {1, 1}}});
  auto sp3 = VarSpace::make({VarBlock{"t", {1, 1, 1}}});
  struct Case {
    Polynomial F;
    int ell;
  };
  std::vector<Case> cases;
  cases.push_back({Polynomial::constant(sp2, Rational(1)), 2});
  cases.push_back({tmono(sp2, {1, 0}), 2});
  cases.push_back({tmono(sp2, {3, 1}), 2});
  cases.push_back({tmono(sp2, {0, 4}), 2});
  cases.push_back({Polynomial::constant(sp3, Rational(1)), 3});
  cases.push_back({tmono(sp3, {1, 2, 0}), 3});
  cases.push_back({tmono(sp3, {0, 0, 2}), 3});
  cases.push_back({tmono(sp3, {3, 0, 0}) + tmono(sp3, {1, 1, 1}, Rational(1, 2)), 3});
  for (const auto& [F, ell] : cases) {
    const int s = int(F.total_degree()) + ell - 1;
    for (long n : {5L, 8L, 12L})
      CHECK(em_lattice_sum(F, ell, n) == em_rhs(F, ell, std::max(s, 1), n));
  }
}

TEST_CASE("frozen lattice-sum values") {
  // hand-checkable pins (also produced by the sympy-independent oracle)
  auto sp2 = VarSpace::make({VarBlock{"t", {1, 1}}});
  CHECK(em_lattice_sum(Polynomial::constant(sp2, Rational(1)), 2, 5) == Rational(1));
  CHECK(em_lattice_sum(tmono(sp2, {1, 0}), 2, 5) == Rational(2, 5));
  CHECK(em_lattice_sum(tmono(sp2, {2, 0}), 2, 8) == Rational(35, 128));
  auto sp3 = VarSpace::make({VarBlock{"t", {1, 1, 1}}});
  CHECK(em_lattice_sum(tmono(sp3, {1, 2, 0}), 3, 6) == Rational(1, 288));
}

TEST_CASE("truncation error decays like n^{-s}") {
  auto sp2 = VarSpace::make({VarBlock{"t", {1, 1}}});
  auto sp3 = VarSpace::make({VarBlock{"t", {1, 1, 1}}});
  struct Case {
    Polynomial F;
    int ell, s;
  };
  std::vector<Case> cases;
  cases.push_back({tmono(sp2, {3, 0}), 2, 2});
  cases.push_back({tmono(sp2, {4, 0}) + tmono(sp2, {1, 2}), 2, 3});
  cases.push_back({tmono(sp3, {1, 2, 0}), 3, 2});
  for (const auto& [F, ell, s] : cases) {
    std::vector<long> ns{64, 128, 256, 512};
    auto rows = em_sum_check(F, ell, s, ns);
    // ratio of raw errors per doubling approaches 2^{-s} on the last octave
    const double r = std::abs(rows[3].error.to_double()) / std::abs(rows[2].error.to_double());
    CHECK(r == doctest::Approx(std::pow(2.0, -s)).epsilon(0.2));
    // and the compensated error stabilizes
    CHECK(rows[3].scaled_error == doctest::Approx(rows[2].scaled_error).epsilon(0.25));
  }
}

TEST_CASE("F identically 1 at l = 2 is exact at every truncation") {
  auto sp2 = VarSpace::make({VarBlock{"t", {1, 1}}});
  auto rows = em_sum_check(Polynomial::constant(sp2, Rational(1)), 2, 2, {4, 16, 64});
  for (const auto& row : rows) CHECK(row.error == Rational(0));
}

#include "nilwalk/euler_maclaurin.hpp"

#include <cmath>

namespace nilwalk {

namespace {

/// Complete homogeneous symmetric polynomial h_j(t_a, t_q) as a Polynomial.
Polynomial hpoly(const VarSpacePtr& sp, int j, std::size_t a, std::size_t q) {
  Polynomial out(sp);
  for (int k = 0; k <= j; ++k) {
    MultiIndex I(sp->dim());
    I[a] = uint32_t(k);
    I[q] += uint32_t(j - k);
    out.add_term(I, Rational(1));
  }
  return out;
}

}  // namespace

EMPolynomialTable::EMPolynomialTable(int ell, int i, int jmax)
    : ell_(ell), i_(i), jmax_(jmax) {
  if (ell < 2) throw std::domain_error("em_polynomials: ell >= 2 required");
  if (i < 2 || i > ell) throw std::domain_error("em_polynomials: need 2 <= i <= ell");
  if (jmax < 0) throw std::domain_error("em_polynomials: jmax >= 0 required");
  space_ = VarSpace::make({VarBlock{"t", std::vector<int>(std::size_t(ell), 1)}});

  // Per q-term: numerator prod_{a<i}(t_a - t_q) over the series
  // prod_{a != q} [(e^{x t_a} - e^{x t_q})/x], each factor expanded as
  // (t_a - t_q) * sum_j h_j(t_a,t_q) x^j/(j+1)!. Sum the q-terms over a
  // common denominator, then one exact series division.
  const int ord = jmax;
  std::vector<PolySeries> dens;  // d_q(x), valuation 0
  std::vector<Polynomial> nums;  // prod_{a<i}(t_a - t_q)
  for (int q = i; q <= ell; ++q) {
    PolySeries d(space_, ord);
    d[0] = Polynomial::constant(space_, Rational(1));
    for (int a = 1; a <= ell; ++a) {
      if (a == q) continue;
      PolySeries fac(space_, ord);
      Polynomial ta = Polynomial::variable(space_, std::size_t(a - 1));
      Polynomial tq = Polynomial::variable(space_, std::size_t(q - 1));
      for (int j = 0; j <= ord; ++j)
        fac[std::size_t(j)] =
            (ta - tq) * hpoly(space_, j, std::size_t(a - 1), std::size_t(q - 1))
                            .scaled(Rational(1) / factorial_rational(unsigned(j + 1)));
      d = d * fac;
    }
    dens.push_back(std::move(d));
    Polynomial num = Polynomial::constant(space_, Rational(1));
    for (int a = 1; a < i; ++a)
      num = num * (Polynomial::variable(space_, std::size_t(a - 1)) -
                   Polynomial::variable(space_, std::size_t(q - 1)));
    nums.push_back(std::move(num));
  }

  PolySeries numerator(space_, ord), denominator(space_, ord);
  denominator[0] = Polynomial::constant(space_, Rational(1));
  for (const auto& d : dens) denominator = denominator * d;
  for (std::size_t qi = 0; qi < dens.size(); ++qi) {
    PolySeries cross(space_, ord);
    cross[0] = nums[qi];
    for (std::size_t qj = 0; qj < dens.size(); ++qj)
      if (qj != qi) cross = cross * dens[qj];
    numerator += cross;
  }
  PolySeries quot = PolySeries::div(numerator, denominator, ord);
  const Rational sign = (ell - i) % 2 == 0 ? Rational(1) : Rational(-1);
  for (int j = 0; j <= jmax; ++j) coeffs_.push_back(quot[std::size_t(j)].scaled(sign));
}

EMPolynomialTable em_polynomials(int ell, int i, int jmax) {
  return EMPolynomialTable(ell, i, jmax);
}

Rational simplex_integral(const Polynomial& p, int i) {
  if (i < 1) throw std::domain_error("simplex_integral: i >= 1 required");
  // Dirichlet formula on Delta(i): Int prod t_a^{c_a} dt = prod c_a! /
  // (sum c_a + i - 1)! with the last i-1 coordinates integrated out.
  Rational acc(0);
  const std::size_t dim = p.space()->dim();
  for (const auto& [I, c] : p.terms()) {
    bool off_face = false;
    for (std::size_t a = std::size_t(i); a < dim; ++a)
      if (I[a] != 0) {
        off_face = true;  // t_a = 0 beyond the face kills the term
        break;
      }
    if (off_face) continue;
    Rational num(1);
    uint64_t total = 0;
    for (std::size_t a = 0; a < std::size_t(i); ++a) {
      num *= factorial_rational(I[a]);
      total += I[a];
    }
    acc += c * num / factorial_rational(unsigned(total + uint64_t(i) - 1));
  }
  return acc;
}

Polynomial apply_derivative_polynomial(const Polynomial& op, const Polynomial& F) {
  Polynomial out(F.space());
  if (op.space()->dim() > F.space()->dim())
    throw composition_error("apply_derivative_polynomial: operator has too many variables");
  for (const auto& [I, c] : op.terms()) {
    Polynomial g = F;
    for (std::size_t v = 0; v < I.dim() && !g.is_zero(); ++v)
      for (uint32_t k = 0; k < I[v]; ++k) g = g.derivative(v);
    out += g.scaled(c);
  }
  return out;
}

Rational em_rhs(const Polynomial& F, int ell, int s, long n) {
  Rational acc(0);
  const Rational ninv = Rational(1) / Rational(n);
  for (int i = 2; i <= ell; ++i) {
    EMPolynomialTable tbl(ell, i, s - 1);
    for (int k = 0; k < s; ++k) {
      const Polynomial& op = tbl.coeff(k);
      if (op.is_zero()) continue;
      Polynomial g = apply_derivative_polynomial(op, F);
      if (g.is_zero()) continue;
      acc += simplex_integral(g, i) * ninv.pow(k);
    }
  }
  return acc;
}

namespace {

void lattice_rec(const Polynomial& F, int ell, long n, long rem, std::size_t pos,
                 std::vector<Rational>& pt, Rational& acc) {
  if (pos + 1 == std::size_t(ell)) {
    pt[pos] = Rational(rem, n);
    acc += F.evaluate<Rational>(pt);
    return;
  }
  for (long v = 0; v <= rem; ++v) {
    pt[pos] = Rational(v, n);
    lattice_rec(F, ell, n, rem - v, pos + 1, pt, acc);
  }
}

}  // namespace

Rational em_lattice_sum(const Polynomial& F, int ell, long n) {
  if (n < ell) throw std::domain_error("em_lattice_sum: n >= ell required");
  Rational acc(0);
  std::vector<Rational> pt(std::size_t(ell), Rational(0));
  lattice_rec(F, ell, n, n - ell + 1, 0, pt, acc);
  return acc * (Rational(1) / Rational(n)).pow(ell - 1);
}

std::vector<EMCheckRow> em_sum_check(const Polynomial& F, int ell, int s,
                                     const std::vector<long>& ns) {
  std::vector<EMCheckRow> rows;
  for (long n : ns) {
    Rational err = em_lattice_sum(F, ell, n) - em_rhs(F, ell, s, n);
    double scaled = std::abs(err.to_double()) * std::pow(double(n), double(s));
    rows.push_back(EMCheckRow{n, err, scaled});
  }
  return rows;
}

}  // namespace nilwalk

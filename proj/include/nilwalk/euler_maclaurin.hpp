#pragma once

#include "nilwalk/series.hpp"

namespace nilwalk {

/// Polynomials B_j^{(l,i)}(t_1..t_l) of the multidimensional Euler-Maclaurin
/// formula, generated by
///   sum_j B_j^{(l,i)} x^j / j! = (-1)^{l-i} x^{l-1} *
///     sum_{q=i}^{l} prod_{a<i} (t_a - t_q) / prod_{a != q} (e^{x t_a} - e^{x t_q}).
/// Each B_j is homogeneous of degree j + i - l (zero when that is negative);
/// non-cancelling denominators at any order abort with singular_series_error.
class EMPolynomialTable {
 public:
  EMPolynomialTable(int ell, int i, int jmax);

  int ell() const { return ell_; }
  int face() const { return i_; }
  int jmax() const { return jmax_; }
  const VarSpacePtr& space() const { return space_; }  // block "t", ell coords
  /// B_j / j! (the generating-function coefficient; callers usually want
  /// this normalization).
  const Polynomial& coeff(int j) const { return coeffs_[std::size_t(j)]; }

 private:
  int ell_, i_, jmax_;
  VarSpacePtr space_;
  std::vector<Polynomial> coeffs_;
};

EMPolynomialTable em_polynomials(int ell, int i, int jmax);

/// Exact integral of a polynomial over the simplex Delta(i) = {t in R^i :
/// sum t = 1, t >= 0} embedded in the first i coordinates of its space
/// (remaining coordinates evaluated at 0); Lebesgue measure on the first
/// i-1 coordinates.
Rational simplex_integral(const Polynomial& p, int i);

/// B(d_1,...,d_l) F for a polynomial operator table entry: substitute the
/// partial-derivative operators for the t-variables of `op`.
Polynomial apply_derivative_polynomial(const Polynomial& op, const Polynomial& F);

/// Truncated Euler-Maclaurin right side through order s-1:
///   sum_{i=2}^{l} sum_{k=0}^{s-1} n^{-k} Int_{Delta(i)} (B_k^{(l,i)}/k!)(d) F|_{face}.
/// Exact rational for polynomial F and given n.
Rational em_rhs(const Polynomial& F, int ell, int s, long n);

/// Exact lattice sum (1/n^{l-1}) sum_{i_1+...+i_l = n-l+1, i_k >= 0} F(i/n).
Rational em_lattice_sum(const Polynomial& F, int ell, long n);

/// Error report of em_sum_check: per n, the exact |LHS - RHS| and the
/// compensated value error * n^s.
struct EMCheckRow {
  long n;
  Rational error;      // signed LHS - RHS
  double scaled_error; // |error| * n^s
};
std::vector<EMCheckRow> em_sum_check(const Polynomial& F, int ell, int s,
                                     const std::vector<long>& ns);

}  // namespace nilwalk

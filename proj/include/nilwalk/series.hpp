#pragma once

#include <vector>

#include "nilwalk/polynomial.hpp"

namespace nilwalk {

struct singular_series_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Truncated power series in one formal variable with Polynomial
/// coefficients: c[0] + c[1] x + ... + c[order] x^order.
class PolySeries {
 public:
  PolySeries(VarSpacePtr space, int order);

  int order() const { return int(c_.size()) - 1; }
  const Polynomial& operator[](std::size_t j) const { return c_[j]; }
  Polynomial& operator[](std::size_t j) { return c_[j]; }
  const VarSpacePtr& space() const { return space_; }

  /// Smallest j with c[j] != 0, or order()+1 when identically zero.
  int valuation() const;

  PolySeries& operator+=(const PolySeries& o);
  friend PolySeries operator+(PolySeries a, const PolySeries& b) { a += b; return a; }
  PolySeries scaled(const Rational& r) const;
  friend PolySeries operator*(const PolySeries& a, const PolySeries& b);

  /// Truncated quotient numerator/denominator through the requested order.
  /// The denominator's leading power of x is factored out first; its lowest
  /// nonzero coefficient must divide exactly at every order, otherwise a
  /// singular_series_error is thrown.
  static PolySeries div(const PolySeries& numerator, const PolySeries& denominator,
                        int order);

  /// Multiplicative inverse (denominator must have valuation 0).
  static PolySeries invert(const PolySeries& denominator, int order);

 private:
  VarSpacePtr space_;
  std::vector<Polynomial> c_;
};

}  // namespace nilwalk

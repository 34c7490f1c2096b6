#pragma once

#include <cmath>

#include "nilwalk/rational.hpp"

namespace nilwalk {

/// Element a + b u of the quadratic extension Q[u]/(u^2 - q), used with
/// q = 1/n and u = n^{-1/2} so that every CLT-scaled quantity at a rational
/// base point stays exact. Mixed-q arithmetic is a logic error.
class SqrtExt {
 public:
  SqrtExt() : a_(0), b_(0), q_(0) {}
  explicit SqrtExt(Rational a) : a_(std::move(a)), b_(0), q_(0) {}
  SqrtExt(Rational a, Rational b, Rational q)
      : a_(std::move(a)), b_(std::move(b)), q_(std::move(q)) {}

  static SqrtExt radical(const Rational& q) { return SqrtExt(Rational(0), Rational(1), q); }

  const Rational& even() const { return a_; }
  const Rational& odd() const { return b_; }
  const Rational& modulus() const { return q_; }
  bool is_zero() const { return a_.is_zero() && b_.is_zero(); }

  double to_double() const { return a_.to_double() + b_.to_double() * std::sqrt(q_.to_double()); }

  friend SqrtExt operator+(const SqrtExt& x, const SqrtExt& y) {
    return SqrtExt(x.a_ + y.a_, x.b_ + y.b_, merge(x, y));
  }
  friend SqrtExt operator-(const SqrtExt& x, const SqrtExt& y) {
    return SqrtExt(x.a_ - y.a_, x.b_ - y.b_, merge(x, y));
  }
  friend SqrtExt operator*(const SqrtExt& x, const SqrtExt& y) {
    const Rational q = merge(x, y);
    return SqrtExt(x.a_ * y.a_ + q * x.b_ * y.b_, x.a_ * y.b_ + x.b_ * y.a_, q);
  }
  SqrtExt operator-() const { return SqrtExt(-a_, -b_, q_); }
  SqrtExt scaled(const Rational& c) const { return SqrtExt(a_ * c, b_ * c, q_); }

  friend bool operator==(const SqrtExt& x, const SqrtExt& y) {
    return x.a_ == y.a_ && x.b_ == y.b_;
  }

 private:
  static Rational merge(const SqrtExt& x, const SqrtExt& y) {
    if (x.q_.is_zero()) return y.q_;
    if (y.q_.is_zero() || x.q_ == y.q_) return x.q_;
    throw std::logic_error("SqrtExt: mixing different radicals");
  }
  Rational a_, b_, q_;
};

/// u^k for u = sqrt(q): rational when k is even.
inline SqrtExt radical_pow(const Rational& q, uint64_t k) {
  Rational even = q.pow(long(k / 2));
  if (k % 2 == 0) return SqrtExt(even, Rational(0), q);
  return SqrtExt(Rational(0), even, q);
}

}  // namespace nilwalk

#include "nilwalk/rational.hpp"

#include <ostream>

namespace nilwalk {

Rational Rational::from_string(const std::string& s) {
  if (s.empty()) throw std::invalid_argument("Rational: empty string");
  mpq_class q;
  if (q.set_str(s, 10) != 0)
    throw std::invalid_argument("Rational: cannot parse '" + s + "'");
  if (q.get_den() == 0)
    throw std::invalid_argument("Rational: zero denominator in '" + s + "'");
  q.canonicalize();
  return Rational(q);
}

std::string Rational::str() const {
  return v_.get_str();
}

Rational Rational::pow(long k) const {
  if (k < 0) {
    if (is_zero()) throw std::domain_error("Rational: 0^negative");
    return (Rational(1) / *this).pow(-k);
  }
  mpz_class n, d;
  mpz_pow_ui(n.get_mpz_t(), v_.get_num().get_mpz_t(), static_cast<unsigned long>(k));
  mpz_pow_ui(d.get_mpz_t(), v_.get_den().get_mpz_t(), static_cast<unsigned long>(k));
  Rational r;
  r.v_ = mpq_class(n, d);
  return r;
}

std::ostream& operator<<(std::ostream& os, const Rational& r) {
  return os << r.v_.get_str();
}

std::size_t Rational::hash() const {
  // FNV-1a over the canonical decimal string; content-stable across runs.
  std::size_t h = 1469598103934665603ull;
  for (char c : v_.get_str()) {
    h ^= static_cast<unsigned char>(c);
    h *= 1099511628211ull;
  }
  return h;
}

Rational factorial_rational(unsigned n) {
  mpz_class f;
  mpz_fac_ui(f.get_mpz_t(), n);
  return Rational(f);
}

Rational binomial_rational(unsigned n, unsigned k) {
  if (k > n) return Rational(0);
  mpz_class b;
  mpz_bin_uiui(b.get_mpz_t(), n, k);
  return Rational(b);
}

}  // namespace nilwalk

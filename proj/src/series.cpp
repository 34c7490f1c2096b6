#include "nilwalk/series.hpp"

namespace nilwalk {

PolySeries::PolySeries(VarSpacePtr space, int order) : space_(std::move(space)) {
  if (order < 0) throw std::invalid_argument("PolySeries: negative order");
  c_.assign(std::size_t(order) + 1, Polynomial(space_));
}

int PolySeries::valuation() const {
  for (std::size_t j = 0; j < c_.size(); ++j)
    if (!c_[j].is_zero()) return int(j);
  return int(c_.size());
}

PolySeries& PolySeries::operator+=(const PolySeries& o) {
  for (std::size_t j = 0; j < c_.size() && j < o.c_.size(); ++j) c_[j] += o.c_[j];
  return *this;
}

PolySeries PolySeries::scaled(const Rational& r) const {
  PolySeries out(space_, order());
  for (std::size_t j = 0; j < c_.size(); ++j) out.c_[j] = c_[j].scaled(r);
  return out;
}

PolySeries operator*(const PolySeries& a, const PolySeries& b) {
  const int ord = std::min(a.order(), b.order());
  PolySeries out(a.space_, ord);
  for (int j = 0; j <= ord; ++j)
    for (int k = 0; k <= j; ++k) out.c_[j] += a.c_[k] * b.c_[j - k];
  return out;
}

PolySeries PolySeries::div(const PolySeries& numerator, const PolySeries& denominator,
                           int order) {
  const int dv = denominator.valuation();
  if (dv > denominator.order())
    throw singular_series_error("series division by the zero series");
  const int nv = numerator.valuation();
  if (nv < dv)
    throw singular_series_error(
        "series division would produce negative powers of the formal variable");
  // Shift both by x^{-dv}; the quotient needs den coefficients up to
  // order + (numerator shift headroom).
  const Polynomial& d0 = denominator[dv];
  PolySeries q(numerator.space(), order);
  std::vector<Polynomial> qs;
  for (int j = 0; j <= order; ++j) {
    // residual_j = num[j+dv] - sum_{k<j} q_k * den[j-k+dv]
    Polynomial res = (j + dv <= numerator.order()) ? numerator[std::size_t(j + dv)]
                                                   : Polynomial(numerator.space());
    for (int k = 0; k < j; ++k) {
      const int di = j - k + dv;
      if (di <= denominator.order()) res -= qs[std::size_t(k)] * denominator[std::size_t(di)];
    }
    if (res.is_zero()) {
      qs.push_back(Polynomial(numerator.space()));
    } else {
      auto quo = res.div_exact(d0);
      if (!quo)
        throw singular_series_error(
            "series division: lowest-order denominator coefficient does not divide at order " +
            std::to_string(j));
      qs.push_back(std::move(*quo));
    }
    q[std::size_t(j)] = qs.back();
  }
  return q;
}

PolySeries PolySeries::invert(const PolySeries& denominator, int order) {
  if (denominator.valuation() != 0)
    throw singular_series_error("series inversion needs valuation 0");
  PolySeries one(denominator.space(), order);
  one[0] = Polynomial::constant(denominator.space(), Rational(1));
  return div(one, denominator, order);
}

}  // namespace nilwalk

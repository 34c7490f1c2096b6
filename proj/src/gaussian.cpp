#include "nilwalk/gaussian.hpp"

#include <Eigen/Cholesky>

#include "nilwalk/rng.hpp"

namespace nilwalk {

void GaussianSpec::validate() const {
  const Eigen::Index d1 = A.rows();
  if (A.cols() != d1) throw std::invalid_argument("GaussianSpec: A must be square");
  for (Eigen::Index i = 0; i < d1; ++i)
    for (Eigen::Index j = 0; j < d1; ++j)
      if (A(i, j) != A(j, i)) throw std::invalid_argument("GaussianSpec: A must be symmetric");
  // PSD iff every principal minor is >= 0; d1 is small, so enumerate.
  for (unsigned mask = 1; mask < (1u << unsigned(d1)); ++mask) {
    std::vector<Eigen::Index> idx;
    for (Eigen::Index i = 0; i < d1; ++i)
      if (mask & (1u << unsigned(i))) idx.push_back(i);
    RatMatrix sub(Eigen::Index(idx.size()), Eigen::Index(idx.size()));
    for (std::size_t a = 0; a < idx.size(); ++a)
      for (std::size_t b = 0; b < idx.size(); ++b)
        sub(Eigen::Index(a), Eigen::Index(b)) = A(idx[a], idx[b]);
    // exact determinant by fraction-free expansion (small sizes)
    std::function<Rational(const RatMatrix&)> det = [&](const RatMatrix& M) -> Rational {
      const Eigen::Index n = M.rows();
      if (n == 1) return M(0, 0);
      Rational d(0);
      int sign = 1;
      for (Eigen::Index c = 0; c < n; ++c) {
        RatMatrix minor(n - 1, n - 1);
        for (Eigen::Index r = 1; r < n; ++r) {
          Eigen::Index cc = 0;
          for (Eigen::Index c2 = 0; c2 < n; ++c2) {
            if (c2 == c) continue;
            minor(r - 1, cc++) = M(r, c2);
          }
        }
        d += Rational(sign) * M(0, c) * det(minor);
        sign = -sign;
      }
      return d;
    };
    if (det(sub).sign() < 0)
      throw std::invalid_argument("GaussianSpec: A is not positive semidefinite");
  }
}

GaussianMomentTable::GaussianMomentTable(AlgebraPtr algebra, const GaussianSpec& spec, int dmax)
    : algebra_(std::move(algebra)), dmax_(dmax) {
  spec.validate();
  const std::size_t d1 = algebra_->d1(), d2 = algebra_->d2();
  if (std::size_t(spec.A.rows()) != d1)
    throw std::invalid_argument("GaussianMomentTable: A dimension != d1");
  if (std::size_t(spec.b.size()) != d2)
    throw std::invalid_argument("GaussianMomentTable: b dimension != d2");

  const CbhTable& cbh = cbh_table(algebra_, dmax);
  indices_ = cbh.indices();
  for (std::size_t i = 0; i < indices_.size(); ++i) lookup_[indices_[i]] = i;
  values_.assign(indices_.size(), Rational(0));

  // indices() is sorted by weighted degree, so one forward pass settles the
  // recursion in increasing d(I).
  for (std::size_t ii = 0; ii < indices_.size(); ++ii) {
    const MultiIndex& I = indices_[ii];
    const uint64_t d = cbh.wdeg(ii);
    if (d == 0) {
      values_[ii] = Rational(1);
      continue;
    }
    if (d % 2 == 1) {
      values_[ii] = Rational(0);  // Lemma: odd weighted degree vanishes
      continue;
    }
    if (d == 2) {
      // base cases: b_i for the layer-2 unit index, A_ij for [i]+[j]
      if (I.total_degree() == 1) {
        for (std::size_t c = 0; c < algebra_->dim(); ++c)
          if (I[c]) values_[ii] = spec.b[Eigen::Index(c - d1)];
      } else {
        std::vector<std::size_t> comp;
        for (std::size_t c = 0; c < algebra_->dim(); ++c)
          for (uint32_t k = 0; k < I[c]; ++k) comp.push_back(c);
        values_[ii] = spec.A(Eigen::Index(comp[0]), Eigen::Index(comp[1]));
      }
      continue;
    }
    // recursion: m^I = (2^{d/2} - 2)^{-1} sum_{d(J),d(K)>=1} C_JK m^J m^K
    const Rational denom = Rational(2).pow(long(d / 2)) - Rational(2);
    if (denom.is_zero())
      throw std::logic_error("GaussianMomentTable: zero denominator guard (d(I)=2 in recursion)");
    Rational acc(0);
    for (const CbhTerm& t : cbh.expansion(ii)) {
      if (cbh.wdeg(t.jidx) == 0 || cbh.wdeg(t.kidx) == 0) continue;
      const Rational &mj = values_[t.jidx], &mk = values_[t.kidx];
      if (mj.is_zero() || mk.is_zero()) continue;
      acc += t.c * mj * mk;
    }
    values_[ii] = acc / denom;
  }
}

const Rational& GaussianMomentTable::moment(const MultiIndex& I) const {
  auto it = lookup_.find(I);
  if (it == lookup_.end())
    throw std::out_of_range("GaussianMomentTable: index beyond dmax cap");
  return values_[it->second];
}

Rational GaussianMomentTable::semigroup_moment(const Rational& t, const MultiIndex& I) const {
  if (t.sign() <= 0) throw std::domain_error("semigroup_moment: t must be positive");
  const uint64_t d = I.weighted_degree(algebra_->weights());
  if (d % 2 == 1) return Rational(0);
  return moment(I) * t.pow(long(d / 2));
}

double GaussianMomentTable::semigroup_moment_d(double t, const MultiIndex& I) const {
  if (t <= 0) throw std::domain_error("semigroup_moment: t must be positive");
  const uint64_t d = I.weighted_degree(algebra_->weights());
  return moment(I).to_double() * std::pow(t, double(d) / 2.0);
}

Rational gaussian_moment_closed_form(const AlgebraPtr& algebra, const GaussianSpec& spec,
                                     const MultiIndex& I) {
  const uint64_t d = I.weighted_degree(algebra->weights());
  if (d % 2 == 1) return Rational(0);
  GaussianMomentTable base(algebra, spec, 2);
  if (d == 0) return Rational(1);
  if (d == 2) return base.moment(I);
  const int k = int(d / 2);
  auto expansion = cbh_multi_expansion(algebra, k, I);
  Rational acc(0);
  const auto& w = algebra->weights();
  for (const auto& [parts, c] : expansion) {
    Rational prod = c;
    bool ok = true;
    for (const MultiIndex& J : parts) {
      if (J.weighted_degree(w) != 2) {
        ok = false;
        break;
      }
      prod *= base.moment(J);
      if (prod.is_zero()) break;
    }
    if (ok && !prod.is_zero()) acc += prod;
  }
  return acc / factorial_rational(unsigned(k));
}

Rational heat_apply(const AlgebraPtr& algebra, const GaussianMomentTable& table,
                    const Polynomial& f, const Rational& t, const GroupElement& g) {
  if (t.sign() < 0) throw std::domain_error("heat_apply: t must be nonnegative");
  if (t.is_zero()) {
    std::vector<Rational> pt(g.data(), g.data() + g.size());
    return f.evaluate<Rational>(pt);
  }
  Rational acc(0);
  for (const auto& [I, coeffPoly] : taylor_expansion(algebra, f, TaylorSide::right)) {
    Rational mom = table.semigroup_moment(t, I);
    if (mom.is_zero()) continue;
    std::vector<Rational> pt(g.data(), g.data() + g.size());
    acc += coeffPoly.evaluate<Rational>(pt) * mom;
  }
  return acc;
}

double approx_operator_d(const AlgebraPtr& algebra, const Polynomial& f, double eps,
                         const GroupElement& point) {
  if (eps <= 0) throw std::domain_error("approx_operator: eps must be positive");
  std::vector<double> pt;
  pt.reserve(std::size_t(point.size()));
  for (Eigen::Index i = 0; i < point.size(); ++i)
    pt.push_back(point[i].to_double() * std::pow(eps, algebra->weight(std::size_t(i))));
  return f.evaluate<double>(pt);
}

Polynomial generator_apply(const AlgebraPtr& algebra, const GaussianSpec& spec,
                           const Polynomial& f, std::size_t block) {
  const std::size_t d1 = algebra->d1(), d2 = algebra->d2();
  Polynomial out(f.space());
  for (std::size_t i = 0; i < d1; ++i) {
    for (std::size_t j = 0; j < d1; ++j) {
      const Rational& a = spec.A(Eigen::Index(i), Eigen::Index(j));
      if (a.is_zero()) continue;
      Polynomial fij = left_invariant_derivative(
          algebra, left_invariant_derivative(algebra, f, block, j), block, i);
      out += fij.scaled(a * Rational(1, 2));
    }
  }
  for (std::size_t i = 0; i < d2; ++i) {
    const Rational& bi = spec.b[Eigen::Index(i)];
    if (bi.is_zero()) continue;
    out += left_invariant_derivative(algebra, f, block, d1 + i).scaled(bi);
  }
  return out;
}

Rational convolution_moment(const AlgebraPtr& algebra, const GaussianMomentTable& table,
                            const Rational& s, const Rational& t, const MultiIndex& I) {
  const CbhTable& cbh = cbh_table(algebra, table.dmax());
  Rational acc(0);
  for (const CbhTerm& term : cbh.expansion(cbh.index_of(I))) {
    Rational ms = table.semigroup_moment(s, cbh.indices()[term.jidx]);
    if (ms.is_zero()) continue;
    Rational mt = table.semigroup_moment(t, cbh.indices()[term.kidx]);
    if (mt.is_zero()) continue;
    acc += term.c * ms * mt;
  }
  return acc;
}

std::vector<Eigen::VectorXd> mc_heat(const AlgebraPtr& algebra, const GaussianSpec& spec,
                                     double t, std::size_t count, uint64_t seed, int steps) {
  if (count < 1 || steps < 1) throw std::domain_error("mc_heat: count and steps must be >= 1");
  const std::size_t d1 = algebra->d1(), d2 = algebra->d2(), D = algebra->dim();
  Eigen::MatrixXd Ad = Eigen::MatrixXd::Zero(Eigen::Index(d1), Eigen::Index(d1));
  for (std::size_t i = 0; i < d1; ++i)
    for (std::size_t j = 0; j < d1; ++j)
      Ad(Eigen::Index(i), Eigen::Index(j)) =
          spec.A(Eigen::Index(i), Eigen::Index(j)).to_double();
  // Cholesky-like square root tolerant of semidefinite A.
  Eigen::LDLT<Eigen::MatrixXd> ldlt(Ad);
  Eigen::MatrixXd Lfac = ldlt.matrixL();
  Eigen::VectorXd dsqrt = ldlt.vectorD().cwiseMax(0.0).cwiseSqrt();
  Eigen::MatrixXd sqrtA =
      ldlt.transpositionsP().transpose() * (Lfac * dsqrt.asDiagonal()).eval();

  const double dt = t / steps;
  const double sdt = std::sqrt(dt);
  std::vector<Eigen::VectorXd> out(count);
  for (std::size_t s = 0; s < count; ++s) {
    CounterRng rng(seed, s);
    Eigen::VectorXd cur = Eigen::VectorXd::Zero(Eigen::Index(D));
    Eigen::VectorXd inc = Eigen::VectorXd::Zero(Eigen::Index(D));
    Eigen::VectorXd z = Eigen::VectorXd::Zero(Eigen::Index(d1));
    for (int k = 0; k < steps; ++k) {
      for (std::size_t i = 0; i < d1; ++i) z[Eigen::Index(i)] = rng.next_normal();
      inc.head(Eigen::Index(d1)) = sdt * (sqrtA * z);
      for (std::size_t i = 0; i < d2; ++i)
        inc[Eigen::Index(d1 + i)] = dt * spec.b[Eigen::Index(i)].to_double();
      cur = group_mul_d(*algebra, cur, inc);
    }
    out[s] = cur;
  }
  return out;
}

}  // namespace nilwalk

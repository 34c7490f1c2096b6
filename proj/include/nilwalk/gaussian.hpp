#pragma once

#include "nilwalk/group.hpp"

namespace nilwalk {

/// Data of the limiting Gaussian semigroup generator
///   A = 1/2 sum A_ij a_i a_j + sum b_i a_i
/// with A symmetric positive semidefinite on layer 1 and b on layer 2.
struct GaussianSpec {
  RatMatrix A;  // d1 x d1
  RatVector b;  // d2

  /// Symmetry plus positive semidefiniteness (all principal minors >= 0,
  /// exact).
  void validate() const;
};

/// Exact moment table m_nu^I of the time-1 Gaussian measure for d(I) <= dmax,
/// built from the base cases (odd moments vanish; A_ij and b_i at d(I) = 2)
/// and the recursion m^I = (2^{d(I)/2} - 2)^{-1} sum C_JK m^J m^K.
class GaussianMomentTable {
 public:
  GaussianMomentTable(AlgebraPtr algebra, const GaussianSpec& spec, int dmax);

  int dmax() const { return dmax_; }
  const AlgebraPtr& algebra() const { return algebra_; }
  /// m_nu^I; throws if d(I) > dmax.
  const Rational& moment(const MultiIndex& I) const;
  const std::vector<MultiIndex>& indices() const { return indices_; }
  const Rational& moment_at(std::size_t idx) const { return values_[idx]; }

  /// m_{nu_t}^I = t^{d(I)/2} m_nu^I, exact for rational t (odd d(I) gives 0).
  Rational semigroup_moment(const Rational& t, const MultiIndex& I) const;
  double semigroup_moment_d(double t, const MultiIndex& I) const;

 private:
  AlgebraPtr algebra_;
  int dmax_;
  std::vector<MultiIndex> indices_;
  std::map<MultiIndex, std::size_t> lookup_;
  std::vector<Rational> values_;
};

/// The even-order closed form m^I = (1/(d/2)!) sum C_{J1..J_{d/2}} prod m^{Jk}
/// over tuples with every d(Jk) = 2; the dual route to the recursion.
Rational gaussian_moment_closed_form(const AlgebraPtr& algebra, const GaussianSpec& spec,
                                     const MultiIndex& I);

/// e^{tA} f(g) = sum_I hatS^I f(g) m_{nu_t}^I, a finite exact sum for
/// polynomial f and rational t >= 0.
Rational heat_apply(const AlgebraPtr& algebra, const GaussianMomentTable& table,
                    const Polynomial& f, const Rational& t, const GroupElement& g);

/// P^H_eps f(x) = f(tau_eps(Phi(x))) evaluated at a group point (float).
double approx_operator_d(const AlgebraPtr& algebra, const Polynomial& f, double eps,
                         const GroupElement& point);

/// The generator as an exact operator on polynomials:
///   A f = 1/2 sum A_ij a_i a_j f + sum b_i a_i f
/// with left-invariant fields acting in block `block` of f's space.
Polynomial generator_apply(const AlgebraPtr& algebra, const GaussianSpec& spec,
                           const Polynomial& f, std::size_t block = 0);

/// Moments of nu_s * nu_t via the CBH product expansion and independence;
/// equals the nu_{s+t} moment exactly (Chapman-Kolmogorov at moment level).
Rational convolution_moment(const AlgebraPtr& algebra, const GaussianMomentTable& table,
                            const Rational& s, const Rational& t, const MultiIndex& I);

/// Counter-based reproducible sampler for a fine-step product approximation
/// of nu_t: `steps` i.i.d. increments exp(sqrt(t/k) N(0,A) (+) (t/k) b),
/// group-multiplied. Returns one endpoint per sample index.
std::vector<Eigen::VectorXd> mc_heat(const AlgebraPtr& algebra, const GaussianSpec& spec,
                                     double t, std::size_t count, uint64_t seed,
                                     int steps = 1024);

}  // namespace nilwalk

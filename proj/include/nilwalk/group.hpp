#pragma once

#include <unordered_map>

#include "nilwalk/algebra.hpp"
#include "nilwalk/multi_index.hpp"
#include "nilwalk/polynomial.hpp"

namespace nilwalk {

/// A point of G in exponential coordinates of the first kind: a vector of D
/// exact rationals. The identity is the zero vector and inversion is
/// negation; the product is the closed BCH formula
///   z = x + y + 1/2 [x,y] + 1/12 [x,[x,y]] + 1/12 [y,[y,x]],
/// exact for step r <= 3.
using GroupElement = RatVector;

GroupElement group_identity(const StratifiedAlgebra& g);
GroupElement group_mul(const StratifiedAlgebra& g, const GroupElement& x,
                       const GroupElement& y);
GroupElement group_inverse(const GroupElement& x);

/// tau_eps: multiplies layer-k coordinates by eps^k. Requires eps > 0.
GroupElement dilate(const StratifiedAlgebra& g, const Rational& eps, const GroupElement& x);

/// Float BCH product for samplers.
Eigen::VectorXd group_mul_d(const StratifiedAlgebra& g, const Eigen::VectorXd& x,
                            const Eigen::VectorXd& y);

/// Homogeneous norm |x| = sum_i |x_i|^{1/sigma_i} (float).
double hom_norm(const StratifiedAlgebra& g, const GroupElement& x);
double hom_norm_d(const StratifiedAlgebra& g, const Eigen::VectorXd& x);

/// x^I = prod x_i^{i_i}.
Rational monomial_value(const GroupElement& x, const MultiIndex& I);

/// The group law as a polynomial map: component c of x*y as a Polynomial on
/// the two-block space {x, y}. Shared space across components.
struct GroupLaw {
  VarSpacePtr space;  // blocks: x, y
  std::vector<Polynomial> component;
};
const GroupLaw& group_law(const AlgebraPtr& g);

/// Left product of k >= 2 group arguments x1 * x2 * ... * xk as polynomials
/// on the k-block space {x1..xk}.
struct MultiLaw {
  VarSpacePtr space;
  std::vector<Polynomial> component;
};
MultiLaw multi_law(const AlgebraPtr& g, int k);

/// CBH coefficient table: for each multi-index I with d(I) <= dmax, the
/// exact expansion (x*y)^I = sum C_{JK} x^J y^K, including the trivial
/// (I,0),(0,I) terms with coefficient 1. Every emitted pair satisfies
/// d(J) + d(K) = d(I). Tables are computed once per (algebra, dmax) and
/// memoized on the structure-constant hash.
struct CbhTerm {
  std::size_t jidx;  // index into the shared multi-index list
  std::size_t kidx;
  Rational c;
};
class CbhTable {
 public:
  CbhTable(const AlgebraPtr& g, int dmax);

  int dmax() const { return dmax_; }
  const std::vector<MultiIndex>& indices() const { return indices_; }
  std::size_t index_of(const MultiIndex& I) const;
  const std::vector<CbhTerm>& expansion(std::size_t iidx) const { return rows_[iidx]; }
  uint64_t wdeg(std::size_t iidx) const { return wdeg_[iidx]; }

 private:
  int dmax_;
  std::vector<MultiIndex> indices_;
  std::map<MultiIndex, std::size_t> lookup_;
  std::vector<std::vector<CbhTerm>> rows_;
  std::vector<uint64_t> wdeg_;
};
const CbhTable& cbh_table(const AlgebraPtr& g, int dmax);

/// Multi-factor CBH: coefficients of (x1*...*xk)^I as a map from the k-tuple
/// (J1..Jk) of per-factor indices. Used for the closed even-moment formula
/// and the Chapman-Kolmogorov moment identity.
std::map<std::vector<MultiIndex>, Rational> cbh_multi_expansion(const AlgebraPtr& g, int k,
                                                                const MultiIndex& I);

enum class TaylorSide { left, right };

/// Taylor-coefficient operator on polynomial f over the one-block space of
/// G. side == right gives hat-S^I f: the coefficient of y^I in f(g*y);
/// side == left gives S^I f: the coefficient of y^I in f(y*g). The result is
/// a Polynomial in the base-point block g.
Polynomial taylor_coeff(const AlgebraPtr& g, const Polynomial& f, const MultiIndex& I,
                        TaylorSide side);

/// All Taylor coefficients of f at once: pairs (I, hat-S^I f) for the chosen
/// side, dropping zero coefficients.
std::vector<std::pair<MultiIndex, Polynomial>> taylor_expansion(const AlgebraPtr& g,
                                                                const Polynomial& f,
                                                                TaylorSide side);

/// One-block variable space of G with the algebra's layer weights.
VarSpacePtr group_space(const AlgebraPtr& g, const std::string& name = "x");

/// Left-invariant vector field a_v acting on a polynomial in block `block`
/// of f's space: (a_v f)(..., x, ...) = d/ds f(..., x * (s e_v), ...)|_{s=0}.
Polynomial left_invariant_derivative(const AlgebraPtr& g, const Polynomial& f,
                                     std::size_t block, std::size_t v);

}  // namespace nilwalk

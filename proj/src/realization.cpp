#include "nilwalk/realization.hpp"

#include <Eigen/LU>

namespace nilwalk {

Realization::Realization(AlgebraPtr algebra, const QuotientGraph& graph,
                         std::vector<GroupElement> positions,
                         std::vector<GroupElement> holonomies)
    : algebra_(std::move(algebra)),
      positions_(std::move(positions)),
      holonomies_(std::move(holonomies)) {
  if (positions_.size() != graph.vertex_count())
    throw realization_error("Realization: one position per vertex required");
  if (holonomies_.size() != graph.edge_count())
    throw realization_error("Realization: one holonomy per edge required");
  const StratifiedAlgebra& g = *algebra_;
  for (std::size_t e = 0; e < holonomies_.size(); ++e) {
    const Edge& ed = graph.edge(e);
    GroupElement inv = group_inverse(holonomies_[ed.inverse]);
    if (holonomies_[e] != inv)
      throw realization_error("Realization: gamma(ebar) != gamma(e)^{-1} at edge " + ed.id);
  }
  hops_.reserve(holonomies_.size());
  for (std::size_t e = 0; e < holonomies_.size(); ++e) {
    const Edge& ed = graph.edge(e);
    hops_.push_back(group_mul(g, group_mul(g, group_inverse(positions_[ed.origin]),
                                           holonomies_[e]),
                              positions_[ed.terminus]));
  }
}

RatVector asymptotic_direction(const QuotientGraph& g, const RatVector& m,
                               const Realization& r) {
  const std::size_t d1 = r.algebra()->d1();
  RatVector dir = RatVector::Constant(Eigen::Index(d1), Rational(0));
  for (std::size_t e = 0; e < g.edge_count(); ++e) {
    const Edge& ed = g.edge(e);
    const Rational mt = ed.p * m[Eigen::Index(ed.origin)];
    if (mt.is_zero()) continue;
    for (std::size_t i = 0; i < d1; ++i) dir[Eigen::Index(i)] += mt * r.hop(e)[Eigen::Index(i)];
  }
  return dir;
}

bool is_centered(const RatVector& direction) {
  for (Eigen::Index i = 0; i < direction.size(); ++i)
    if (!direction[i].is_zero()) return false;
  return true;
}

Realization solve_modified_harmonic(const AlgebraPtr& algebra, const QuotientGraph& g,
                                    const RatVector& m,
                                    const std::vector<GroupElement>& holonomies,
                                    std::size_t anchor,
                                    const std::vector<GroupElement>* higher_layers) {
  const Eigen::Index n = Eigen::Index(g.vertex_count());
  const std::size_t d1 = algebra->d1();
  const std::size_t D = algebra->dim();

  // The asymptotic direction is position independent, so compute it from the
  // zero-position realization first.
  std::vector<GroupElement> zero_pos(g.vertex_count(), group_identity(*algebra));
  Realization flat(algebra, g, zero_pos, holonomies);
  RatVector rho = asymptotic_direction(g, m, flat);

  // Per layer-1 coordinate: (I - P) u = c with c(x) = sum p(e) gamma^(1)(e)
  // - rho; the anchor row pins u(anchor) = 0.
  RatMatrix A = RatMatrix::Constant(n, n, Rational(0));
  RatMatrix B = RatMatrix::Constant(n, Eigen::Index(d1), Rational(0));
  for (Eigen::Index x = 0; x < n; ++x) {
    A(x, x) = Rational(1);
    for (std::size_t e : g.out_edges(std::size_t(x))) {
      const Edge& ed = g.edge(e);
      A(x, Eigen::Index(ed.terminus)) -= ed.p;
      for (std::size_t i = 0; i < d1; ++i)
        B(x, Eigen::Index(i)) += ed.p * holonomies[e][Eigen::Index(i)];
    }
    for (std::size_t i = 0; i < d1; ++i) B(x, Eigen::Index(i)) -= rho[Eigen::Index(i)];
  }
  for (Eigen::Index y = 0; y < n; ++y) A(Eigen::Index(anchor), y) = Rational(0);
  A(Eigen::Index(anchor), Eigen::Index(anchor)) = Rational(1);
  for (std::size_t i = 0; i < d1; ++i) B(Eigen::Index(anchor), Eigen::Index(i)) = Rational(0);

  Eigen::FullPivLU<RatMatrix> lu(A);
  lu.setThreshold(Rational(0));
  if (lu.rank() != n)
    throw realization_error("solve_modified_harmonic: singular system (internal error)");
  RatMatrix U = lu.solve(B);

  std::vector<GroupElement> pos(g.vertex_count());
  for (Eigen::Index x = 0; x < n; ++x) {
    GroupElement p = higher_layers ? (*higher_layers)[std::size_t(x)]
                                   : group_identity(*algebra);
    if (p.size() != Eigen::Index(D))
      throw realization_error("solve_modified_harmonic: higher-layer override has wrong size");
    for (std::size_t i = 0; i < d1; ++i) p[Eigen::Index(i)] = U(x, Eigen::Index(i));
    pos[std::size_t(x)] = p;
  }
  return Realization(algebra, g, pos, holonomies);
}

std::vector<RatVector> harmonic_residual(const QuotientGraph& g, const RatVector& m,
                                         const Realization& r) {
  const std::size_t d1 = r.algebra()->d1();
  RatVector rho = asymptotic_direction(g, m, r);
  std::vector<RatVector> res;
  for (std::size_t x = 0; x < g.vertex_count(); ++x) {
    RatVector v = RatVector::Constant(Eigen::Index(d1), Rational(0));
    for (std::size_t e : g.out_edges(x)) {
      const Rational& p = g.edge(e).p;
      for (std::size_t i = 0; i < d1; ++i) v[Eigen::Index(i)] += p * r.hop(e)[Eigen::Index(i)];
    }
    res.push_back(v - rho);
  }
  return res;
}

double corrector_norm(const QuotientGraph& g, const Realization& a, const Realization& b) {
  if (a.holonomies().size() != b.holonomies().size())
    throw realization_error("corrector_norm: incompatible realizations");
  for (std::size_t e = 0; e < a.holonomies().size(); ++e)
    if (a.holonomy(e) != b.holonomy(e))
      throw realization_error("corrector_norm: holonomies differ at edge " + g.edge(e).id);
  const StratifiedAlgebra& alg = *a.algebra();
  double best = 0;
  for (std::size_t x = 0; x < g.vertex_count(); ++x) {
    GroupElement d = group_mul(alg, group_inverse(a.position(x)), b.position(x));
    best = std::max(best, hom_norm(alg, d));
  }
  return best;
}

}  // namespace nilwalk

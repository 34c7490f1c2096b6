#pragma once

#include "nilwalk/graph.hpp"
#include "nilwalk/group.hpp"

namespace nilwalk {

struct realization_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Gamma-equivariant realization of the covering graph, encoded as vertex
/// positions on fundamental-domain representatives plus per-edge holonomies
/// gamma(e) in G with gamma(ebar) = gamma(e)^{-1}. All walk quantities
/// factor through the hops dPhi(e) = Phi(o(e))^{-1} * gamma(e) * Phi(t(e)).
class Realization {
 public:
  Realization(AlgebraPtr algebra, const QuotientGraph& graph,
              std::vector<GroupElement> positions, std::vector<GroupElement> holonomies);

  const AlgebraPtr& algebra() const { return algebra_; }
  const GroupElement& position(std::size_t x) const { return positions_[x]; }
  const GroupElement& holonomy(std::size_t e) const { return holonomies_[e]; }
  const std::vector<GroupElement>& holonomies() const { return holonomies_; }

  /// dPhi(e): the increment of the embedded walk along the canonical lift.
  const GroupElement& hop(std::size_t e) const { return hops_[e]; }

 private:
  AlgebraPtr algebra_;
  std::vector<GroupElement> positions_;
  std::vector<GroupElement> holonomies_;
  std::vector<GroupElement> hops_;
};

/// rho_R(gamma_p) = sum_e mtilde(e) * (layer-1 part of hop(e)); the
/// homological drift of the walk mapped to g^(1). Position independent.
RatVector asymptotic_direction(const QuotientGraph& g, const RatVector& m,
                               const Realization& r);

/// Centered condition (A2): the asymptotic direction vanishes exactly.
bool is_centered(const RatVector& direction);

/// Solves the modified-harmonic equations exactly: for every vertex x,
///   sum_{e in E_x} p(e) (Phi(t(e))^(1) - Phi(x)^(1) + gamma(e)^(1)) = rho,
/// with Phi(anchor)^(1) = 0 pinned and higher layers as given in
/// `higher_layers` (zero by default). Unique once the anchor is pinned.
Realization solve_modified_harmonic(const AlgebraPtr& algebra, const QuotientGraph& g,
                                    const RatVector& m,
                                    const std::vector<GroupElement>& holonomies,
                                    std::size_t anchor,
                                    const std::vector<GroupElement>* higher_layers = nullptr);

/// Exact residual of the modified-harmonic equation at every vertex
/// (layer-1 components); all-zero for a solution.
std::vector<RatVector> harmonic_residual(const QuotientGraph& g, const RatVector& m,
                                         const Realization& r);

/// Corrector magnitude: max over vertices of hom_norm(Phi_a(x)^{-1} *
/// Phi_b(x)). Requires matching holonomies.
double corrector_norm(const QuotientGraph& g, const Realization& a, const Realization& b);

}  // namespace nilwalk

#pragma once

#include <complex>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "nilwalk/eigen_support.hpp"
#include "nilwalk/rational.hpp"

namespace nilwalk {

using Complex = std::complex<double>;
using CplxVector = Eigen::VectorXcd;

struct Edge {
  std::string id;
  std::size_t origin;
  std::size_t terminus;
  std::size_t inverse;  // edge index of the inverse edge
  Rational p;
};

/// Finite base graph X0 with inverse-paired directed edges and exact
/// transition probabilities.
class QuotientGraph {
 public:
  QuotientGraph(std::vector<std::string> vertex_ids, std::vector<Edge> edges);

  std::size_t vertex_count() const { return vertex_ids_.size(); }
  std::size_t edge_count() const { return edges_.size(); }
  const std::vector<std::string>& vertex_ids() const { return vertex_ids_; }
  const std::vector<Edge>& edges() const { return edges_; }
  const Edge& edge(std::size_t e) const { return edges_[e]; }
  /// Outgoing edge indices of vertex x.
  const std::vector<std::size_t>& out_edges(std::size_t x) const { return out_[x]; }
  std::size_t vertex_index(const std::string& id) const;

  /// Checks every QuotientGraph invariant: inverse pairing is an involution
  /// with matching endpoints, probabilities are in [0,1] and sum to 1 at
  /// every vertex, p(e)+p(ebar) > 0, and the p>0 subgraph is strongly
  /// connected. Returns the list of violations (empty == valid).
  std::vector<std::string> validate() const;
  bool is_valid() const { return validate().empty(); }

  /// Transition matrix L(x,y) = sum of p(e) over edges x->y.
  RatMatrix transition_matrix() const;
  Eigen::MatrixXd transition_matrix_d() const;

 private:
  std::vector<std::string> vertex_ids_;
  std::vector<Edge> edges_;
  std::vector<std::vector<std::size_t>> out_;
};

/// Exact stationary distribution: the unique m with m(x) = sum_{e in E_x}
/// p(ebar) m(t(e)) and sum m = 1. Requires a valid graph.
RatVector invariant_measure(const QuotientGraph& g);

/// Period K0 (gcd of p>0 cycle lengths) and the cyclic class of each vertex,
/// with class(lexicographically first vertex) = 0 and every p>0 edge
/// advancing the class by one mod K0.
std::pair<int, std::vector<int>> period_and_classes(const QuotientGraph& g);

struct spectral_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Peripheral spectral data of L on l2(X0): eigenvalues alpha_j = e^{2 pi i
/// j/K0} with right eigenfunctions phi_j and left (adjoint) eigenfunctions
/// psi_j, normalized biorthogonally: <phi_i, psi_j> = delta_ij. Constructed
/// from the cyclic classes and then verified; failure rejects the model.
struct SpectralData {
  RatVector m;
  int K0 = 1;
  std::vector<int> classes;
  std::vector<Complex> alpha;
  std::vector<CplxVector> phi;
  std::vector<CplxVector> psi;
  double residual_radius = 0.0;  // float estimate, diagnostics only
};

SpectralData peripheral_eigens(const QuotientGraph& g, const RatVector& m, int K0,
                               const std::vector<int>& classes);
SpectralData make_spectral(const QuotientGraph& g);

/// l2 decomposition f = <f,m> + sum_j <f,psi_j> phi_j + residual.
struct Decomposition {
  Complex mean;                        // <f, m>
  std::vector<Complex> peripheral;     // <f, psi_j>, j = 1..K0-1
  CplxVector residual;                 // component in l2_{K0}(X0)
};
Decomposition project_and_decompose(const CplxVector& f, const QuotientGraph& g,
                                    const SpectralData& s);

/// Hermitian l2 pairing sum_x f(x) conj(g(x)).
Complex l2_inner(const CplxVector& f, const CplxVector& g);

}  // namespace nilwalk

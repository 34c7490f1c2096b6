#include "nilwalk/graph.hpp"

#include <Eigen/LU>

#include <cmath>
#include <numeric>
#include <queue>
#include <sstream>

namespace nilwalk {

QuotientGraph::QuotientGraph(std::vector<std::string> vertex_ids, std::vector<Edge> edges)
    : vertex_ids_(std::move(vertex_ids)), edges_(std::move(edges)) {
  out_.resize(vertex_ids_.size());
  for (std::size_t e = 0; e < edges_.size(); ++e) {
    if (edges_[e].origin >= vertex_ids_.size() || edges_[e].terminus >= vertex_ids_.size())
      throw std::out_of_range("QuotientGraph: edge endpoint out of range");
    out_[edges_[e].origin].push_back(e);
  }
}

std::size_t QuotientGraph::vertex_index(const std::string& id) const {
  for (std::size_t i = 0; i < vertex_ids_.size(); ++i)
    if (vertex_ids_[i] == id) return i;
  throw std::out_of_range("QuotientGraph: no vertex '" + id + "'");
}

std::vector<std::string> QuotientGraph::validate() const {
  std::vector<std::string> bad;
  for (std::size_t e = 0; e < edges_.size(); ++e) {
    const Edge& ed = edges_[e];
    if (ed.inverse >= edges_.size()) {
      bad.push_back("edge " + ed.id + ": inverse index out of range");
      continue;
    }
    const Edge& inv = edges_[ed.inverse];
    if (inv.inverse != e)
      bad.push_back("edge " + ed.id + ": inverse pairing is not an involution");
    if (inv.origin != ed.terminus || inv.terminus != ed.origin)
      bad.push_back("edge " + ed.id + ": inverse endpoints do not match (o(ebar) != t(e))");
    if (ed.p.sign() < 0 || ed.p > Rational(1))
      bad.push_back("edge " + ed.id + ": probability outside [0,1]");
    if (ed.p.is_zero() && inv.p.is_zero() && ed.inverse >= e)
      bad.push_back("edge " + ed.id + ": p(e) + p(ebar) = 0");
  }
  for (std::size_t x = 0; x < vertex_ids_.size(); ++x) {
    Rational s(0);
    for (std::size_t e : out_[x]) s += edges_[e].p;
    if (s != Rational(1))
      bad.push_back("vertex " + vertex_ids_[x] + ": outgoing probabilities sum to " + s.str() +
                    " != 1");
  }
  // Strong connectivity on the p>0 subgraph (forward and reverse BFS).
  if (!vertex_ids_.empty()) {
    auto reach = [&](bool forward) {
      std::vector<char> seen(vertex_ids_.size(), 0);
      std::queue<std::size_t> q;
      q.push(0);
      seen[0] = 1;
      while (!q.empty()) {
        std::size_t x = q.front();
        q.pop();
        for (const Edge& ed : edges_) {
          if (ed.p.is_zero()) continue;
          std::size_t from = forward ? ed.origin : ed.terminus;
          std::size_t to = forward ? ed.terminus : ed.origin;
          if (from == x && !seen[to]) {
            seen[to] = 1;
            q.push(to);
          }
        }
      }
      return seen;
    };
    auto fwd = reach(true), bwd = reach(false);
    for (std::size_t x = 0; x < vertex_ids_.size(); ++x)
      if (!fwd[x] || !bwd[x])
        bad.push_back("vertex " + vertex_ids_[x] +
                      ": not strongly connected to the start vertex on p>0 edges");
  }
  return bad;
}

RatMatrix QuotientGraph::transition_matrix() const {
  RatMatrix L = RatMatrix::Constant(Eigen::Index(vertex_count()), Eigen::Index(vertex_count()),
                                    Rational(0));
  for (const Edge& e : edges_) L(Eigen::Index(e.origin), Eigen::Index(e.terminus)) += e.p;
  return L;
}

Eigen::MatrixXd QuotientGraph::transition_matrix_d() const {
  RatMatrix L = transition_matrix();
  Eigen::MatrixXd Ld(L.rows(), L.cols());
  for (Eigen::Index i = 0; i < L.rows(); ++i)
    for (Eigen::Index j = 0; j < L.cols(); ++j) Ld(i, j) = L(i, j).to_double();
  return Ld;
}

RatVector invariant_measure(const QuotientGraph& g) {
  const Eigen::Index n = Eigen::Index(g.vertex_count());
  // Stationarity (L^T - I) m = 0 with the last row replaced by sum m = 1.
  RatMatrix A = g.transition_matrix().transpose();
  for (Eigen::Index i = 0; i < n; ++i) A(i, i) -= Rational(1);
  RatVector b = RatVector::Constant(n, Rational(0));
  for (Eigen::Index j = 0; j < n; ++j) A(n - 1, j) = Rational(1);
  b[n - 1] = Rational(1);
  Eigen::FullPivLU<RatMatrix> lu(A);
  lu.setThreshold(Rational(0));
  if (lu.rank() != n)
    throw std::runtime_error("invariant_measure: singular stationarity system");
  RatVector m = lu.solve(b);
  for (Eigen::Index i = 0; i < n; ++i)
    if (m[i].sign() <= 0)
      throw std::runtime_error("invariant_measure: non-positive entry (graph not irreducible?)");
  return m;
}

std::pair<int, std::vector<int>> period_and_classes(const QuotientGraph& g) {
  const std::size_t n = g.vertex_count();
  std::vector<long> level(n, -1);
  // Root the class assignment at the lexicographically first vertex id so the
  // phase convention is reproducible regardless of input order.
  std::size_t root = 0;
  for (std::size_t x = 1; x < n; ++x)
    if (g.vertex_ids()[x] < g.vertex_ids()[root]) root = x;
  std::queue<std::size_t> q;
  q.push(root);
  level[root] = 0;
  long K = 0;
  // BFS levels on the p>0 subgraph; every edge contributes
  // gcd(level(o)+1-level(t)) to the period.
  std::vector<std::vector<std::size_t>> adj(n);
  for (std::size_t e = 0; e < g.edge_count(); ++e)
    if (!g.edge(e).p.is_zero()) adj[g.edge(e).origin].push_back(e);
  while (!q.empty()) {
    std::size_t x = q.front();
    q.pop();
    for (std::size_t e : adj[x]) {
      std::size_t y = g.edge(e).terminus;
      if (level[y] < 0) {
        level[y] = level[x] + 1;
        q.push(y);
      } else {
        K = std::gcd(K, level[x] + 1 - level[y]);
      }
    }
  }
  if (K == 0) K = 1;  // single vertex, no revisits
  K = std::abs(K);
  std::vector<int> cls(n);
  for (std::size_t x = 0; x < n; ++x) cls[x] = int(((level[x] % K) + K) % K);
  return {int(K), cls};
}

Complex l2_inner(const CplxVector& f, const CplxVector& g) {
  Complex s = 0;
  for (Eigen::Index i = 0; i < f.size(); ++i) s += f[i] * std::conj(g[i]);
  return s;
}

SpectralData peripheral_eigens(const QuotientGraph& g, const RatVector& m, int K0,
                               const std::vector<int>& classes) {
  const Eigen::Index n = Eigen::Index(g.vertex_count());
  SpectralData s;
  s.m = m;
  s.K0 = K0;
  s.classes = classes;
  const double root = std::sqrt(double(g.vertex_count()));
  for (int j = 0; j < K0; ++j) {
    const double theta = 2.0 * M_PI * j / K0;
    Complex aj = std::polar(1.0, theta);
    CplxVector phi(n), psi(n);
    for (Eigen::Index x = 0; x < n; ++x) {
      Complex phase = std::polar(1.0, theta * classes[std::size_t(x)]);
      phi[x] = phase / root;
      psi[x] = phase * root * m[x].to_double();
    }
    s.alpha.push_back(aj);
    s.phi.push_back(phi);
    s.psi.push_back(psi);
  }

  // Verification: L phi_j = alpha_j phi_j, psi_j L = alpha_j psi_j (i.e.
  // L^T psi_j = conj(alpha_j) psi_j under the Hermitian pairing), and
  // biorthogonality <phi_i, psi_j> = delta_ij.
  Eigen::MatrixXd L = g.transition_matrix_d();
  constexpr double tol = 1e-12;
  for (int j = 0; j < K0; ++j) {
    CplxVector r = L * s.phi[std::size_t(j)] - s.alpha[std::size_t(j)] * s.phi[std::size_t(j)];
    if (r.cwiseAbs().maxCoeff() > tol)
      throw spectral_error("peripheral eigenfunction phi_" + std::to_string(j) +
                           " failed L phi = alpha phi");
    CplxVector rl = L.transpose() * s.psi[std::size_t(j)] -
                    std::conj(s.alpha[std::size_t(j)]) * s.psi[std::size_t(j)];
    if (rl.cwiseAbs().maxCoeff() > tol)
      throw spectral_error("peripheral eigenfunction psi_" + std::to_string(j) +
                           " failed psi L = alpha psi");
  }
  for (int i = 0; i < K0; ++i)
    for (int j = 0; j < K0; ++j) {
      Complex ip = l2_inner(s.phi[std::size_t(i)], s.psi[std::size_t(j)]);
      Complex want = (i == j) ? Complex(1, 0) : Complex(0, 0);
      if (std::abs(ip - want) > 1e-10)
        throw spectral_error("biorthogonality <phi_i, psi_j> = delta_ij failed at (" +
                             std::to_string(i) + "," + std::to_string(j) + ")");
    }

  // Residual spectral radius by power iteration on the projected operator.
  if (g.vertex_count() > std::size_t(K0)) {
    auto project = [&](CplxVector v) {
      for (int j = 0; j < K0; ++j)
        v -= l2_inner(v, s.psi[std::size_t(j)]) * s.phi[std::size_t(j)];
      return v;
    };
    CplxVector v(n);
    for (Eigen::Index i = 0; i < n; ++i)
      v[i] = Complex(std::cos(0.7 * double(i) + 0.3), std::sin(1.3 * double(i)));
    v = project(v);
    double radius = 0;
    for (int it = 0; it < 50; ++it) {
      CplxVector w = project(L * v);
      double nw = w.norm(), nv = v.norm();
      if (nv < 1e-300 || nw < 1e-300) {
        radius = 0;
        break;
      }
      radius = nw / nv;
      v = w / nw;
    }
    s.residual_radius = radius;
  }
  if (s.residual_radius >= 1.0)
    throw spectral_error("residual spectral radius estimate >= 1");
  return s;
}

SpectralData make_spectral(const QuotientGraph& g) {
  RatVector m = invariant_measure(g);
  auto [K0, classes] = period_and_classes(g);
  return peripheral_eigens(g, m, K0, classes);
}

Decomposition project_and_decompose(const CplxVector& f, const QuotientGraph& g,
                                    const SpectralData& s) {
  Decomposition d;
  CplxVector mvec(f.size());
  for (Eigen::Index i = 0; i < f.size(); ++i) mvec[i] = s.m[i].to_double();
  d.mean = l2_inner(f, mvec);
  d.residual = f - d.mean * CplxVector::Ones(f.size());
  for (int j = 1; j < s.K0; ++j) {
    Complex c = l2_inner(f, s.psi[std::size_t(j)]);
    d.peripheral.push_back(c);
    d.residual -= c * s.phi[std::size_t(j)];
  }
  (void)g;
  return d;
}

}  // namespace nilwalk

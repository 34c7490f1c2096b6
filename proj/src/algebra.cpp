#include "nilwalk/algebra.hpp"

#include <Eigen/LU>

#include <sstream>

namespace nilwalk {

StratifiedAlgebra::StratifiedAlgebra(
    int step, std::vector<int> layer_dims,
    const std::vector<std::tuple<int, int, int, Rational>>& entries)
    : step_(step), layer_dims_(std::move(layer_dims)) {
  if (step_ < 1 || step_ > 3)
    throw algebra_error("unsupported step " + std::to_string(step_) +
                        " (this engine supports step r in {1,2,3})");
  if (int(layer_dims_.size()) != step_)
    throw algebra_error("layer_dims must list one dimension per layer");
  dim_ = 0;
  for (int k = 0; k < step_; ++k) {
    if (layer_dims_[k] <= 0) throw algebra_error("layer dimensions must be positive");
    for (int i = 0; i < layer_dims_[k]; ++i) weights_.push_back(k + 1);
    dim_ += std::size_t(layer_dims_[k]);
  }

  for (const auto& [i1, j1, k1, c] : entries) {
    const int i = i1 - 1, j = j1 - 1, k = k1 - 1;
    if (i < 0 || j < 0 || k < 0 || i >= int(dim_) || j >= int(dim_) || k >= int(dim_))
      throw algebra_error("structure constant index out of range");
    if (i == j) {
      if (!c.is_zero()) throw algebra_error("[a_i, a_i] must vanish");
      continue;
    }
    if (c.is_zero()) continue;
    // store canonically for i < j; flip sign otherwise
    const bool flip = i > j;
    auto key = flip ? std::make_pair(j, i) : std::make_pair(i, j);
    Rational cc = flip ? -c : c;
    auto& row = table_[key];
    for (auto& [kk, cv] : row)
      if (kk == k) {
        if (cv != cc)
          throw algebra_error("conflicting structure constants for the same (i,j,k)");
        cc = Rational(0);
      }
    if (!cc.is_zero()) row.emplace_back(k, cc);
  }
  for (auto& [key, row] : table_)
    std::sort(row.begin(), row.end(),
              [](const auto& a, const auto& b) { return a.first < b.first; });

  validate();

  std::size_t h = 0x9e3779b97f4a7c15ull ^ std::size_t(step_);
  for (int d : layer_dims_) h = h * 1099511628211ull + std::size_t(d);
  for (const auto& [key, row] : table_)
    for (const auto& [k, c] : row) {
      h = h * 1099511628211ull + std::size_t(key.first * 131 + key.second);
      h = h * 1099511628211ull + std::size_t(k);
      h ^= c.hash();
    }
  hash_ = h;
}

std::pair<std::size_t, std::size_t> StratifiedAlgebra::layer_range(int layer) const {
  std::size_t begin = 0;
  for (int k = 1; k < layer; ++k) begin += std::size_t(layer_dims_[k - 1]);
  return {begin, begin + std::size_t(layer_dims_[layer - 1])};
}

RatVector StratifiedAlgebra::bracket(const RatVector& a, const RatVector& b) const {
  if (a.size() != Eigen::Index(dim_) || b.size() != Eigen::Index(dim_))
    throw algebra_error("bracket: vector dimension mismatch");
  RatVector out = RatVector::Constant(Eigen::Index(dim_), Rational(0));
  for (const auto& [key, row] : table_) {
    const auto [i, j] = key;
    const Rational aibj = a[i] * b[j] - a[j] * b[i];
    if (aibj.is_zero()) continue;
    for (const auto& [k, c] : row) out[k] += c * aibj;
  }
  return out;
}

Eigen::VectorXd StratifiedAlgebra::bracket_d(const Eigen::VectorXd& a,
                                             const Eigen::VectorXd& b) const {
  Eigen::VectorXd out = Eigen::VectorXd::Zero(Eigen::Index(dim_));
  for (const auto& [key, row] : table_) {
    const auto [i, j] = key;
    const double aibj = a[i] * b[j] - a[j] * b[i];
    if (aibj == 0.0) continue;
    for (const auto& [k, c] : row) out[k] += c.to_double() * aibj;
  }
  return out;
}

void StratifiedAlgebra::validate() const {
  // Grading: c^k_{ij} = 0 unless layer(k) = layer(i) + layer(j) <= r.
  for (const auto& [key, row] : table_) {
    const auto [i, j] = key;
    for (const auto& [k, c] : row) {
      if (c.is_zero()) continue;
      if (weights_[std::size_t(k)] != weights_[std::size_t(i)] + weights_[std::size_t(j)]) {
        std::ostringstream os;
        os << "grading violated: [a_" << i + 1 << ", a_" << j + 1 << "] has a component on a_"
           << k + 1 << " (layer " << weights_[std::size_t(k)] << " != "
           << weights_[std::size_t(i)] + weights_[std::size_t(j)] << ")";
        throw algebra_error(os.str());
      }
    }
  }

  // Jacobi identity, exact: [a,[b,c]] + [b,[c,a]] + [c,[a,b]] = 0 on basis triples.
  auto basis = [&](std::size_t i) {
    RatVector v = RatVector::Constant(Eigen::Index(dim_), Rational(0));
    v[Eigen::Index(i)] = Rational(1);
    return v;
  };
  for (std::size_t i = 0; i < dim_; ++i)
    for (std::size_t j = i + 1; j < dim_; ++j)
      for (std::size_t k = j + 1; k < dim_; ++k) {
        RatVector s = bracket(basis(i), bracket(basis(j), basis(k))) +
                      bracket(basis(j), bracket(basis(k), basis(i))) +
                      bracket(basis(k), bracket(basis(i), basis(j)));
        for (Eigen::Index t = 0; t < s.size(); ++t)
          if (!s[t].is_zero()) {
            std::ostringstream os;
            os << "Jacobi identity violated on basis triple (" << i + 1 << "," << j + 1 << ","
               << k + 1 << ")";
            throw algebra_error(os.str());
          }
      }

  // Generation: brackets of layer-1 with layer-(k-1) span layer k.
  for (int layer = 2; layer <= step_; ++layer) {
    const auto [lo, hi] = layer_range(layer);
    const auto [plo, phi] = layer_range(layer - 1);
    const auto [olo, ohi] = layer_range(1);
    std::vector<RatVector> gens;
    for (std::size_t i = olo; i < ohi; ++i)
      for (std::size_t p = plo; p < phi; ++p) {
        RatVector w = bracket(basis(i), basis(p));
        RatVector proj = RatVector::Constant(Eigen::Index(hi - lo), Rational(0));
        for (std::size_t t = lo; t < hi; ++t) proj[Eigen::Index(t - lo)] = w[Eigen::Index(t)];
        gens.push_back(std::move(proj));
      }
    RatMatrix M(Eigen::Index(hi - lo), Eigen::Index(gens.size()));
    for (std::size_t c = 0; c < gens.size(); ++c) M.col(Eigen::Index(c)) = gens[c];
    Eigen::FullPivLU<RatMatrix> lu(M);
    lu.setThreshold(Rational(0));
    if (lu.rank() != Eigen::Index(hi - lo)) {
      std::ostringstream os;
      os << "layer " << layer << " is not generated by brackets with layer 1 (rank "
         << lu.rank() << " < " << hi - lo << ")";
      throw algebra_error(os.str());
    }
  }
}

}  // namespace nilwalk

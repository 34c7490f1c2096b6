#pragma once

#include <map>
#include <memory>
#include <tuple>
#include <vector>

#include "nilwalk/eigen_support.hpp"
#include "nilwalk/rational.hpp"

namespace nilwalk {

struct algebra_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Stratified nilpotent Lie algebra of step r <= 3 with a fixed graded basis.
/// Structure constants c^k_{ij} define [a_i, a_j] = sum_k c^k_{ij} a_k.
/// Construction validates antisymmetry, the grading, the Jacobi identity and
/// the layer-1 generation property, all in exact arithmetic; invalid input
/// is rejected with an algebra_error naming the offending entry.
class StratifiedAlgebra {
 public:
  /// entries: (i, j, k, c) with 1-based basis indices.
  StratifiedAlgebra(int step, std::vector<int> layer_dims,
                    const std::vector<std::tuple<int, int, int, Rational>>& entries);

  int step() const { return step_; }
  std::size_t dim() const { return dim_; }
  const std::vector<int>& layer_dims() const { return layer_dims_; }
  /// Layer weight sigma_i of coordinate i (0-based), in {1,...,step}.
  int weight(std::size_t i) const { return weights_[i]; }
  const std::vector<int>& weights() const { return weights_; }
  /// First layer dimension d1.
  std::size_t d1() const { return std::size_t(layer_dims_[0]); }
  std::size_t d2() const { return layer_dims_.size() > 1 ? std::size_t(layer_dims_[1]) : 0; }
  /// 0-based coordinate range [begin, end) of a 1-based layer.
  std::pair<std::size_t, std::size_t> layer_range(int layer) const;

  /// Bilinear antisymmetric bracket of coefficient vectors.
  RatVector bracket(const RatVector& a, const RatVector& b) const;
  /// Float bracket for samplers and diagnostics.
  Eigen::VectorXd bracket_d(const Eigen::VectorXd& a, const Eigen::VectorXd& b) const;

  /// Deterministic hash of (step, layer_dims, structure constants); used as
  /// a cache key for CBH tables.
  std::size_t structure_hash() const { return hash_; }

  friend bool operator==(const StratifiedAlgebra& a, const StratifiedAlgebra& b) {
    return a.step_ == b.step_ && a.layer_dims_ == b.layer_dims_ && a.table_ == b.table_;
  }

 private:
  void validate() const;
  int step_;
  std::vector<int> layer_dims_;
  std::vector<int> weights_;
  std::size_t dim_;
  // (i,j) -> sparse list of (k, c^k_{ij}), 0-based, stored for i < j only.
  std::map<std::pair<int, int>, std::vector<std::pair<int, Rational>>> table_;
  std::size_t hash_;
};

using AlgebraPtr = std::shared_ptr<const StratifiedAlgebra>;

}  // namespace nilwalk

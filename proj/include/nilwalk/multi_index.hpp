#pragma once

#include <cstdint>
#include <numeric>
#include <stdexcept>
#include <string>
#include <vector>

namespace nilwalk {

/// Exponent vector over a fixed coordinate list. Ordering is (graded by
/// weighted degree when callers sort with a weight vector) lexicographic,
/// which keeps every map iteration deterministic.
class MultiIndex {
 public:
  MultiIndex() = default;
  explicit MultiIndex(std::size_t dim) : e_(dim, 0) {}
  explicit MultiIndex(std::vector<uint32_t> e) : e_(std::move(e)) {}
  MultiIndex(std::initializer_list<uint32_t> e) : e_(e) {}

  static MultiIndex unit(std::size_t dim, std::size_t j) {
    MultiIndex m(dim);
    m.e_[j] = 1;
    return m;
  }

  std::size_t dim() const { return e_.size(); }
  uint32_t operator[](std::size_t i) const { return e_[i]; }
  uint32_t& operator[](std::size_t i) { return e_[i]; }
  const std::vector<uint32_t>& exponents() const { return e_; }

  bool is_zero() const {
    for (uint32_t x : e_)
      if (x) return false;
    return true;
  }

  /// |I| = sum of exponents.
  uint64_t total_degree() const {
    return std::accumulate(e_.begin(), e_.end(), uint64_t{0});
  }

  /// d(I) = sum of sigma_i * i_i for per-coordinate layer weights sigma.
  uint64_t weighted_degree(const std::vector<int>& weights) const {
    if (weights.size() != e_.size())
      throw std::invalid_argument("MultiIndex: weight vector length mismatch");
    uint64_t d = 0;
    for (std::size_t i = 0; i < e_.size(); ++i) d += uint64_t(weights[i]) * e_[i];
    return d;
  }

  MultiIndex operator+(const MultiIndex& o) const {
    if (o.dim() != dim()) throw std::invalid_argument("MultiIndex: dimension mismatch");
    MultiIndex r = *this;
    for (std::size_t i = 0; i < e_.size(); ++i) r.e_[i] += o.e_[i];
    return r;
  }

  /// Componentwise difference; caller guarantees o <= *this componentwise.
  MultiIndex operator-(const MultiIndex& o) const {
    MultiIndex r = *this;
    for (std::size_t i = 0; i < e_.size(); ++i) {
      if (o.e_[i] > r.e_[i]) throw std::invalid_argument("MultiIndex: negative exponent");
      r.e_[i] -= o.e_[i];
    }
    return r;
  }

  bool divides(const MultiIndex& o) const {
    for (std::size_t i = 0; i < e_.size(); ++i)
      if (e_[i] > o.e_[i]) return false;
    return true;
  }

  friend bool operator==(const MultiIndex& a, const MultiIndex& b) { return a.e_ == b.e_; }
  friend bool operator!=(const MultiIndex& a, const MultiIndex& b) { return a.e_ != b.e_; }
  friend bool operator<(const MultiIndex& a, const MultiIndex& b) { return a.e_ < b.e_; }

  std::string str() const;

 private:
  std::vector<uint32_t> e_;
};

/// All multi-indices I over `weights` with d(I) <= dmax, sorted by
/// (d(I), lexicographic). The zero index comes first.
std::vector<MultiIndex> enumerate_weighted(const std::vector<int>& weights, int dmax);

}  // namespace nilwalk

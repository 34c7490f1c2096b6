#pragma once

#include <map>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "nilwalk/multi_index.hpp"
#include "nilwalk/rational.hpp"

namespace nilwalk {

/// A named block of variables with per-coordinate layer weights. Group
/// arguments (x, y, x1, ...) become disjoint D-sized blocks; block names
/// are explicit, never positional.
struct VarBlock {
  std::string name;
  std::vector<int> weights;  // layer weight sigma_i per coordinate

  std::size_t dim() const { return weights.size(); }
  friend bool operator==(const VarBlock& a, const VarBlock& b) {
    return a.name == b.name && a.weights == b.weights;
  }
};

/// Ordered list of variable blocks; defines the coordinate layout of a
/// Polynomial. Immutable, shared by value via shared_ptr.
class VarSpace {
 public:
  static std::shared_ptr<const VarSpace> make(std::vector<VarBlock> blocks);

  std::size_t dim() const { return dim_; }
  const std::vector<VarBlock>& blocks() const { return blocks_; }
  const std::vector<int>& weights() const { return weights_; }

  std::size_t block_count() const { return blocks_.size(); }
  std::size_t block_offset(std::size_t b) const { return offsets_[b]; }
  std::size_t block_dim(std::size_t b) const { return blocks_[b].dim(); }
  /// Index of the named block; throws if absent.
  std::size_t block_index(const std::string& name) const;

  friend bool operator==(const VarSpace& a, const VarSpace& b) {
    return a.blocks_ == b.blocks_;
  }

 private:
  explicit VarSpace(std::vector<VarBlock> blocks);
  std::vector<VarBlock> blocks_;
  std::vector<std::size_t> offsets_;
  std::vector<int> weights_;
  std::size_t dim_ = 0;
};

using VarSpacePtr = std::shared_ptr<const VarSpace>;

/// Exact sparse multivariate polynomial over Rational. Terms are kept in a
/// sorted map with no zero coefficients, so iteration order (and every
/// downstream result) is reproducible bit for bit.
class Polynomial {
 public:
  Polynomial() = default;
  explicit Polynomial(VarSpacePtr space) : space_(std::move(space)) {}

  static Polynomial constant(VarSpacePtr space, const Rational& c);
  static Polynomial monomial(VarSpacePtr space, const MultiIndex& I, const Rational& c);
  /// The variable at global coordinate index v.
  static Polynomial variable(VarSpacePtr space, std::size_t v);

  const VarSpacePtr& space() const { return space_; }
  const std::map<MultiIndex, Rational>& terms() const { return terms_; }
  bool is_zero() const { return terms_.empty(); }
  std::size_t term_count() const { return terms_.size(); }

  /// Coefficient of monomial I (zero if absent).
  Rational coeff(const MultiIndex& I) const;
  /// Max weighted degree over terms (0 for the zero polynomial).
  uint64_t weighted_degree() const;
  uint64_t total_degree() const;

  Polynomial& operator+=(const Polynomial& o);
  Polynomial& operator-=(const Polynomial& o);
  friend Polynomial operator+(Polynomial a, const Polynomial& b) { a += b; return a; }
  friend Polynomial operator-(Polynomial a, const Polynomial& b) { a -= b; return a; }
  Polynomial operator-() const;
  friend Polynomial operator*(const Polynomial& a, const Polynomial& b);
  Polynomial scaled(const Rational& c) const;

  friend bool operator==(const Polynomial& a, const Polynomial& b) {
    return a.terms_ == b.terms_;
  }

  /// Substitutes an image polynomial for every variable; all images must
  /// share one target space. Throws composition_error on size mismatch.
  Polynomial compose(const std::vector<Polynomial>& images) const;

  /// Coefficient of y^I where y is the block at `block`: a polynomial over
  /// the same space with that block's exponents zeroed. Summing
  /// coeff_of_block(...) * y^I over all I reproduces *this exactly.
  Polynomial coeff_of_block(std::size_t block, const MultiIndex& I) const;

  /// Multi-indices of `block` that occur in this polynomial (deduplicated,
  /// sorted).
  std::vector<MultiIndex> block_support(std::size_t block) const;

  /// Exact division: returns quotient iff divisor divides *this in the
  /// polynomial ring, else nullopt.
  std::optional<Polynomial> div_exact(const Polynomial& divisor) const;

  /// d/dv (partial derivative in global coordinate v).
  Polynomial derivative(std::size_t v) const;

  /// Evaluation at a full point; T needs +, *, and construction from
  /// Rational via T(Rational) or explicit conversion helper below.
  template <typename T>
  T evaluate(std::span<const T> point) const;

  std::string str() const;

  void add_term(const MultiIndex& I, const Rational& c);  // normalizing insert

 private:
  void check_space(const Polynomial& o, const char* op) const;
  VarSpacePtr space_;
  std::map<MultiIndex, Rational> terms_;
};

struct composition_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

template <typename T>
T Polynomial::evaluate(std::span<const T> point) const {
  if (point.size() != space_->dim())
    throw composition_error("Polynomial::evaluate: point dimension mismatch");
  T acc = T(Rational(0));
  for (const auto& [I, c] : terms_) {
    T t = T(c);
    for (std::size_t v = 0; v < I.dim(); ++v)
      for (uint32_t k = 0; k < I[v]; ++k) t = t * point[v];
    acc = acc + t;
  }
  return acc;
}

template <>
inline double Polynomial::evaluate<double>(std::span<const double> point) const {
  if (point.size() != space_->dim())
    throw composition_error("Polynomial::evaluate: point dimension mismatch");
  double acc = 0.0;
  for (const auto& [I, c] : terms_) {
    double t = c.to_double();
    for (std::size_t v = 0; v < I.dim(); ++v)
      for (uint32_t k = 0; k < I[v]; ++k) t *= point[v];
    acc += t;
  }
  return acc;
}

}  // namespace nilwalk

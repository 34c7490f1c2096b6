#include "nilwalk/polynomial.hpp"

#include <algorithm>
#include <sstream>

namespace nilwalk {

VarSpace::VarSpace(std::vector<VarBlock> blocks) : blocks_(std::move(blocks)) {
  offsets_.reserve(blocks_.size());
  for (const auto& b : blocks_) {
    offsets_.push_back(dim_);
    dim_ += b.dim();
    weights_.insert(weights_.end(), b.weights.begin(), b.weights.end());
  }
}

std::shared_ptr<const VarSpace> VarSpace::make(std::vector<VarBlock> blocks) {
  return std::shared_ptr<const VarSpace>(new VarSpace(std::move(blocks)));
}

std::size_t VarSpace::block_index(const std::string& name) const {
  for (std::size_t i = 0; i < blocks_.size(); ++i)
    if (blocks_[i].name == name) return i;
  throw composition_error("VarSpace: no block named '" + name + "'");
}

Polynomial Polynomial::constant(VarSpacePtr space, const Rational& c) {
  Polynomial p(std::move(space));
  p.add_term(MultiIndex(p.space_->dim()), c);
  return p;
}

Polynomial Polynomial::monomial(VarSpacePtr space, const MultiIndex& I, const Rational& c) {
  Polynomial p(std::move(space));
  if (I.dim() != p.space_->dim())
    throw composition_error("Polynomial::monomial: index dimension mismatch");
  p.add_term(I, c);
  return p;
}

Polynomial Polynomial::variable(VarSpacePtr space, std::size_t v) {
  Polynomial p(std::move(space));
  p.add_term(MultiIndex::unit(p.space_->dim(), v), Rational(1));
  return p;
}

void Polynomial::add_term(const MultiIndex& I, const Rational& c) {
  if (c.is_zero()) return;
  auto [it, inserted] = terms_.try_emplace(I, c);
  if (!inserted) {
    it->second += c;
    if (it->second.is_zero()) terms_.erase(it);
  }
}

Rational Polynomial::coeff(const MultiIndex& I) const {
  auto it = terms_.find(I);
  return it == terms_.end() ? Rational(0) : it->second;
}

uint64_t Polynomial::weighted_degree() const {
  uint64_t d = 0;
  for (const auto& [I, c] : terms_)
    d = std::max(d, I.weighted_degree(space_->weights()));
  return d;
}

uint64_t Polynomial::total_degree() const {
  uint64_t d = 0;
  for (const auto& [I, c] : terms_) d = std::max(d, I.total_degree());
  return d;
}

void Polynomial::check_space(const Polynomial& o, const char* op) const {
  if (space_ == o.space_) return;
  if (space_ && o.space_ && *space_ == *o.space_) return;
  throw composition_error(std::string("Polynomial: variable-set mismatch in ") + op);
}

Polynomial& Polynomial::operator+=(const Polynomial& o) {
  check_space(o, "add");
  for (const auto& [I, c] : o.terms_) add_term(I, c);
  return *this;
}

Polynomial& Polynomial::operator-=(const Polynomial& o) {
  check_space(o, "sub");
  for (const auto& [I, c] : o.terms_) add_term(I, -c);
  return *this;
}

Polynomial Polynomial::operator-() const {
  Polynomial r(space_);
  for (const auto& [I, c] : terms_) r.terms_.emplace(I, -c);
  return r;
}

Polynomial operator*(const Polynomial& a, const Polynomial& b) {
  a.check_space(b, "mul");
  Polynomial r(a.space_);
  for (const auto& [I, ci] : a.terms_)
    for (const auto& [J, cj] : b.terms_) r.add_term(I + J, ci * cj);
  return r;
}

Polynomial Polynomial::scaled(const Rational& c) const {
  Polynomial r(space_);
  if (c.is_zero()) return r;
  for (const auto& [I, ci] : terms_) r.terms_.emplace(I, ci * c);
  return r;
}

Polynomial Polynomial::compose(const std::vector<Polynomial>& images) const {
  if (images.size() != space_->dim())
    throw composition_error("Polynomial::compose: need one image per variable");
  if (terms_.empty()) {
    return images.empty() ? Polynomial(space_) : Polynomial(images.front().space());
  }
  const VarSpacePtr target = images.empty() ? space_ : images.front().space();
  for (const auto& img : images)
    if (!(img.space() == target || *img.space() == *target))
      throw composition_error("Polynomial::compose: images live in different spaces");

  // Cache powers per variable up to the max exponent used.
  std::vector<uint32_t> maxexp(space_->dim(), 0);
  for (const auto& [I, c] : terms_)
    for (std::size_t v = 0; v < I.dim(); ++v) maxexp[v] = std::max(maxexp[v], I[v]);
  std::vector<std::vector<Polynomial>> powers(space_->dim());
  for (std::size_t v = 0; v < space_->dim(); ++v) {
    powers[v].push_back(Polynomial::constant(target, Rational(1)));
    for (uint32_t k = 1; k <= maxexp[v]; ++k)
      powers[v].push_back(powers[v].back() * images[v]);
  }

  Polynomial out(target);
  for (const auto& [I, c] : terms_) {
    Polynomial term = Polynomial::constant(target, c);
    for (std::size_t v = 0; v < I.dim(); ++v)
      if (I[v]) term = term * powers[v][I[v]];
    out += term;
  }
  return out;
}

Polynomial Polynomial::coeff_of_block(std::size_t block, const MultiIndex& I) const {
  const std::size_t off = space_->block_offset(block);
  const std::size_t bd = space_->block_dim(block);
  if (I.dim() != bd)
    throw composition_error("coeff_of_block: index does not match block dimension");
  Polynomial out(space_);
  for (const auto& [J, c] : terms_) {
    bool match = true;
    for (std::size_t i = 0; i < bd; ++i)
      if (J[off + i] != I[i]) { match = false; break; }
    if (!match) continue;
    MultiIndex K = J;
    for (std::size_t i = 0; i < bd; ++i) K[off + i] = 0;
    out.add_term(K, c);
  }
  return out;
}

std::vector<MultiIndex> Polynomial::block_support(std::size_t block) const {
  const std::size_t off = space_->block_offset(block);
  const std::size_t bd = space_->block_dim(block);
  std::vector<MultiIndex> out;
  for (const auto& [J, c] : terms_) {
    MultiIndex I(bd);
    for (std::size_t i = 0; i < bd; ++i) I[i] = J[off + i];
    out.push_back(I);
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

std::optional<Polynomial> Polynomial::div_exact(const Polynomial& divisor) const {
  check_space(divisor, "div_exact");
  if (divisor.is_zero()) return std::nullopt;
  Polynomial rem = *this;
  Polynomial quo(space_);
  // Leading term = lexicographically largest key; single-divisor reduction
  // terminates whenever the divisor divides rem exactly.
  const auto& dlt = *divisor.terms_.rbegin();
  while (!rem.terms_.empty()) {
    const auto& rlt = *rem.terms_.rbegin();
    if (!dlt.first.divides(rlt.first)) return std::nullopt;
    MultiIndex q = rlt.first - dlt.first;
    Rational qc = rlt.second / dlt.second;
    quo.add_term(q, qc);
    rem -= divisor * Polynomial::monomial(space_, q, qc);
  }
  return quo;
}

Polynomial Polynomial::derivative(std::size_t v) const {
  Polynomial r(space_);
  for (const auto& [I, c] : terms_) {
    if (I[v] == 0) continue;
    MultiIndex J = I;
    J[v] -= 1;
    r.add_term(J, c * Rational(long(I[v])));
  }
  return r;
}

std::string Polynomial::str() const {
  if (terms_.empty()) return "0";
  std::ostringstream os;
  bool first = true;
  for (const auto& [I, c] : terms_) {
    if (!first) os << " + ";
    first = false;
    os << c.str();
    std::size_t v = 0;
    for (std::size_t b = 0; b < space_->block_count(); ++b)
      for (std::size_t i = 0; i < space_->block_dim(b); ++i, ++v)
        if (I[v]) {
          os << "*" << space_->blocks()[b].name << i + 1;
          if (I[v] > 1) os << "^" << I[v];
        }
  }
  return os.str();
}

}  // namespace nilwalk

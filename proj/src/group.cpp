#include "nilwalk/group.hpp"

#include <cmath>
#include <mutex>

namespace nilwalk {

GroupElement group_identity(const StratifiedAlgebra& g) {
  return RatVector::Constant(Eigen::Index(g.dim()), Rational(0));
}

GroupElement group_mul(const StratifiedAlgebra& g, const GroupElement& x,
                       const GroupElement& y) {
  RatVector z = x + y;
  if (g.step() >= 2) {
    RatVector xy = g.bracket(x, y);
    z += xy.unaryExpr([](const Rational& r) { return r * Rational(1, 2); });
    if (g.step() >= 3) {
      RatVector xxy = g.bracket(x, xy);
      RatVector yyx = g.bracket(y, g.bracket(y, x));
      z += (xxy + yyx).unaryExpr([](const Rational& r) { return r * Rational(1, 12); });
    }
  }
  return z;
}

GroupElement group_inverse(const GroupElement& x) {
  return -x;
}

Eigen::VectorXd group_mul_d(const StratifiedAlgebra& g, const Eigen::VectorXd& x,
                            const Eigen::VectorXd& y) {
  Eigen::VectorXd z = x + y;
  if (g.step() >= 2) {
    Eigen::VectorXd xy = g.bracket_d(x, y);
    z += 0.5 * xy;
    if (g.step() >= 3)
      z += (g.bracket_d(x, xy) + g.bracket_d(y, g.bracket_d(y, x))) / 12.0;
  }
  return z;
}

GroupElement dilate(const StratifiedAlgebra& g, const Rational& eps, const GroupElement& x) {
  if (eps.sign() <= 0) throw std::domain_error("dilate: scale must be positive");
  RatVector z = x;
  for (Eigen::Index i = 0; i < z.size(); ++i)
    z[i] *= eps.pow(g.weight(std::size_t(i)));
  return z;
}

double hom_norm(const StratifiedAlgebra& g, const GroupElement& x) {
  double s = 0;
  for (Eigen::Index i = 0; i < x.size(); ++i)
    s += std::pow(std::abs(x[i].to_double()), 1.0 / g.weight(std::size_t(i)));
  return s;
}

double hom_norm_d(const StratifiedAlgebra& g, const Eigen::VectorXd& x) {
  double s = 0;
  for (Eigen::Index i = 0; i < x.size(); ++i)
    s += std::pow(std::abs(x[i]), 1.0 / g.weight(std::size_t(i)));
  return s;
}

Rational monomial_value(const GroupElement& x, const MultiIndex& I) {
  Rational v(1);
  for (std::size_t i = 0; i < I.dim(); ++i)
    for (uint32_t k = 0; k < I[i]; ++k) v *= x[Eigen::Index(i)];
  return v;
}

VarSpacePtr group_space(const AlgebraPtr& g, const std::string& name) {
  return VarSpace::make({VarBlock{name, g->weights()}});
}

namespace {

// Polynomial-valued bracket on vectors of polynomials.
std::vector<Polynomial> poly_bracket(const StratifiedAlgebra& g, const VarSpacePtr& sp,
                                     const std::vector<Polynomial>& a,
                                     const std::vector<Polynomial>& b) {
  std::vector<Polynomial> out(g.dim(), Polynomial(sp));
  // Reconstruct via the scalar bracket on basis pairs to reuse the exact
  // structure constants without exposing the internal table.
  const std::size_t D = g.dim();
  for (std::size_t i = 0; i < D; ++i) {
    for (std::size_t j = i + 1; j < D; ++j) {
      RatVector ei = RatVector::Constant(Eigen::Index(D), Rational(0));
      RatVector ej = ei;
      ei[Eigen::Index(i)] = Rational(1);
      ej[Eigen::Index(j)] = Rational(1);
      RatVector br = g.bracket(ei, ej);
      Polynomial factor = a[i] * b[j] - a[j] * b[i];
      if (factor.is_zero()) continue;
      for (Eigen::Index k = 0; k < br.size(); ++k)
        if (!br[k].is_zero()) out[std::size_t(k)] += factor.scaled(br[k]);
    }
  }
  return out;
}

std::vector<Polynomial> bch_product(const StratifiedAlgebra& g, const VarSpacePtr& sp,
                                    const std::vector<Polynomial>& x,
                                    const std::vector<Polynomial>& y) {
  const std::size_t D = g.dim();
  std::vector<Polynomial> z(D, Polynomial(sp));
  for (std::size_t c = 0; c < D; ++c) z[c] = x[c] + y[c];
  if (g.step() >= 2) {
    auto xy = poly_bracket(g, sp, x, y);
    for (std::size_t c = 0; c < D; ++c) z[c] += xy[c].scaled(Rational(1, 2));
    if (g.step() >= 3) {
      auto xxy = poly_bracket(g, sp, x, xy);
      auto yx = poly_bracket(g, sp, y, x);
      auto yyx = poly_bracket(g, sp, y, yx);
      for (std::size_t c = 0; c < D; ++c)
        z[c] += (xxy[c] + yyx[c]).scaled(Rational(1, 12));
    }
  }
  return z;
}

std::vector<Polynomial> block_vars(const VarSpacePtr& sp, std::size_t block) {
  std::vector<Polynomial> v;
  const std::size_t off = sp->block_offset(block), d = sp->block_dim(block);
  for (std::size_t i = 0; i < d; ++i) v.push_back(Polynomial::variable(sp, off + i));
  return v;
}

std::mutex cache_mutex;
std::unordered_map<std::size_t, std::unique_ptr<GroupLaw>> law_cache;
std::unordered_map<std::size_t, std::unique_ptr<CbhTable>> cbh_cache;

}  // namespace

const GroupLaw& group_law(const AlgebraPtr& g) {
  std::lock_guard<std::mutex> lock(cache_mutex);
  auto& slot = law_cache[g->structure_hash()];
  if (!slot) {
    auto law = std::make_unique<GroupLaw>();
    law->space = VarSpace::make({VarBlock{"x", g->weights()}, VarBlock{"y", g->weights()}});
    law->component =
        bch_product(*g, law->space, block_vars(law->space, 0), block_vars(law->space, 1));
    slot = std::move(law);
  }
  return *slot;
}

MultiLaw multi_law(const AlgebraPtr& g, int k) {
  if (k < 1) throw std::invalid_argument("multi_law: need k >= 1");
  std::vector<VarBlock> blocks;
  for (int i = 1; i <= k; ++i)
    blocks.push_back(VarBlock{"x" + std::to_string(i), g->weights()});
  MultiLaw ml;
  ml.space = VarSpace::make(std::move(blocks));
  ml.component = block_vars(ml.space, 0);
  for (int i = 1; i < k; ++i)
    ml.component = bch_product(*g, ml.space, ml.component, block_vars(ml.space, std::size_t(i)));
  return ml;
}

CbhTable::CbhTable(const AlgebraPtr& g, int dmax) : dmax_(dmax) {
  indices_ = enumerate_weighted(g->weights(), dmax);
  for (std::size_t i = 0; i < indices_.size(); ++i) lookup_[indices_[i]] = i;
  const GroupLaw& law = group_law(g);
  rows_.resize(indices_.size());
  wdeg_.resize(indices_.size());
  const std::size_t D = g->dim();
  for (std::size_t ii = 0; ii < indices_.size(); ++ii) {
    const MultiIndex& I = indices_[ii];
    wdeg_[ii] = I.weighted_degree(g->weights());
    // (x*y)^I expanded through the group law
    Polynomial p = Polynomial::constant(law.space, Rational(1));
    for (std::size_t c = 0; c < D; ++c)
      for (uint32_t e = 0; e < I[c]; ++e) p = p * law.component[c];
    for (const auto& [JK, coeff] : p.terms()) {
      MultiIndex J(D), K(D);
      for (std::size_t c = 0; c < D; ++c) {
        J[c] = JK[c];
        K[c] = JK[D + c];
      }
      rows_[ii].push_back(CbhTerm{lookup_.at(J), lookup_.at(K), coeff});
    }
  }
}

std::size_t CbhTable::index_of(const MultiIndex& I) const {
  auto it = lookup_.find(I);
  if (it == lookup_.end())
    throw std::out_of_range("CbhTable: multi-index " + I.str() +
                            " exceeds the precomputed cap d <= " + std::to_string(dmax_));
  return it->second;
}

const CbhTable& cbh_table(const AlgebraPtr& g, int dmax) {
  const std::size_t key = g->structure_hash() * 1315423911ull + std::size_t(dmax);
  {
    std::lock_guard<std::mutex> lock(cache_mutex);
    auto it = cbh_cache.find(key);
    if (it != cbh_cache.end()) return *it->second;
  }
  // Build outside the lock (construction re-enters group_law's cache).
  auto table = std::make_unique<CbhTable>(g, dmax);
  std::lock_guard<std::mutex> lock(cache_mutex);
  auto& slot = cbh_cache[key];
  if (!slot) slot = std::move(table);
  return *slot;
}

std::map<std::vector<MultiIndex>, Rational> cbh_multi_expansion(const AlgebraPtr& g, int k,
                                                                const MultiIndex& I) {
  MultiLaw ml = multi_law(g, k);
  const std::size_t D = g->dim();
  Polynomial p = Polynomial::constant(ml.space, Rational(1));
  for (std::size_t c = 0; c < D; ++c)
    for (uint32_t e = 0; e < I[c]; ++e) p = p * ml.component[c];
  std::map<std::vector<MultiIndex>, Rational> out;
  for (const auto& [J, coeff] : p.terms()) {
    std::vector<MultiIndex> parts;
    for (int f = 0; f < k; ++f) {
      MultiIndex Jf(D);
      for (std::size_t c = 0; c < D; ++c) Jf[c] = J[std::size_t(f) * D + c];
      parts.push_back(Jf);
    }
    out[parts] = coeff;
  }
  return out;
}

namespace {

// f(g*y) (side right) or f(y*g) (side left) as a polynomial on {g, y}.
Polynomial shifted_function(const AlgebraPtr& g, const Polynomial& f, TaylorSide side) {
  auto sp2 = VarSpace::make({VarBlock{"g", g->weights()}, VarBlock{"y", g->weights()}});
  auto gv = block_vars(sp2, 0);
  auto yv = block_vars(sp2, 1);
  auto prod = side == TaylorSide::right ? bch_product(*g, sp2, gv, yv)
                                        : bch_product(*g, sp2, yv, gv);
  return f.compose(prod);
}

}  // namespace

Polynomial taylor_coeff(const AlgebraPtr& g, const Polynomial& f, const MultiIndex& I,
                        TaylorSide side) {
  Polynomial shifted = shifted_function(g, f, side);
  Polynomial c = shifted.coeff_of_block(1, I);
  // re-home onto the single-block space so callers can evaluate at a point
  auto sp1 = group_space(g, "g");
  Polynomial out(sp1);
  for (const auto& [J, coeff] : c.terms()) {
    MultiIndex K(g->dim());
    for (std::size_t i = 0; i < g->dim(); ++i) K[i] = J[i];
    out.add_term(K, coeff);
  }
  return out;
}

std::vector<std::pair<MultiIndex, Polynomial>> taylor_expansion(const AlgebraPtr& g,
                                                                const Polynomial& f,
                                                                TaylorSide side) {
  Polynomial shifted = shifted_function(g, f, side);
  std::vector<std::pair<MultiIndex, Polynomial>> out;
  auto sp1 = group_space(g, "g");
  for (const MultiIndex& I : shifted.block_support(1)) {
    Polynomial c = shifted.coeff_of_block(1, I);
    Polynomial hom(sp1);
    for (const auto& [J, coeff] : c.terms()) {
      MultiIndex K(g->dim());
      for (std::size_t i = 0; i < g->dim(); ++i) K[i] = J[i];
      hom.add_term(K, coeff);
    }
    if (!hom.is_zero()) out.emplace_back(I, std::move(hom));
  }
  return out;
}

Polynomial left_invariant_derivative(const AlgebraPtr& g, const Polynomial& f,
                                     std::size_t block, std::size_t v) {
  // Substitute x_block -> x_block * (s e_v) in f via the group law, then take
  // the s^1 coefficient. Realized with an auxiliary one-variable block.
  const VarSpacePtr sp = f.space();
  std::vector<VarBlock> blocks = sp->blocks();
  blocks.push_back(VarBlock{"_s", {1}});
  auto spx = VarSpace::make(blocks);
  const std::size_t sVar = spx->dim() - 1;

  // images of all variables
  std::vector<Polynomial> images;
  images.reserve(sp->dim());
  // y = s * e_v inside the block's copy of G
  const std::size_t D = g->dim();
  const std::size_t off = sp->block_offset(block);
  std::vector<Polynomial> xb, yb;
  for (std::size_t i = 0; i < D; ++i) {
    xb.push_back(Polynomial::variable(spx, off + i));
    yb.push_back(i == v ? Polynomial::variable(spx, sVar) : Polynomial(spx));
  }
  auto prod = bch_product(*g, spx, xb, yb);
  for (std::size_t u = 0; u < sp->dim(); ++u) {
    if (u >= off && u < off + D)
      images.push_back(prod[u - off]);
    else
      images.push_back(Polynomial::variable(spx, u));
  }
  Polynomial sub = f.compose(images);
  Polynomial ds = sub.derivative(sVar);
  // evaluate s = 0: drop all terms still containing s, then re-home.
  Polynomial out(sp);
  for (const auto& [I, c] : ds.terms()) {
    if (I[sVar] != 0) continue;
    MultiIndex J(sp->dim());
    for (std::size_t u = 0; u < sp->dim(); ++u) J[u] = I[u];
    out.add_term(J, c);
  }
  return out;
}

}  // namespace nilwalk

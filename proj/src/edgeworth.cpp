#include "nilwalk/edgeworth.hpp"

#include <Eigen/SVD>

#include <cmath>

namespace nilwalk {

namespace {

long floor_nt(long n, const Rational& t) {
  mpz_class q;
  mpz_class num = t.num() * n;
  mpz_fdiv_q(q.get_mpz_t(), num.get_mpz_t(), t.den().get_mpz_t());
  if (!q.fits_slong_p()) throw std::overflow_error("floor(n t) out of range");
  return q.get_si();
}

/// tau_{n^{-1/2}}(point) in Q[u] coordinates, u = n^{-1/2}.
std::vector<SqrtExt> scaled_point(const AlgebraPtr& alg, const GroupElement& p, long n) {
  const Rational q = Rational(1) / Rational(n);
  std::vector<SqrtExt> out;
  out.reserve(std::size_t(p.size()));
  for (Eigen::Index c = 0; c < p.size(); ++c)
    out.push_back(radical_pow(q, uint64_t(alg->weight(std::size_t(c)))).scaled(p[c]));
  return out;
}

struct TaylorData {
  std::vector<std::pair<MultiIndex, Polynomial>> terms;  // (I, hatS^I f as poly in g)
  int dmax = 0;
};

TaylorData taylor_data(const AlgebraPtr& alg, const Polynomial& f) {
  TaylorData td;
  td.terms = taylor_expansion(alg, f, TaylorSide::right);
  for (const auto& [I, c] : td.terms)
    td.dmax = std::max(td.dmax, int(I.weighted_degree(alg->weights())));
  return td;
}

SqrtExt assemble_lhs(const TaylorData& td, const WalkModel& model, std::size_t x,
                     const std::vector<Rational>& unscaled, const std::vector<MultiIndex>& idx,
                     long n) {
  const Rational q = Rational(1) / Rational(n);
  auto point = scaled_point(model.algebra, model.realization->position(x), n);
  SqrtExt acc(Rational(0), Rational(0), q);
  const auto& w = model.algebra->weights();
  for (const auto& [I, coeff] : td.terms) {
    // locate U(I)
    Rational u(0);
    bool found = false;
    for (std::size_t i = 0; i < idx.size(); ++i)
      if (idx[i] == I) {
        u = unscaled[i];
        found = true;
        break;
      }
    if (!found)
      throw std::logic_error("lhs_exact: Taylor index missing from the DP table");
    if (u.is_zero()) continue;
    SqrtExt cval = coeff.evaluate<SqrtExt>(point);
    acc = acc + cval * radical_pow(q, I.weighted_degree(w)).scaled(u);
  }
  return acc;
}

SqrtExt assemble_rhs(const TaylorData& td, const WalkModel& model, std::size_t x,
                     const Rational& t, long n) {
  const Rational q = Rational(1) / Rational(n);
  auto point = scaled_point(model.algebra, model.realization->position(x), n);
  SqrtExt acc(Rational(0), Rational(0), q);
  for (const auto& [I, coeff] : td.terms) {
    Rational mom = model.gaussian->semigroup_moment(t, I);
    if (mom.is_zero()) continue;
    acc = acc + coeff.evaluate<SqrtExt>(point).scaled(mom);
  }
  return acc;
}

/// Richardson limit of a sequence sampled at doubling n, assuming an
/// expansion v_j = c + c_1/n_j + c_2/n_j^2 + ...; exact arithmetic.
/// Stage s eliminates the 1/n^s term: T_s[j] = (2^s T_{s-1}[j+1] -
/// T_{s-1}[j]) / (2^s - 1).
Rational richardson_limit(const std::vector<Rational>& v) {
  std::vector<Rational> cur = v;
  std::size_t s = 1;
  while (cur.size() > 1) {
    const Rational w = Rational(2).pow(long(s));
    std::vector<Rational> next;
    for (std::size_t j = 0; j + 1 < cur.size(); ++j)
      next.push_back((cur[j + 1] * w - cur[j]) / (w - Rational(1)));
    cur = std::move(next);
    ++s;
  }
  return cur.front();
}

bool is_doubling(const std::vector<long>& ns) {
  for (std::size_t i = 1; i < ns.size(); ++i)
    if (ns[i] != 2 * ns[i - 1]) return false;
  return ns.size() >= 2;
}

}  // namespace

WalkModel make_walk_model(const AlgebraPtr& algebra, const QuotientGraph& g,
                          const Realization& r, int dmax) {
  WalkModel m;
  m.algebra = algebra;
  m.graph = &g;
  m.realization = &r;
  m.spectral = make_spectral(g);
  // Limit data always comes from the modified harmonic realization on the
  // same holonomies, also when r itself is not harmonic.
  Realization harmonic = solve_modified_harmonic(algebra, g, m.spectral.m, r.holonomies(), 0);
  LimitCoefficients lc = limit_coefficients(g, m.spectral.m, harmonic);
  m.limit = GaussianSpec{lc.A, lc.b};
  m.gaussian = std::make_shared<GaussianMomentTable>(algebra, m.limit, dmax);
  return m;
}

SqrtExt lhs_exact(const Polynomial& f, const WalkModel& model, std::size_t x,
                  const Rational& t, long n) {
  if (n < 1) throw std::domain_error("lhs_exact: n >= 1 required");
  TaylorData td = taylor_data(model.algebra, f);
  const long k = floor_nt(n, t);
  MomentTable tbl = moment_dp(*model.graph, *model.realization, x, int(k), td.dmax);
  std::vector<Rational> totals;
  totals.reserve(tbl.indices.size());
  for (std::size_t i = 0; i < tbl.indices.size(); ++i) totals.push_back(tbl.unscaled(i));
  return assemble_lhs(td, model, x, totals, tbl.indices, n);
}

SqrtExt rhs_exact(const Polynomial& f, const WalkModel& model, std::size_t x,
                  const Rational& t, long n) {
  if (n < 1 || t.sign() <= 0) throw std::domain_error("rhs_exact: n >= 1, t > 0 required");
  TaylorData td = taylor_data(model.algebra, f);
  return assemble_rhs(td, model, x, t, n);
}

DiscrepancyReport discrepancy(const Polynomial& f, const WalkModel& model, std::size_t x,
                              const Rational& t, const std::vector<long>& ns, int N,
                              int threads) {
  if (ns.empty()) throw std::domain_error("discrepancy: empty n sweep");
  if (N < 2) throw std::domain_error("discrepancy: N >= 2 required");
  TaylorData td = taylor_data(model.algebra, f);
  if (model.gaussian->dmax() < td.dmax)
    throw std::domain_error("discrepancy: model Gaussian table dmax below f's Taylor support");

  // one DP pass over the largest step count, recorded at each checkpoint
  std::vector<long> ks;
  for (long n : ns) ks.push_back(floor_nt(n, t));
  std::vector<int> checkpoints;
  for (long k : ks)
    if (checkpoints.empty() || int(k) > checkpoints.back()) checkpoints.push_back(int(k));
  std::map<int, std::vector<Rational>> totals_at;
  std::vector<MultiIndex> idx;
  moment_dp(*model.graph, *model.realization, x, td.dmax, checkpoints,
            [&](const MomentTable& tbl) {
              std::vector<Rational> totals;
              for (std::size_t i = 0; i < tbl.indices.size(); ++i)
                totals.push_back(tbl.unscaled(i));
              totals_at[tbl.n] = std::move(totals);
              if (idx.empty()) idx = tbl.indices;
            },
            threads);

  DiscrepancyReport rep;
  rep.t = t;
  rep.f_str = f.str();
  for (std::size_t i = 0; i < ns.size(); ++i) {
    DiscrepancyRow row;
    row.n = ns[i];
    row.lhs = assemble_lhs(td, model, x, totals_at.at(int(ks[i])), idx, ns[i]);
    row.rhs = assemble_rhs(td, model, x, t, ns[i]);
    row.D = row.lhs - row.rhs;
    rep.rows.push_back(row);
  }

  // exact Richardson fit on the half-power components
  rep.exact_agreement = true;
  for (const auto& row : rep.rows)
    if (!row.D.is_zero()) rep.exact_agreement = false;

  const int ncoef = N - 1;
  if (is_doubling(ns)) {
    // D_n = a_n + b_n u with u = n^{-1/2}: odd coefficients live in
    // b_n = xi_1 + xi_3/n + ..., even ones in n a_n = xi_2 + xi_4/n + ...
    std::vector<Rational> odd_seq, even_seq;
    for (std::size_t i = 0; i < rep.rows.size(); ++i) {
      odd_seq.push_back(rep.rows[i].D.odd());
      even_seq.push_back(rep.rows[i].D.even() * Rational(ns[i]));
    }
    for (int j = 1; j <= ncoef; ++j) {
      std::vector<Rational>& seq = (j % 2 == 1) ? odd_seq : even_seq;
      Rational xi = richardson_limit(seq);
      rep.fit.xi_exact.push_back(xi);
      // peel: seq <- n (seq - xi) exposes the next coefficient of same parity
      for (std::size_t i = 0; i < seq.size(); ++i)
        seq[i] = (seq[i] - xi) * Rational(ns[i]);
    }
  }

  // least-squares cross-check in floats
  {
    Eigen::MatrixXd X(Eigen::Index(ns.size()), ncoef);
    Eigen::VectorXd y(Eigen::Index(ns.size()));
    for (std::size_t i = 0; i < ns.size(); ++i) {
      for (int j = 1; j <= ncoef; ++j)
        X(Eigen::Index(i), j - 1) = std::pow(double(ns[i]), -double(j) / 2.0);
      y[Eigen::Index(i)] = rep.rows[i].D.to_double();
    }
    Eigen::VectorXd c = X.jacobiSvd(Eigen::ComputeThinU | Eigen::ComputeThinV).solve(y);
    for (int j = 0; j < ncoef; ++j) rep.fit.xi_ls.push_back(c[j]);
  }
  if (!rep.fit.xi_exact.empty()) {
    for (int j = 0; j < ncoef; ++j)
      rep.fit.fit_disagreement =
          std::max(rep.fit.fit_disagreement,
                   std::abs(rep.fit.xi_exact[std::size_t(j)].to_double() -
                            rep.fit.xi_ls[std::size_t(j)]));
  }

  // residual of the order-N fit, scaled by n^{N/2}
  if (!rep.fit.xi_exact.empty()) {
    for (std::size_t i = 0; i < ns.size(); ++i) {
      const Rational q = Rational(1) / Rational(ns[i]);
      SqrtExt fitted(Rational(0), Rational(0), q);
      for (int j = 1; j <= ncoef; ++j)
        fitted = fitted +
                 radical_pow(q, uint64_t(j)).scaled(rep.fit.xi_exact[std::size_t(j - 1)]);
      const double res = (rep.rows[i].D - fitted).to_double();
      rep.fit.residual_bound = std::max(
          rep.fit.residual_bound, std::abs(res) * std::pow(double(ns[i]), double(N) / 2.0));
    }
  }

  // log-log slope over nonzero discrepancies
  {
    std::vector<double> lx, ly;
    for (const auto& row : rep.rows) {
      const double d = std::abs(row.D.to_double());
      if (d > 1e-300) {
        lx.push_back(std::log(double(row.n)));
        ly.push_back(std::log(d));
      }
    }
    if (lx.size() >= 2) {
      double mx = 0, my = 0;
      for (std::size_t i = 0; i < lx.size(); ++i) {
        mx += lx[i];
        my += ly[i];
      }
      mx /= double(lx.size());
      my /= double(ly.size());
      double num = 0, den = 0;
      for (std::size_t i = 0; i < lx.size(); ++i) {
        num += (lx[i] - mx) * (ly[i] - my);
        den += (lx[i] - mx) * (lx[i] - mx);
      }
      rep.slope = num / den;
    }
  }
  return rep;
}

namespace {

/// Blocks x1, y1, x2, y2, ..., y_i, x_{i+1} and f composed with their
/// ordered product.
struct SlotSpace {
  VarSpacePtr space;
  std::vector<std::size_t> xblocks;  // block indices of x1..x_{i+1}
  std::vector<std::size_t> yblocks;  // block indices of y1..y_i
};

SlotSpace slot_space(const AlgebraPtr& alg, int i) {
  std::vector<VarBlock> blocks;
  SlotSpace out;
  for (int k = 1; k <= i + 1; ++k) {
    out.xblocks.push_back(blocks.size());
    blocks.push_back(VarBlock{"x" + std::to_string(k), alg->weights()});
    if (k <= i) {
      out.yblocks.push_back(blocks.size());
      blocks.push_back(VarBlock{"y" + std::to_string(k), alg->weights()});
    }
  }
  out.space = VarSpace::make(std::move(blocks));
  return out;
}

Polynomial compose_slots(const AlgebraPtr& alg, const Polynomial& f, const SlotSpace& ss) {
  // product x1 * y1 * x2 * ... * y_i * x_{i+1} as polynomials on ss.space
  const std::size_t nblocks = ss.space->block_count();
  std::vector<Polynomial> cur;
  for (std::size_t c = 0; c < alg->dim(); ++c)
    cur.push_back(Polynomial::variable(ss.space, ss.space->block_offset(0) + c));
  const GroupLaw& law = group_law(alg);
  for (std::size_t b = 1; b < nblocks; ++b) {
    // cur = cur * (block b variables) through the two-argument law
    std::vector<Polynomial> images;
    for (std::size_t c = 0; c < alg->dim(); ++c) images.push_back(cur[c]);
    for (std::size_t c = 0; c < alg->dim(); ++c)
      images.push_back(Polynomial::variable(ss.space, ss.space->block_offset(b) + c));
    std::vector<Polynomial> next;
    for (std::size_t c = 0; c < alg->dim(); ++c)
      next.push_back(law.component[c].compose(images));
    cur = std::move(next);
  }
  return f.compose(cur);
}

/// Enumerates tuples (I_1..I_i) with d(I_k) >= 3 and sum d = target.
void tuples_rec(const std::vector<MultiIndex>& pool, const std::vector<int>& w, int i,
                int target, std::vector<MultiIndex>& cur,
                std::vector<std::vector<MultiIndex>>& out) {
  if (int(cur.size()) == i) {
    if (target == 0) out.push_back(cur);
    return;
  }
  const int remaining = i - int(cur.size()) - 1;
  for (const MultiIndex& I : pool) {
    const int d = int(I.weighted_degree(w));
    if (d < 3 || d > target - 3 * remaining) continue;
    cur.push_back(I);
    tuples_rec(pool, w, i, target - d, cur, out);
    cur.pop_back();
  }
}

}  // namespace

Rational xi_formula(int j, const Polynomial& f, const WalkModel& model, std::size_t x) {
  if (j < 1) throw std::domain_error("xi_formula: j >= 1 required");
  (void)x;  // the coefficient is vertex independent for the harmonic theory
  const AlgebraPtr& alg = model.algebra;
  const auto& w = alg->weights();
  const int fdeg = int(f.weighted_degree());

  // Gaussian moments both for the product factors and the slot integration.
  const int gauss_cap = std::max(fdeg, j + 2 * (j + 1));
  GaussianMomentTable gauss(alg, model.limit, gauss_cap);

  Rational total(0);
  for (int i = 1; i <= j; ++i) {
    SlotSpace ss = slot_space(alg, i);
    Polynomial composed = compose_slots(alg, f, ss);
    for (int ell = 2; ell <= i + 1; ++ell) {
      const int qlo = std::max(i - ell + 1, 0);
      const int qhi = (j - i) / 2;
      for (int q = qlo; q <= qhi; ++q) {
        const int target = j - 2 * q + 2 * ell - 2;
        if (target < 3 * i) continue;
        if (target > fdeg) continue;  // Taylor extraction of higher weight vanishes
        std::vector<MultiIndex> pool = enumerate_weighted(w, target - 3 * (i - 1));
        std::vector<std::vector<MultiIndex>> tuples;
        std::vector<MultiIndex> cur;
        tuples_rec(pool, w, i, target, cur, tuples);
        if (tuples.empty()) continue;
        EMPolynomialTable btab(i + 1, ell, q);
        const Polynomial& bop = btab.coeff(q);  // already B_q / q!
        if (bop.is_zero()) continue;
        for (const auto& tuple : tuples) {
          // walk-moment factors
          Rational factor(1);
          for (const MultiIndex& I : tuple) {
            Rational diff = averaged_moment(*model.graph, model.spectral.m,
                                            *model.realization, I) -
                            gauss.moment(I);
            factor *= diff;
            if (factor.is_zero()) break;
          }
          if (factor.is_zero()) continue;

          // hatS^{I_i}...hatS^{I_1} f: extract the y-block coefficients
          Polynomial g = composed;
          for (int k = 0; k < i && !g.is_zero(); ++k)
            g = g.coeff_of_block(ss.yblocks[std::size_t(k)], tuple[std::size_t(k)]);
          if (g.is_zero()) continue;

          // B_q(A_(1), ..., A_(2i+1)): generator powers per x-slot
          Polynomial opd(ss.space);
          for (const auto& [beta, c] : bop.terms()) {
            Polynomial term = g.scaled(c);
            for (std::size_t k = 0; k < std::size_t(i + 1) && !term.is_zero(); ++k)
              for (uint32_t rep = 0; rep < beta[k]; ++rep)
                term = generator_apply(alg, model.limit, term, ss.xblocks[k]);
            opd += term;
          }
          if (opd.is_zero()) continue;

          // slots x_{ell+1}..x_{i+1} at the identity
          for (int k = ell; k < i + 1; ++k)
            opd = opd.coeff_of_block(ss.xblocks[std::size_t(k)],
                                     MultiIndex(alg->dim()));
          if (opd.is_zero()) continue;

          // integrate x_1..x_ell against nu_{t_k}; monomials become
          // m^{J}_nu t_k^{d(J)/2}, a polynomial in (t_1..t_ell)
          auto tspace = VarSpace::make({VarBlock{"t", std::vector<int>(std::size_t(ell), 1)}});
          Polynomial tpoly(tspace);
          for (const auto& [J, c] : opd.terms()) {
            Rational coeff = c;
            MultiIndex texp{std::vector<uint32_t>(std::size_t(ell), 0)};
            bool zero = false;
            for (int k = 0; k < ell && !zero; ++k) {
              MultiIndex Jk(alg->dim());
              const std::size_t off = ss.space->block_offset(ss.xblocks[std::size_t(k)]);
              for (std::size_t cidx = 0; cidx < alg->dim(); ++cidx) Jk[cidx] = J[off + cidx];
              const uint64_t d = Jk.weighted_degree(w);
              if (d % 2 == 1) {
                zero = true;
                break;
              }
              if (d > 0) {
                Rational mom = gauss.moment(Jk);
                if (mom.is_zero()) {
                  zero = true;
                  break;
                }
                coeff *= mom;
                texp[std::size_t(k)] = uint32_t(d / 2);
              }
            }
            if (!zero) tpoly.add_term(texp, coeff);
          }
          if (tpoly.is_zero()) continue;
          total += factor * simplex_integral(tpoly, ell);
        }
      }
    }
  }
  return total;
}

TrotterReport trotter_bound(const Polynomial& f, const WalkModel& model, const Rational& t,
                            long n, const Rational& C, const Rational& lambda,
                            double box_radius) {
  const AlgebraPtr& alg = model.algebra;
  const std::size_t D = alg->dim();

  // sup-norm over the homogeneous box |x_c| <= R^{sigma_c}, grid sampled
  auto box_sup = [&](const Polynomial& p) {
    if (p.is_zero()) return 0.0;
    const int grid = 7;
    std::vector<double> pt(D, 0.0);
    double best = 0.0;
    std::function<void(std::size_t)> rec = [&](std::size_t c) {
      if (c == D) {
        best = std::max(best, std::abs(p.evaluate<double>(pt)));
        return;
      }
      const double r = std::pow(box_radius, alg->weight(c));
      for (int k = 0; k < grid; ++k) {
        pt[c] = -r + 2.0 * r * double(k) / double(grid - 1);
        rec(c + 1);
      }
    };
    rec(0);
    return best;
  };

  // ||D^3 g|| = ||g|| + sum_{d(I) <= 3} ||a^I g||
  auto d3_norm = [&](const Polynomial& p) {
    double acc = box_sup(p);
    for (const MultiIndex& I : enumerate_weighted(alg->weights(), 3)) {
      if (I.is_zero()) continue;
      Polynomial g = p;
      for (std::size_t c = 0; c < D && !g.is_zero(); ++c)
        for (uint32_t k = 0; k < I[c]; ++k) g = left_invariant_derivative(alg, g, 0, c);
      acc += box_sup(g);
    }
    return acc;
  };

  double hop3 = 0.0;
  for (std::size_t e = 0; e < model.graph->edge_count(); ++e) {
    if (model.graph->edge(e).p.is_zero()) continue;
    hop3 = std::max(hop3, std::pow(hom_norm(*alg, model.realization->hop(e)), 3));
  }

  Polynomial Af = generator_apply(alg, model.limit, f);
  const double taylor_term = C.to_double() / std::sqrt(double(n)) * hop3;

  TrotterReport rep;
  rep.box_radius = box_radius;
  rep.psi_n = taylor_term * d3_norm(f);
  rep.phi_n = box_sup(Af) + rep.psi_n;
  Polynomial resolvent = f.scaled(lambda) - Af;
  rep.psi_n_resolvent = taylor_term * d3_norm(resolvent);

  const long k = floor_nt(n, t);
  const double kn = double(k) / double(n);
  rep.bound = (std::sqrt(double(k)) / double(n) + std::abs(kn - t.to_double())) * rep.phi_n +
              (2.0 / lambda.to_double()) * rep.psi_n +
              (t.to_double() / lambda.to_double()) * rep.psi_n_resolvent;
  return rep;
}

DiscrepancyReport be_nonharmonic(const Polynomial& f, const WalkModel& model_with_phi,
                                 const Realization& harmonic, std::size_t x,
                                 const Rational& t, const std::vector<long>& ns, int N) {
  DiscrepancyReport rep = discrepancy(f, model_with_phi, x, t, ns, N);
  rep.corrector = corrector_norm(*model_with_phi.graph, *model_with_phi.realization, harmonic);
  return rep;
}

}  // namespace nilwalk

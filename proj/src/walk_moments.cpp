#include "nilwalk/walk_moments.hpp"

#include <algorithm>
#include <atomic>
#include <thread>

#include "nilwalk/gaussian.hpp"
#include "nilwalk/rng.hpp"

namespace nilwalk {

Rational MomentTable::unscaled(const MultiIndex& I) const {
  for (std::size_t i = 0; i < indices.size(); ++i)
    if (indices[i] == I) return unscaled(i);
  throw std::out_of_range("MomentTable: index " + I.str() + " not tabulated");
}

double MomentTable::scaled(const MultiIndex& I) const {
  const double d = double(I.weighted_degree(weights));
  return unscaled(I).to_double() * std::pow(double(n), -d / 2.0);
}

namespace {

void parallel_cells(std::size_t total, int threads, const std::function<void(std::size_t)>& fn) {
  if (threads <= 1 || total < 2) {
    for (std::size_t i = 0; i < total; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  auto worker = [&]() {
    for (;;) {
      std::size_t i = next.fetch_add(1);
      if (i >= total) break;
      fn(i);
    }
  };
  std::vector<std::thread> pool;
  for (int t = 0; t < threads; ++t) pool.emplace_back(worker);
  for (auto& th : pool) th.join();
}

}  // namespace

void moment_dp(const QuotientGraph& g, const Realization& r, std::size_t start, int dmax,
               const std::vector<int>& checkpoints,
               const std::function<void(const MomentTable&)>& record, int threads) {
  if (dmax < 0) throw std::domain_error("moment_dp: dmax must be >= 0");
  for (std::size_t i = 1; i < checkpoints.size(); ++i)
    if (checkpoints[i] <= checkpoints[i - 1])
      throw std::domain_error("moment_dp: checkpoints must be strictly increasing");
  if (!checkpoints.empty() && checkpoints.front() < 0)
    throw std::domain_error("moment_dp: n must be >= 0");

  const AlgebraPtr& alg = r.algebra();
  const CbhTable& cbh = cbh_table(alg, dmax);
  const std::size_t nidx = cbh.indices().size();
  const std::size_t nv = g.vertex_count();

  // hop powers per edge, indexed like the CBH table (p=0 edges never used)
  std::vector<std::vector<Rational>> hop_pow(g.edge_count());
  std::vector<std::vector<std::size_t>> in_edges(nv);
  for (std::size_t e = 0; e < g.edge_count(); ++e) {
    if (g.edge(e).p.is_zero()) continue;
    in_edges[g.edge(e).terminus].push_back(e);
    hop_pow[e].reserve(nidx);
    for (std::size_t i = 0; i < nidx; ++i)
      hop_pow[e].push_back(monomial_value(r.hop(e), cbh.indices()[i]));
  }

  MomentTable table;
  table.dmax = dmax;
  table.start = start;
  table.weights = alg->weights();
  table.indices = cbh.indices();
  table.values.assign(nv, std::vector<Rational>(nidx, Rational(0)));
  table.values[start][0] = Rational(1);  // R_0(y, I) = [y == start][I == 0]
  table.n = 0;

  std::size_t cp = 0;
  while (cp < checkpoints.size() && checkpoints[cp] == 0) {
    record(table);
    ++cp;
  }
  if (cp >= checkpoints.size()) return;
  const int last = checkpoints.back();

  std::vector<std::vector<Rational>> next(nv, std::vector<Rational>(nidx, Rational(0)));
  for (int step = 1; step <= last; ++step) {
    parallel_cells(nv * nidx, threads, [&](std::size_t cell) {
      const std::size_t y = cell / nidx, i = cell % nidx;
      Rational acc(0);
      for (std::size_t e : in_edges[y]) {
        const std::size_t o = g.edge(e).origin;
        const auto& pows = hop_pow[e];
        Rational inner(0);
        for (const CbhTerm& t : cbh.expansion(i)) {
          const Rational& rv = table.values[o][t.jidx];
          if (rv.is_zero()) continue;
          const Rational& hp = pows[t.kidx];
          if (hp.is_zero()) continue;
          inner += t.c * rv * hp;
        }
        if (!inner.is_zero()) acc += g.edge(e).p * inner;
      }
      next[y][i] = std::move(acc);
    });
    table.values.swap(next);
    table.n = step;
    while (cp < checkpoints.size() && checkpoints[cp] == step) {
      record(table);
      ++cp;
    }
    if (cp >= checkpoints.size()) break;
  }
}

MomentTable moment_dp(const QuotientGraph& g, const Realization& r, std::size_t start, int n,
                      int dmax, int threads) {
  MomentTable out;
  moment_dp(g, r, start, dmax, {n}, [&](const MomentTable& t) { out = t; }, threads);
  return out;
}

RatVector edge_moment_fn(const QuotientGraph& g, const Realization& r, const MultiIndex& I) {
  RatVector F = RatVector::Constant(Eigen::Index(g.vertex_count()), Rational(0));
  for (std::size_t e = 0; e < g.edge_count(); ++e) {
    const Edge& ed = g.edge(e);
    if (ed.p.is_zero()) continue;
    F[Eigen::Index(ed.origin)] += ed.p * monomial_value(r.hop(e), I);
  }
  return F;
}

Rational averaged_moment(const QuotientGraph& g, const RatVector& m, const Realization& r,
                         const MultiIndex& I) {
  RatVector F = edge_moment_fn(g, r, I);
  Rational s(0);
  for (Eigen::Index x = 0; x < F.size(); ++x) s += m[x] * F[x];
  return s;
}

LimitCoefficients limit_coefficients(const QuotientGraph& g, const RatVector& m,
                                     const Realization& r) {
  RatVector dir = asymptotic_direction(g, m, r);
  if (!is_centered(dir))
    throw assumption_error(
        "limit_coefficients: model is not centered; the Gaussian limit requires (A2)");
  const AlgebraPtr& alg = r.algebra();
  const std::size_t d1 = alg->d1(), d2 = alg->d2(), D = alg->dim();
  LimitCoefficients lc;
  lc.A = RatMatrix::Constant(Eigen::Index(d1), Eigen::Index(d1), Rational(0));
  lc.b = RatVector::Constant(Eigen::Index(d2), Rational(0));
  for (std::size_t i = 0; i < d1; ++i)
    for (std::size_t j = 0; j < d1; ++j) {
      MultiIndex I(D);
      I[i] += 1;
      I[j] += 1;
      lc.A(Eigen::Index(i), Eigen::Index(j)) = averaged_moment(g, m, r, I);
    }
  for (std::size_t i = 0; i < d2; ++i) {
    MultiIndex I = MultiIndex::unit(D, d1 + i);
    lc.b[Eigen::Index(i)] = averaged_moment(g, m, r, I);
  }
  GaussianSpec spec{lc.A, lc.b};
  spec.validate();  // exact PSD check
  return lc;
}

RatVector transition_apply(const QuotientGraph& g, const RatVector& f) {
  RatVector out = RatVector::Constant(Eigen::Index(g.vertex_count()), Rational(0));
  for (const Edge& e : g.edges()) {
    if (e.p.is_zero()) continue;
    out[Eigen::Index(e.origin)] += e.p * f[Eigen::Index(e.terminus)];
  }
  return out;
}

namespace {

CplxVector transition_apply_c(const QuotientGraph& g, const CplxVector& f) {
  CplxVector out = CplxVector::Zero(f.size());
  for (const Edge& e : g.edges()) {
    if (e.p.is_zero()) continue;
    out[Eigen::Index(e.origin)] += e.p.to_double() * f[Eigen::Index(e.terminus)];
  }
  return out;
}

CplxVector to_complex(const RatVector& f) {
  CplxVector out(f.size());
  for (Eigen::Index i = 0; i < f.size(); ++i) out[i] = f[i].to_double();
  return out;
}

}  // namespace

RatVector ergodic_A(const QuotientGraph& g, const SpectralData& s, const RatVector& f, int n) {
  if (n < 1) throw std::domain_error("ergodic_A: n >= 1 required");
  // direct path, exact
  RatVector sum = RatVector::Constant(f.size(), Rational(0));
  RatVector cur = f;
  for (int k = 0; k < n; ++k) {
    sum += cur;
    if (k + 1 < n) cur = transition_apply(g, cur);
  }
  Rational mean(0);
  for (Eigen::Index x = 0; x < f.size(); ++x) mean += f[x] * s.m[x];
  RatVector direct = sum;
  for (Eigen::Index x = 0; x < f.size(); ++x) direct[x] -= Rational(long(n)) * mean;

  // spectral path: peripheral geometric sums plus residual iterates
  CplxVector fc = to_complex(f);
  Decomposition dec = project_and_decompose(fc, g, s);
  CplxVector spectral = CplxVector::Zero(f.size());
  for (int j = 1; j < s.K0; ++j) {
    Complex geo = 0;
    Complex a = 1;
    for (int k = 0; k < n; ++k) {
      geo += a;
      a *= s.alpha[std::size_t(j)];
    }
    spectral += dec.peripheral[std::size_t(j - 1)] * geo * s.phi[std::size_t(j)];
  }
  CplxVector res = dec.residual;
  for (int k = 0; k < n; ++k) {
    spectral += res;
    if (k + 1 < n) res = transition_apply_c(g, res);
  }
  double err = 0;
  for (Eigen::Index x = 0; x < f.size(); ++x)
    err = std::max(err, std::abs(spectral[x] - Complex(direct[x].to_double())));
  if (err > 1e-10)
    throw spectral_error("ergodic_A: spectral and direct evaluations disagree by " +
                         std::to_string(err));
  return direct;
}

ErgodicPair ergodic_A2(const QuotientGraph& g, const SpectralData& s, const CplxVector& f,
                       const CplxVector& gfun, int n) {
  if (n < 2) throw std::domain_error("ergodic_A2: n >= 2 required");
  const Eigen::Index nv = f.size();
  CplxVector mvec(nv);
  for (Eigen::Index i = 0; i < nv; ++i) mvec[i] = s.m[i].to_double();
  const Complex fm = l2_inner(f, mvec), gm = l2_inner(gfun, mvec);

  Decomposition df = project_and_decompose(f, g, s);
  Decomposition dg = project_and_decompose(gfun, g, s);

  // L^k iterates of the residual parts, k = 0..n
  std::vector<CplxVector> fres{df.residual}, gres{dg.residual};
  for (int k = 0; k < n; ++k) {
    fres.push_back(transition_apply_c(g, fres.back()));
    gres.push_back(transition_apply_c(g, gres.back()));
  }
  // prefix sums sum_{l<=k} L^l f_res
  std::vector<CplxVector> fpre(std::size_t(n), CplxVector::Zero(nv));
  CplxVector acc = CplxVector::Zero(nv);
  for (int k = 0; k < n; ++k) {
    acc += fres[std::size_t(k)];
    fpre[std::size_t(k)] = acc;
  }

  // alpha_j^e = e^{2 pi i (j e mod K0)/K0}: reduce the exponent exactly so
  // phases never drift with n.
  auto alpha_pow = [&](int j, long e) {
    long idx = (long(j) * e) % s.K0;
    if (idx < 0) idx += s.K0;
    return std::polar(1.0, 2.0 * M_PI * double(idx) / double(s.K0));
  };

  ErgodicPair out;
  out.A1 = CplxVector::Zero(nv);
  out.A2 = CplxVector::Zero(nv);

  // A1 per the appendix closed form; the constant first term carries the
  // 1/n part of (1/2)(1+1/n)<f,m><g,m>.
  out.A1.array() += 0.5 * fm * gm;
  for (int j = 1; j < s.K0; ++j) {
    const Complex aj = s.alpha[std::size_t(j)];
    out.A1 -= fm * alpha_pow(j, n + 1) * dg.peripheral[std::size_t(j - 1)] / (1.0 - aj) *
              s.phi[std::size_t(j)];
    out.A1 += gm * df.peripheral[std::size_t(j - 1)] / (1.0 - aj) * s.phi[std::size_t(j)];
  }
  {
    // Mean-times-residual cross terms of L^l f * L^{k+1} g: the f-mean pairs
    // with the k-weighted g-residual iterates and the g-mean with the double
    // sum of f-residual iterates. (The printed closed form has these two
    // crossed; expanding the product fixes the roles.)
    CplxVector kweight = CplxVector::Zero(nv);  // sum_{k=1..n} k L^k g_res
    for (int k = 1; k <= n; ++k) kweight += double(k) * gres[std::size_t(k)];
    CplxVector dbl = CplxVector::Zero(nv);  // sum_{k<n} sum_{l<=k} L^l f_res
    for (int k = 0; k < n; ++k) dbl += fpre[std::size_t(k)];
    out.A1 += (fm / double(n)) * kweight;
    out.A1 += (gm / double(n)) * dbl;
  }
  // Resonant peripheral pairs alpha_i alpha_j = 1 contribute at order 1/n,
  // not 1/n^2; the printed closed form tacitly assumes alpha_i alpha_j != 1.
  for (int i = 1; i < s.K0; ++i)
    for (int j = 1; j < s.K0; ++j) {
      const Complex prod = s.alpha[std::size_t(i)] * s.alpha[std::size_t(j)];
      if (std::abs(prod - 1.0) < 1e-12) {
        out.A1 -= (df.peripheral[std::size_t(i - 1)] * dg.peripheral[std::size_t(j - 1)] /
                   (1.0 - s.alpha[std::size_t(i)])) *
                  s.phi[std::size_t(i)].cwiseProduct(s.phi[std::size_t(j)]);
      }
    }

  // A2 closed form
  for (int j = 1; j < s.K0; ++j) {
    const Complex aj = s.alpha[std::size_t(j)];
    const Complex gj = aj * (1.0 - alpha_pow(j, n)) / ((1.0 - aj) * (1.0 - aj));
    out.A2 += fm * gj * dg.peripheral[std::size_t(j - 1)] * s.phi[std::size_t(j)];
    out.A2 -= gm * gj * df.peripheral[std::size_t(j - 1)] * s.phi[std::size_t(j)];
  }
  for (int i = 1; i < s.K0; ++i)
    for (int j = 1; j < s.K0; ++j) {
      const Complex ai = s.alpha[std::size_t(i)], aj = s.alpha[std::size_t(j)];
      const Complex prod = ai * aj;
      Complex inner = aj * (1.0 - alpha_pow(j, n)) / (1.0 - aj);
      if (std::abs(prod - 1.0) >= 1e-12)
        inner -= prod * (1.0 - alpha_pow((i + j) % s.K0, n)) / (1.0 - prod);
      out.A2 += (df.peripheral[std::size_t(i - 1)] * dg.peripheral[std::size_t(j - 1)] /
                 (1.0 - ai) * inner) *
                s.phi[std::size_t(i)].cwiseProduct(s.phi[std::size_t(j)]);
    }
  for (int k = 0; k < n; ++k) {
    CplxVector peri = CplxVector::Zero(nv);
    for (int j = 1; j < s.K0; ++j)
      peri += df.peripheral[std::size_t(j - 1)] * (1.0 - alpha_pow(j, k + 1)) /
              (1.0 - s.alpha[std::size_t(j)]) * s.phi[std::size_t(j)];
    out.A2 += gres[std::size_t(k + 1)].cwiseProduct(peri);

    CplxVector gperi = CplxVector::Zero(nv);
    for (int j = 1; j < s.K0; ++j)
      gperi += dg.peripheral[std::size_t(j - 1)] * alpha_pow(j, k + 1) * s.phi[std::size_t(j)];
    out.A2 += gperi.cwiseProduct(fpre[std::size_t(k)]);

    out.A2 += fpre[std::size_t(k)].cwiseProduct(gres[std::size_t(k + 1)]);
  }

  // brute-force identity check
  CplxVector lhs = CplxVector::Zero(nv);
  {
    std::vector<CplxVector> fit{f}, git{gfun};
    for (int k = 0; k <= n; ++k) {
      fit.push_back(transition_apply_c(g, fit.back()));
      git.push_back(transition_apply_c(g, git.back()));
    }
    CplxVector pre = CplxVector::Zero(nv);
    for (int k = 0; k < n; ++k) {
      pre += fit[std::size_t(k)];
      lhs += pre.cwiseProduct(git[std::size_t(k + 1)]);
    }
    lhs /= double(n) * double(n);
  }
  CplxVector rhs = CplxVector::Constant(nv, 0.5 * fm * gm) + out.A1 / double(n) +
                   out.A2 / (double(n) * double(n));
  out.identity_residual = (lhs - rhs).cwiseAbs().maxCoeff();
  return out;
}

RatVector q_iterated(const QuotientGraph& g, const std::vector<RatVector>& fs, int n) {
  const int N = int(fs.size());
  if (N < 1) throw std::domain_error("q_iterated: need at least one function");
  if (n < N) throw std::domain_error("q_iterated: n >= N required");
  const Eigen::Index nv = Eigen::Index(g.vertex_count());
  // L^j f_i for j <= n
  auto it = std::vector<std::vector<RatVector>>(std::size_t(N));
  for (int i = 0; i < N; ++i) {
    it[std::size_t(i)].push_back(fs[std::size_t(i)]);
    for (int j = 0; j < n; ++j)
      it[std::size_t(i)].push_back(transition_apply(g, it[std::size_t(i)].back()));
  }
  // P_1(j) = sum_{l<=j} L^l f_1; P_k(j) = sum_{l<=j} P_{k-1}(l) L^{l+k-1} f_k
  std::vector<RatVector> prev;
  for (int j = 0; j <= n - N; ++j) {
    prev.push_back(j == 0 ? it[0][0] : prev.back() + it[0][std::size_t(j)]);
  }
  for (int k = 2; k <= N; ++k) {
    std::vector<RatVector> next;
    RatVector acc = RatVector::Constant(nv, Rational(0));
    for (int j = 0; j <= n - N; ++j) {
      RatVector term = prev[std::size_t(j)].cwiseProduct(
          it[std::size_t(k - 1)][std::size_t(j + k - 1)]);
      acc += term;
      next.push_back(acc);
    }
    prev = std::move(next);
  }
  return prev.back();
}

Rational verify_low_moments(const QuotientGraph& g, const SpectralData& s,
                            const Realization& r, std::size_t x, int n, const MultiIndex& I) {
  const auto& w = r.algebra()->weights();
  const uint64_t d = I.weighted_degree(w);
  if (d != 2 && d != 3)
    throw std::domain_error("verify_low_moments: d(I) must be 2 or 3");
  MomentTable t = moment_dp(g, r, x, n, int(d));
  Rational lhs = t.unscaled(I);
  // closed form: n m^I + A[F^I]_n(x)
  RatVector F = edge_moment_fn(g, r, I);
  Rational mI(0);
  for (Eigen::Index v = 0; v < F.size(); ++v) mI += s.m[v] * F[v];
  RatVector A = ergodic_A(g, s, F, n);
  Rational rhs = Rational(long(n)) * mI + A[Eigen::Index(x)];
  return lhs - rhs;
}

WalkSample mc_sample(const QuotientGraph& g, const Realization& r, std::size_t start, int n,
                     std::size_t count, uint64_t seed) {
  if (count < 1) throw std::domain_error("mc_sample: count >= 1 required");
  const StratifiedAlgebra& alg = *r.algebra();
  const std::size_t D = alg.dim();

  // per-vertex cumulative edge distribution (p > 0 edges only)
  std::vector<std::vector<std::pair<double, std::size_t>>> cum(g.vertex_count());
  for (std::size_t x = 0; x < g.vertex_count(); ++x) {
    double acc = 0;
    for (std::size_t e : g.out_edges(x)) {
      if (g.edge(e).p.is_zero()) continue;
      acc += g.edge(e).p.to_double();
      cum[x].emplace_back(acc, e);
    }
    if (!cum[x].empty()) cum[x].back().first = 1.0 + 1e-9;
  }
  std::vector<Eigen::VectorXd> hop_d(g.edge_count());
  for (std::size_t e = 0; e < g.edge_count(); ++e) {
    hop_d[e] = Eigen::VectorXd::Zero(Eigen::Index(D));
    for (std::size_t c = 0; c < D; ++c) hop_d[e][Eigen::Index(c)] = r.hop(e)[Eigen::Index(c)].to_double();
  }

  WalkSample out;
  out.seed = seed;
  out.vertex.resize(count);
  out.displacement.resize(count);
  for (std::size_t i = 0; i < count; ++i) {
    CounterRng rng(seed, i);
    std::size_t pos = start;
    Eigen::VectorXd disp = Eigen::VectorXd::Zero(Eigen::Index(D));
    for (int k = 0; k < n; ++k) {
      const double u = rng.next_uniform();
      const auto& cd = cum[pos];
      std::size_t chosen = cd.back().second;
      for (const auto& [c, e] : cd)
        if (u < c) {
          chosen = e;
          break;
        }
      disp = group_mul_d(alg, disp, hop_d[chosen]);
      pos = g.edge(chosen).terminus;
    }
    out.vertex[i] = pos;
    out.displacement[i] = disp;
  }
  return out;
}

}  // namespace nilwalk

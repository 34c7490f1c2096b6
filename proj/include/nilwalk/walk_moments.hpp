#pragma once

#include <functional>

#include "nilwalk/realization.hpp"

namespace nilwalk {

/// Exact values R_n(y, I) = E^x[(Phi(x)^{-1} * xi_n)^I ; walk at y] for all
/// multi-indices with d(I) <= dmax. Row sums over y give the unscaled
/// moments E^x[(Phi(x)^{-1} * xi_n)^I].
struct MomentTable {
  int n = 0;
  int dmax = 0;
  std::size_t start = 0;
  std::vector<int> weights;                        // per-coordinate layer weights
  std::vector<MultiIndex> indices;                 // shared order, sorted by (d, lex)
  std::vector<std::vector<Rational>> values;       // [vertex][index]

  Rational unscaled(std::size_t idx) const {
    Rational s(0);
    for (const auto& row : values) s += row[idx];
    return s;
  }
  Rational unscaled(const MultiIndex& I) const;
  /// Scaled moment n^{-d(I)/2} E[...] as a float.
  double scaled(const MultiIndex& I) const;
};

/// One exact DP step through the CBH expansion:
///   R_{n+1}(y', I) = sum_{e: t(e)=y'} p(e) sum_{(J,K)} C^I_{JK}
///                    R_n(o(e), J) hop(e)^K.
/// `record` is invoked after every step count in `checkpoints` (ascending);
/// `threads` > 1 parallelizes over table cells with bit-identical results.
void moment_dp(const QuotientGraph& g, const Realization& r, std::size_t start, int dmax,
               const std::vector<int>& checkpoints,
               const std::function<void(const MomentTable&)>& record, int threads = 1);

/// Convenience single-endpoint version.
MomentTable moment_dp(const QuotientGraph& g, const Realization& r, std::size_t start, int n,
                      int dmax, int threads = 1);

/// F^I_Phi(x) = sum_{e in E_x} p(e) hop(e)^I, exact, one value per vertex.
RatVector edge_moment_fn(const QuotientGraph& g, const Realization& r, const MultiIndex& I);

/// m^I_Phi = sum_x m(x) F^I_Phi(x).
Rational averaged_moment(const QuotientGraph& g, const RatVector& m, const Realization& r,
                         const MultiIndex& I);

struct assumption_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Gaussian-limit coefficients of the centered walk: A_ij = m^{[i]+[j]}
/// over layer 1 and b_i = m^{[i]} over layer 2. Refuses non-centered models.
struct LimitCoefficients {
  RatMatrix A;
  RatVector b;
};
LimitCoefficients limit_coefficients(const QuotientGraph& g, const RatVector& m,
                                     const Realization& r);

/// A[f]_n(x) = sum_{k<n} L^k f(x) - n <f,m>, evaluated exactly (rational)
/// and re-derived through the spectral decomposition (complex float); the
/// two paths must agree within 1e-10 or a spectral_error is thrown.
RatVector ergodic_A(const QuotientGraph& g, const SpectralData& s, const RatVector& f, int n);

/// Appendix two-fold functionals A[f,g]^{(1)}, A[f,g]^{(2)} from the
/// peripheral/residual closed forms, plus the exact identity residual
///   (1/n^2) sum_{k<n} sum_{l<=k} L^l f L^{k+1} g
///     - 1/2 <f,m><g,m> - A1/n - A2/n^2
/// against the brute-force double sum.
struct ErgodicPair {
  CplxVector A1;
  CplxVector A2;
  double identity_residual = 0.0;
};
ErgodicPair ergodic_A2(const QuotientGraph& g, const SpectralData& s, const CplxVector& f,
                       const CplxVector& gfun, int n);

/// Q_n^{(N)}[f_1..f_N](x): the nested sum of shifted L-iterates, exact.
RatVector q_iterated(const QuotientGraph& g, const std::vector<RatVector>& fs, int n);

/// Exact L^k f for rational f.
RatVector transition_apply(const QuotientGraph& g, const RatVector& f);

/// Residual of Prop. phi-moment for d(I) in {2,3}: unscaled DP moment minus
/// (n m^I + A[F^I]_n(x)); exactly zero on modified-harmonic centered models.
Rational verify_low_moments(const QuotientGraph& g, const SpectralData& s,
                            const Realization& r, std::size_t x, int n, const MultiIndex& I);

/// Monte Carlo endpoint sampler; reproducible given (seed, path index).
struct WalkSample {
  uint64_t seed = 0;
  std::vector<std::size_t> vertex;
  std::vector<Eigen::VectorXd> displacement;  // Phi(x)^{-1} * xi_n, float coords
};
WalkSample mc_sample(const QuotientGraph& g, const Realization& r, std::size_t start, int n,
                     std::size_t count, uint64_t seed);

}  // namespace nilwalk

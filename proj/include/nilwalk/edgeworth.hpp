#pragma once

#include <optional>

#include "nilwalk/euler_maclaurin.hpp"
#include "nilwalk/gaussian.hpp"
#include "nilwalk/sqrt_ext.hpp"
#include "nilwalk/walk_moments.hpp"

namespace nilwalk {

/// A model assembled for the Edgeworth harness: graph, realization used by
/// the approximation operator (possibly non-harmonic), the Gaussian limit
/// data of the *modified harmonic* realization on the same holonomies, and
/// spectral data.
struct WalkModel {
  AlgebraPtr algebra;
  const QuotientGraph* graph = nullptr;
  const Realization* realization = nullptr;
  SpectralData spectral;
  GaussianSpec limit;
  std::shared_ptr<GaussianMomentTable> gaussian;  // at dmax covering f
};

WalkModel make_walk_model(const AlgebraPtr& algebra, const QuotientGraph& g,
                          const Realization& r, int dmax);

/// L^{[nt]} P^H_{n^{-1/2}} f(x) evaluated exactly in Q[n^{-1/2}] through the
/// moment DP and the right Taylor expansion of f.
SqrtExt lhs_exact(const Polynomial& f, const WalkModel& model, std::size_t x,
                  const Rational& t, long n);

/// P^H_{n^{-1/2}} e^{tA} f(x), exact in Q[n^{-1/2}].
SqrtExt rhs_exact(const Polynomial& f, const WalkModel& model, std::size_t x,
                  const Rational& t, long n);

struct DiscrepancyRow {
  long n = 0;
  SqrtExt lhs, rhs, D;
};

struct FitResult {
  std::vector<Rational> xi_exact;    // Richardson-extrapolated, exact
  std::vector<double> xi_ls;         // least-squares cross-check
  double fit_disagreement = 0.0;     // max |exact - ls|
  double residual_bound = 0.0;       // sup |D_n - fit(n)| n^{N/2}
};

struct DiscrepancyReport {
  std::string model_id;
  std::string f_str;
  std::string vertex;
  Rational t;
  std::vector<DiscrepancyRow> rows;
  FitResult fit;
  std::optional<double> slope;       // log-log slope; empty on exact agreement
  bool exact_agreement = false;      // all D_n identically zero
  double corrector = 0.0;            // only set by the non-harmonic path
};

/// Computes D_n over the n sweep (one DP pass), fits xi-hat by sequential
/// Richardson on the exact half-power components and by least squares on
/// floats, and reports the log-log slope. N-1 coefficients are fitted.
DiscrepancyReport discrepancy(const Polynomial& f, const WalkModel& model, std::size_t x,
                              const Rational& t, const std::vector<long>& ns, int N,
                              int threads = 1);

/// Exact Edgeworth coefficient xi_j from the coefficient formula: nested
/// sums over (i, ell, q, multi-index tuples) of EM-polynomial differential
/// operators in the generator, iterated right-Taylor coefficient operators,
/// Gaussian simplex-time integrals (Dirichlet, exact), and the walk-moment
/// factors prod (m^{I_k}_Phi - m^{I_k}_nu).
Rational xi_formula(int j, const Polynomial& f, const WalkModel& model, std::size_t x);

struct TrotterReport {
  double bound = 0.0;
  double phi_n = 0.0;
  double psi_n = 0.0;
  double psi_n_resolvent = 0.0;  // psi_n((lambda - A) f)
  double box_radius = 0.0;
};

/// Evaluates the Trotter-refinement bound with M = 1, omega = 0, k(n) = [nt]:
///   (sqrt(k)/n + |k/n - t|) phi_n(f) + (2/lambda) psi_n(f)
///     + (t/lambda) psi_n((lambda - A) f),
/// with phi_n(f) = ||A f|| + C n^{-1/2} (max_e |hop(e)|^3) ||D^3 f|| and
/// psi_n(f) the same without the ||A f|| term. Sup norms are taken over the
/// homogeneous box |x_c| <= R^{sigma_c} by grid sampling.
TrotterReport trotter_bound(const Polynomial& f, const WalkModel& model, const Rational& t,
                            long n, const Rational& C, const Rational& lambda,
                            double box_radius = 4.0);

/// Berry-Esseen run for an arbitrary equivariant realization sharing the
/// harmonic one's holonomies; the report carries the corrector magnitude.
DiscrepancyReport be_nonharmonic(const Polynomial& f, const WalkModel& model_with_phi,
                                 const Realization& harmonic, std::size_t x,
                                 const Rational& t, const std::vector<long>& ns, int N);

}  // namespace nilwalk

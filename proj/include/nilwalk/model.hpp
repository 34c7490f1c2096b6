#pragma once

#include <filesystem>

#include "nilwalk/edgeworth.hpp"

namespace nilwalk {

struct model_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Run parameters with spec defaults; every field can be overridden by the
/// config file and again by CLI flags.
struct RunParams {
  Rational t{1};
  std::vector<long> ns{16, 32, 64, 128, 256, 512, 1024, 2048, 4096};
  int dmax = 0;  // 0: derive from f and N
  int N = 3;
  uint64_t seed = 1;
  Rational C{8};
  Rational b{2};
  Rational lambda{1};
  double box = 4.0;
  int threads = 1;
};

/// A fully validated model: algebra, base graph, realization (explicit or
/// modified harmonic), spectral data, and the default test function.
struct ModelConfig {
  std::string id;
  AlgebraPtr algebra;
  std::shared_ptr<QuotientGraph> graph;
  std::shared_ptr<Realization> realization;           // as configured
  std::shared_ptr<Realization> harmonic;              // always solved
  bool realization_is_harmonic = true;
  RatVector m;
  std::optional<Polynomial> f;                        // config-supplied f
  RunParams run;
  std::string anchor;
};

/// Loads and validates a model config (JSON). Throws model_error with a
/// field path on malformed input; graph/algebra/realization invariants are
/// all enforced here.
ModelConfig load_model(const std::filesystem::path& path);

/// Parses an inline polynomial like "x^3", "x1^2*x2 - 1/2*x3" over the
/// algebra's coordinates (x aliases x1).
Polynomial parse_polynomial(const AlgebraPtr& algebra, const std::string& text);

/// Parses a sweep "A..B" (powers of two from A to B) or a comma list.
std::vector<long> parse_sweep(const std::string& text);

}  // namespace nilwalk

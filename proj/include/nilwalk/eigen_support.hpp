#pragma once

#include <Eigen/Core>

#include "nilwalk/rational.hpp"

namespace Eigen {

template <>
struct NumTraits<nilwalk::Rational> : GenericNumTraits<nilwalk::Rational> {
  using Real = nilwalk::Rational;
  using NonInteger = nilwalk::Rational;
  using Nested = nilwalk::Rational;
  using Literal = long;

  static inline Real epsilon() { return nilwalk::Rational(0); }
  static inline Real dummy_precision() { return nilwalk::Rational(0); }
  static inline int digits10() { return 0; }

  enum {
    IsInteger = 0,
    IsSigned = 1,
    IsComplex = 0,
    RequireInitialization = 1,
    ReadCost = 1,
    AddCost = 16,
    MulCost = 32,
  };
};

}  // namespace Eigen

namespace nilwalk {

using RatVector = Eigen::Matrix<Rational, Eigen::Dynamic, 1>;
using RatMatrix = Eigen::Matrix<Rational, Eigen::Dynamic, Eigen::Dynamic>;

}  // namespace nilwalk

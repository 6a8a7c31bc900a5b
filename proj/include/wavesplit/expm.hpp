#pragma once

#include <unsupported/Eigen/MatrixFunctions>

#include "wavesplit/types.hpp"

namespace wavesplit {

/// Matrix exponential (scaling-and-squaring, Pade 13).
template <typename Derived>
auto expm(const Eigen::MatrixBase<Derived>& a) {
  return a.exp().eval();
}

}  // namespace wavesplit

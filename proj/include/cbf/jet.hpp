#pragma once

#include <Eigen/Dense>

namespace cbf {

// All jets in this project live in at most 7 dimensions (state n <= 6 plus
// time), so fixed-capacity Eigen storage keeps evaluation allocation-free.
constexpr int kMaxJetDim = 8;

using JetVec = Eigen::Matrix<double, Eigen::Dynamic, 1, 0, kMaxJetDim, 1>;
using JetMat =
    Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, 0, kMaxJetDim, kMaxJetDim>;

// Value of a scalar field together with its gradient and symmetric Hessian.
// For fields of (x, t) the convention is: indices 0..n-1 are state, index n
// is time.
struct Jet2 {
  double value = 0.0;
  JetVec grad;
  JetMat hess;

  Jet2() = default;
  explicit Jet2(int dim)
      : grad(JetVec::Zero(dim)), hess(JetMat::Zero(dim, dim)) {}

  int dim() const { return static_cast<int>(grad.size()); }

  static Jet2 constant(double v, int dim) {
    Jet2 j(dim);
    j.value = v;
    return j;
  }
};

}  // namespace cbf

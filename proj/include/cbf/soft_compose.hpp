#pragma once

#include <span>
#include <vector>

#include "cbf/jet.hpp"

namespace cbf {

struct SoftParams {
  double kappa;  // sharpness, > 0
  int n_args;    // expected argument count, >= 1

  SoftParams(double kappa_, int n_args_);
};

// softmin_kappa(z) = -(1/kappa) log sum_i exp(-kappa z_i)
double softmin(const SoftParams& params, std::span<const double> z);

// softmax_kappa(z) = (1/kappa) log sum_i exp(kappa z_i) - log(N)/kappa
double softmax(const SoftParams& params, std::span<const double> z);

// Jet-propagating variants. All argument jets must share one dimension.
// Gradient is the convex-weight combination of argument gradients; the
// Hessian carries the weight-covariance term of the log-sum-exp.
Jet2 softmin_jet(const SoftParams& params, std::span<const Jet2> z);
Jet2 softmax_jet(const SoftParams& params, std::span<const Jet2> z);

}  // namespace cbf

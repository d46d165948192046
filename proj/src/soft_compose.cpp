#include "cbf/soft_compose.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace cbf {

namespace {

void check_args_size(const SoftParams& params, std::size_t got) {
  if (static_cast<int>(got) != params.n_args) {
    throw std::invalid_argument("soft_compose: expected " +
                                std::to_string(params.n_args) +
                                " arguments, got " + std::to_string(got));
  }
  if (got == 0) {
    throw std::invalid_argument("soft_compose: empty argument list");
  }
}

// log sum_i exp(s * kappa * (z_i - pivot)), with pivot the extreme argument
// so every exponent is <= 0.
double stabilized_lse(double kappa, double sign, std::span<const double> z,
                      double pivot) {
  double sum = 0.0;
  for (double zi : z) {
    sum += std::exp(sign * kappa * (zi - pivot));
  }
  return std::log(sum);
}

}  // namespace

SoftParams::SoftParams(double kappa_, int n_args_) : kappa(kappa_), n_args(n_args_) {
  if (!(kappa > 0.0) || !std::isfinite(kappa)) {
    throw std::invalid_argument("SoftParams: kappa must be positive and finite");
  }
  if (n_args < 1) {
    throw std::invalid_argument("SoftParams: n_args must be >= 1");
  }
}

double softmin(const SoftParams& params, std::span<const double> z) {
  check_args_size(params, z.size());
  for (double zi : z) {
    if (!std::isfinite(zi)) {
      throw std::invalid_argument("softmin: non-finite argument");
    }
  }
  const double zmin = *std::min_element(z.begin(), z.end());
  return zmin - stabilized_lse(params.kappa, -1.0, z, zmin) / params.kappa;
}

double softmax(const SoftParams& params, std::span<const double> z) {
  check_args_size(params, z.size());
  for (double zi : z) {
    if (!std::isfinite(zi)) {
      throw std::invalid_argument("softmax: non-finite argument");
    }
  }
  const double zmax = *std::max_element(z.begin(), z.end());
  return zmax + stabilized_lse(params.kappa, 1.0, z, zmax) / params.kappa -
         std::log(static_cast<double>(z.size())) / params.kappa;
}

namespace {

// Shared jet propagation. sign = -1 for softmin, +1 for softmax.
Jet2 soft_jet(const SoftParams& params, std::span<const Jet2> z, double sign) {
  check_args_size(params, z.size());
  const int dim = z.front().dim();
  for (const Jet2& j : z) {
    if (j.dim() != dim) {
      throw std::invalid_argument("soft_compose: jet dimension mismatch");
    }
    if (!std::isfinite(j.value)) {
      throw std::invalid_argument("soft_compose: non-finite jet value");
    }
  }

  double pivot = z.front().value;
  for (const Jet2& j : z) {
    pivot = (sign > 0) ? std::max(pivot, j.value) : std::min(pivot, j.value);
  }

  const double kappa = params.kappa;
  double sum = 0.0;
  JetVec g = JetVec::Zero(dim);
  JetMat h = JetMat::Zero(dim, dim);
  JetMat outer_sum = JetMat::Zero(dim, dim);
  // First pass accumulates unnormalized weights.
  std::vector<double> w(z.size());
  for (std::size_t i = 0; i < z.size(); ++i) {
    w[i] = std::exp(sign * kappa * (z[i].value - pivot));
    sum += w[i];
  }
  for (std::size_t i = 0; i < z.size(); ++i) {
    const double p = w[i] / sum;
    g.noalias() += p * z[i].grad;
    h.noalias() += p * z[i].hess;
    outer_sum.noalias() += p * (z[i].grad * z[i].grad.transpose());
  }

  Jet2 out(dim);
  out.value = pivot + sign * std::log(sum) / kappa;
  if (sign > 0) {
    out.value -= std::log(static_cast<double>(z.size())) / kappa;
  }
  out.grad = g;
  out.hess = h + sign * kappa * (outer_sum - g * g.transpose());
  return out;
}

}  // namespace

Jet2 softmin_jet(const SoftParams& params, std::span<const Jet2> z) {
  return soft_jet(params, z, -1.0);
}

Jet2 softmax_jet(const SoftParams& params, std::span<const Jet2> z) {
  return soft_jet(params, z, 1.0);
}

}  // namespace cbf

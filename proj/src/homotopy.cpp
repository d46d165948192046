#include "cbf/homotopy.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <vector>

namespace cbf {

namespace {

constexpr int kMaxOrderR = 8;

std::int64_t binomial(int n, int k) {
  if (k < 0 || k > n) return 0;
  std::int64_t result = 1;
  for (int i = 1; i <= k; ++i) {
    result = result * (n - k + i) / i;
  }
  return result;
}

// Coefficients of the smoothstep polynomial in s = lambda*t:
// eta(s) = sum_{j=0}^{r} c_j s^{r+1+j},
// c_j = (-1)^j C(r+j, j) C(2r+1, r-j).  Exact integers for r <= 8.
std::vector<double> poly_coefficients(int r) {
  std::vector<double> c(r + 1);
  for (int j = 0; j <= r; ++j) {
    const std::int64_t mag = binomial(r + j, j) * binomial(2 * r + 1, r - j);
    c[j] = (j % 2 == 0) ? static_cast<double>(mag) : -static_cast<double>(mag);
  }
  return c;
}

}  // namespace

HomotopyParams::HomotopyParams(int r_, double lambda_) : r(r_), lambda(lambda_) {
  if (r < 1 || r > kMaxOrderR) {
    throw std::invalid_argument("HomotopyParams: r must be in [1, 8]");
  }
  if (!(lambda >= 1.0) || !std::isfinite(lambda)) {
    throw std::invalid_argument("HomotopyParams: lambda must be >= 1");
  }
}

double eta(const HomotopyParams& params, double t) {
  const double v = eta_derivative(params, t, 0);
  return std::clamp(v, 0.0, 1.0);
}

double eta_derivative(const HomotopyParams& params, double t, int order) {
  if (order < 0 || order > 2) {
    throw std::invalid_argument("eta_derivative: order must be 0, 1 or 2");
  }
  if (order > params.r) {
    throw std::invalid_argument(
        "eta_derivative: order exceeds smoothness r; derivative not guaranteed "
        "continuous");
  }
  if (!std::isfinite(t)) {
    throw std::invalid_argument("eta_derivative: non-finite t");
  }

  if (t < 0.0 || t > 1.0 / params.lambda) {
    return (order == 0 && t > 0.0) ? 1.0 : 0.0;
  }

  const double s = params.lambda * t;
  const std::vector<double> c = poly_coefficients(params.r);
  // Evaluate d^order/ds^order of the polynomial, then chain rule in lambda.
  double acc = 0.0;
  for (int j = params.r; j >= 0; --j) {
    const int power = params.r + 1 + j;
    double falling = 1.0;
    for (int p = 0; p < order; ++p) falling *= static_cast<double>(power - p);
    acc += c[j] * falling * std::pow(s, power - order);
  }
  return acc * std::pow(params.lambda, order);
}

}  // namespace cbf

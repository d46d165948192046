#pragma once

namespace cbf {

// C^r transition from 0 to 1 over [0, 1/lambda]. Used to blend the newest
// local barrier into the composite soft maximum and the oldest one out.
struct HomotopyParams {
  int r;          // smoothness order, >= 1
  double lambda;  // compression, >= 1

  HomotopyParams(int r_, double lambda_);
};

// 0 for t < 0, 1 for t > 1/lambda, polynomial smoothstep in between.
// Output clamped to [0, 1] against round-off.
double eta(const HomotopyParams& params, double t);

// Analytic derivative of eta of the given order (0, 1 or 2; order <= r).
// Identically zero outside (0, 1/lambda).
double eta_derivative(const HomotopyParams& params, double t, int order);

}  // namespace cbf

#pragma once

#include "stagroute/common.hpp"

namespace stagroute {

/// Unit-capacity FIFO bottleneck with deterministic service time tau and
/// Poisson arrivals; rho = lambda * tau is the traffic intensity.
struct BottleneckConfig {
  double nominal_s = 1.0;
  double rho = 0.5;
};

// Sensitivity that makes the linear congestion estimator unbiased for the
// bottleneck: 1 / (2 - rho), in (1/2, 1] for rho in (0, 1].
double phi_for_rho(double rho);

// Stationary expected travel time of the bottleneck: tau + tau*rho/(2(1-rho)).
double expected_bottleneck_time(double nominal_s, double rho);

// Fixed point of the linear estimator tau + phi*tau*E[f] with E[f] =
// rho / (1 - phi*rho); requires phi*rho < 1.
double expected_linear_time(double nominal_s, double rho, double phi);

struct SimResult {
  long n = 0;                // arrivals simulated
  double mean_s = 0.0;       // after warm-up truncation
  double se_s = 0.0;         // batch-means standard error
  double raw_mean_s = 0.0;   // no truncation
  double raw_se_s = 0.0;
  double mean_queue_len = 0.0;  // time-average number in system
  double lambda_per_s = 0.0;
};

// Monte Carlo of the bottleneck: Poisson interarrivals, FIFO service of
// exactly tau each. The first 1% of arrivals are discarded from the primary
// mean to damp the empty-system start; both means are reported.
SimResult simulate_bottleneck(const BottleneckConfig& config, long n_arrivals, std::uint64_t seed);

}  // namespace stagroute

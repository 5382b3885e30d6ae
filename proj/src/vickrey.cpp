#include "stagroute/vickrey.hpp"

#include <algorithm>
#include <limits>
#include <cmath>
#include <vector>

namespace stagroute {

double phi_for_rho(double rho) {
  if (!(rho > 0.0) || rho > 1.0) throw UsageError("phi_for_rho: rho must be in (0, 1]");
  return 1.0 / (2.0 - rho);
}

double expected_bottleneck_time(double nominal_s, double rho) {
  if (!(rho > 0.0) || rho >= 1.0) {
    throw UsageError("expected_bottleneck_time: rho must be in (0, 1)");
  }
  return nominal_s + nominal_s * rho / (2.0 * (1.0 - rho));
}

double expected_linear_time(double nominal_s, double rho, double phi) {
  if (!(rho > 0.0) || rho >= 1.0) throw UsageError("expected_linear_time: rho must be in (0, 1)");
  if (!(phi > 0.0) || !(phi * rho < 1.0)) {
    throw UsageError("expected_linear_time: requires phi > 0 and phi * rho < 1 (stability)");
  }
  const double mean_flow = rho / (1.0 - phi * rho);
  return nominal_s + phi * nominal_s * mean_flow;
}

namespace {

// Mean and batch-means standard error of a (possibly autocorrelated) series.
void batch_stats(const std::vector<double>& xs, double& mean, double& se) {
  const std::size_t n = xs.size();
  mean = 0.0;
  for (double x : xs) mean += x;
  mean /= static_cast<double>(n);

  const std::size_t batches = std::clamp<std::size_t>(n / 64, 1, 100);
  const std::size_t batch_len = n / batches;
  if (batches < 2 || batch_len < 1) {
    se = 0.0;
    return;
  }
  std::vector<double> batch_means;
  batch_means.reserve(batches);
  for (std::size_t b = 0; b < batches; ++b) {
    double s = 0.0;
    for (std::size_t i = b * batch_len; i < (b + 1) * batch_len; ++i) s += xs[i];
    batch_means.push_back(s / static_cast<double>(batch_len));
  }
  double grand = 0.0;
  for (double m : batch_means) grand += m;
  grand /= static_cast<double>(batches);
  double var = 0.0;
  for (double m : batch_means) var += (m - grand) * (m - grand);
  var /= static_cast<double>(batches - 1);
  se = std::sqrt(var / static_cast<double>(batches));
}

}  // namespace

SimResult simulate_bottleneck(const BottleneckConfig& config, long n_arrivals,
                              std::uint64_t seed) {
  if (n_arrivals < 1) throw UsageError("simulate_bottleneck: need at least one arrival");
  if (!(config.rho > 0.0) || config.rho >= 1.0) {
    throw UsageError("simulate_bottleneck: rho must be in (0, 1) for a stable queue");
  }
  const double tau = config.nominal_s;
  const double lambda = config.rho / tau;

  Rng rng(splitmix64(seed ^ 0x626f74746c65ULL));
  std::vector<double> times;
  times.reserve(static_cast<std::size_t>(n_arrivals));

  double arrival = 0.0;
  double last_completion = -std::numeric_limits<double>::infinity();
  double first_arrival = 0.0;
  double busy_area = 0.0;  // integral of the number in system
  for (long i = 0; i < n_arrivals; ++i) {
    arrival += rng.exponential(lambda);
    if (i == 0) first_arrival = arrival;
    const double completion = std::max(arrival, last_completion) + tau;
    times.push_back(completion - arrival);
    busy_area += completion - arrival;
    last_completion = completion;
  }

  SimResult out;
  out.n = n_arrivals;
  out.lambda_per_s = lambda;
  batch_stats(times, out.raw_mean_s, out.raw_se_s);

  const std::size_t skip = static_cast<std::size_t>(n_arrivals / 100);
  std::vector<double> truncated(times.begin() + static_cast<long>(skip), times.end());
  batch_stats(truncated, out.mean_s, out.se_s);

  out.mean_queue_len = busy_area / (last_completion - first_arrival);
  return out;
}

}  // namespace stagroute

#include "rssac/risk.hpp"

#include <algorithm>
#include <cmath>

namespace rssac {
namespace {

void check_costs(std::span<const double> costs) {
  require(!costs.empty(), "risk: empty cost list");
  for (double c : costs) require(std::isfinite(c), "risk: non-finite cost");
}

}  // namespace

double sample_mean(std::span<const double> values) {
  require(!values.empty(), "mean of an empty list");
  double s = 0.0;
  for (double v : values) s += v;
  return s / static_cast<double>(values.size());
}

double sample_variance(std::span<const double> values) {
  const double m = sample_mean(values);
  double s = 0.0;
  for (double v : values) s += (v - m) * (v - m);
  return s / static_cast<double>(values.size());
}

double entropic_risk(std::span<const double> costs, double sigma) {
  check_costs(costs);
  require(sigma >= 0.0 && std::isfinite(sigma), "risk: sigma must be a finite nonnegative number");
  if (sigma == 0.0) return sample_mean(costs);
  const double top = *std::max_element(costs.begin(), costs.end());
  double s = 0.0;
  for (double c : costs) s += std::exp(sigma * (c - top));
  return top + (std::log(s) - std::log(static_cast<double>(costs.size()))) / sigma;
}

std::vector<double> risk_likelihood_ratios(std::span<const double> costs, double sigma) {
  check_costs(costs);
  require(sigma >= 0.0 && std::isfinite(sigma), "risk: sigma must be a finite nonnegative number");
  std::vector<double> w(costs.size(), 1.0);
  if (sigma == 0.0) return w;
  const double top = *std::max_element(costs.begin(), costs.end());
  for (std::size_t j = 0; j < costs.size(); ++j) w[j] = std::exp(sigma * (costs[j] - top));
  return w;
}

std::vector<double> risk_weights(std::span<const double> costs, double sigma) {
  std::vector<double> w = risk_likelihood_ratios(costs, sigma);
  double total = 0.0;
  for (double x : w) total += x;
  for (double& x : w) x /= total;
  return w;
}

Vec4 weighted_adjoint(std::span<const double> weights, std::span<const Vec4> adjoints) {
  require(!weights.empty() && weights.size() == adjoints.size(), "weighted_adjoint: length mismatch");
  Vec4 acc = Vec4::Zero();
  double total = 0.0;
  for (std::size_t j = 0; j < weights.size(); ++j) {
    acc += weights[j] * adjoints[j];
    total += weights[j];
  }
  require(total > 0.0, "weighted_adjoint: weights sum to zero");
  return acc / total;
}

}  // namespace rssac

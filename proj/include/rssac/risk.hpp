#pragma once

#include <span>
#include <vector>

#include "rssac/types.hpp"

namespace rssac {

double sample_mean(std::span<const double> values);
/// Population (1/M) variance.
double sample_variance(std::span<const double> values);

/// Monte Carlo entropic risk (1/sigma) log E[exp(sigma J)]; the sample mean when sigma == 0.
double entropic_risk(std::span<const double> costs, double sigma);

/// Normalised softmax weights exp(sigma J_j) / sum_k exp(sigma J_k).
std::vector<double> risk_weights(std::span<const double> costs, double sigma);

/// Unnormalised weights exp(sigma (J_j - max J)). Every entry is exactly 1 when
/// sigma == 0, which makes the weighted adjoint reduce to the plain mean bitwise.
std::vector<double> risk_likelihood_ratios(std::span<const double> costs, double sigma);

/// sum_j w_j rho_j / sum_j w_j, accumulated in sample order.
Vec4 weighted_adjoint(std::span<const double> weights, std::span<const Vec4> adjoints);

}  // namespace rssac

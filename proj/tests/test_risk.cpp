#include <doctest.h>

#include "helpers.hpp"
#include "rssac/risk.hpp"

using namespace rssac;

namespace {

std::vector<double> random_costs(std::mt19937_64& rng, int m, double scale) {
  std::uniform_real_distribution<double> u(0.0, scale);
  std::vector<double> c(static_cast<std::size_t>(m));
  for (auto& x : c) x = u(rng);
  return c;
}

// Direct evaluation without the max shift, usable for moderate sigma * cost.
double naive_risk(const std::vector<double>& c, double sigma) {
  double s = 0.0;
  for (double x : c) s += std::exp(sigma * x);
  return std::log(s / static_cast<double>(c.size())) / sigma;
}

}  // namespace

TEST_CASE("entropic risk examples") {
  const std::vector<double> same(7, 3.25);
  for (double s : {0.0, 0.5, 1.0, 10.0}) CHECK(entropic_risk(same, s) == doctest::Approx(3.25).epsilon(1e-14));
  const std::vector<double> c = {0.0, 2.0};
  CHECK(entropic_risk(c, 1.0) == doctest::Approx(std::log((1 + std::exp(2.0)) / 2)).epsilon(1e-14));
  CHECK(entropic_risk(c, 1.0) == doctest::Approx(1.43379).epsilon(1e-5));
  CHECK(entropic_risk(c, 0.0) == 1.0);
  // ln((1 + e^0.2) / 2) / 0.1 = 1.049917..., next to the expansion value 1.05.
  CHECK(entropic_risk(c, 0.1) == doctest::Approx(std::log((1 + std::exp(0.2)) / 2) / 0.1).epsilon(1e-14));
  CHECK(std::abs(entropic_risk(c, 0.1) - 1.05) < 1e-4);
  CHECK_THROWS_AS(entropic_risk(std::vector<double>{}, 1.0), Error);
  CHECK_THROWS_AS(entropic_risk(c, -1.0), Error);
}

TEST_CASE("entropic risk agrees with the direct formula") {
  std::mt19937_64 rng(21);
  for (int i = 0; i < 100; ++i) {
    const auto c = random_costs(rng, 30, 10.0);
    for (double s : {0.1, 0.5, 1.0}) CHECK(entropic_risk(c, s) == doctest::Approx(naive_risk(c, s)).epsilon(1e-12));
  }
}

TEST_CASE("risk weights") {
  std::mt19937_64 seed_rng(1);
  const std::vector<double> flat = random_costs(seed_rng, 30, 5.0);
  for (double w : risk_weights(flat, 0.0)) CHECK(w == doctest::Approx(1.0 / 30));
  const std::vector<double> c = {0.0, 2.0};
  const auto w = risk_weights(c, 1.0);
  CHECK(w[0] == doctest::Approx(1 / (1 + std::exp(2.0))).epsilon(1e-14));
  CHECK(w[1] == doctest::Approx(0.88080).epsilon(1e-5));
  const std::vector<double> spike = {1.0, 3.0, 2.0};
  CHECK(risk_weights(spike, 100.0)[1] == doctest::Approx(1.0).epsilon(1e-12));

  std::mt19937_64 rng(5);
  for (int i = 0; i < 50; ++i) {
    const auto cc = random_costs(rng, 30, 20.0);
    double total = 0.0;
    for (double x : risk_weights(cc, 0.7)) {
      CHECK(x >= 0.0);
      total += x;
    }
    CHECK(total == doctest::Approx(1.0).epsilon(1e-14));
  }
  const auto ones = risk_likelihood_ratios(c, 0.0);
  CHECK(ones == std::vector<double>{1.0, 1.0});
}

TEST_CASE("weighted adjoint") {
  std::mt19937_64 rng(6);
  std::vector<Vec4> rho;
  for (int j = 0; j < 5; ++j) rho.push_back(testing::random_vec4(rng, 3.0));
  const std::vector<double> uniform(5, 0.2);
  Vec4 mean = Vec4::Zero();
  for (const auto& r : rho) mean += r;
  mean /= 5.0;
  CHECK(weighted_adjoint(uniform, rho).isApprox(mean, 1e-14));
  const std::vector<double> hot = {0, 0, 1, 0, 0};
  CHECK(weighted_adjoint(hot, rho) == rho[2]);
  const std::vector<Vec4> same(5, rho[0]);
  const std::vector<double> w = {0.1, 0.3, 0.2, 0.15, 0.25};
  CHECK(weighted_adjoint(w, same).isApprox(rho[0], 1e-14));
  CHECK_THROWS_AS(weighted_adjoint(w, std::span(rho).first(3)), Error);
}

TEST_CASE("risk invariants over random cost vectors") {
  std::mt19937_64 rng(99);
  for (int i = 0; i < 200; ++i) {
    const auto c = random_costs(rng, 30, 10.0);
    const double mean = sample_mean(c);
    double prev = entropic_risk(c, 0.0);
    CHECK(prev == mean);
    for (double s : {0.1, 0.3, 0.5, 1.0, 2.0}) {
      const double r = entropic_risk(c, s);
      CHECK(r >= mean);
      CHECK(r > prev);
      prev = r;
      const double shift = 37.5;
      std::vector<double> shifted = c;
      for (double& x : shifted) x += shift;
      CHECK(std::abs(entropic_risk(shifted, s) - (r + shift)) <= 1e-9);
    }
  }
}

TEST_CASE("weights are shift invariant bitwise for exactly representable shifts") {
  std::mt19937_64 rng(7);
  std::uniform_int_distribution<int> q(0, 1 << 24);
  for (int i = 0; i < 200; ++i) {
    std::vector<double> c(30);
    for (auto& x : c) x = std::ldexp(q(rng), -20);  // dyadic, exact under the shifts below
    const double shift = std::ldexp(q(rng), -20);
    std::vector<double> shifted = c;
    for (double& x : shifted) x += shift;
    CHECK(risk_weights(shifted, 0.8) == risk_weights(c, 0.8));
    CHECK(risk_likelihood_ratios(shifted, 0.8) == risk_likelihood_ratios(c, 0.8));
  }
}

TEST_CASE("small sigma expansion is second order") {
  // Right-skewed costs, like Monte Carlo collision costs; the sigma^2 term is the
  // third cumulant, which vanishes for symmetric samples.
  std::mt19937_64 rng(123);
  std::exponential_distribution<double> expo(1.0);
  int good = 0;
  for (int i = 0; i < 200; ++i) {
    std::vector<double> c(30);
    for (auto& x : c) x = expo(rng);
    const double mean = sample_mean(c);
    const double var = sample_variance(c);
    const double e1 = std::abs(entropic_risk(c, 0.1) - (mean + 0.05 * var));
    const double e2 = std::abs(entropic_risk(c, 0.05) - (mean + 0.025 * var));
    if (e2 <= 0.3 * e1) ++good;
  }
  CHECK(good == 200);
}

TEST_CASE("overflow safety") {
  const std::vector<double> big = {1e4, 0.0, 9999.0, 5000.0};
  CHECK(std::isfinite(entropic_risk(big, 1.0)));
  CHECK(entropic_risk(big, 1.0) <= 1e4);
  for (double w : risk_weights(big, 1.0)) CHECK(std::isfinite(w));
}

TEST_CASE("population variance") {
  const std::vector<double> one = {4.0};
  CHECK(sample_variance(one) == 0.0);
  const std::vector<double> c = {0.0, 2.0};
  CHECK(sample_variance(c) == 1.0);
}

#include "rssac/predictor.hpp"

#include <cmath>
#include <numeric>
#include <random>

namespace rssac {
namespace {

// Square root of a PSD covariance that tolerates singular (e.g. zero) matrices.
Mat2 covariance_root(const Mat2& cov) {
  Eigen::SelfAdjointEigenSolver<Mat2> eig(cov);
  const Eigen::Vector2d root = eig.eigenvalues().cwiseMax(0.0).cwiseSqrt();
  return eig.eigenvectors() * root.asDiagonal() * eig.eigenvectors().transpose();
}

Vec2 rotate(const Vec2& v, double angle) {
  const double c = std::cos(angle);
  const double s = std::sin(angle);
  return {c * v(0) - s * v(1), s * v(0) + c * v(1)};
}

Vec2 mean_velocity(const HumanHistory& h, double dt_o) {
  if (h.mean_velocity) return *h.mean_velocity;
  require(h.positions.size() >= 2,
          "predictor: human " + std::to_string(h.id) + " needs at least two observations or a mean velocity");
  return estimate_velocity(h.positions, dt_o);
}

class GaussianPredictor final : public Predictor {
 public:
  GaussianPredictor(const PredictorConfig& cfg, double dt_o)
      : cfg_(cfg), dt_o_(dt_o), root_(covariance_root(cfg.noise_cov)) {}

  HumanTransitionSamples sample(std::span<const HumanHistory> history, int samples, int steps,
                                std::uint64_t master_seed, const RobotPlan*) const override {
    require(samples >= 1 && steps >= 1, "predictor: sample count and horizon must be positive");
    const int n = static_cast<int>(history.size());
    std::vector<Vec2> means;
    means.reserve(history.size());
    for (const auto& h : history) means.push_back(mean_velocity(h, dt_o_) * dt_o_);
    const bool mixture = cfg_.kind == PredictorKind::multimodal_mixture;

    HumanTransitionSamples out(samples, n, steps, master_seed);
    for (int j = 0; j < samples; ++j) {
      std::mt19937_64 rng(out.sample_seed(j));
      std::normal_distribution<double> normal(0.0, 1.0);
      std::uniform_real_distribution<double> uniform(0.0, 1.0);
      for (int i = 0; i < n; ++i) {
        Vec2 mean = means[static_cast<std::size_t>(i)];
        if (mixture) mean = rotate(mean, pick_mode(uniform(rng)).heading);
        for (int k = 0; k < steps; ++k) {
          const double z0 = normal(rng);
          const double z1 = normal(rng);
          out.at(j, i, k) = mean + root_ * Vec2(z0, z1);
        }
      }
    }
    return out;
  }

 private:
  const MixtureMode& pick_mode(double u) const {
    double acc = 0.0;
    for (const auto& m : cfg_.modes) {
      acc += m.weight;
      if (u < acc) return m;
    }
    return cfg_.modes.back();
  }

  PredictorConfig cfg_;
  double dt_o_;
  Mat2 root_;
};

class ReplayPredictor final : public Predictor {
 public:
  HumanTransitionSamples sample(std::span<const HumanHistory> history, int samples, int steps,
                                std::uint64_t master_seed, const RobotPlan*) const override {
    require(samples >= 1 && steps >= 1, "predictor: sample count and horizon must be positive");
    const int n = static_cast<int>(history.size());
    HumanTransitionSamples out(samples, n, steps, master_seed);
    for (int j = 0; j < samples; ++j) {
      for (int i = 0; i < n; ++i) {
        const auto& future = history[static_cast<std::size_t>(i)].future;
        for (int k = 0; k < steps; ++k) {
          out.at(j, i, k) = static_cast<std::size_t>(k) < future.size() ? future[static_cast<std::size_t>(k)]
                                                                        : Vec2::Zero();
        }
      }
    }
    return out;
  }
};

}  // namespace

PredictorKind parse_predictor_kind(std::string_view name) {
  if (name == "constant_velocity_gaussian") return PredictorKind::constant_velocity_gaussian;
  if (name == "multimodal_mixture") return PredictorKind::multimodal_mixture;
  if (name == "replay") return PredictorKind::replay;
  throw Error("unknown predictor kind '" + std::string(name) + "'");
}

std::string to_string(PredictorKind kind) {
  switch (kind) {
    case PredictorKind::constant_velocity_gaussian:
      return "constant_velocity_gaussian";
    case PredictorKind::multimodal_mixture:
      return "multimodal_mixture";
    case PredictorKind::replay:
      return "replay";
  }
  return "unknown";
}

void PredictorConfig::validate() const {
  require(noise_cov.allFinite() && std::abs(noise_cov(0, 1) - noise_cov(1, 0)) <= 1e-12,
          "predictor.noise_cov must be symmetric");
  Eigen::SelfAdjointEigenSolver<Mat2> eig(noise_cov);
  require(eig.eigenvalues().minCoeff() >= -1e-12, "predictor.noise_cov must be positive semidefinite");
  if (kind == PredictorKind::multimodal_mixture) {
    require(!modes.empty(), "predictor.modes must not be empty");
    double total = 0.0;
    for (const auto& m : modes) {
      require(m.weight >= 0.0 && std::isfinite(m.heading), "predictor.modes: invalid mode");
      total += m.weight;
    }
    require(std::abs(total - 1.0) <= 1e-9, "predictor.modes weights must sum to 1");
  }
}

HumanTransitionSamples::HumanTransitionSamples(int samples, int humans, int steps, std::uint64_t master_seed)
    : samples_(samples), humans_(humans), steps_(steps), master_seed_(master_seed) {
  require(samples >= 0 && humans >= 0 && steps >= 0, "negative sample dimensions");
  sample_seeds_.reserve(static_cast<std::size_t>(samples));
  for (int j = 0; j < samples; ++j) sample_seeds_.push_back(stream_seed(master_seed, static_cast<std::uint64_t>(j)));
  data_.assign(static_cast<std::size_t>(samples) * humans * steps, Vec2::Zero());
}

std::unique_ptr<Predictor> make_predictor(const PredictorConfig& config, double dt_o) {
  config.validate();
  require(dt_o > 0.0, "predictor: observation interval must be positive");
  switch (config.kind) {
    case PredictorKind::constant_velocity_gaussian:
    case PredictorKind::multimodal_mixture:
      return std::make_unique<GaussianPredictor>(config, dt_o);
    case PredictorKind::replay:
      return std::make_unique<ReplayPredictor>();
  }
  throw Error("unknown predictor kind");
}

Vec2 estimate_velocity(std::span<const Vec2> positions, double dt_o) {
  require(positions.size() >= 2, "velocity estimate needs at least two positions");
  require(dt_o > 0.0, "observation interval must be positive");
  return (positions[positions.size() - 1] - positions[positions.size() - 2]) / dt_o;
}

}  // namespace rssac

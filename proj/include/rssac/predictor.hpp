#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "rssac/types.hpp"

namespace rssac {

enum class PredictorKind { constant_velocity_gaussian, multimodal_mixture, replay };

PredictorKind parse_predictor_kind(std::string_view name);
std::string to_string(PredictorKind kind);

/// One behaviour mode of the mixture predictor: mean velocity rotated by `heading` radians.
struct MixtureMode {
  double heading = 0.0;
  double weight = 1.0;
};

struct PredictorConfig {
  PredictorKind kind = PredictorKind::constant_velocity_gaussian;
  /// Covariance of one displacement step (m^2 per observation interval).
  Mat2 noise_cov = 0.01 * Mat2::Identity();
  std::vector<MixtureMode> modes = {{0.0, 0.6}, {0.5235987755982988, 0.2}, {-0.5235987755982988, 0.2}};

  void validate() const;
};

/// What the controller knows about one human: recent positions at the
/// observation interval (oldest first, last entry is the current position),
/// optionally a known mean velocity, and for replay the recorded future.
struct HumanHistory {
  int id = 0;
  std::vector<Vec2> positions;
  std::optional<Vec2> mean_velocity;
  std::vector<Vec2> future;
};

/// M sampled futures, each an N x T array of per-step displacements.
class HumanTransitionSamples {
 public:
  HumanTransitionSamples() = default;
  HumanTransitionSamples(int samples, int humans, int steps, std::uint64_t master_seed);

  int samples() const { return samples_; }
  int humans() const { return humans_; }
  int steps() const { return steps_; }
  std::uint64_t master_seed() const { return master_seed_; }
  std::uint64_t sample_seed(int j) const { return sample_seeds_.at(static_cast<std::size_t>(j)); }

  Vec2& at(int j, int i, int k) { return data_[index(j, i, k)]; }
  const Vec2& at(int j, int i, int k) const { return data_[index(j, i, k)]; }
  /// Displacements of sample j, human-major N x T.
  std::span<const Vec2> sample(int j) const {
    const std::size_t block = static_cast<std::size_t>(humans_) * steps_;
    return {data_.data() + static_cast<std::size_t>(j) * block, block};
  }
  std::span<Vec2> sample(int j) {
    const std::size_t block = static_cast<std::size_t>(humans_) * steps_;
    return {data_.data() + static_cast<std::size_t>(j) * block, block};
  }

 private:
  std::size_t index(int j, int i, int k) const {
    return (static_cast<std::size_t>(j) * humans_ + i) * steps_ + k;
  }

  int samples_ = 0;
  int humans_ = 0;
  int steps_ = 0;
  std::uint64_t master_seed_ = 0;
  std::vector<std::uint64_t> sample_seeds_;
  std::vector<Vec2> data_;
};

/// Planned robot motion handed to robot-future-conditional predictors.
struct RobotPlan {
  double t0 = 0.0;
  double dt = 0.0;
  std::span<const Vec4> states;
};

/// Source of human futures. Sample j is drawn from its own RNG stream derived
/// from (master_seed, j), so samples are reproducible and independent of M.
class Predictor {
 public:
  virtual ~Predictor() = default;

  virtual HumanTransitionSamples sample(std::span<const HumanHistory> history, int samples, int steps,
                                        std::uint64_t master_seed,
                                        const RobotPlan* conditioning = nullptr) const = 0;

  /// True when samples depend on the conditioning plan; the nominal search then
  /// draws a fresh set per candidate.
  virtual bool conditional() const { return false; }
};

std::unique_ptr<Predictor> make_predictor(const PredictorConfig& config, double dt_o);

/// Finite-difference velocity of the last two positions.
Vec2 estimate_velocity(std::span<const Vec2> positions, double dt_o);

}  // namespace rssac

#pragma once

#include <array>
#include <string>
#include <vector>

#include "mompo/rng.hpp"

namespace mompo {

struct PointMassState {
  std::array<float, 2> position{0.0f, 0.0f};  // clamped to [-1, 1] per axis
  std::array<float, 2> velocity{0.0f, 0.0f};
};

struct Target {
  enum class Kind { kPoint, kVerticalLine, kHorizontalLine };  // {x=c} / {y=c}
  Kind kind = Kind::kPoint;
  float x = 0.0f;  // point coordinates
  float y = 0.0f;
  float c = 0.0f;  // line offset
};

struct TaskSpec {
  Target target;
  float margin = 0.5f;         // shaping width; 0 = sparse
  float target_radius = 0.05f;
  int episode_length = 200;
  float dt = 0.05f;
  float damping = 0.9f;
  float gain = 1.0f;
};

// Distance-based shaping: 1 inside the target radius, then a linear ramp of
// width `margin`, 0 beyond. margin == 0 gives the sparse {0,1} reward.
double reward_fn(const TaskSpec& spec, const PointMassState& state);
double distance_to_target(const Target& target, const PointMassState& state);

struct StepResult {
  PointMassState state;
  double reward = 0.0;
  bool done = false;
};

// Damped double integrator in a [-1,1]^2 arena; episodes end at the horizon
// only. Observation is [px, py, vx, vy].
class PointMassEnv {
 public:
  static constexpr int kObsDim = 4;
  static constexpr int kActDim = 2;

  explicit PointMassEnv(const TaskSpec& spec) : spec_(spec) {}

  PointMassState reset(RngStream& rng);
  StepResult step(const std::array<float, 2>& action);

  std::vector<float> observation() const;
  static std::vector<float> observation(const PointMassState& s);
  const PointMassState& state() const { return state_; }
  const TaskSpec& spec() const { return spec_; }
  int steps_taken() const { return step_count_; }

 private:
  TaskSpec spec_;
  PointMassState state_;
  int step_count_ = 0;
};

// 1-step discrete MDPs: Q(a) equals the (combined) reward table.
struct BanditSpec {
  int action_count = 0;
  std::vector<std::pair<std::string, std::vector<double>>> reward_tables;

  const std::vector<double>& table(const std::string& name) const;
};

struct BanditResult {
  std::vector<double> values;
  std::vector<int> argmax_set;  // 0-based, ties included
};

BanditResult bandit_q(const BanditSpec& spec,
                      const std::vector<std::pair<double, std::string>>& combination);

// The two primitive reward functions of the 3-action example MDP family.
BanditSpec example_bandit_spec();
// Full value/argmax report over the primitive, scaled, and composed rewards.
std::string bandit_report();

}  // namespace mompo

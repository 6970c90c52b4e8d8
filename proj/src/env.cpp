#include "mompo/env.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace mompo {

namespace {
float clampf(float v, float lo, float hi) { return std::min(hi, std::max(lo, v)); }
}  // namespace

double distance_to_target(const Target& target, const PointMassState& state) {
  switch (target.kind) {
    case Target::Kind::kPoint: {
      const double dx = state.position[0] - target.x;
      const double dy = state.position[1] - target.y;
      return std::sqrt(dx * dx + dy * dy);
    }
    case Target::Kind::kVerticalLine:
      return std::fabs(static_cast<double>(state.position[0]) - target.c);
    case Target::Kind::kHorizontalLine:
      return std::fabs(static_cast<double>(state.position[1]) - target.c);
  }
  return 0.0;
}

double reward_fn(const TaskSpec& spec, const PointMassState& state) {
  const double d = distance_to_target(spec.target, state);
  if (d <= spec.target_radius) return 1.0;
  if (spec.margin <= 0.0f) return 0.0;
  return std::max(0.0, 1.0 - (d - spec.target_radius) / spec.margin);
}

PointMassState PointMassEnv::reset(RngStream& rng) {
  state_.position[0] = static_cast<float>(rng.uniform(-1.0, 1.0));
  state_.position[1] = static_cast<float>(rng.uniform(-1.0, 1.0));
  state_.velocity = {0.0f, 0.0f};
  step_count_ = 0;
  return state_;
}

StepResult PointMassEnv::step(const std::array<float, 2>& action) {
  std::array<float, 2> a{clampf(action[0], -1.0f, 1.0f), clampf(action[1], -1.0f, 1.0f)};
  for (int i = 0; i < 2; ++i) {
    state_.velocity[i] = spec_.damping * state_.velocity[i] + a[i] * spec_.dt * spec_.gain;
    state_.position[i] = clampf(state_.position[i] + state_.velocity[i] * spec_.dt, -1.0f, 1.0f);
  }
  step_count_ += 1;
  StepResult r;
  r.state = state_;
  r.reward = reward_fn(spec_, state_);
  r.done = step_count_ >= spec_.episode_length;
  return r;
}

std::vector<float> PointMassEnv::observation() const { return observation(state_); }

std::vector<float> PointMassEnv::observation(const PointMassState& s) {
  return {s.position[0], s.position[1], s.velocity[0], s.velocity[1]};
}

const std::vector<double>& BanditSpec::table(const std::string& name) const {
  for (const auto& [n, t] : reward_tables)
    if (n == name) return t;
  throw std::invalid_argument("bandit: unknown reward name '" + name + "'");
}

BanditResult bandit_q(const BanditSpec& spec,
                      const std::vector<std::pair<double, std::string>>& combination) {
  BanditResult result;
  result.values.assign(spec.action_count, 0.0);
  for (const auto& [weight, name] : combination) {
    const auto& table = spec.table(name);
    if (static_cast<int>(table.size()) != spec.action_count)
      throw std::invalid_argument("bandit: reward table '" + name + "' has wrong length");
    for (int a = 0; a < spec.action_count; ++a) result.values[a] += weight * table[a];
  }
  const double vmax = *std::max_element(result.values.begin(), result.values.end());
  for (int a = 0; a < spec.action_count; ++a)
    if (result.values[a] >= vmax - 1e-9) result.argmax_set.push_back(a);
  return result;
}

BanditSpec example_bandit_spec() {
  BanditSpec spec;
  spec.action_count = 3;
  spec.reward_tables.emplace_back("r1", std::vector<double>{0.6, 0.4, 0.0});
  spec.reward_tables.emplace_back("r2", std::vector<double>{0.0, 0.4, 0.6});
  return spec;
}

namespace {
void report_row(std::ostringstream& os, const std::string& label, const BanditResult& r) {
  os << label << ": values [";
  for (size_t i = 0; i < r.values.size(); ++i) {
    os.precision(10);
    os << (i ? ", " : "") << r.values[i];
  }
  os << "] argmax {";
  for (size_t i = 0; i < r.argmax_set.size(); ++i)
    os << (i ? ", " : "") << "a(" << r.argmax_set[i] + 1 << ")";
  os << "}\n";
}
}  // namespace

std::string bandit_report() {
  const BanditSpec spec = example_bandit_spec();
  std::ostringstream os;
  os << "1-step MDP Q-values (Q(a) = combined reward):\n";
  report_row(os, "r1", bandit_q(spec, {{1.0, "r1"}}));
  report_row(os, "r2", bandit_q(spec, {{1.0, "r2"}}));
  report_row(os, "r2_scaled = 10*r2", bandit_q(spec, {{10.0, "r2"}}));
  report_row(os, "r_new = 0.5*(r1 + r2)", bandit_q(spec, {{0.5, "r1"}, {0.5, "r2"}}));
  report_row(os, "r_new_scaled = 0.5*(r1 + 10*r2)", bandit_q(spec, {{0.5, "r1"}, {5.0, "r2"}}));
  return os.str();
}

}  // namespace mompo

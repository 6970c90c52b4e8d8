#include "mompo/adam.hpp"

#include <cmath>
#include <stdexcept>

namespace mompo {

void adam_step(AdamState& state, ParamSet& params, const ParamSet& grads) {
  if (state.first_moment.entries.empty()) {
    for (const auto& [name, p] : params.entries) {
      state.first_moment[name] = DenseArray::zeros(p.shape);
      state.second_moment[name] = DenseArray::zeros(p.shape);
    }
  }
  if (grads.size() != params.size())
    throw std::invalid_argument("adam_step: got " + std::to_string(grads.size()) +
                                " gradients for " + std::to_string(params.size()) +
                                " parameters");
  state.step_count += 1;
  const double t = static_cast<double>(state.step_count);
  const float bc1 = static_cast<float>(1.0 / (1.0 - std::pow(state.beta1, t)));
  const float bc2 = static_cast<float>(1.0 / (1.0 - std::pow(state.beta2, t)));
  for (auto& [name, p] : params.entries) {
    const DenseArray& g = grads.at(name);
    if (g.shape != p.shape)
      throw std::invalid_argument("adam_step: gradient for '" + name + "' has shape " +
                                  shape_str(g.shape) + ", parameter has " + shape_str(p.shape));
    DenseArray& m = state.first_moment[name];
    DenseArray& v = state.second_moment[name];
    if (m.shape != p.shape)
      throw std::invalid_argument("adam_step: moment for '" + name + "' has shape " +
                                  shape_str(m.shape) + ", parameter has " + shape_str(p.shape));
    for (size_t i = 0; i < p.data.size(); ++i) {
      const float gi = g.data[i];
      m.data[i] = state.beta1 * m.data[i] + (1.0f - state.beta1) * gi;
      v.data[i] = state.beta2 * v.data[i] + (1.0f - state.beta2) * gi * gi;
      const float mhat = m.data[i] * bc1;
      const float vhat = v.data[i] * bc2;
      p.data[i] -= state.learning_rate * mhat / (std::sqrt(vhat) + state.epsilon_stability);
    }
  }
}

float ScalarAdam::step(float grad) {
  ParamSet p;
  p["x"] = DenseArray::scalar(value);
  ParamSet g;
  g["x"] = DenseArray::scalar(grad);
  adam_step(state, p, g);
  value = p["x"].data[0];
  return value;
}

}  // namespace mompo

#pragma once

#include <cstdint>

#include "mompo/tensor.hpp"

namespace mompo {

// Adam with bias correction. Moments mirror the parameter list one-to-one.
struct AdamState {
  float learning_rate = 1e-4f;
  float beta1 = 0.9f;
  float beta2 = 0.999f;
  float epsilon_stability = 1e-8f;
  int64_t step_count = 0;
  ParamSet first_moment;
  ParamSet second_moment;

  static AdamState create(float lr) {
    AdamState s;
    s.learning_rate = lr;
    return s;
  }
};

// One update in place. Moments are allocated on first use; afterwards a
// shape mismatch between params, grads and moments is rejected.
void adam_step(AdamState& state, ParamSet& params, const ParamSet& grads);

// Scalar convenience for dual variables.
struct ScalarAdam {
  AdamState state;
  float value = 0.0f;

  ScalarAdam() = default;
  ScalarAdam(float init, float lr) : value(init) { state.learning_rate = lr; }
  // Descends `grad`; returns the updated value.
  float step(float grad);
};

}  // namespace mompo

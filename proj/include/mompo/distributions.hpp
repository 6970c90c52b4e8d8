#pragma once

#include <vector>

#include "mompo/rng.hpp"
#include "mompo/tensor.hpp"

namespace mompo {

// Lower bound on policy standard deviations (variance floor 1e-12).
inline constexpr float kStddevFloor = 1e-6f;

// Diagonal Gaussian over one action vector.
struct GaussianHead {
  std::vector<float> mean;
  std::vector<float> stddev;  // >= kStddevFloor

  int width() const { return static_cast<int>(mean.size()); }
};

// Splits a raw network output row [mean..., stddev_pre...] into a head with
// stddev = softplus(pre) + floor.
GaussianHead head_from_raw(const float* raw, int action_width);
GaussianHead head_from_raw_row(const DenseArray& output, int row, int action_width);

std::vector<float> sample(const GaussianHead& head, RngStream& rng);
double log_prob(const GaussianHead& head, const std::vector<float>& action);

// Closed-form diagonal-Gaussian KL(p || q).
double kl_gaussian(const GaussianHead& p, const GaussianHead& q);
// Decoupled variants: the named moment of p is compared against q while the
// other moment is pinned at q's value. kl_mean + kl_cov == kl_gaussian.
double kl_mean(const GaussianHead& p, const GaussianHead& q);
double kl_cov(const GaussianHead& p, const GaussianHead& q);

double entropy(const GaussianHead& head);

// Fixed, evenly spaced support shared by all categorical values of a critic.
struct AtomSupport {
  float v_min = -150.0f;
  float v_max = 150.0f;
  int count = 51;

  float spacing() const { return (v_max - v_min) / static_cast<float>(count - 1); }
  float atom(int i) const { return v_min + spacing() * static_cast<float>(i); }
};

struct CategoricalValue {
  AtomSupport support;
  std::vector<double> probabilities;  // simplex of length support.count

  double mean() const;
};

// L2-style projection of mass sitting at shifted_positions back onto the
// fixed support; out-of-support mass clamps to the edge atoms.
CategoricalValue project_categorical(const AtomSupport& support,
                                     const std::vector<double>& shifted_positions,
                                     const std::vector<double>& probabilities);

}  // namespace mompo

#include "mompo/distributions.hpp"

#include <cmath>
#include <stdexcept>

namespace mompo {

namespace {
constexpr double kLogTwoPi = 1.8378770664093454835606594728112;

float softplus_f(float x) { return std::log1p(std::exp(-std::fabs(x))) + std::max(x, 0.0f); }
}  // namespace

GaussianHead head_from_raw(const float* raw, int action_width) {
  GaussianHead head;
  head.mean.assign(raw, raw + action_width);
  head.stddev.resize(action_width);
  for (int i = 0; i < action_width; ++i)
    head.stddev[i] = softplus_f(raw[action_width + i]) + kStddevFloor;
  return head;
}

GaussianHead head_from_raw_row(const DenseArray& output, int row, int action_width) {
  if (output.cols() != 2 * action_width)
    throw std::invalid_argument("head_from_raw_row: output width " +
                                std::to_string(output.cols()) + " does not hold 2x" +
                                std::to_string(action_width) + " head values");
  return head_from_raw(output.data.data() + static_cast<size_t>(row) * output.cols(),
                       action_width);
}

std::vector<float> sample(const GaussianHead& head, RngStream& rng) {
  std::vector<float> a(head.mean.size());
  for (size_t i = 0; i < a.size(); ++i)
    a[i] = head.mean[i] + head.stddev[i] * static_cast<float>(rng.normal01());
  return a;
}

double log_prob(const GaussianHead& head, const std::vector<float>& action) {
  if (action.size() != head.mean.size())
    throw std::invalid_argument("log_prob: action width " + std::to_string(action.size()) +
                                " does not match head width " + std::to_string(head.mean.size()));
  double lp = 0.0;
  for (size_t i = 0; i < action.size(); ++i) {
    const double s = head.stddev[i];
    const double z = (static_cast<double>(action[i]) - head.mean[i]) / s;
    lp += -0.5 * z * z - std::log(s) - 0.5 * kLogTwoPi;
  }
  return lp;
}

double kl_gaussian(const GaussianHead& p, const GaussianHead& q) {
  if (p.mean.size() != q.mean.size())
    throw std::invalid_argument("kl_gaussian: head widths differ");
  double kl = 0.0;
  for (size_t i = 0; i < p.mean.size(); ++i) {
    const double sp = p.stddev[i], sq = q.stddev[i];
    const double dm = static_cast<double>(p.mean[i]) - q.mean[i];
    kl += std::log(sq / sp) + (sp * sp + dm * dm) / (2.0 * sq * sq) - 0.5;
  }
  return kl;
}

double kl_mean(const GaussianHead& p, const GaussianHead& q) {
  if (p.mean.size() != q.mean.size())
    throw std::invalid_argument("kl_mean: head widths differ");
  double kl = 0.0;
  for (size_t i = 0; i < p.mean.size(); ++i) {
    const double sq = q.stddev[i];
    const double dm = static_cast<double>(p.mean[i]) - q.mean[i];
    kl += dm * dm / (2.0 * sq * sq);
  }
  return kl;
}

double kl_cov(const GaussianHead& p, const GaussianHead& q) {
  if (p.mean.size() != q.mean.size())
    throw std::invalid_argument("kl_cov: head widths differ");
  double kl = 0.0;
  for (size_t i = 0; i < p.mean.size(); ++i) {
    const double sp = p.stddev[i], sq = q.stddev[i];
    kl += std::log(sq / sp) + sp * sp / (2.0 * sq * sq) - 0.5;
  }
  return kl;
}

double entropy(const GaussianHead& head) {
  double h = 0.0;
  for (float s : head.stddev) h += 0.5 * (1.0 + kLogTwoPi) + std::log(static_cast<double>(s));
  return h;
}

double CategoricalValue::mean() const {
  double m = 0.0;
  for (int i = 0; i < support.count; ++i) m += probabilities[i] * support.atom(i);
  return m;
}

CategoricalValue project_categorical(const AtomSupport& support,
                                     const std::vector<double>& shifted_positions,
                                     const std::vector<double>& probabilities) {
  if (shifted_positions.size() != probabilities.size())
    throw std::invalid_argument("project_categorical: positions/probabilities length mismatch");
  CategoricalValue out;
  out.support = support;
  out.probabilities.assign(support.count, 0.0);
  const double dz = support.spacing();
  for (size_t j = 0; j < shifted_positions.size(); ++j) {
    const double p = probabilities[j];
    if (p == 0.0) continue;
    double z = shifted_positions[j];
    z = std::min(static_cast<double>(support.v_max), std::max(static_cast<double>(support.v_min), z));
    const double b = (z - support.v_min) / dz;
    const int lo = std::max(0, std::min(support.count - 1, static_cast<int>(std::floor(b))));
    const int hi = std::max(0, std::min(support.count - 1, static_cast<int>(std::ceil(b))));
    if (lo == hi) {
      out.probabilities[lo] += p;
    } else {
      out.probabilities[lo] += p * (hi - b);
      out.probabilities[hi] += p * (b - lo);
    }
  }
  return out;
}

}  // namespace mompo

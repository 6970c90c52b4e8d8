#include <doctest.h>

#include <cmath>
#include <vector>

#include "mompo/distributions.hpp"
#include "mompo/rng.hpp"

using namespace mompo;

namespace {

// Straight-line closed form, independent of the library path.
double kl_ref(double mp, double sp, double mq, double sq) {
  return std::log(sq / sp) + (sp * sp + (mp - mq) * (mp - mq)) / (2.0 * sq * sq) - 0.5;
}

GaussianHead random_head(RngStream& rng, int width) {
  GaussianHead h;
  for (int i = 0; i < width; ++i) {
    h.mean.push_back(static_cast<float>(rng.uniform(-2.0, 2.0)));
    h.stddev.push_back(static_cast<float>(rng.uniform(0.05, 1.5)));
  }
  return h;
}

}  // namespace

TEST_CASE("sample at the variance floor collapses to the mean") {
  GaussianHead head;
  head.mean = {0.3f, -0.7f};
  head.stddev = {kStddevFloor, kStddevFloor};
  RngStream rng(5);
  for (int i = 0; i < 100; ++i) {
    auto a = sample(head, rng);
    CHECK(std::fabs(a[0] - 0.3f) < 1e-5);
    CHECK(std::fabs(a[1] + 0.7f) < 1e-5);
  }
}

TEST_CASE("empirical mean of 1e5 standard-normal samples is near zero") {
  GaussianHead head;
  head.mean = {0.0f, 0.0f};
  head.stddev = {1.0f, 1.0f};
  RngStream rng(17);
  double acc0 = 0.0, acc1 = 0.0;
  const int n = 100000;
  for (int i = 0; i < n; ++i) {
    auto a = sample(head, rng);
    acc0 += a[0];
    acc1 += a[1];
  }
  CHECK(std::fabs(acc0 / n) < 0.02);
  CHECK(std::fabs(acc1 / n) < 0.02);
}

TEST_CASE("identical stream states give identical samples") {
  GaussianHead head;
  head.mean = {0.5f};
  head.stddev = {0.8f};
  RngStream a(123), b(123);
  for (int i = 0; i < 50; ++i) CHECK(sample(head, a) == sample(head, b));
}

TEST_CASE("standard normal log density at zero") {
  GaussianHead head;
  head.mean = {0.0f};
  head.stddev = {1.0f};
  CHECK(log_prob(head, {0.0f}) == doctest::Approx(-0.9189385332046727).epsilon(1e-9));
}

TEST_CASE("1-D density integrates to one under Simpson quadrature") {
  GaussianHead head;
  head.mean = {0.4f};
  head.stddev = {0.7f};
  const double lo = 0.4 - 10.0 * 0.7, hi = 0.4 + 10.0 * 0.7;
  const int n = 4000;  // even
  const double h = (hi - lo) / n;
  double acc = 0.0;
  for (int i = 0; i <= n; ++i) {
    const double x = lo + i * h;
    const double f = std::exp(log_prob(head, {static_cast<float>(x)}));
    acc += f * (i == 0 || i == n ? 1.0 : (i % 2 ? 4.0 : 2.0));
  }
  acc *= h / 3.0;
  CHECK(std::fabs(acc - 1.0) < 1e-4);
}

TEST_CASE("density peaks at the mean") {
  GaussianHead head;
  head.mean = {0.2f};
  head.stddev = {0.5f};
  const double at_mean = log_prob(head, {0.2f});
  RngStream rng(7);
  for (int i = 0; i < 1000; ++i)
    CHECK(at_mean >= log_prob(head, {static_cast<float>(rng.uniform(-3.0, 3.0))}));
}

TEST_CASE("KL of identical heads is zero") {
  RngStream rng(29);
  for (int i = 0; i < 20; ++i) {
    GaussianHead h = random_head(rng, 3);
    CHECK(kl_gaussian(h, h) == doctest::Approx(0.0).epsilon(1e-12));
  }
}

TEST_CASE("KL(N(1,1) || N(0,1)) = 0.5") {
  GaussianHead p, q;
  p.mean = {1.0f};
  p.stddev = {1.0f};
  q.mean = {0.0f};
  q.stddev = {1.0f};
  CHECK(kl_gaussian(p, q) == doctest::Approx(0.5).epsilon(1e-9));
}

TEST_CASE("Monte Carlo estimate of the KL agrees with the closed form") {
  GaussianHead p, q;
  p.mean = {0.5f};
  p.stddev = {0.8f};
  q.mean = {-0.2f};
  q.stddev = {1.1f};
  RngStream rng(41);
  double acc = 0.0;
  const int n = 100000;
  for (int i = 0; i < n; ++i) {
    auto a = sample(p, rng);
    acc += log_prob(p, a) - log_prob(q, a);
  }
  CHECK(std::fabs(acc / n - kl_gaussian(p, q)) < 1e-2);
}

TEST_CASE("decoupled KLs are nonnegative, bounded by the full KL, and sum to it") {
  RngStream rng(43);
  for (int i = 0; i < 200; ++i) {
    GaussianHead p = random_head(rng, 4), q = random_head(rng, 4);
    const double full = kl_gaussian(p, q);
    const double km = kl_mean(p, q);
    const double kc = kl_cov(p, q);
    double full_ref = 0.0, km_ref = 0.0, kc_ref = 0.0;
    for (int d = 0; d < 4; ++d) {
      full_ref += kl_ref(p.mean[d], p.stddev[d], q.mean[d], q.stddev[d]);
      km_ref += kl_ref(p.mean[d], q.stddev[d], q.mean[d], q.stddev[d]);
      kc_ref += kl_ref(q.mean[d], p.stddev[d], q.mean[d], q.stddev[d]);
    }
    CHECK(full == doctest::Approx(full_ref).epsilon(1e-9));
    CHECK(km == doctest::Approx(km_ref).epsilon(1e-9));
    CHECK(kc == doctest::Approx(kc_ref).epsilon(1e-9));
    CHECK(km >= 0.0);
    CHECK(kc >= 0.0);
    CHECK(km <= full + 1e-6);
    CHECK(kc <= full + 1e-6);
    CHECK(km + kc == doctest::Approx(full).epsilon(1e-9));
  }
}

TEST_CASE("KL is positive for distinct heads") {
  RngStream rng(47);
  for (int i = 0; i < 100; ++i) {
    GaussianHead p = random_head(rng, 2), q = random_head(rng, 2);
    if (p.mean == q.mean && p.stddev == q.stddev) continue;
    CHECK(kl_gaussian(p, q) > 0.0);
  }
}

TEST_CASE("head_from_raw applies the softplus floor to stddev") {
  const float raw[] = {0.5f, -0.25f, 0.0f, -40.0f};
  GaussianHead h = head_from_raw(raw, 2);
  CHECK(h.mean[0] == 0.5f);
  CHECK(h.mean[1] == -0.25f);
  CHECK(h.stddev[0] == doctest::Approx(std::log(2.0) + kStddevFloor).epsilon(1e-6));
  CHECK(h.stddev[1] >= kStddevFloor);
  CHECK(h.stddev[1] < 2e-6f);
}

TEST_CASE("categorical projection with zero shift is the identity") {
  AtomSupport support;
  RngStream rng(53);
  std::vector<double> probs(support.count, 0.0);
  double z = 0.0;
  for (double& p : probs) {
    p = rng.uniform(0.0, 1.0);
    z += p;
  }
  for (double& p : probs) p /= z;
  std::vector<double> positions(support.count);
  for (int i = 0; i < support.count; ++i) positions[i] = support.atom(i);
  CategoricalValue out = project_categorical(support, positions, probs);
  for (int i = 0; i < support.count; ++i)
    CHECK(out.probabilities[i] == doctest::Approx(probs[i]).epsilon(1e-9));
}

TEST_CASE("shifting a point mass by one atom spacing moves it to the neighbor") {
  AtomSupport support;
  std::vector<double> probs(support.count, 0.0);
  probs[10] = 1.0;
  std::vector<double> positions(support.count);
  for (int i = 0; i < support.count; ++i) positions[i] = support.atom(i) + support.spacing();
  CategoricalValue out = project_categorical(support, positions, probs);
  CHECK(out.probabilities[11] == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("projection preserves mass and in-support means") {
  AtomSupport support;
  RngStream rng(59);
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<double> probs(support.count, 0.0);
    double z = 0.0;
    for (double& p : probs) {
      p = rng.uniform(0.0, 1.0);
      z += p;
    }
    for (double& p : probs) p /= z;
    const double scale = rng.uniform(0.2, 0.9);
    const double shift = rng.uniform(-10.0, 10.0);
    std::vector<double> positions(support.count);
    double target_mean = 0.0;
    for (int i = 0; i < support.count; ++i) {
      positions[i] = support.atom(i) * scale + shift;  // stays inside the support
      target_mean += probs[i] * positions[i];
    }
    CategoricalValue out = project_categorical(support, positions, probs);
    double mass = 0.0;
    for (double p : out.probabilities) mass += p;
    CHECK(std::fabs(mass - 1.0) < 1e-6);
    CHECK(std::fabs(out.mean() - target_mean) < 1e-5 * std::max(1.0, std::fabs(target_mean)));
  }
}

TEST_CASE("out-of-support mass clamps to the edge atoms") {
  AtomSupport support;
  std::vector<double> positions = {support.v_min - 50.0, support.v_max + 50.0};
  std::vector<double> probs = {0.25, 0.75};
  CategoricalValue out = project_categorical(support, positions, probs);
  CHECK(out.probabilities.front() == doctest::Approx(0.25));
  CHECK(out.probabilities.back() == doctest::Approx(0.75));
}

TEST_CASE("average own-sample log density matches negative differential entropy") {
  GaussianHead head;
  head.mean = {0.3f, -0.4f};
  head.stddev = {0.6f, 1.2f};
  RngStream rng(61);
  double acc = 0.0;
  const int n = 10000;
  for (int i = 0; i < n; ++i) acc += log_prob(head, sample(head, rng));
  const double expected = -entropy(head);
  CHECK(std::fabs(acc / n - expected) < 0.02 * std::fabs(expected));
}

#pragma once

#include <string>
#include <vector>

#include "mompo/checkpoint.hpp"
#include "mompo/distributions.hpp"
#include "mompo/nn.hpp"

namespace mompo {

// Activation predicate over raw observation components: always-on, an
// axis-aligned half-plane, or an axis-aligned box.
struct Gate {
  enum class Kind { kAlways, kHalfPlane, kBox };
  struct Interval {
    int component = 0;
    float lo = -1.0f;
    float hi = 1.0f;  // half-open [lo, hi)
  };

  Kind kind = Kind::kAlways;
  // half-plane: obs[component] < threshold (side_less) or >= threshold
  int component = 0;
  float threshold = 0.0f;
  bool side_less = true;
  std::vector<Interval> box;

  bool accepts(const std::vector<float>& obs) const;
};

struct PreferenceSpec {
  enum class Mode { kFixed, kAgentSelected };
  Mode mode = Mode::kFixed;
  double fixed_value = 0.1;  // may be negative in fixed mode
  double epsilon_max = 1.0;  // bound for agent-selected values
};

// A frozen policy: parameters are immutable after load and hashed so
// frozenness can be asserted across a run.
class TeacherHandle {
 public:
  TeacherHandle(std::string id, NetworkRecord network, Gate gate, PreferenceSpec pref);

  static TeacherHandle from_checkpoint(const std::string& id, const Checkpoint& ckpt, Gate gate,
                                       PreferenceSpec pref);

  const std::string& id() const { return id_; }
  const Gate& gate() const { return gate_; }
  const PreferenceSpec& preference() const { return pref_; }
  const MlpSpec& spec() const { return network_.spec; }
  uint64_t frozen_hash() const { return hash_; }
  int observation_width() const { return network_.spec.input_width; }
  int action_width() const { return network_.spec.output_width / 2; }

  GaussianHead head(const std::vector<float>& obs) const;
  // Batched heads for [batch, obs] observations: {means, stddevs}, each
  // [batch, action_width].
  std::pair<DenseArray, DenseArray> heads(const DenseArray& obs) const;

 private:
  std::string id_;
  NetworkRecord network_;
  Gate gate_;
  PreferenceSpec pref_;
  uint64_t hash_;
};

// log pi_teacher(action | observation) under the teacher's Gaussian head.
double teacher_score(const TeacherHandle& handle, const std::vector<float>& obs,
                     const std::vector<float>& action);

class TeacherBank {
 public:
  void add(TeacherHandle handle) { handles_.push_back(std::move(handle)); }
  const std::vector<TeacherHandle>& handles() const { return handles_; }
  size_t size() const { return handles_.size(); }
  bool empty() const { return handles_.empty(); }
  const TeacherHandle& by_id(const std::string& id) const;

  // For gated use: checks on a probe grid over the first two observation
  // components that exactly one gate accepts every point. Throws on overlap
  // or uncovered cells.
  void validate_gate_partition(int obs_width, int grid = 64) const;

  // The unique handle whose gate accepts obs.
  const TeacherHandle& active_teacher(const std::vector<float>& obs) const;

 private:
  std::vector<TeacherHandle> handles_;
};

}  // namespace mompo

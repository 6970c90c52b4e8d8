#include "mompo/teacher.hpp"

#include <stdexcept>

namespace mompo {

bool Gate::accepts(const std::vector<float>& obs) const {
  switch (kind) {
    case Kind::kAlways:
      return true;
    case Kind::kHalfPlane: {
      const float v = obs.at(component);
      return side_less ? v < threshold : v >= threshold;
    }
    case Kind::kBox:
      for (const Interval& iv : box) {
        const float v = obs.at(iv.component);
        if (v < iv.lo || v >= iv.hi) return false;
      }
      return true;
  }
  return false;
}

TeacherHandle::TeacherHandle(std::string id, NetworkRecord network, Gate gate,
                             PreferenceSpec pref)
    : id_(std::move(id)), network_(std::move(network)), gate_(gate), pref_(pref) {
  validate_params(network_.spec, network_.params);
  if (network_.spec.output_width % 2 != 0)
    throw std::invalid_argument("teacher '" + id_ +
                                "': network output is not a Gaussian head (odd width)");
  hash_ = param_hash(network_.params);
}

TeacherHandle TeacherHandle::from_checkpoint(const std::string& id, const Checkpoint& ckpt,
                                             Gate gate, PreferenceSpec pref) {
  auto it = ckpt.networks.find("policy");
  if (it == ckpt.networks.end())
    throw std::runtime_error("teacher '" + id + "': checkpoint has no 'policy' network");
  return TeacherHandle(id, it->second, gate, pref);
}

GaussianHead TeacherHandle::head(const std::vector<float>& obs) const {
  if (static_cast<int>(obs.size()) != network_.spec.input_width)
    throw std::invalid_argument("teacher '" + id_ + "': observation width " +
                                std::to_string(obs.size()) + " does not match network input " +
                                std::to_string(network_.spec.input_width));
  DenseArray in({1, network_.spec.input_width}, std::vector<float>(obs.begin(), obs.end()));
  DenseArray out = mlp_forward(network_.spec, network_.params, in);
  return head_from_raw_row(out, 0, action_width());
}

std::pair<DenseArray, DenseArray> TeacherHandle::heads(const DenseArray& obs) const {
  DenseArray out = mlp_forward(network_.spec, network_.params, obs);
  const int batch = out.rows();
  const int aw = action_width();
  DenseArray means = DenseArray::zeros({batch, aw});
  DenseArray stddevs = DenseArray::zeros({batch, aw});
  for (int r = 0; r < batch; ++r) {
    GaussianHead h = head_from_raw_row(out, r, aw);
    for (int c = 0; c < aw; ++c) {
      means.at(r, c) = h.mean[c];
      stddevs.at(r, c) = h.stddev[c];
    }
  }
  return {std::move(means), std::move(stddevs)};
}

double teacher_score(const TeacherHandle& handle, const std::vector<float>& obs,
                     const std::vector<float>& action) {
  return log_prob(handle.head(obs), action);
}

const TeacherHandle& TeacherBank::by_id(const std::string& id) const {
  for (const TeacherHandle& h : handles_)
    if (h.id() == id) return h;
  throw std::invalid_argument("teacher bank: unknown teacher id '" + id + "'");
}

void TeacherBank::validate_gate_partition(int obs_width, int grid) const {
  if (handles_.empty()) throw std::invalid_argument("teacher bank: no teachers to gate");
  std::vector<float> obs(obs_width, 0.0f);
  for (int i = 0; i < grid; ++i) {
    for (int j = 0; j < grid; ++j) {
      obs[0] = -1.0f + 2.0f * (static_cast<float>(i) + 0.5f) / static_cast<float>(grid);
      obs[1] = -1.0f + 2.0f * (static_cast<float>(j) + 0.5f) / static_cast<float>(grid);
      int accepting = 0;
      for (const TeacherHandle& h : handles_)
        if (h.gate().accepts(obs)) ++accepting;
      if (accepting != 1)
        throw std::invalid_argument(
            "teacher bank: gate partition invalid at probe (" + std::to_string(obs[0]) + ", " +
            std::to_string(obs[1]) + "): " + std::to_string(accepting) +
            " gates accept (expected exactly 1)");
    }
  }
}

const TeacherHandle& TeacherBank::active_teacher(const std::vector<float>& obs) const {
  const TeacherHandle* active = nullptr;
  for (const TeacherHandle& h : handles_) {
    if (h.gate().accepts(obs)) {
      if (active)
        throw std::runtime_error("teacher bank: gates of '" + active->id() + "' and '" + h.id() +
                                 "' both accept an observation");
      active = &h;
    }
  }
  if (!active) throw std::runtime_error("teacher bank: no gate accepts the observation");
  return *active;
}

}  // namespace mompo

#include "mompo/nn.hpp"

#include <Eigen/Core>

#include <cmath>
#include <stdexcept>

namespace mompo {

namespace {

using MatrixRM = Eigen::Matrix<float, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using MapM = Eigen::Map<MatrixRM>;
using MapCM = Eigen::Map<const MatrixRM>;

std::string layer_name(int i) { return "layer" + std::to_string(i); }

int layer_count(const MlpSpec& spec) { return static_cast<int>(spec.hidden_widths.size()) + 1; }

int layer_in(const MlpSpec& spec, int i) {
  return i == 0 ? spec.input_width : spec.hidden_widths[i - 1];
}

int layer_out(const MlpSpec& spec, int i) {
  return i == static_cast<int>(spec.hidden_widths.size()) ? spec.output_width
                                                          : spec.hidden_widths[i];
}

void check_input(const MlpSpec& spec, const DenseArray& input) {
  if (input.shape.size() != 2 || input.shape[1] != spec.input_width)
    throw std::invalid_argument("mlp_forward: layer0 expects input width " +
                                std::to_string(spec.input_width) + ", got shape " +
                                shape_str(input.shape));
}

void linear_inplace(const DenseArray& x, const DenseArray& w, const DenseArray& b,
                    DenseArray& out) {
  const int m = x.shape[0], k = x.shape[1], n = w.shape[1];
  out.shape = {m, n};
  out.data.resize(static_cast<size_t>(m) * n);
  MapM o(out.data.data(), m, n);
  o.noalias() = MapCM(x.data.data(), m, k) * MapCM(w.data.data(), k, n);
  o.rowwise() += Eigen::Map<const Eigen::RowVectorXf>(b.data.data(), n);
}

void apply_activation(DenseArray& a, Activation act) {
  if (act == Activation::kElu) {
    for (float& v : a.data) v = v > 0.0f ? v : std::expm1(v);
  } else {
    for (float& v : a.data) v = v > 0.0f ? v : 0.0f;
  }
}

void layer_norm_tanh_inplace(DenseArray& a, const DenseArray& gain, const DenseArray& offset) {
  const int m = a.shape[0], n = a.shape[1];
  for (int r = 0; r < m; ++r) {
    double mean = 0.0;
    for (int c = 0; c < n; ++c) mean += a.at(r, c);
    mean /= n;
    double var = 0.0;
    for (int c = 0; c < n; ++c) {
      const double d = a.at(r, c) - mean;
      var += d * d;
    }
    var /= n;
    const float inv_std = static_cast<float>(1.0 / std::sqrt(var + Tape::kLayerNormEps));
    for (int c = 0; c < n; ++c) {
      const float norm = (a.at(r, c) - static_cast<float>(mean)) * inv_std;
      a.at(r, c) = std::tanh(norm * gain.data[c] + offset.data[c]);
    }
  }
}

}  // namespace

void validate_spec(const MlpSpec& spec) {
  if (spec.input_width <= 0 || spec.output_width <= 0)
    throw std::invalid_argument("MlpSpec: input and output widths must be positive");
  for (int h : spec.hidden_widths)
    if (h <= 0) throw std::invalid_argument("MlpSpec: hidden widths must be positive");
  if (spec.first_layer_norm && spec.hidden_widths.empty())
    throw std::invalid_argument("MlpSpec: first_layer_norm requires a hidden layer");
}

std::vector<std::pair<std::string, Shape>> param_shapes(const MlpSpec& spec) {
  std::vector<std::pair<std::string, Shape>> shapes;
  for (int i = 0; i < layer_count(spec); ++i) {
    shapes.emplace_back(layer_name(i) + "/w", Shape{layer_in(spec, i), layer_out(spec, i)});
    shapes.emplace_back(layer_name(i) + "/b", Shape{layer_out(spec, i)});
    if (i == 0 && spec.first_layer_norm) {
      shapes.emplace_back("layer0/ln_gain", Shape{layer_out(spec, 0)});
      shapes.emplace_back("layer0/ln_offset", Shape{layer_out(spec, 0)});
    }
  }
  return shapes;
}

ParamSet init_mlp_params(const MlpSpec& spec, RngStream& rng, float head_scale) {
  validate_spec(spec);
  ParamSet params;
  const int last = layer_count(spec) - 1;
  for (const auto& [name, shape] : param_shapes(spec)) {
    DenseArray a = DenseArray::zeros(shape);
    if (name.ends_with("/w")) {
      const int fan_in = shape[0];
      float limit = 1.0f / std::sqrt(static_cast<float>(fan_in));
      if (name == layer_name(last) + "/w") limit *= head_scale;
      for (float& v : a.data) v = static_cast<float>(rng.uniform(-limit, limit));
    } else if (name.ends_with("/ln_gain")) {
      for (float& v : a.data) v = 1.0f;
    }
    params[name] = std::move(a);
  }
  return params;
}

void validate_params(const MlpSpec& spec, const ParamSet& params) {
  const auto shapes = param_shapes(spec);
  if (params.size() != shapes.size())
    throw std::invalid_argument("mlp params: expected " + std::to_string(shapes.size()) +
                                " tensors, got " + std::to_string(params.size()));
  for (const auto& [name, shape] : shapes) {
    if (!params.contains(name))
      throw std::invalid_argument("mlp params: missing tensor '" + name + "'");
    const DenseArray& a = params.at(name);
    if (a.shape != shape)
      throw std::invalid_argument("mlp params: tensor '" + name + "' has shape " +
                                  shape_str(a.shape) + ", expected " + shape_str(shape));
  }
}

DenseArray embedding_forward(const MlpSpec& spec, const ParamSet& params,
                             const DenseArray& input) {
  check_input(spec, input);
  if (spec.hidden_widths.empty())
    throw std::invalid_argument("embedding_forward: network has no hidden layer");
  DenseArray h = input;
  DenseArray next;
  for (size_t i = 0; i < spec.hidden_widths.size(); ++i) {
    const std::string ln = layer_name(static_cast<int>(i));
    linear_inplace(h, params.at(ln + "/w"), params.at(ln + "/b"), next);
    if (i == 0 && spec.first_layer_norm)
      layer_norm_tanh_inplace(next, params.at("layer0/ln_gain"), params.at("layer0/ln_offset"));
    else
      apply_activation(next, spec.activation);
    std::swap(h, next);
  }
  return h;
}

DenseArray head_forward(const MlpSpec& spec, const ParamSet& params, const DenseArray& embedding) {
  const int last = layer_count(spec) - 1;
  const std::string ln = layer_name(last);
  if (embedding.shape.size() != 2 || embedding.shape[1] != layer_in(spec, last))
    throw std::invalid_argument("head_forward: " + ln + " expects input width " +
                                std::to_string(layer_in(spec, last)) + ", got shape " +
                                shape_str(embedding.shape));
  DenseArray out;
  linear_inplace(embedding, params.at(ln + "/w"), params.at(ln + "/b"), out);
  if (spec.output_squash == OutputSquash::kTanh)
    for (float& v : out.data) v = std::tanh(v);
  return out;
}

DenseArray mlp_forward(const MlpSpec& spec, const ParamSet& params, const DenseArray& input) {
  validate_params(spec, params);
  if (spec.hidden_widths.empty()) {
    check_input(spec, input);
    return head_forward(spec, params, input);
  }
  return head_forward(spec, params, embedding_forward(spec, params, input));
}

MlpVars lift_params(Tape& tape, const MlpSpec& spec, const ParamSet& params, bool needs_grad) {
  validate_params(spec, params);
  MlpVars vars;
  for (const auto& [name, shape] : param_shapes(spec))
    vars.vars.push_back(tape.leaf(params.at(name), needs_grad));
  return vars;
}

namespace {

struct VarIndex {
  // positions of w/b (and ln) vars inside MlpVars for layer i
  static int w(const MlpSpec& spec, int i) {
    int idx = 0;
    for (int l = 0; l < i; ++l) idx += (l == 0 && spec.first_layer_norm) ? 4 : 2;
    return idx;
  }
  static int b(const MlpSpec& spec, int i) { return w(spec, i) + 1; }
  static int ln_gain(const MlpSpec&) { return 2; }
  static int ln_offset(const MlpSpec&) { return 3; }
};

}  // namespace

Var embedding_forward_tape(Tape& tape, const MlpSpec& spec, const MlpVars& vars, Var input) {
  check_input(spec, tape.value(input));
  Var h = input;
  for (size_t i = 0; i < spec.hidden_widths.size(); ++i) {
    const int li = static_cast<int>(i);
    Var z = tape.add(tape.matmul(h, vars.vars[VarIndex::w(spec, li)]),
                     vars.vars[VarIndex::b(spec, li)]);
    if (i == 0 && spec.first_layer_norm) {
      Var ln = tape.layer_norm(z, vars.vars[VarIndex::ln_gain(spec)],
                               vars.vars[VarIndex::ln_offset(spec)]);
      h = tape.tanh(ln);
    } else {
      h = spec.activation == Activation::kElu ? tape.elu(z) : tape.relu(z);
    }
  }
  return h;
}

Var head_forward_tape(Tape& tape, const MlpSpec& spec, const MlpVars& vars, Var embedding) {
  const int last = layer_count(spec) - 1;
  Var out = tape.add(tape.matmul(embedding, vars.vars[VarIndex::w(spec, last)]),
                     vars.vars[VarIndex::b(spec, last)]);
  if (spec.output_squash == OutputSquash::kTanh) out = tape.tanh(out);
  return out;
}

Var mlp_forward_tape(Tape& tape, const MlpSpec& spec, const MlpVars& vars, Var input) {
  if (spec.hidden_widths.empty()) {
    check_input(spec, tape.value(input));
    return head_forward_tape(tape, spec, vars, input);
  }
  return head_forward_tape(tape, spec, vars, embedding_forward_tape(tape, spec, vars, input));
}

ParamSet collect_grads(const Tape& tape, const MlpSpec& spec, const MlpVars& vars) {
  ParamSet grads;
  const auto shapes = param_shapes(spec);
  for (size_t i = 0; i < shapes.size(); ++i) grads[shapes[i].first] = tape.grad(vars.vars[i]);
  return grads;
}

}  // namespace mompo

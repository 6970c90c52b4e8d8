#pragma once

#include <string>
#include <vector>

#include "mompo/rng.hpp"
#include "mompo/tape.hpp"
#include "mompo/tensor.hpp"

namespace mompo {

enum class Activation { kElu, kRelu };
enum class OutputSquash { kNone, kTanh };

// Feed-forward network description. With first_layer_norm set, the first
// hidden layer output is layer-normalized and tanh-squashed in place of the
// usual activation; remaining hidden layers use `activation`.
struct MlpSpec {
  int input_width = 0;
  std::vector<int> hidden_widths;
  int output_width = 0;
  bool first_layer_norm = false;
  Activation activation = Activation::kElu;
  OutputSquash output_squash = OutputSquash::kNone;
};

void validate_spec(const MlpSpec& spec);

// Parameter names in fixed order: layer<i>/w, layer<i>/b for each layer
// (hidden layers first, output layer last), plus layer0/ln_gain and
// layer0/ln_offset when first_layer_norm is set.
std::vector<std::pair<std::string, Shape>> param_shapes(const MlpSpec& spec);

// Fan-in-scaled uniform weights (limit 1/sqrt(fan_in)), zero biases.
// head_scale multiplies the output layer's init limit; pass a small value to
// start the network near its output bias.
ParamSet init_mlp_params(const MlpSpec& spec, RngStream& rng, float head_scale = 1.0f);

// Rejects missing/extra/mis-shaped tensors, naming the offending one.
void validate_params(const MlpSpec& spec, const ParamSet& params);

// Inference path (no gradients). input is [batch, input_width].
DenseArray mlp_forward(const MlpSpec& spec, const ParamSet& params, const DenseArray& input);

// Activated output of the last hidden layer; the Fig-style policy encoder
// embedding. Requires at least one hidden layer.
DenseArray embedding_forward(const MlpSpec& spec, const ParamSet& params,
                             const DenseArray& input);
// Output layer applied to an embedding produced by embedding_forward.
DenseArray head_forward(const MlpSpec& spec, const ParamSet& params,
                        const DenseArray& embedding);

// Tape-recorded path. Parameter Vars in param_shapes order.
struct MlpVars {
  std::vector<Var> vars;
};
MlpVars lift_params(Tape& tape, const MlpSpec& spec, const ParamSet& params, bool needs_grad);
Var mlp_forward_tape(Tape& tape, const MlpSpec& spec, const MlpVars& vars, Var input);
Var embedding_forward_tape(Tape& tape, const MlpSpec& spec, const MlpVars& vars, Var input);
Var head_forward_tape(Tape& tape, const MlpSpec& spec, const MlpVars& vars, Var embedding);

// Gradients for every lifted parameter, in param_shapes order, after
// Tape::backward. Unreached parameters yield zeros.
ParamSet collect_grads(const Tape& tape, const MlpSpec& spec, const MlpVars& vars);

}  // namespace mompo

#include "mompo/checkpoint.hpp"

#include <cstring>
#include <fstream>
#include <stdexcept>

namespace mompo {

namespace {

constexpr char kMagic[4] = {'M', 'P', 'C', 'K'};

void put_u32(std::string& out, uint32_t v) { out.append(reinterpret_cast<const char*>(&v), 4); }
void put_i32(std::string& out, int32_t v) { out.append(reinterpret_cast<const char*>(&v), 4); }
void put_u8(std::string& out, uint8_t v) { out.push_back(static_cast<char>(v)); }

void put_str(std::string& out, const std::string& s) {
  put_u32(out, static_cast<uint32_t>(s.size()));
  out.append(s);
}

struct Reader {
  const std::string& bytes;
  size_t pos = 0;

  void need(size_t n) const {
    if (pos + n > bytes.size()) throw std::runtime_error("checkpoint: truncated record");
  }
  uint32_t u32() {
    need(4);
    uint32_t v;
    std::memcpy(&v, bytes.data() + pos, 4);
    pos += 4;
    return v;
  }
  int32_t i32() { return static_cast<int32_t>(u32()); }
  uint8_t u8() {
    need(1);
    return static_cast<uint8_t>(bytes[pos++]);
  }
  std::string str() {
    const uint32_t n = u32();
    need(n);
    std::string s = bytes.substr(pos, n);
    pos += n;
    return s;
  }
  void floats(float* dst, size_t count) {
    need(count * 4);
    std::memcpy(dst, bytes.data() + pos, count * 4);
    pos += count * 4;
  }
};

void put_spec(std::string& out, const MlpSpec& spec) {
  put_i32(out, spec.input_width);
  put_u32(out, static_cast<uint32_t>(spec.hidden_widths.size()));
  for (int h : spec.hidden_widths) put_i32(out, h);
  put_i32(out, spec.output_width);
  put_u8(out, spec.first_layer_norm ? 1 : 0);
  put_u8(out, spec.activation == Activation::kElu ? 0 : 1);
  put_u8(out, spec.output_squash == OutputSquash::kNone ? 0 : 1);
}

MlpSpec read_spec(Reader& r) {
  MlpSpec spec;
  spec.input_width = r.i32();
  const uint32_t nh = r.u32();
  for (uint32_t i = 0; i < nh; ++i) spec.hidden_widths.push_back(r.i32());
  spec.output_width = r.i32();
  spec.first_layer_norm = r.u8() != 0;
  spec.activation = r.u8() == 0 ? Activation::kElu : Activation::kRelu;
  spec.output_squash = r.u8() == 0 ? OutputSquash::kNone : OutputSquash::kTanh;
  return spec;
}

}  // namespace

std::string serialize(const Checkpoint& ckpt) {
  std::string out;
  out.append(kMagic, 4);
  put_u32(out, ckpt.version);
  put_u32(out, static_cast<uint32_t>(ckpt.metadata.size()));
  for (const auto& [k, v] : ckpt.metadata) {
    put_str(out, k);
    put_str(out, v);
  }
  put_u32(out, static_cast<uint32_t>(ckpt.networks.size()));
  for (const auto& [name, net] : ckpt.networks) {
    put_str(out, name);
    put_spec(out, net.spec);
    put_u32(out, static_cast<uint32_t>(net.params.size()));
    for (const auto& [tname, tensor] : net.params.entries) {
      put_str(out, tname);
      put_u32(out, static_cast<uint32_t>(tensor.shape.size()));
      for (int d : tensor.shape) put_i32(out, d);
      out.append(reinterpret_cast<const char*>(tensor.data.data()), tensor.data.size() * 4);
    }
  }
  return out;
}

Checkpoint parse_checkpoint(const std::string& bytes) {
  Reader r{bytes};
  r.need(4);
  if (std::memcmp(bytes.data(), kMagic, 4) != 0)
    throw std::runtime_error("checkpoint: bad magic, not a checkpoint file");
  r.pos = 4;
  Checkpoint ckpt;
  ckpt.version = r.u32();
  if (ckpt.version != kCheckpointVersion)
    throw std::runtime_error("checkpoint: unknown format version " +
                             std::to_string(ckpt.version) + ", expected " +
                             std::to_string(kCheckpointVersion));
  const uint32_t n_meta = r.u32();
  for (uint32_t i = 0; i < n_meta; ++i) {
    std::string k = r.str();
    ckpt.metadata[k] = r.str();
  }
  const uint32_t n_nets = r.u32();
  for (uint32_t i = 0; i < n_nets; ++i) {
    const std::string name = r.str();
    NetworkRecord net;
    net.spec = read_spec(r);
    validate_spec(net.spec);
    const uint32_t n_tensors = r.u32();
    for (uint32_t t = 0; t < n_tensors; ++t) {
      const std::string tname = r.str();
      const uint32_t ndim = r.u32();
      Shape shape;
      for (uint32_t d = 0; d < ndim; ++d) shape.push_back(r.i32());
      DenseArray a = DenseArray::zeros(shape);
      r.floats(a.data.data(), a.data.size());
      if (!a.all_finite())
        throw std::runtime_error("checkpoint: tensor '" + name + "/" + tname +
                                 "' contains non-finite values");
      net.params[tname] = std::move(a);
    }
    try {
      validate_params(net.spec, net.params);
    } catch (const std::invalid_argument& e) {
      throw std::runtime_error("checkpoint: network '" + name + "': " + e.what());
    }
    ckpt.networks[name] = std::move(net);
  }
  if (r.pos != bytes.size()) throw std::runtime_error("checkpoint: trailing bytes after record");
  return ckpt;
}

void save_checkpoint_file(const Checkpoint& ckpt, const std::string& path) {
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw std::runtime_error("checkpoint: cannot open '" + path + "' for writing");
  const std::string bytes = serialize(ckpt);
  f.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!f) throw std::runtime_error("checkpoint: write to '" + path + "' failed");
}

Checkpoint load_checkpoint_file(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("checkpoint: cannot open '" + path + "'");
  std::string bytes((std::istreambuf_iterator<char>(f)), std::istreambuf_iterator<char>());
  return parse_checkpoint(bytes);
}

std::string save_checkpoint(const NetworkRecord& network,
                            const std::map<std::string, std::string>& metadata) {
  Checkpoint ckpt;
  ckpt.metadata = metadata;
  ckpt.networks["policy"] = network;
  return serialize(ckpt);
}

}  // namespace mompo

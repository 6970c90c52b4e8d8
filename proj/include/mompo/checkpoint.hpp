#pragma once

#include <cstdint>
#include <map>
#include <string>

#include "mompo/nn.hpp"
#include "mompo/tensor.hpp"

namespace mompo {

inline constexpr uint32_t kCheckpointVersion = 1;

struct NetworkRecord {
  MlpSpec spec;
  ParamSet params;
};

// Versioned, self-describing container of named networks. The byte layout is
// little-endian: magic, version, metadata entries, then per network its
// MlpSpec followed by named tensors (shape plus row-major float32 values).
// serialize(parse(bytes)) == bytes.
struct Checkpoint {
  uint32_t version = kCheckpointVersion;
  std::map<std::string, std::string> metadata;
  std::map<std::string, NetworkRecord> networks;
};

std::string serialize(const Checkpoint& ckpt);
// Rejects bad magic, unknown versions, shape mismatches (naming the tensor)
// and non-finite parameter values.
Checkpoint parse_checkpoint(const std::string& bytes);

void save_checkpoint_file(const Checkpoint& ckpt, const std::string& path);
Checkpoint load_checkpoint_file(const std::string& path);

// Single-network convenience used for teacher persistence.
std::string save_checkpoint(const NetworkRecord& network,
                            const std::map<std::string, std::string>& metadata);

}  // namespace mompo

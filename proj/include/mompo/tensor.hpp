#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace mompo {

using Shape = std::vector<int>;

// Row-major float32 array, rank 1 or 2 in practice.
struct DenseArray {
  Shape shape;
  std::vector<float> data;

  DenseArray() = default;
  DenseArray(Shape s, std::vector<float> d) : shape(std::move(s)), data(std::move(d)) {}

  static DenseArray zeros(const Shape& s);
  static DenseArray full(const Shape& s, float v);
  static DenseArray scalar(float v) { return DenseArray({1}, {v}); }

  int64_t size() const { return static_cast<int64_t>(data.size()); }
  bool is_scalar() const { return data.size() == 1; }

  // 2-D views; rank-1 arrays count as a single row.
  int rows() const { return shape.size() == 2 ? shape[0] : 1; }
  int cols() const { return shape.size() == 2 ? shape[1] : (shape.empty() ? 1 : shape[0]); }

  float& at(int r, int c) { return data[static_cast<size_t>(r) * cols() + c]; }
  float at(int r, int c) const { return data[static_cast<size_t>(r) * cols() + c]; }

  bool all_finite() const;
};

int64_t shape_size(const Shape& s);
std::string shape_str(const Shape& s);
bool same_shape(const DenseArray& a, const DenseArray& b);

// Named parameter list with a fixed order; the order defines optimizer-state
// and checkpoint layout.
struct ParamSet {
  std::vector<std::pair<std::string, DenseArray>> entries;

  DenseArray& operator[](const std::string& name);
  const DenseArray& at(const std::string& name) const;
  bool contains(const std::string& name) const;
  size_t size() const { return entries.size(); }
  int64_t total_values() const;
};

// FNV-1a over the raw float bytes; used to assert frozen parameters.
uint64_t param_hash(const ParamSet& params);

}  // namespace mompo

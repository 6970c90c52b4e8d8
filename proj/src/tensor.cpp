#include "mompo/tensor.hpp"

#include <cmath>
#include <cstring>
#include <sstream>
#include <stdexcept>

namespace mompo {

int64_t shape_size(const Shape& s) {
  int64_t n = 1;
  for (int d : s) n *= d;
  return n;
}

std::string shape_str(const Shape& s) {
  std::ostringstream os;
  os << "[";
  for (size_t i = 0; i < s.size(); ++i) os << (i ? "," : "") << s[i];
  os << "]";
  return os.str();
}

DenseArray DenseArray::zeros(const Shape& s) {
  DenseArray a;
  a.shape = s;
  a.data.assign(static_cast<size_t>(shape_size(s)), 0.0f);
  return a;
}

DenseArray DenseArray::full(const Shape& s, float v) {
  DenseArray a;
  a.shape = s;
  a.data.assign(static_cast<size_t>(shape_size(s)), v);
  return a;
}

bool DenseArray::all_finite() const {
  for (float v : data)
    if (!std::isfinite(v)) return false;
  return true;
}

bool same_shape(const DenseArray& a, const DenseArray& b) { return a.shape == b.shape; }

DenseArray& ParamSet::operator[](const std::string& name) {
  for (auto& e : entries)
    if (e.first == name) return e.second;
  entries.emplace_back(name, DenseArray{});
  return entries.back().second;
}

const DenseArray& ParamSet::at(const std::string& name) const {
  for (const auto& e : entries)
    if (e.first == name) return e.second;
  throw std::out_of_range("ParamSet: no parameter named '" + name + "'");
}

bool ParamSet::contains(const std::string& name) const {
  for (const auto& e : entries)
    if (e.first == name) return true;
  return false;
}

int64_t ParamSet::total_values() const {
  int64_t n = 0;
  for (const auto& e : entries) n += e.second.size();
  return n;
}

uint64_t param_hash(const ParamSet& params) {
  uint64_t h = 1469598103934665603ull;
  auto mix = [&h](const void* p, size_t n) {
    const unsigned char* b = static_cast<const unsigned char*>(p);
    for (size_t i = 0; i < n; ++i) {
      h ^= b[i];
      h *= 1099511628211ull;
    }
  };
  for (const auto& e : params.entries) {
    mix(e.first.data(), e.first.size());
    mix(e.second.data.data(), e.second.data.size() * sizeof(float));
  }
  return h;
}

}  // namespace mompo

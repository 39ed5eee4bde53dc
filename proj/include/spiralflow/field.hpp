#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace spiralflow {

//! Values stored at every node of a Cartesian grid, row-major (index = j*nx + i).
template <class T>
class NodeField {
 public:
  NodeField() = default;
  NodeField(int nx, int ny, T init = T{})
      : nx_(nx), ny_(ny), values_(static_cast<std::size_t>(nx) * ny, init) {}

  int nx() const { return nx_; }
  int ny() const { return ny_; }
  std::size_t size() const { return values_.size(); }

  T& operator[](std::size_t k) { return values_[k]; }
  const T& operator[](std::size_t k) const { return values_[k]; }
  T& at(int i, int j) { return values_[static_cast<std::size_t>(j) * nx_ + i]; }
  const T& at(int i, int j) const { return values_[static_cast<std::size_t>(j) * nx_ + i]; }

  std::span<T> values() { return values_; }
  std::span<const T> values() const { return values_; }
  T* data() { return values_.data(); }
  const T* data() const { return values_.data(); }

  friend bool operator==(const NodeField&, const NodeField&) = default;

 private:
  int nx_ = 0;
  int ny_ = 0;
  std::vector<T> values_;
};

using ScalarField = NodeField<double>;
using IntField = NodeField<long long>;

}  // namespace spiralflow

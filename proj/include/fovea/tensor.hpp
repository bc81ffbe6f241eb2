// Copyright 2026 The Fovea Authors. All Rights Reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef FOVEA_TENSOR_HPP_
#define FOVEA_TENSOR_HPP_

#include <Eigen/Dense>

#include <span>
#include <vector>

#include "fovea/errors.hpp"

namespace fovea {

using Index = Eigen::Index;

template <typename Scalar>
using RowMatrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

/// H x W x C grid stored channel-last.
///
/// The backing store is a row-major (H*W) x C matrix, so each row is one
/// pixel's channel vector and each column is one channel plane. Patch
/// matrices, feature rows for regressors and channel selections are all
/// plain Eigen expressions over `matrix()`.
///
/// A default-constructed tensor is empty and only valid as a placeholder;
/// every other constructor enforces H, W, C >= 1.
template <typename Scalar>
class PlaneTensor {
 public:
  using Matrix = RowMatrix<Scalar>;
  using PlaneMap = Eigen::Map<Matrix, 0, Eigen::Stride<Eigen::Dynamic, Eigen::Dynamic>>;
  using ConstPlaneMap =
      Eigen::Map<const Matrix, 0, Eigen::Stride<Eigen::Dynamic, Eigen::Dynamic>>;

  PlaneTensor() = default;

  PlaneTensor(Index height, Index width, Index channels, Scalar fill = Scalar(0))
      : height_(height), width_(width) {
    check_dims(height, width, channels);
    data_ = Matrix::Constant(height * width, channels, fill);
  }

  PlaneTensor(Index height, Index width, Matrix data)
      : height_(height), width_(width), data_(std::move(data)) {
    check_dims(height, width, data_.cols());
    if (data_.rows() != height * width) {
      throw InvalidArgument("tensor data rows must equal height * width");
    }
  }

  Index height() const { return height_; }
  Index width() const { return width_; }
  Index channels() const { return data_.cols(); }
  Index pixels() const { return height_ * width_; }
  bool empty() const { return data_.size() == 0; }

  Scalar& operator()(Index y, Index x, Index c = 0) { return data_(y * width_ + x, c); }
  Scalar operator()(Index y, Index x, Index c = 0) const { return data_(y * width_ + x, c); }

  Matrix& matrix() { return data_; }
  const Matrix& matrix() const { return data_; }

  /// Strided H x W view of one channel.
  PlaneMap plane(Index c) {
    return PlaneMap(data_.data() + c, height_, width_,
                    Eigen::Stride<Eigen::Dynamic, Eigen::Dynamic>(width_ * channels(), channels()));
  }
  ConstPlaneMap plane(Index c) const {
    return ConstPlaneMap(data_.data() + c, height_, width_,
                         Eigen::Stride<Eigen::Dynamic, Eigen::Dynamic>(width_ * channels(), channels()));
  }

  std::span<const Scalar> values() const { return {data_.data(), static_cast<size_t>(data_.size())}; }

  template <typename Other>
  PlaneTensor<Other> cast() const {
    return PlaneTensor<Other>(height_, width_, data_.template cast<Other>());
  }

  bool same_shape(const PlaneTensor& o) const {
    return height_ == o.height_ && width_ == o.width_ && channels() == o.channels();
  }

  friend bool operator==(const PlaneTensor& a, const PlaneTensor& b) {
    return a.same_shape(b) && a.data_ == b.data_;
  }

 private:
  static void check_dims(Index h, Index w, Index c) {
    if (h < 1 || w < 1 || c < 1) throw InvalidArgument("tensor dimensions must be >= 1");
  }

  Index height_ = 0;
  Index width_ = 0;
  Matrix data_;
};

using Tensor = PlaneTensor<double>;

/// Single-channel tensor from an H x W matrix.
template <typename Derived>
PlaneTensor<typename Derived::Scalar> tensor_from_plane(const Eigen::MatrixBase<Derived>& m) {
  using Scalar = typename Derived::Scalar;
  RowMatrix<Scalar> data(m.rows() * m.cols(), 1);
  for (Index y = 0; y < m.rows(); ++y)
    for (Index x = 0; x < m.cols(); ++x) data(y * m.cols() + x, 0) = m(y, x);
  return PlaneTensor<Scalar>(m.rows(), m.cols(), std::move(data));
}

template <typename Scalar>
PlaneTensor<Scalar> concat_channels(std::span<const PlaneTensor<Scalar>* const> parts) {
  if (parts.empty()) throw InvalidArgument("concat_channels: no inputs");
  const Index h = parts[0]->height(), w = parts[0]->width();
  Index total = 0;
  for (const auto* p : parts) {
    if (p->height() != h || p->width() != w) throw InvalidArgument("concat_channels: resolution mismatch");
    total += p->channels();
  }
  RowMatrix<Scalar> out(h * w, total);
  Index col = 0;
  for (const auto* p : parts) {
    out.middleCols(col, p->channels()) = p->matrix();
    col += p->channels();
  }
  return PlaneTensor<Scalar>(h, w, std::move(out));
}

template <typename Scalar>
PlaneTensor<Scalar> concat_channels(const PlaneTensor<Scalar>& a, const PlaneTensor<Scalar>& b) {
  const PlaneTensor<Scalar>* parts[] = {&a, &b};
  return concat_channels<Scalar>(std::span<const PlaneTensor<Scalar>* const>(parts));
}

template <typename Scalar>
PlaneTensor<Scalar> select_channels(const PlaneTensor<Scalar>& t, std::span<const int> channels) {
  if (channels.empty()) throw InvalidArgument("select_channels: empty selection");
  RowMatrix<Scalar> out(t.pixels(), static_cast<Index>(channels.size()));
  for (size_t i = 0; i < channels.size(); ++i) {
    if (channels[i] < 0 || channels[i] >= t.channels())
      throw InvalidArgument("select_channels: index out of range");
    out.col(static_cast<Index>(i)) = t.matrix().col(channels[i]);
  }
  return PlaneTensor<Scalar>(t.height(), t.width(), std::move(out));
}

}  // namespace fovea

#endif  // FOVEA_TENSOR_HPP_

/* Copyright 2026 The lmh-brtf Authors. All Rights Reserved.

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
==============================================================================*/

// Dense order-d tensors in column-major layout and the basic multilinear
// operations on them.
//
// Layout: entry (i_1, ..., i_d) (0-based) lives at
//   i_1 + I_1 * (i_2 + I_2 * (i_3 + ... )).
// The mode-1/mode-2 slices are therefore contiguous I_1 x I_2 column-major
// blocks, and slice j sits at offset j * I_1 * I_2 with the trailing indices
// enumerated i_3 fastest.

#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <functional>
#include <numeric>
#include <span>
#include <sstream>
#include <string>
#include <type_traits>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "lmhbrtf/error.hpp"

namespace lmhbrtf {

using cplx = std::complex<double>;
using Shape = std::vector<std::size_t>;

template <class T>
using Matrix = Eigen::Matrix<T, Eigen::Dynamic, Eigen::Dynamic>;
using MatrixXd = Matrix<double>;
using MatrixXcd = Matrix<cplx>;

template <class T>
struct is_complex : std::false_type {};
template <class T>
struct is_complex<std::complex<T>> : std::true_type {};
template <class T>
inline constexpr bool is_complex_v = is_complex<T>::value;

inline std::string shape_string(const Shape& s) {
  std::ostringstream os;
  os << '(';
  for (std::size_t i = 0; i < s.size(); ++i) os << (i ? "," : "") << s[i];
  os << ')';
  return os.str();
}

inline std::size_t shape_numel(const Shape& s) {
  return std::accumulate(s.begin(), s.end(), std::size_t{1},
                         std::multiplies<>());
}

/// Converts between a tuple of trailing indices (i_3, ..., i_d) and the
/// linear slice index j, both 0-based:
///   j = i_3 + I_3 * (i_4 + I_4 * (... + I_{d-1} * i_d)).
/// `trailing` holds (I_3, ..., I_d).
inline std::size_t slice_linear(std::span<const std::size_t> trailing,
                                std::span<const std::size_t> tuple) {
  if (tuple.size() != trailing.size())
    throw ShapeError("slice tuple has " + std::to_string(tuple.size()) +
                     " entries, expected " + std::to_string(trailing.size()));
  std::size_t j = 0;
  for (std::size_t m = trailing.size(); m-- > 0;) {
    if (tuple[m] >= trailing[m])
      throw ShapeError("slice index out of range in trailing mode " +
                       std::to_string(m + 3));
    j = j * trailing[m] + tuple[m];
  }
  return j;
}

inline std::vector<std::size_t> slice_tuple(std::span<const std::size_t> trailing,
                                            std::size_t j) {
  const std::size_t total = shape_numel(Shape(trailing.begin(), trailing.end()));
  if (j >= total)
    throw ShapeError("linear slice index " + std::to_string(j) +
                     " out of range (J = " + std::to_string(total) + ")");
  std::vector<std::size_t> t(trailing.size());
  for (std::size_t m = 0; m < trailing.size(); ++m) {
    t[m] = j % trailing[m];
    j /= trailing[m];
  }
  return t;
}

/// Order-d (d >= 3) dense tensor over `Scalar` (double or complex<double>).
template <class Scalar>
class DenseTensor {
 public:
  using scalar_type = Scalar;
  using SliceMap = Eigen::Map<Matrix<Scalar>>;
  using ConstSliceMap = Eigen::Map<const Matrix<Scalar>>;

  DenseTensor() = default;

  explicit DenseTensor(Shape shape) : shape_(std::move(shape)) {
    validate_shape();
    data_.assign(shape_numel(shape_), Scalar(0));
  }

  DenseTensor(Shape shape, std::vector<Scalar> data)
      : shape_(std::move(shape)), data_(std::move(data)) {
    validate_shape();
    if (data_.size() != shape_numel(shape_))
      throw ShapeError("data length " + std::to_string(data_.size()) +
                       " does not match shape " + shape_string(shape_));
  }

  static DenseTensor zeros(Shape shape) { return DenseTensor(std::move(shape)); }

  std::size_t order() const { return shape_.size(); }
  const Shape& shape() const { return shape_; }
  std::size_t dim(std::size_t mode) const { return shape_.at(mode); }
  std::size_t numel() const { return data_.size(); }
  bool empty() const { return shape_.empty(); }

  std::size_t rows() const { return shape_.empty() ? 0 : shape_[0]; }
  std::size_t cols() const { return shape_.size() < 2 ? 0 : shape_[1]; }
  /// J = I_3 * ... * I_d.
  std::size_t slice_count() const {
    return shape_.size() < 3 ? 0 : shape_numel(trailing_shape());
  }
  Shape trailing_shape() const {
    return shape_.size() < 3 ? Shape{} : Shape(shape_.begin() + 2, shape_.end());
  }

  std::span<Scalar> data() { return data_; }
  std::span<const Scalar> data() const { return data_; }
  std::vector<Scalar>& storage() { return data_; }
  const std::vector<Scalar>& storage() const { return data_; }

  std::size_t linear_index(std::span<const std::size_t> idx) const {
    if (idx.size() != shape_.size())
      throw ShapeError("index has " + std::to_string(idx.size()) +
                       " entries for an order-" + std::to_string(order()) +
                       " tensor");
    std::size_t lin = 0;
    for (std::size_t m = shape_.size(); m-- > 0;) {
      if (idx[m] >= shape_[m])
        throw ShapeError("index out of range in mode " + std::to_string(m + 1));
      lin = lin * shape_[m] + idx[m];
    }
    return lin;
  }

  Scalar& operator()(std::initializer_list<std::size_t> idx) {
    return data_[linear_index(std::span<const std::size_t>(idx.begin(), idx.size()))];
  }
  const Scalar& operator()(std::initializer_list<std::size_t> idx) const {
    return data_[linear_index(std::span<const std::size_t>(idx.begin(), idx.size()))];
  }
  Scalar& at(std::span<const std::size_t> idx) { return data_[linear_index(idx)]; }
  const Scalar& at(std::span<const std::size_t> idx) const {
    return data_[linear_index(idx)];
  }
  Scalar& operator[](std::size_t lin) { return data_[lin]; }
  const Scalar& operator[](std::size_t lin) const { return data_[lin]; }

  /// Mutable view of the j-th mode-1/mode-2 slice.
  SliceMap slice(std::size_t j) {
    check_slice(j);
    return SliceMap(data_.data() + j * rows() * cols(),
                    static_cast<Eigen::Index>(rows()),
                    static_cast<Eigen::Index>(cols()));
  }
  ConstSliceMap slice(std::size_t j) const {
    check_slice(j);
    return ConstSliceMap(data_.data() + j * rows() * cols(),
                         static_cast<Eigen::Index>(rows()),
                         static_cast<Eigen::Index>(cols()));
  }
  ConstSliceMap slice(std::span<const std::size_t> tuple) const {
    const Shape tr = trailing_shape();
    return slice(slice_linear(tr, tuple));
  }

  template <class Derived>
  void set_slice(std::size_t j, const Eigen::MatrixBase<Derived>& m) {
    if (static_cast<std::size_t>(m.rows()) != rows() ||
        static_cast<std::size_t>(m.cols()) != cols())
      throw ShapeError("slice assignment of a " + std::to_string(m.rows()) +
                       "x" + std::to_string(m.cols()) + " matrix into a " +
                       std::to_string(rows()) + "x" + std::to_string(cols()) +
                       " slice");
    slice(j) = m.template cast<Scalar>();
  }

  DenseTensor<cplx> to_complex() const {
    std::vector<cplx> out(data_.begin(), data_.end());
    return DenseTensor<cplx>(shape_, std::move(out));
  }

  DenseTensor& operator+=(const DenseTensor& o) {
    require_same_shape(o, "+=");
    for (std::size_t i = 0; i < data_.size(); ++i) data_[i] += o.data_[i];
    return *this;
  }
  DenseTensor& operator-=(const DenseTensor& o) {
    require_same_shape(o, "-=");
    for (std::size_t i = 0; i < data_.size(); ++i) data_[i] -= o.data_[i];
    return *this;
  }
  DenseTensor& operator*=(Scalar a) {
    for (auto& v : data_) v *= a;
    return *this;
  }
  friend DenseTensor operator+(DenseTensor a, const DenseTensor& b) { return a += b; }
  friend DenseTensor operator-(DenseTensor a, const DenseTensor& b) { return a -= b; }
  friend DenseTensor operator*(Scalar s, DenseTensor a) { return a *= s; }

  bool operator==(const DenseTensor& o) const = default;

 private:
  void validate_shape() const {
    if (shape_.size() < 3)
      throw ShapeError("tensors must have order >= 3, got shape " +
                       shape_string(shape_));
    for (std::size_t s : shape_)
      if (s == 0) throw ShapeError("zero-length mode in shape " + shape_string(shape_));
  }
  void check_slice(std::size_t j) const {
    if (j >= slice_count())
      throw ShapeError("slice index " + std::to_string(j) + " out of range (J = " +
                       std::to_string(slice_count()) + ")");
  }
  void require_same_shape(const DenseTensor& o, const char* op) const {
    if (o.shape_ != shape_)
      throw ShapeError(std::string("shape mismatch in ") + op + ": " +
                       shape_string(shape_) + " vs " + shape_string(o.shape_));
  }

  Shape shape_;
  std::vector<Scalar> data_;
};

using RealTensor = DenseTensor<double>;
using ComplexTensor = DenseTensor<cplx>;

namespace detail {

// Splits the tensor around `mode` as (left, I_mode, right) with left the
// product of the faster modes.
inline std::pair<std::size_t, std::size_t> split_around(const Shape& s,
                                                        std::size_t mode) {
  std::size_t left = 1, right = 1;
  for (std::size_t m = 0; m < mode; ++m) left *= s[m];
  for (std::size_t m = mode + 1; m < s.size(); ++m) right *= s[m];
  return {left, right};
}

inline void check_mode(const Shape& s, std::size_t mode) {
  if (mode >= s.size())
    throw ShapeError("mode index " + std::to_string(mode + 1) +
                     " invalid for an order-" + std::to_string(s.size()) + " tensor");
}

}  // namespace detail

/// Mode-n unfolding (0-based `mode`). Column index enumerates the remaining
/// indices in increasing mode order with the lowest mode fastest, i.e. the
/// column of entry (i_1..i_d) is the column-major linear index of the
/// multi-index with i_mode removed.
template <class Scalar>
Matrix<Scalar> unfold(const DenseTensor<Scalar>& x, std::size_t mode) {
  detail::check_mode(x.shape(), mode);
  const auto [left, right] = detail::split_around(x.shape(), mode);
  const std::size_t n = x.dim(mode);
  Matrix<Scalar> out(n, left * right);
  const auto d = x.data();
  for (std::size_t r = 0; r < right; ++r)
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t l = 0; l < left; ++l)
        out(i, l + left * r) = d[l + left * (i + n * r)];
  return out;
}

/// Inverse of unfold for a target `shape`.
template <class Derived>
auto fold(const Eigen::MatrixBase<Derived>& m, std::size_t mode, const Shape& shape) {
  using Scalar = typename Derived::Scalar;
  detail::check_mode(shape, mode);
  const auto [left, right] = detail::split_around(shape, mode);
  const std::size_t n = shape[mode];
  if (static_cast<std::size_t>(m.rows()) != n ||
      static_cast<std::size_t>(m.cols()) != left * right)
    throw ShapeError("fold: matrix is " + std::to_string(m.rows()) + "x" +
                     std::to_string(m.cols()) + ", shape " + shape_string(shape) +
                     " needs " + std::to_string(n) + "x" +
                     std::to_string(left * right));
  DenseTensor<Scalar> out(shape);
  auto d = out.data();
  for (std::size_t r = 0; r < right; ++r)
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t l = 0; l < left; ++l)
        d[l + left * (i + n * r)] = m(i, l + left * r);
  return out;
}

/// y = x x_mode u, i.e. Y_(mode) = u * X_(mode). Works fiber by fiber without
/// materializing the unfolding.
template <class Scalar, class Derived>
auto mode_n_product(const DenseTensor<Scalar>& x, const Eigen::MatrixBase<Derived>& u,
                    std::size_t mode) {
  using Out = std::common_type_t<Scalar, typename Derived::Scalar>;
  detail::check_mode(x.shape(), mode);
  const std::size_t n = x.dim(mode);
  if (static_cast<std::size_t>(u.cols()) != n)
    throw ShapeError("mode_n_product: matrix has " + std::to_string(u.cols()) +
                     " columns, mode " + std::to_string(mode + 1) + " has size " +
                     std::to_string(n));
  const auto [left, right] = detail::split_around(x.shape(), mode);
  const std::size_t m = static_cast<std::size_t>(u.rows());
  Shape out_shape = x.shape();
  out_shape[mode] = m;
  DenseTensor<Out> out(out_shape);
  const Matrix<Out> uu = u.template cast<Out>();
  const auto src = x.data();
  auto dst = out.data();
  for (std::size_t r = 0; r < right; ++r) {
    // Block (left x n) of fibers, multiply from the right by u^T.
    Eigen::Map<const Matrix<Scalar>> in(src.data() + left * n * r,
                                        static_cast<Eigen::Index>(left),
                                        static_cast<Eigen::Index>(n));
    Eigen::Map<Matrix<Out>> res(dst.data() + left * m * r,
                                static_cast<Eigen::Index>(left),
                                static_cast<Eigen::Index>(m));
    res.noalias() = in.template cast<Out>() * uu.transpose();
  }
  return out;
}

template <class Scalar>
double squared_norm(const DenseTensor<Scalar>& x) {
  double s = 0.0;
  for (const auto& v : x.data()) s += std::norm(v);
  return s;
}

template <class Scalar>
double frobenius_norm(const DenseTensor<Scalar>& x) {
  return std::sqrt(squared_norm(x));
}

/// Block-diagonal matrix diag(X^1, ..., X^J). Dense; meant for small tensors
/// and test oracles.
template <class Scalar>
Matrix<Scalar> bdiag(const DenseTensor<Scalar>& x) {
  const std::size_t J = x.slice_count(), r = x.rows(), c = x.cols();
  Matrix<Scalar> out = Matrix<Scalar>::Zero(r * J, c * J);
  for (std::size_t j = 0; j < J; ++j)
    out.block(j * r, j * c, r, c) = x.slice(j);
  return out;
}

/// Inverse of bdiag: reads the diagonal blocks of `m` back into a tensor with
/// the given shape.
template <class Derived>
auto from_bdiag(const Eigen::MatrixBase<Derived>& m, const Shape& shape) {
  using Scalar = typename Derived::Scalar;
  DenseTensor<Scalar> out(shape);
  const std::size_t J = out.slice_count(), r = out.rows(), c = out.cols();
  if (static_cast<std::size_t>(m.rows()) != r * J ||
      static_cast<std::size_t>(m.cols()) != c * J)
    throw ShapeError("from_bdiag: matrix size does not match shape " +
                     shape_string(shape));
  for (std::size_t j = 0; j < J; ++j) out.slice(j) = m.block(j * r, j * c, r, c);
  return out;
}

inline RealTensor real_part(const ComplexTensor& x) {
  RealTensor out(x.shape());
  for (std::size_t i = 0; i < x.numel(); ++i) out[i] = x[i].real();
  return out;
}

inline double imag_norm(const ComplexTensor& x) {
  double s = 0.0;
  for (const auto& v : x.data()) s += v.imag() * v.imag();
  return std::sqrt(s);
}

}  // namespace lmhbrtf

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

// The invertible linear transform applied along modes 3..d.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numbers>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>
#include <unsupported/Eigen/FFT>

#include "lmhbrtf/error.hpp"
#include "lmhbrtf/tensor.hpp"

namespace lmhbrtf {

enum class TransformKind { kDft, kExplicit };

/// Relative imaginary residue tolerated when mapping back to a real tensor.
inline constexpr double kImagResidueTol = 1e-8;

/// One invertible matrix per trailing mode plus the energy constant phi with
/// ||L(X)||_F^2 = phi * ||X||_F^2.
///
/// The DFT kind is applied with FFTs (forward unnormalized, inverse carrying
/// 1/N per mode) so phi = I_3 * ... * I_d. Explicit transforms must be
/// orthogonal up to scale, M^H M = c I per mode, which makes phi the product
/// of the per-mode scales.
class TransformSpec {
 public:
  static TransformSpec dft(Shape trailing) {
    if (trailing.empty())
      throw ShapeError("a transform needs at least one trailing mode");
    for (std::size_t n : trailing)
      if (n == 0) throw ShapeError("zero-length trailing mode");
    TransformSpec t;
    t.kind_ = TransformKind::kDft;
    t.trailing_ = std::move(trailing);
    t.phi_ = static_cast<double>(shape_numel(t.trailing_));
    return t;
  }

  /// DFT matching the trailing modes of a tensor of shape `shape`.
  static TransformSpec dft_for(const Shape& shape) {
    if (shape.size() < 3)
      throw ShapeError("tensors must have order >= 3, got shape " + shape_string(shape));
    return dft(Shape(shape.begin() + 2, shape.end()));
  }

  static TransformSpec explicit_matrices(std::vector<MatrixXcd> mats,
                                         double unitary_tol = 1e-8,
                                         double rcond_tol = 1e-10) {
    if (mats.empty()) throw ShapeError("a transform needs at least one trailing mode");
    TransformSpec t;
    t.kind_ = TransformKind::kExplicit;
    t.phi_ = 1.0;
    for (std::size_t m = 0; m < mats.size(); ++m) {
      const MatrixXcd& a = mats[m];
      const std::string where = "transform matrix for mode " + std::to_string(m + 3);
      if (a.rows() != a.cols() || a.rows() == 0)
        throw ArgumentError(where + " must be square and non-empty");
      Eigen::JacobiSVD<MatrixXcd> svd(a);
      const auto& sv = svd.singularValues();
      if (sv(0) == 0.0 || sv(sv.size() - 1) / sv(0) < rcond_tol)
        throw ArgumentError(where + " is numerically singular");
      const MatrixXcd gram = a.adjoint() * a;
      const double c = gram.trace().real() / static_cast<double>(a.rows());
      const double dev =
          (gram - c * MatrixXcd::Identity(a.rows(), a.cols())).norm();
      if (dev > unitary_tol * c * std::sqrt(static_cast<double>(a.rows())))
        throw ArgumentError(where +
                            " is not orthogonal up to scale (M^H M != c I); phi "
                            "is undefined");
      t.phi_ *= c;
      t.trailing_.push_back(static_cast<std::size_t>(a.rows()));
      t.inverses_.push_back(a.fullPivLu().inverse());
    }
    t.matrices_ = std::move(mats);
    return t;
  }

  TransformKind kind() const { return kind_; }
  const Shape& trailing() const { return trailing_; }
  std::size_t slice_count() const { return shape_numel(trailing_); }
  double phi() const { return phi_; }

  /// Transform matrix of trailing mode `m` (0 = mode 3). For the DFT this is
  /// the unnormalized DFT matrix.
  MatrixXcd matrix(std::size_t m) const {
    if (kind_ == TransformKind::kExplicit) return matrices_.at(m);
    const std::size_t n = trailing_.at(m);
    MatrixXcd f(n, n);
    for (std::size_t r = 0; r < n; ++r)
      for (std::size_t c = 0; c < n; ++c)
        f(r, c) = std::polar(1.0, -2.0 * std::numbers::pi * static_cast<double>((r * c) % n) /
                                      static_cast<double>(n));
    return f;
  }

  template <class Scalar>
  ComplexTensor forward(const DenseTensor<Scalar>& x) const {
    check(x.shape());
    ComplexTensor out = x.to_complex();
    for (std::size_t m = 0; m < trailing_.size(); ++m) apply_mode(out, m, false);
    return out;
  }

  ComplexTensor inverse(const ComplexTensor& xbar) const {
    check(xbar.shape());
    ComplexTensor out = xbar;
    for (std::size_t m = trailing_.size(); m-- > 0;) apply_mode(out, m, true);
    return out;
  }

  /// Inverse transform of a tensor whose original-domain image must be real.
  /// Throws NumericalError if the relative imaginary residue exceeds `tol`.
  RealTensor inverse_real(const ComplexTensor& xbar, double tol = kImagResidueTol) const {
    const ComplexTensor x = inverse(xbar);
    const double total = frobenius_norm(x);
    const double im = imag_norm(x);
    if (total > 0.0 && im > tol * total)
      throw NumericalError("imaginary residue " + std::to_string(im / total) +
                           " above tolerance after inverse transform; the "
                           "transform-domain input is not conjugate-symmetric");
    return real_part(x);
  }

  /// Slice index whose DFT image is the complex conjugate of slice `j` for real
  /// inputs: every trailing index i maps to (I - i) mod I.
  std::size_t mirror_slice(std::size_t j) const {
    auto t = slice_tuple(trailing_, j);
    for (std::size_t m = 0; m < t.size(); ++m)
      t[m] = (trailing_[m] - t[m]) % trailing_[m];
    return slice_linear(trailing_, t);
  }

 private:
  void check(const Shape& s) const {
    if (s.size() != trailing_.size() + 2 ||
        !std::equal(trailing_.begin(), trailing_.end(), s.begin() + 2))
      throw ShapeError("tensor shape " + shape_string(s) +
                       " does not match transform trailing modes " +
                       shape_string(trailing_));
  }

  // Applies the forward or inverse matrix of trailing mode m in place.
  void apply_mode(ComplexTensor& x, std::size_t m, bool inverse) const {
    const std::size_t mode = m + 2;
    if (kind_ == TransformKind::kExplicit) {
      x = mode_n_product(x, inverse ? inverses_[m] : matrices_[m], mode);
      return;
    }
    const std::size_t n = trailing_[m];
    if (n == 1) return;
    const auto [left, right] = detail::split_around(x.shape(), mode);
    Eigen::FFT<double> fft;
    std::vector<cplx> in(n), out(n);
    auto d = x.data();
    for (std::size_t r = 0; r < right; ++r) {
      cplx* base = d.data() + left * n * r;
      for (std::size_t l = 0; l < left; ++l) {
        for (std::size_t i = 0; i < n; ++i) in[i] = base[l + left * i];
        if (inverse)
          fft.inv(out, in);
        else
          fft.fwd(out, in);
        for (std::size_t i = 0; i < n; ++i) base[l + left * i] = out[i];
      }
    }
  }

  TransformKind kind_ = TransformKind::kDft;
  Shape trailing_;
  double phi_ = 1.0;
  std::vector<MatrixXcd> matrices_;
  std::vector<MatrixXcd> inverses_;
};

template <class Scalar>
ComplexTensor forward(const DenseTensor<Scalar>& x, const TransformSpec& L) {
  return L.forward(x);
}

inline ComplexTensor inverse(const ComplexTensor& xbar, const TransformSpec& L) {
  return L.inverse(xbar);
}

inline RealTensor inverse_real(const ComplexTensor& xbar, const TransformSpec& L,
                               double tol = kImagResidueTol) {
  return L.inverse_real(xbar, tol);
}

inline double phi(const TransformSpec& L) { return L.phi(); }

}  // namespace lmhbrtf

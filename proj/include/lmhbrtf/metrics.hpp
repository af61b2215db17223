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

// Image-quality metrics over tensors viewed as stacks of I1 x I2 frames, one
// frame per trailing index in slice order.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <numbers>

#include <Eigen/Dense>

#include "lmhbrtf/error.hpp"
#include "lmhbrtf/tensor.hpp"

namespace lmhbrtf {

inline constexpr std::size_t kSsimWindow = 8;
inline constexpr double kSsimK1 = 0.01;
inline constexpr double kSsimK2 = 0.03;

namespace detail {

inline void require_same(const RealTensor& a, const RealTensor& b, const char* what) {
  if (a.shape() != b.shape())
    throw ShapeError(std::string(what) + ": shapes differ, " + shape_string(a.shape()) + " vs " +
                     shape_string(b.shape()));
}

}  // namespace detail

/// 10 log10(N max|x_gt|^2 / ||x_hat - x_gt||_F^2). Identical inputs give +inf.
inline double psnr(const RealTensor& x_hat, const RealTensor& x_gt) {
  detail::require_same(x_hat, x_gt, "psnr");
  double peak = 0.0, err = 0.0;
  for (std::size_t i = 0; i < x_gt.numel(); ++i) {
    peak = std::max(peak, std::fabs(x_gt[i]));
    const double d = x_hat[i] - x_gt[i];
    err += d * d;
  }
  if (err == 0.0) return std::numeric_limits<double>::infinity();
  return 10.0 * std::log10(static_cast<double>(x_gt.numel()) * peak * peak / err);
}

/// Mean SSIM over all frames, 8x8 uniform windows at every valid position,
/// population (co)variances, C1 = (K1 range)^2, C2 = (K2 range)^2 with range
/// max - min of x_gt (1 if x_gt is constant).
inline double ssim(const RealTensor& x_hat, const RealTensor& x_gt,
                   std::size_t window = kSsimWindow) {
  detail::require_same(x_hat, x_gt, "ssim");
  const auto H = static_cast<Eigen::Index>(x_gt.rows());
  const auto W = static_cast<Eigen::Index>(x_gt.cols());
  const auto w = static_cast<Eigen::Index>(window);
  if (w == 0 || H < w || W < w)
    throw ShapeError("ssim: frame " + std::to_string(H) + "x" + std::to_string(W) +
                     " is smaller than the " + std::to_string(window) + "x" +
                     std::to_string(window) + " window");
  const auto [lo, hi] = std::minmax_element(x_gt.storage().begin(), x_gt.storage().end());
  double range = *hi - *lo;
  if (!(range > 0.0)) range = 1.0;
  const double c1 = (kSsimK1 * range) * (kSsimK1 * range);
  const double c2 = (kSsimK2 * range) * (kSsimK2 * range);
  const double n = static_cast<double>(w * w);

  double total = 0.0;
  for (std::size_t f = 0; f < x_gt.slice_count(); ++f) {
    const Eigen::MatrixXd a = x_hat.slice(f);
    const Eigen::MatrixXd b = x_gt.slice(f);
    double acc = 0.0;
    for (Eigen::Index c = 0; c + w <= W; ++c) {
      for (Eigen::Index r = 0; r + w <= H; ++r) {
        const auto pa = a.block(r, c, w, w);
        const auto pb = b.block(r, c, w, w);
        const double ma = pa.sum() / n, mb = pb.sum() / n;
        const double va = pa.array().square().sum() / n - ma * ma;
        const double vb = pb.array().square().sum() / n - mb * mb;
        const double cov = (pa.array() * pb.array()).sum() / n - ma * mb;
        acc += ((2 * ma * mb + c1) * (2 * cov + c2)) /
               ((ma * ma + mb * mb + c1) * (va + vb + c2));
      }
    }
    total += acc / static_cast<double>((H - w + 1) * (W - w + 1));
  }
  return total / static_cast<double>(x_gt.slice_count());
}

/// 100 scale sqrt(mean_f MSE_f / mean(x_gt frame f)^2).
inline double ergas(const RealTensor& x_hat, const RealTensor& x_gt, double scale = 1.0) {
  detail::require_same(x_hat, x_gt, "ergas");
  const double n = static_cast<double>(x_gt.rows() * x_gt.cols());
  double acc = 0.0;
  for (std::size_t f = 0; f < x_gt.slice_count(); ++f) {
    const auto a = x_hat.slice(f);
    const auto b = x_gt.slice(f);
    const double mean = b.sum() / n;
    if (mean == 0.0) throw ArgumentError("ergas: frame " + std::to_string(f) + " has zero mean");
    acc += ((a - b).squaredNorm() / n) / (mean * mean);
  }
  return 100.0 * scale * std::sqrt(acc / static_cast<double>(x_gt.slice_count()));
}

/// Mean spectral angle in degrees. The spectrum of pixel (i1, i2) is its
/// vector of entries over all trailing indices; pixels where either spectrum
/// is zero are skipped.
inline double sam(const RealTensor& x_hat, const RealTensor& x_gt) {
  detail::require_same(x_hat, x_gt, "sam");
  const std::size_t P = x_gt.rows() * x_gt.cols();
  const std::size_t J = x_gt.slice_count();
  double acc = 0.0;
  std::size_t used = 0;
  for (std::size_t p = 0; p < P; ++p) {
    double dot = 0.0, na = 0.0, nb = 0.0;
    for (std::size_t j = 0; j < J; ++j) {
      const double a = x_hat[p + j * P], b = x_gt[p + j * P];
      dot += a * b;
      na += a * a;
      nb += b * b;
    }
    if (na == 0.0 || nb == 0.0) continue;
    const double c = std::clamp(dot / std::sqrt(na * nb), -1.0, 1.0);
    acc += std::acos(c);
    ++used;
  }
  if (used == 0) throw ArgumentError("sam: every pixel spectrum is zero");
  return acc / static_cast<double>(used) * 180.0 / std::numbers::pi;
}

struct MetricReport {
  double psnr = 0.0;
  double ssim = 0.0;
  double ergas = 0.0;
  double sam = 0.0;
};

inline MetricReport evaluate_metrics(const RealTensor& x_hat, const RealTensor& x_gt) {
  MetricReport m;
  m.psnr = psnr(x_hat, x_gt);
  m.ssim = ssim(x_hat, x_gt);
  m.ergas = ergas(x_hat, x_gt);
  m.sam = sam(x_hat, x_gt);
  return m;
}

}  // namespace lmhbrtf

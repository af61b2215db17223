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

// Impulse-plus-Gaussian corruption of clean data, applied in a fixed order:
// replace a fraction of entries by uniform values, optionally rescale the
// value range to [0, 1], then add Gaussian noise.

#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>

#include "lmhbrtf/error.hpp"
#include "lmhbrtf/synth.hpp"
#include "lmhbrtf/tensor.hpp"

namespace lmhbrtf {

struct CorruptConfig {
  double rho = 0.2;
  double sigma_sq = 1e-4;
  double low = 0.0;
  double high = 255.0;
  bool normalize = false;
  std::uint64_t seed = 0;

  void validate() const {
    if (!(rho >= 0.0 && rho <= 1.0)) throw ArgumentError("rho must lie in [0, 1]");
    if (!(sigma_sq >= 0.0) || !std::isfinite(sigma_sq))
      throw ArgumentError("sigma2 must be nonnegative");
    if (!(high > low) || !std::isfinite(low) || !std::isfinite(high))
      throw ArgumentError("value range requires low < high");
  }
};

/// Maps [low, high] affinely onto [0, 1].
inline RealTensor normalize_range(RealTensor x, double low, double high) {
  if (!(high > low)) throw ArgumentError("value range requires low < high");
  const double s = 1.0 / (high - low);
  for (auto& v : x.storage()) v = (v - low) * s;
  return x;
}

inline RealTensor corrupt(const RealTensor& clean, const CorruptConfig& cfg) {
  cfg.validate();
  RealTensor y = clean;
  auto rpos = make_stream(cfg.seed, Stream::kCorrupt);
  const auto pos = sample_positions(y.numel(), sparse_count(cfg.rho, y.numel()), rpos);
  std::uniform_real_distribution<double> impulse(cfg.low, cfg.high);
  for (auto p : pos) y[p] = impulse(rpos);
  if (cfg.normalize) y = normalize_range(std::move(y), cfg.low, cfg.high);
  if (cfg.sigma_sq > 0.0) {
    auto rn = make_stream(cfg.seed, Stream::kCorruptNoise);
    std::normal_distribution<double> noise(0.0, std::sqrt(cfg.sigma_sq));
    for (auto& v : y.storage()) v += noise(rn);
  }
  return y;
}

/// Smooth synthetic clip in [0, 255]: a static shaded background, a soft disc
/// drifting across the frame and a per-channel tint. Shape I1 x I2 x C x T.
inline RealTensor video_like(std::size_t height, std::size_t width, std::size_t channels,
                             std::size_t frames) {
  RealTensor v({height, width, channels, frames});
  const double H = static_cast<double>(height), W = static_cast<double>(width);
  for (std::size_t t = 0; t < frames; ++t) {
    const double phase = static_cast<double>(t) / static_cast<double>(std::max<std::size_t>(frames, 1));
    const double cx = W * (0.3 + 0.4 * phase);
    const double cy = H * (0.5 + 0.15 * std::sin(2 * std::numbers::pi * phase));
    const double rad = 0.18 * std::min(H, W);
    for (std::size_t c = 0; c < channels; ++c) {
      const double tint = 0.6 + 0.4 * static_cast<double>(c + 1) / static_cast<double>(channels);
      for (std::size_t j = 0; j < width; ++j) {
        for (std::size_t i = 0; i < height; ++i) {
          const double x = static_cast<double>(j), yy = static_cast<double>(i);
          const double bg = 60.0 + 80.0 * x / W + 40.0 * std::cos(std::numbers::pi * yy / H);
          const double d = std::hypot(x - cx, yy - cy) / rad;
          const double disc = 1.0 / (1.0 + std::exp(6.0 * (d - 1.0)));
          v({i, j, c, t}) = std::clamp(tint * (bg + 110.0 * disc), 0.0, 255.0);
        }
      }
    }
  }
  return v;
}

}  // namespace lmhbrtf

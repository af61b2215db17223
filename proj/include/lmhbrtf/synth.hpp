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

// Synthetic low-multi-rank + sparse + noise instances and the rank / error
// scores used to evaluate recovery on them.

#pragma once

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <numeric>
#include <random>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "lmhbrtf/error.hpp"
#include "lmhbrtf/model.hpp"
#include "lmhbrtf/tensor.hpp"
#include "lmhbrtf/transform.hpp"
#include "lmhbrtf/tsvd.hpp"

namespace lmhbrtf {

/// Named RNG sub-streams. Each draws from seed_seq{seed, tag} so that adding
/// draws to one stream never shifts another.
enum class Stream : std::uint32_t {
  kFactorU = 0x5501,
  kFactorV = 0x5602,
  kSparsePos = 0x5303,
  kSparseVal = 0x5304,
  kNoise = 0x4505,
  kCorrupt = 0x4306,
  kCorruptNoise = 0x4307,
};

inline std::mt19937_64 make_stream(std::uint64_t seed, Stream tag) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(tag)};
  return std::mt19937_64(seq);
}

/// Picks `count` distinct indices from [0, n) (partial Fisher-Yates).
inline std::vector<std::size_t> sample_positions(std::size_t n, std::size_t count,
                                                 std::mt19937_64& rng) {
  if (count > n) throw ArgumentError("cannot pick more positions than elements");
  std::vector<std::size_t> idx(n);
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  for (std::size_t i = 0; i < count; ++i) {
    std::uniform_int_distribution<std::size_t> pick(i, n - 1);
    std::swap(idx[i], idx[pick(rng)]);
  }
  idx.resize(count);
  return idx;
}

// ---------------------------------------------------------------------------
// Multi-rank patterns

/// Width of a pattern token: "R" -> R, "0.5R" -> ceil(0.5 R), "3" -> 3.
inline std::size_t pattern_width(std::string_view tok, std::size_t R) {
  if (tok.empty()) throw ArgumentError("empty pattern token");
  if (tok.back() == 'R' || tok.back() == 'r') {
    const std::string coef(tok.substr(0, tok.size() - 1));
    double c = 1.0;
    if (!coef.empty()) {
      std::size_t used = 0;
      try {
        c = std::stod(coef, &used);
      } catch (const std::exception&) {
        used = 0;
      }
      if (used != coef.size() || !(c >= 0.0))
        throw ArgumentError("bad pattern coefficient '" + coef + "'");
    }
    return static_cast<std::size_t>(std::ceil(c * static_cast<double>(R) - 1e-12));
  }
  std::size_t used = 0;
  long long v = -1;
  try {
    v = std::stoll(std::string(tok), &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used != tok.size() || v < 0) throw ArgumentError("bad pattern token '" + std::string(tok) + "'");
  return static_cast<std::size_t>(v);
}

/// Parses a comma-separated block pattern such as "R,0.5Rx4,Rx5". Each item is
/// a width token optionally followed by "x<count>".
inline MultiRank parse_pattern(std::string_view spec, std::size_t R) {
  MultiRank mr;
  std::stringstream ss{std::string(spec)};
  std::string item;
  while (std::getline(ss, item, ',')) {
    item.erase(std::remove_if(item.begin(), item.end(), ::isspace), item.end());
    if (item.empty()) continue;
    std::size_t count = 1;
    const auto x = item.find_last_of("x*");
    if (x != std::string::npos) {
      const std::string n = item.substr(x + 1);
      std::size_t used = 0;
      long long v = -1;
      try {
        v = std::stoll(n, &used);
      } catch (const std::exception&) {
        used = 0;
      }
      if (used != n.size() || v <= 0) throw ArgumentError("bad repeat count in '" + item + "'");
      count = static_cast<std::size_t>(v);
      item.resize(x);
    }
    const std::size_t w = pattern_width(item, R);
    mr.ranks.insert(mr.ranks.end(), count, w);
  }
  if (mr.ranks.empty()) throw ArgumentError("empty multirank pattern");
  return mr;
}

/// Block patterns of the synthetic benchmark at desk scale: I3 = 50 for order
/// 3, 5x5 for order 4, 3x3x3 for order 5. `swapped` exchanges R and 0.5R.
inline std::string desk_pattern_spec(std::size_t order, bool swapped = false) {
  std::string s;
  switch (order) {
    case 3: s = "R,0.5Rx10,Rx29,0.5Rx10"; break;
    case 4: s = "R,0.5Rx4,Rx5,0.5Rx10,Rx5"; break;
    case 5: s = "R,0.5Rx8,Rx18"; break;
    default: throw ArgumentError("no desk pattern for order " + std::to_string(order));
  }
  if (!swapped) return s;
  // Swap the two width tokens.
  std::string out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (!out.empty()) out += ',';
    if (item.rfind("0.5R", 0) == 0)
      out += item.substr(3);
    else
      out += "0.5" + item;
  }
  return out;
}

inline Shape desk_shape(std::size_t order, std::size_t I = 50) {
  switch (order) {
    case 3: return {I, I, 50};
    case 4: return {I, I, 5, 5};
    case 5: return {I, I, 3, 3, 3};
    default: throw ArgumentError("no desk shape for order " + std::to_string(order));
  }
}

// ---------------------------------------------------------------------------
// Generator

struct SynthConfig {
  Shape shape;
  std::size_t base_rank = 5;
  MultiRank pattern;
  double rho = 0.05;
  double sigma_sq = 1e-4;
  std::uint64_t seed = 0;
  std::string label;

  void validate() const {
    if (shape.size() < 3) throw ShapeError("synthetic shape must have order >= 3");
    for (auto d : shape)
      if (d == 0) throw ShapeError("synthetic shape has a zero mode");
    const std::size_t J = shape_numel(Shape(shape.begin() + 2, shape.end()));
    if (pattern.size() != J)
      throw ArgumentError("pattern has " + std::to_string(pattern.size()) + " entries for " +
                          std::to_string(J) + " slices");
    if (base_rank > std::min(shape[0], shape[1]))
      throw ArgumentError("base rank exceeds min(I1, I2)");
    for (auto r : pattern.ranks)
      if (r > base_rank) throw ArgumentError("pattern entry exceeds the base rank");
    if (!(rho >= 0.0 && rho <= 1.0)) throw ArgumentError("rho must lie in [0, 1]");
    if (!(sigma_sq >= 0.0) || !std::isfinite(sigma_sq))
      throw ArgumentError("sigma_sq must be nonnegative");
  }
};

struct SynthInstance {
  RealTensor y, x_gt, s_gt, e_gt;
  MultiRank multirank_gt;
};

inline std::size_t sparse_count(double rho, std::size_t numel) {
  return static_cast<std::size_t>(std::floor(rho * static_cast<double>(numel) + 1e-9));
}

inline SynthInstance generate(const SynthConfig& cfg, const TransformSpec& L) {
  cfg.validate();
  const Shape tr(cfg.shape.begin() + 2, cfg.shape.end());
  if (tr != L.trailing()) throw ShapeError("transform does not match the synthetic shape");
  if (L.kind() == TransformKind::kDft)
    for (std::size_t k = 0; k < cfg.pattern.size(); ++k)
      if (cfg.pattern[k] != cfg.pattern[L.mirror_slice(k)])
        throw ArgumentError("pattern entries " + std::to_string(k) + " and " +
                            std::to_string(L.mirror_slice(k)) +
                            " differ, but a real tensor has equal ranks on DFT mirror slices");
  Shape su{cfg.shape[0], cfg.base_rank}, sv{cfg.shape[1], cfg.base_rank};
  su.insert(su.end(), tr.begin(), tr.end());
  sv.insert(sv.end(), tr.begin(), tr.end());

  std::normal_distribution<double> gauss(0.0, 1.0);
  RealTensor u(su), v(sv);
  auto ru = make_stream(cfg.seed, Stream::kFactorU);
  for (auto& e : u.storage()) e = gauss(ru);
  auto rv = make_stream(cfg.seed, Stream::kFactorV);
  for (auto& e : v.storage()) e = gauss(rv);

  SynthInstance inst;
  inst.x_gt = truncate_multi_rank(t_product(u, conj_transpose(v), L), L, cfg.pattern);
  inst.multirank_gt = cfg.pattern;

  const std::size_t n = shape_numel(cfg.shape);
  inst.s_gt = RealTensor(cfg.shape);
  auto rpos = make_stream(cfg.seed, Stream::kSparsePos);
  const auto pos = sample_positions(n, sparse_count(cfg.rho, n), rpos);
  auto rval = make_stream(cfg.seed, Stream::kSparseVal);
  std::uniform_real_distribution<double> outlier(-10.0, 10.0);
  for (auto p : pos) inst.s_gt[p] = outlier(rval);

  inst.e_gt = RealTensor(cfg.shape);
  if (cfg.sigma_sq > 0.0) {
    auto rn = make_stream(cfg.seed, Stream::kNoise);
    std::normal_distribution<double> noise(0.0, std::sqrt(cfg.sigma_sq));
    for (auto& e : inst.e_gt.storage()) e = noise(rn);
  }
  inst.y = inst.x_gt + inst.s_gt + inst.e_gt;
  return inst;
}

// ---------------------------------------------------------------------------
// Scores

inline double r_err(const MultiRank& est, const MultiRank& gt) {
  if (est.size() != gt.size())
    throw ArgumentError("multirank lengths differ: " + std::to_string(est.size()) + " vs " +
                        std::to_string(gt.size()));
  if (gt.size() == 0) return 0.0;
  double acc = 0.0;
  for (std::size_t k = 0; k < gt.size(); ++k)
    acc += std::fabs(static_cast<double>(est[k]) - static_cast<double>(gt[k]));
  return acc / static_cast<double>(gt.size());
}

inline double x_err(const RealTensor& x_hat, const RealTensor& x_gt) {
  if (x_hat.shape() != x_gt.shape())
    throw ShapeError("x_err shapes differ: " + shape_string(x_hat.shape()) + " vs " +
                     shape_string(x_gt.shape()));
  const double den = frobenius_norm(x_gt);
  if (!(den > 0.0)) throw ArgumentError("x_err is undefined for a zero ground truth");
  return frobenius_norm(x_hat - x_gt) / den;
}

// ---------------------------------------------------------------------------
// Benchmark driver

struct BenchmarkEntry {
  SynthConfig config;
  MultiRank multirank;
  double r_err = 0.0;
  double x_err = 0.0;
  std::size_t iterations = 0;
  bool converged = false;
  double generate_seconds = 0.0;
  double run_seconds = 0.0;
};

struct BenchmarkReport {
  HyperParams hp;
  std::vector<BenchmarkEntry> entries;
};

/// Runs generate -> run -> score for each configuration. The model seed of
/// entry i is its config seed.
inline BenchmarkReport run_benchmark(const std::vector<SynthConfig>& grid, const HyperParams& hp) {
  using clock = std::chrono::steady_clock;
  BenchmarkReport rep;
  rep.hp = hp;
  for (const auto& cfg : grid) {
    const TransformSpec L = TransformSpec::dft_for(cfg.shape);
    BenchmarkEntry e;
    e.config = cfg;
    auto t0 = clock::now();
    const SynthInstance inst = generate(cfg, L);
    auto t1 = clock::now();
    const RunResult res = run(inst.y, L, hp, cfg.seed);
    auto t2 = clock::now();
    e.multirank = res.multirank;
    e.r_err = r_err(res.multirank, inst.multirank_gt);
    e.x_err = x_err(res.x_hat, inst.x_gt);
    e.iterations = res.trace.records.size();
    e.converged = res.trace.converged;
    e.generate_seconds = std::chrono::duration<double>(t1 - t0).count();
    e.run_seconds = std::chrono::duration<double>(t2 - t1).count();
    rep.entries.push_back(std::move(e));
  }
  return rep;
}

/// Hyperparameters of the synthetic protocol: sigma0^2 = 1, gamma = 1,
/// initial width half of I, tol 1e-6. The large-noise cells need well over
/// a thousand sweeps to meet tol, hence the iteration cap.
inline HyperParams synthetic_hyperparams(const Shape& shape) {
  HyperParams hp;
  hp.sigma0_sq = 1.0;
  hp.gamma = 1.0;
  hp.tol = 1e-6;
  hp.max_iter = 3000;
  hp.init_rank = std::max<std::size_t>(1, std::min(shape.at(0), shape.at(1)) / 2);
  return hp;
}

}  // namespace lmhbrtf

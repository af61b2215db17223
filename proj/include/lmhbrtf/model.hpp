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

// Variational inference for the low-multi-rank Bayesian robust tensor
// factorization model Y = X + S + E with X = U *_L V^H.
//
// Factor posteriors live in the transform domain, one block per slice k:
// q(U-bar^k) has row covariance sigma_u and means u_mean (I1 x r_k), and
// likewise for V-bar. Column precisions lambda are per slice and column.
// The sparse part S and its element precisions beta live in the original
// domain; tau is a single noise precision.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <limits>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include <Eigen/Cholesky>
#include <Eigen/Dense>

#include "lmhbrtf/error.hpp"
#include "lmhbrtf/parallel.hpp"
#include "lmhbrtf/tensor.hpp"
#include "lmhbrtf/transform.hpp"
#include "lmhbrtf/tsvd.hpp"

namespace lmhbrtf {

inline constexpr double kDefaultPruneThreshold = 1e-4;

struct HyperParams {
  double a0_lambda = 1e-6;
  double b0_lambda = 1e-6;
  double a0_beta = 1e-6;
  double b0_beta = 1e-6;
  double a0_tau = 1e-6;
  double b0_tau = 1e-6;
  double sigma0_sq = 1.0;
  std::optional<double> gamma;  ///< refinement factor; unset means phi
  double tol = 1e-6;
  std::size_t max_iter = 500;
  std::size_t init_rank = 0;    ///< uniform width; 0 means ceil(min(I1,I2)/2)
  MultiRank init_multirank;     ///< per-slice widths; overrides init_rank
  double prune_threshold = kDefaultPruneThreshold;
  /// Update only one slice of each DFT mirror pair and conjugate-copy the
  /// other. Off by default.
  bool conjugate_symmetry = false;

  double gamma_for(double phi) const { return gamma.value_or(phi); }

  /// Widths used at initialization for a tensor of the given shape.
  MultiRank initial_ranks(const Shape& shape) const {
    const std::size_t cap = std::min(shape.at(0), shape.at(1));
    const std::size_t J = shape_numel(Shape(shape.begin() + 2, shape.end()));
    MultiRank mr;
    if (!init_multirank.ranks.empty()) {
      if (init_multirank.size() != J)
        throw ArgumentError("init multirank has " + std::to_string(init_multirank.size()) +
                            " entries for " + std::to_string(J) + " slices");
      mr = init_multirank;
    } else {
      const std::size_t r = init_rank ? init_rank : std::max<std::size_t>(1, (cap + 1) / 2);
      mr = MultiRank::uniform(J, r);
    }
    for (std::size_t k = 0; k < J; ++k) {
      if (mr[k] > cap)
        throw ArgumentError("init rank " + std::to_string(mr[k]) + " exceeds min(I1, I2) = " +
                            std::to_string(cap));
      if (mr[k] == 0) throw ArgumentError("init rank entries must be positive");
    }
    return mr;
  }

  void validate() const {
    auto pos = [](double v, const char* name) {
      if (!(v > 0.0) || !std::isfinite(v))
        throw ArgumentError(std::string(name) + " must be positive and finite");
    };
    pos(a0_lambda, "a0_lambda");
    pos(b0_lambda, "b0_lambda");
    pos(a0_beta, "a0_beta");
    pos(b0_beta, "b0_beta");
    pos(a0_tau, "a0_tau");
    pos(b0_tau, "b0_tau");
    pos(sigma0_sq, "sigma0_sq");
    pos(tol, "tol");
    if (gamma) pos(*gamma, "gamma");
    if (!(prune_threshold >= 0.0) || prune_threshold >= 1.0)
      throw ArgumentError("prune_threshold must lie in [0, 1)");
  }
};

struct SliceFactors {
  MatrixXcd u_mean;   ///< I1 x r
  MatrixXcd v_mean;   ///< I2 x r
  MatrixXcd sigma_u;  ///< r x r
  MatrixXcd sigma_v;  ///< r x r

  std::size_t rank() const { return static_cast<std::size_t>(u_mean.cols()); }

  /// <U^H U> = I1 Sigma_u + M_u^H M_u
  MatrixXcd utu() const {
    return static_cast<double>(u_mean.rows()) * sigma_u + u_mean.adjoint() * u_mean;
  }
  /// <V^H V> = I2 Sigma_v + M_v^H M_v
  MatrixXcd vtv() const {
    return static_cast<double>(v_mean.rows()) * sigma_v + v_mean.adjoint() * v_mean;
  }
};

struct FactorState {
  std::vector<SliceFactors> slices;

  MultiRank ranks() const {
    MultiRank mr;
    mr.ranks.reserve(slices.size());
    for (const auto& s : slices) mr.ranks.push_back(s.rank());
    return mr;
  }
};

struct SparseState {
  RealTensor s_mean;
  RealTensor s_var;
  RealTensor beta_a;
  RealTensor beta_b;

  double beta_mean(std::size_t i) const { return beta_a[i] / beta_b[i]; }
};

struct NoiseState {
  double tau_a = 1.0;
  double tau_b = 1.0;
  std::vector<Eigen::VectorXd> lambda_a;  ///< per slice, one entry per column
  std::vector<Eigen::VectorXd> lambda_b;
  double fit = 0.0;

  double tau_mean() const { return tau_a / tau_b; }
  Eigen::VectorXd lambda_mean(std::size_t k) const {
    return lambda_a[k].cwiseQuotient(lambda_b[k]);
  }
};

struct IterationRecord {
  std::size_t iter = 0;
  double fit = 0.0;
  double rel_change = 0.0;
  double tau = 0.0;
  MultiRank multirank;
};

struct RunTrace {
  std::vector<IterationRecord> records;
  bool converged = false;
  std::string note;
};

struct ModelState {
  Shape shape;
  HyperParams hp;
  double phi = 1.0;
  double gamma = 1.0;
  FactorState factors;
  SparseState sparse;
  NoiseState noise;
  ComplexTensor s_bar;  ///< forward transform of sparse.s_mean

  std::size_t slice_count() const { return factors.slices.size(); }
  std::size_t rows() const { return shape.at(0); }
  std::size_t cols() const { return shape.at(1); }
  std::size_t numel() const { return shape_numel(shape); }
};

struct RunResult {
  RealTensor x_hat;
  RealTensor s_hat;
  MultiRank multirank;
  RunTrace trace;
};

namespace detail {

inline void require_real_input(const RealTensor& y) {
  if (y.order() < 3)
    throw ShapeError("input must have order >= 3, got " + shape_string(y.shape()));
}

inline void require_ybar(const ModelState& st, const ComplexTensor& ybar) {
  if (ybar.shape() != st.shape)
    throw ShapeError("transform-domain tensor " + shape_string(ybar.shape()) +
                     " does not match model shape " + shape_string(st.shape));
}

/// Slices that need their own update; with conjugate symmetry only one of
/// each mirror pair is listed.
inline std::vector<std::size_t> active_slices(const ModelState& st, const TransformSpec& L) {
  std::vector<std::size_t> ks;
  const std::size_t J = st.slice_count();
  const bool sym = st.hp.conjugate_symmetry && L.kind() == TransformKind::kDft;
  for (std::size_t k = 0; k < J; ++k)
    if (!sym || k <= L.mirror_slice(k)) ks.push_back(k);
  return ks;
}

/// Copies conj(slice k) into the mirror of every active slice.
inline void mirror_factors(ModelState& st, const TransformSpec& L) {
  if (!(st.hp.conjugate_symmetry && L.kind() == TransformKind::kDft)) return;
  for (std::size_t k = 0; k < st.slice_count(); ++k) {
    const std::size_t m = L.mirror_slice(k);
    if (m <= k) continue;
    const SliceFactors& a = st.factors.slices[k];
    SliceFactors& b = st.factors.slices[m];
    b.u_mean = a.u_mean.conjugate();
    b.v_mean = a.v_mean.conjugate();
    b.sigma_u = a.sigma_u.conjugate();
    b.sigma_v = a.sigma_v.conjugate();
    st.noise.lambda_a[m] = st.noise.lambda_a[k];
    st.noise.lambda_b[m] = st.noise.lambda_b[k];
  }
}

/// Inverse of a Hermitian positive definite precision matrix.
inline MatrixXcd hpd_inverse(const MatrixXcd& p, const char* what, std::size_t k) {
  const MatrixXcd h = 0.5 * (p + p.adjoint());
  Eigen::LLT<MatrixXcd> llt(h);
  if (llt.info() != Eigen::Success || !h.allFinite())
    throw NumericalError(std::string(what) + " precision of slice " + std::to_string(k) +
                         " is not positive definite");
  MatrixXcd inv = llt.solve(MatrixXcd::Identity(p.rows(), p.cols()));
  return 0.5 * (inv + inv.adjoint());
}

inline double refinement_weight(const ModelState& st) {
  return std::max(st.noise.fit, 0.0) / st.gamma;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Initialization

inline ModelState init_state(const RealTensor& y, const TransformSpec& L, const HyperParams& hp,
                             std::uint64_t seed) {
  detail::require_real_input(y);
  hp.validate();
  if (Shape(y.shape().begin() + 2, y.shape().end()) != L.trailing())
    throw ShapeError("transform trailing shape " + shape_string(L.trailing()) +
                     " does not match input " + shape_string(y.shape()));
  ModelState st;
  st.shape = y.shape();
  st.hp = hp;
  st.phi = L.phi();
  st.gamma = hp.gamma_for(st.phi);

  const MultiRank init = hp.initial_ranks(st.shape);
  const std::size_t J = y.slice_count();
  const ComplexTensor ybar = L.forward(y);
  const auto parts = split_slices(ybar, L, init, detail::use_conjugate_pairs<double>(L));

  st.factors.slices.resize(J);
  st.noise.lambda_a.resize(J);
  st.noise.lambda_b.resize(J);
  for (std::size_t k = 0; k < J; ++k) {
    const auto r = static_cast<Eigen::Index>(init[k]);
    SliceFactors& f = st.factors.slices[k];
    f.u_mean = parts[k].first;
    f.v_mean = parts[k].second;
    f.sigma_u = st.phi * MatrixXcd::Identity(r, r);
    f.sigma_v = st.phi * MatrixXcd::Identity(r, r);
    st.noise.lambda_a[k] = Eigen::VectorXd::Ones(r);
    st.noise.lambda_b[k] = Eigen::VectorXd::Constant(r, st.phi);
  }
  st.noise.tau_a = hp.a0_tau;
  st.noise.tau_b = hp.b0_tau;
  st.noise.fit = 0.0;

  st.sparse.s_mean = RealTensor(st.shape);
  st.sparse.s_var = RealTensor(st.shape);
  st.sparse.beta_a = RealTensor(st.shape);
  st.sparse.beta_b = RealTensor(st.shape);
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    0x53u /* sparse init stream */};
  std::mt19937_64 rng(seq);
  std::uniform_real_distribution<double> unif(0.0, std::sqrt(hp.sigma0_sq));
  for (std::size_t i = 0; i < y.numel(); ++i) {
    st.sparse.s_mean[i] = unif(rng);
    st.sparse.s_var[i] = hp.sigma0_sq;
    st.sparse.beta_a[i] = 1.0;
    st.sparse.beta_b[i] = hp.sigma0_sq;
  }
  st.s_bar = L.forward(st.sparse.s_mean);
  return st;
}

// ---------------------------------------------------------------------------
// Factor updates

inline void update_u(ModelState& st, const ComplexTensor& ybar, const ComplexTensor& sbar,
                     const TransformSpec& L) {
  detail::require_ybar(st, ybar);
  detail::require_ybar(st, sbar);
  const double c = st.noise.tau_mean() / st.phi;
  const double w = detail::refinement_weight(st);
  const auto ks = detail::active_slices(st, L);
  parallel_for(ks.size(), [&](std::size_t i) {
    const std::size_t k = ks[i];
    SliceFactors& f = st.factors.slices[k];
    if (f.rank() == 0) return;
    const MatrixXcd prec =
        c * f.vtv() + (w * st.noise.lambda_mean(k)).cast<cplx>().asDiagonal().toDenseMatrix();
    f.sigma_u = detail::hpd_inverse(prec, "U", k);
    const MatrixXcd resid = ybar.slice(k) - sbar.slice(k);
    f.u_mean = c * (resid * f.v_mean) * f.sigma_u;
  });
  detail::mirror_factors(st, L);
}

inline void update_v(ModelState& st, const ComplexTensor& ybar, const ComplexTensor& sbar,
                     const TransformSpec& L) {
  detail::require_ybar(st, ybar);
  detail::require_ybar(st, sbar);
  const double c = st.noise.tau_mean() / st.phi;
  const double w = detail::refinement_weight(st);
  const auto ks = detail::active_slices(st, L);
  parallel_for(ks.size(), [&](std::size_t i) {
    const std::size_t k = ks[i];
    SliceFactors& f = st.factors.slices[k];
    if (f.rank() == 0) return;
    const MatrixXcd prec =
        c * f.utu() + (w * st.noise.lambda_mean(k)).cast<cplx>().asDiagonal().toDenseMatrix();
    f.sigma_v = detail::hpd_inverse(prec, "V", k);
    const MatrixXcd resid = ybar.slice(k) - sbar.slice(k);
    f.v_mean = c * (resid.adjoint() * f.u_mean) * f.sigma_v;
  });
  detail::mirror_factors(st, L);
}

inline void update_lambda(ModelState& st) {
  const double a = st.hp.a0_lambda + 0.5 * static_cast<double>(st.rows() + st.cols());
  for (std::size_t k = 0; k < st.slice_count(); ++k) {
    const SliceFactors& f = st.factors.slices[k];
    const Eigen::VectorXd energy = (f.utu() + f.vtv()).diagonal().real();
    st.noise.lambda_a[k] = Eigen::VectorXd::Constant(energy.size(), a);
    st.noise.lambda_b[k] = (st.hp.b0_lambda + 0.5 * energy.array()).matrix();
  }
}

// ---------------------------------------------------------------------------
// Reconstruction

/// Transform-domain low-rank part, slice k = M_u M_v^H.
inline ComplexTensor low_rank_bar(const ModelState& st) {
  ComplexTensor xbar(st.shape);
  parallel_for(st.slice_count(), [&](std::size_t k) {
    const SliceFactors& f = st.factors.slices[k];
    if (f.rank() == 0) return;
    xbar.slice(k) = f.u_mean * f.v_mean.adjoint();
  });
  return xbar;
}

/// Original-domain low-rank part. Under the DFT the result must be real up to
/// round-off. Slice-wise estimates under a general complex transform need not
/// map back to a real tensor, and the real part is kept.
inline RealTensor reconstruct_x(const ModelState& st, const TransformSpec& L) {
  if (L.kind() == TransformKind::kDft) return L.inverse_real(low_rank_bar(st));
  return real_part(L.inverse(low_rank_bar(st)));
}

// ---------------------------------------------------------------------------
// Sparse component

inline void update_s(ModelState& st, const RealTensor& y, const TransformSpec& L) {
  if (y.shape() != st.shape)
    throw ShapeError("input " + shape_string(y.shape()) + " does not match model shape " +
                     shape_string(st.shape));
  const RealTensor xhat = reconstruct_x(st, L);
  const double tau = st.noise.tau_mean();
  SparseState& sp = st.sparse;
  for (std::size_t i = 0; i < y.numel(); ++i) {
    const double var = 1.0 / (sp.beta_mean(i) + tau);
    sp.s_var[i] = var;
    sp.s_mean[i] = tau * var * (y[i] - xhat[i]);
  }
  st.s_bar = L.forward(sp.s_mean);
}

inline void update_beta(ModelState& st) {
  SparseState& sp = st.sparse;
  const double a = st.hp.a0_beta + 0.5;
  for (std::size_t i = 0; i < sp.s_mean.numel(); ++i) {
    const double m = sp.s_mean[i];
    sp.beta_a[i] = a;
    sp.beta_b[i] = st.hp.b0_beta + 0.5 * (m * m + sp.s_var[i]);
  }
}

// ---------------------------------------------------------------------------
// Noise precision and fit

/// E||Ybar - Ubar Vbar^H - Sbar||_F^2 under the current posteriors.
inline double expected_residual(const ModelState& st, const ComplexTensor& ybar) {
  detail::require_ybar(st, ybar);
  const double I1 = static_cast<double>(st.rows());
  const double I2 = static_cast<double>(st.cols());
  std::vector<double> part(st.slice_count(), 0.0);
  parallel_for(st.slice_count(), [&](std::size_t k) {
    const SliceFactors& f = st.factors.slices[k];
    MatrixXcd r = ybar.slice(k) - st.s_bar.slice(k);
    double acc = 0.0;
    if (f.rank() > 0) {
      r.noalias() -= f.u_mean * f.v_mean.adjoint();
      const MatrixXcd mvv = f.v_mean.adjoint() * f.v_mean;
      const MatrixXcd muu = f.u_mean.adjoint() * f.u_mean;
      acc += I1 * I2 * (f.sigma_v * f.sigma_u).trace().real();
      acc += I1 * (f.sigma_u * mvv).trace().real();
      acc += I2 * (f.sigma_v * muu).trace().real();
    }
    acc += r.squaredNorm();
    part[k] = acc;
  });
  double total = 0.0;
  for (double p : part) total += p;
  double var_sum = 0.0;
  for (double v : st.sparse.s_var.storage()) var_sum += v;
  return total + st.phi * var_sum;
}

inline double fit_from_residual(double expected_sq, double ybar_norm) {
  if (!(ybar_norm > 0.0)) throw NumericalError("fit is undefined for an all-zero input");
  return 1.0 - std::sqrt(std::max(expected_sq, 0.0)) / ybar_norm;
}

/// Updates tau and returns the expected squared residual it was built from.
inline double update_tau(ModelState& st, const ComplexTensor& ybar, const TransformSpec& L) {
  (void)L;
  const double e = expected_residual(st, ybar);
  st.noise.tau_a = st.hp.a0_tau + 0.5 * static_cast<double>(st.numel());
  st.noise.tau_b = st.hp.b0_tau + e / (2.0 * st.phi);
  return e;
}

inline double compute_fit(ModelState& st, const ComplexTensor& ybar) {
  st.noise.fit = fit_from_residual(expected_residual(st, ybar), frobenius_norm(ybar));
  return st.noise.fit;
}

// ---------------------------------------------------------------------------
// Pruning

namespace detail {

inline std::vector<Eigen::Index> keep_columns(const SliceFactors& f, double threshold,
                                              double I1pI2) {
  std::vector<Eigen::Index> keep;
  const Eigen::Index r = f.u_mean.cols();
  if (r == 0) return keep;
  const Eigen::VectorXd e = (f.utu() + f.vtv()).diagonal().real() / I1pI2;
  const double emax = e.maxCoeff();
  if (!(emax > 0.0)) return keep;
  for (Eigen::Index j = 0; j < r; ++j)
    if (e(j) >= threshold * emax) keep.push_back(j);
  return keep;
}

inline MatrixXcd take_cols(const MatrixXcd& m, const std::vector<Eigen::Index>& idx) {
  MatrixXcd out(m.rows(), static_cast<Eigen::Index>(idx.size()));
  for (std::size_t j = 0; j < idx.size(); ++j) out.col(j) = m.col(idx[j]);
  return out;
}

inline MatrixXcd take_block(const MatrixXcd& m, const std::vector<Eigen::Index>& idx) {
  const auto n = static_cast<Eigen::Index>(idx.size());
  MatrixXcd out(n, n);
  for (Eigen::Index a = 0; a < n; ++a)
    for (Eigen::Index b = 0; b < n; ++b) out(a, b) = m(idx[a], idx[b]);
  return out;
}

inline Eigen::VectorXd take(const Eigen::VectorXd& v, const std::vector<Eigen::Index>& idx) {
  Eigen::VectorXd out(static_cast<Eigen::Index>(idx.size()));
  for (std::size_t j = 0; j < idx.size(); ++j) out(j) = v(idx[j]);
  return out;
}

inline void apply_keep(ModelState& st, std::size_t k, const std::vector<Eigen::Index>& keep) {
  SliceFactors& f = st.factors.slices[k];
  if (keep.size() == f.rank()) return;
  f.u_mean = take_cols(f.u_mean, keep);
  f.v_mean = take_cols(f.v_mean, keep);
  f.sigma_u = take_block(f.sigma_u, keep);
  f.sigma_v = take_block(f.sigma_v, keep);
  st.noise.lambda_a[k] = take(st.noise.lambda_a[k], keep);
  st.noise.lambda_b[k] = take(st.noise.lambda_b[k], keep);
}

}  // namespace detail

/// Drops columns whose energy is below threshold times the slice maximum.
/// With a DFT transform the decision for a mirror pair is taken once, on the
/// lower-indexed slice, so the pair keeps matching columns.
inline MultiRank prune_columns(ModelState& st, double threshold, const TransformSpec* L = nullptr) {
  const double I1pI2 = static_cast<double>(st.rows() + st.cols());
  const std::size_t J = st.slice_count();
  const bool paired = L && L->kind() == TransformKind::kDft;
  std::vector<std::vector<Eigen::Index>> keeps(J);
  for (std::size_t k = 0; k < J; ++k) {
    const std::size_t m = paired ? L->mirror_slice(k) : k;
    if (m < k && st.factors.slices[m].rank() == st.factors.slices[k].rank()) {
      keeps[k] = keeps[m];
      continue;
    }
    keeps[k] = detail::keep_columns(st.factors.slices[k], threshold, I1pI2);
  }
  for (std::size_t k = 0; k < J; ++k) detail::apply_keep(st, k, keeps[k]);
  return st.factors.ranks();
}

inline MultiRank prune_columns(ModelState& st, double threshold, const TransformSpec& L) {
  return prune_columns(st, threshold, &L);
}

// ---------------------------------------------------------------------------
// Driver

namespace detail {

inline void check_positive(const ModelState& st, std::size_t iter) {
  auto fail = [&](const std::string& what) {
    throw NumericalError(what + " left the positive range at iteration " +
                         std::to_string(iter));
  };
  const auto ok = [](double v) { return v > 0.0 && std::isfinite(v); };
  if (!ok(st.noise.tau_a) || !ok(st.noise.tau_b)) fail("tau");
  for (std::size_t k = 0; k < st.slice_count(); ++k)
    for (Eigen::Index j = 0; j < st.noise.lambda_a[k].size(); ++j)
      if (!ok(st.noise.lambda_a[k](j)) || !ok(st.noise.lambda_b[k](j))) fail("lambda");
  const SparseState& sp = st.sparse;
  for (std::size_t i = 0; i < sp.s_var.numel(); ++i)
    if (!ok(sp.s_var[i]) || !ok(sp.beta_a[i]) || !ok(sp.beta_b[i])) fail("sparse precision");
}

inline double relative_change(const RealTensor& cur, const RealTensor& prev) {
  const double den = frobenius_norm(prev);
  const double num = frobenius_norm(cur - prev);
  if (den > 0.0) return num / den;
  return num > 0.0 ? std::numeric_limits<double>::infinity() : 0.0;
}

}  // namespace detail

/// One full sweep in the fixed order U, V, lambda, S, beta, tau (and fit),
/// then pruning. Returns the expected squared residual.
inline double iterate_once(ModelState& st, const RealTensor& y, const ComplexTensor& ybar,
                           double ybar_norm, const TransformSpec& L) {
  update_u(st, ybar, st.s_bar, L);
  update_v(st, ybar, st.s_bar, L);
  update_lambda(st);
  update_s(st, y, L);
  update_beta(st);
  const double e = update_tau(st, ybar, L);
  st.noise.fit = fit_from_residual(e, ybar_norm);
  prune_columns(st, st.hp.prune_threshold, L);
  return e;
}

/// Observer invoked after every iteration; return false to stop early.
using IterationCallback = std::function<bool(const ModelState&, const IterationRecord&)>;

inline RunResult run(const RealTensor& y, const TransformSpec& L, const HyperParams& hp,
                     std::uint64_t seed, const IterationCallback& on_iter = {}) {
  detail::require_real_input(y);
  RunResult res;
  const double ynorm = frobenius_norm(y);
  if (ynorm == 0.0) {
    hp.validate();
    res.x_hat = RealTensor(y.shape());
    res.s_hat = RealTensor(y.shape());
    res.multirank = MultiRank::uniform(y.slice_count(), 0);
    res.trace.converged = true;
    res.trace.note = "all-zero input: trivial convergence";
    return res;
  }
  ModelState st = init_state(y, L, hp, seed);
  const ComplexTensor ybar = L.forward(y);
  const double ybar_norm = frobenius_norm(ybar);
  RealTensor prev = reconstruct_x(st, L);

  for (std::size_t t = 1; t <= hp.max_iter; ++t) {
    iterate_once(st, y, ybar, ybar_norm, L);
    detail::check_positive(st, t);
    RealTensor cur = reconstruct_x(st, L);
    IterationRecord rec;
    rec.iter = t;
    rec.fit = st.noise.fit;
    rec.rel_change = detail::relative_change(cur, prev);
    rec.tau = st.noise.tau_mean();
    rec.multirank = st.factors.ranks();
    res.trace.records.push_back(rec);
    prev = std::move(cur);
    if (rec.rel_change < hp.tol) {
      res.trace.converged = true;
      break;
    }
    if (on_iter && !on_iter(st, rec)) {
      res.trace.note = "stopped by observer";
      break;
    }
  }
  if (!res.trace.converged && res.trace.note.empty() && hp.max_iter > 0)
    res.trace.note = "reached max_iter without meeting tol";
  res.x_hat = std::move(prev);
  res.s_hat = st.sparse.s_mean;
  res.multirank = st.factors.ranks();
  return res;
}

}  // namespace lmhbrtf

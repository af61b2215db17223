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

// Order-d t-SVD algebra: face-wise product, t-product, conjugate transpose,
// identity tensor, full/skinny t-SVD, multi-rank and tubal rank, multi-rank
// truncation and the two-factor split X = U *_L V^H.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/SVD>

#include "lmhbrtf/error.hpp"
#include "lmhbrtf/tensor.hpp"
#include "lmhbrtf/transform.hpp"

namespace lmhbrtf {

inline constexpr double kDefaultRankTol = 1e-8;

/// Per-slice ranks of the transform-domain slices.
struct MultiRank {
  std::vector<std::size_t> ranks;

  MultiRank() = default;
  explicit MultiRank(std::vector<std::size_t> r) : ranks(std::move(r)) {}
  static MultiRank uniform(std::size_t J, std::size_t r) {
    return MultiRank(std::vector<std::size_t>(J, r));
  }

  std::size_t size() const { return ranks.size(); }
  std::size_t operator[](std::size_t k) const { return ranks[k]; }
  std::size_t& operator[](std::size_t k) { return ranks[k]; }
  /// Tubal rank: the largest entry.
  std::size_t tubal() const {
    return ranks.empty() ? 0 : *std::max_element(ranks.begin(), ranks.end());
  }
  bool operator==(const MultiRank&) const = default;
};

// ---------------------------------------------------------------------------
// Face-wise algebra

namespace detail {

inline void check_trailing_match(const Shape& a, const Shape& b, const char* op) {
  if (a.size() != b.size() || !std::equal(a.begin() + 2, a.end(), b.begin() + 2))
    throw ShapeError(std::string(op) + ": trailing modes differ, " +
                     shape_string(a) + " vs " + shape_string(b));
}

}  // namespace detail

/// Z^(k) = X^(k) Y^(k) for every slice k.
template <class Scalar>
DenseTensor<Scalar> facewise_product(const DenseTensor<Scalar>& x,
                                     const DenseTensor<Scalar>& y) {
  detail::check_trailing_match(x.shape(), y.shape(), "facewise_product");
  if (x.cols() != y.rows())
    throw ShapeError("facewise_product: inner dimensions differ, " +
                     shape_string(x.shape()) + " vs " + shape_string(y.shape()));
  Shape s = x.shape();
  s[1] = y.cols();
  DenseTensor<Scalar> z(s);
  for (std::size_t k = 0; k < x.slice_count(); ++k)
    z.slice(k).noalias() = x.slice(k) * y.slice(k);
  return z;
}

/// Z^(k) = X^(k) (Y^(k))^H for every slice k.
inline ComplexTensor facewise_product_adjoint(const ComplexTensor& x,
                                              const ComplexTensor& y) {
  detail::check_trailing_match(x.shape(), y.shape(), "facewise_product_adjoint");
  if (x.cols() != y.cols())
    throw ShapeError("facewise_product_adjoint: column counts differ, " +
                     shape_string(x.shape()) + " vs " + shape_string(y.shape()));
  Shape s = x.shape();
  s[1] = y.rows();
  ComplexTensor z(s);
  for (std::size_t k = 0; k < x.slice_count(); ++k)
    z.slice(k).noalias() = x.slice(k) * y.slice(k).adjoint();
  return z;
}

/// Slice-wise conjugate transpose, used in the transform domain.
template <class Scalar>
DenseTensor<Scalar> facewise_adjoint(const DenseTensor<Scalar>& x) {
  Shape s = x.shape();
  std::swap(s[0], s[1]);
  DenseTensor<Scalar> out(s);
  for (std::size_t k = 0; k < x.slice_count(); ++k) out.slice(k) = x.slice(k).adjoint();
  return out;
}

/// t-product X *_L Y = L^{-1}(L(X) face-wise L(Y)).
inline ComplexTensor t_product(const ComplexTensor& x, const ComplexTensor& y,
                               const TransformSpec& L) {
  return L.inverse(facewise_product(L.forward(x), L.forward(y)));
}

/// Real-input t-product; the imaginary residue is checked and dropped.
inline RealTensor t_product(const RealTensor& x, const RealTensor& y,
                            const TransformSpec& L) {
  return L.inverse_real(facewise_product(L.forward(x), L.forward(y)));
}

/// Order-d conjugate transpose computed in the original domain: adjoint of
/// every frontal slice, then the slices 2..I_k reversed along every trailing
/// mode k. This is the DFT identity; see conj_transpose(x, L) for general L.
template <class Scalar>
DenseTensor<Scalar> conj_transpose(const DenseTensor<Scalar>& x) {
  const Shape trailing = x.trailing_shape();
  Shape s = x.shape();
  std::swap(s[0], s[1]);
  DenseTensor<Scalar> out(s);
  for (std::size_t k = 0; k < x.slice_count(); ++k) {
    auto t = slice_tuple(trailing, k);
    for (std::size_t m = 0; m < t.size(); ++m)
      t[m] = (trailing[m] - t[m]) % trailing[m];
    out.slice(slice_linear(trailing, t)) = x.slice(k).adjoint();
  }
  return out;
}

/// Conjugate transpose with respect to L: slice reversal for the DFT,
/// transform-domain adjoint otherwise.
inline ComplexTensor conj_transpose(const ComplexTensor& x, const TransformSpec& L) {
  if (L.kind() == TransformKind::kDft) return conj_transpose(x);
  return L.inverse(facewise_adjoint(L.forward(x)));
}

/// Identity tensor: every transform-domain slice is the n x n identity.
inline ComplexTensor identity_tensor_complex(std::size_t n, const TransformSpec& L) {
  Shape s{n, n};
  s.insert(s.end(), L.trailing().begin(), L.trailing().end());
  ComplexTensor bar(s);
  for (std::size_t k = 0; k < bar.slice_count(); ++k)
    bar.slice(k).setIdentity();
  return L.inverse(bar);
}

/// Real identity tensor (throws if the transform's identity is not real).
inline RealTensor identity_tensor(std::size_t n, const TransformSpec& L) {
  Shape s{n, n};
  s.insert(s.end(), L.trailing().begin(), L.trailing().end());
  ComplexTensor bar(s);
  for (std::size_t k = 0; k < bar.slice_count(); ++k)
    bar.slice(k).setIdentity();
  return L.inverse_real(bar);
}

// ---------------------------------------------------------------------------
// Slice SVDs

/// Thin SVD of one transform-domain slice, singular values nonincreasing.
struct SliceSvd {
  MatrixXcd u;
  Eigen::VectorXd s;
  MatrixXcd v;
};

inline SliceSvd slice_svd(const MatrixXcd& a) {
  SliceSvd out;
  if (a.rows() <= 16 && a.cols() <= 16) {
    Eigen::JacobiSVD<MatrixXcd> svd(a, Eigen::ComputeThinU | Eigen::ComputeThinV);
    out.u = svd.matrixU();
    out.s = svd.singularValues();
    out.v = svd.matrixV();
  } else {
    Eigen::BDCSVD<MatrixXcd> svd(a, Eigen::ComputeThinU | Eigen::ComputeThinV);
    out.u = svd.matrixU();
    out.s = svd.singularValues();
    out.v = svd.matrixV();
  }
  return out;
}

inline SliceSvd real_slice_svd(const MatrixXd& a) {
  Eigen::BDCSVD<MatrixXd> svd(a, Eigen::ComputeThinU | Eigen::ComputeThinV);
  return {svd.matrixU().cast<cplx>(), svd.singularValues(),
          svd.matrixV().cast<cplx>()};
}

/// SVDs of every slice of xbar. With `conjugate_pairs`, slices that are DFT
/// mirrors of each other get conjugate factors (and self-mirrored slices a
/// real SVD), so factors built from them map back to real tensors.
inline std::vector<SliceSvd> transform_domain_svds(const ComplexTensor& xbar,
                                                   const TransformSpec& L,
                                                   bool conjugate_pairs) {
  const std::size_t J = xbar.slice_count();
  std::vector<SliceSvd> out(J);
  std::vector<char> done(J, 0);
  std::vector<Eigen::VectorXd> svals(J);
  for (std::size_t k = 0; k < J; ++k) {
    if (done[k]) continue;
    const std::size_t mk = conjugate_pairs ? L.mirror_slice(k) : k;
    if (conjugate_pairs && mk == k) {
      out[k] = real_slice_svd(xbar.slice(k).real());
    } else {
      out[k] = slice_svd(xbar.slice(k));
      if (conjugate_pairs) {
        out[mk] = {out[k].u.conjugate(), out[k].s, out[k].v.conjugate()};
        done[mk] = 1;
      }
    }
    done[k] = 1;
  }
  return out;
}

/// Count of singular values above tol * scale. The scale is the largest
/// singular value over the whole tensor, so a slice holding only round-off
/// counts as rank 0.
inline std::size_t numerical_rank(const Eigen::VectorXd& sv, double tol, double scale) {
  if (!(scale > 0.0)) return 0;
  std::size_t r = 0;
  for (Eigen::Index i = 0; i < sv.size(); ++i)
    if (sv(i) > tol * scale) ++r;
  return r;
}

inline double leading_singular_value(const std::vector<Eigen::VectorXd>& svs) {
  double m = 0.0;
  for (const auto& s : svs)
    if (s.size() > 0) m = std::max(m, s(0));
  return m;
}

// ---------------------------------------------------------------------------
// t-SVD

/// X = U *_L S *_L V^H. Original-domain factors are stored as complex
/// tensors; for real input under the DFT they are real up to round-off.
struct TSVDResult {
  ComplexTensor u, s, v;
  ComplexTensor u_bar, s_bar, v_bar;
  MultiRank multirank;
};

namespace detail {

template <class Scalar>
bool use_conjugate_pairs(const TransformSpec& L) {
  return !is_complex_v<Scalar> && L.kind() == TransformKind::kDft;
}

}  // namespace detail

/// Full t-SVD: U is I1 x I1 x ..., S is I1 x I2 x ..., V is I2 x I2 x ...
template <class Scalar>
TSVDResult t_svd(const DenseTensor<Scalar>& x, const TransformSpec& L,
                 double rank_tol = kDefaultRankTol) {
  const ComplexTensor xbar = L.forward(x);
  const std::size_t n1 = x.rows(), n2 = x.cols(), J = x.slice_count();
  const Shape tr = x.trailing_shape();
  auto with = [&](std::size_t a, std::size_t b) {
    Shape s{a, b};
    s.insert(s.end(), tr.begin(), tr.end());
    return s;
  };
  TSVDResult res{ComplexTensor{}, ComplexTensor{}, ComplexTensor{},
                 ComplexTensor(with(n1, n1)), ComplexTensor(with(n1, n2)),
                 ComplexTensor(with(n2, n2)), MultiRank{}};
  res.multirank.ranks.resize(J);
  const bool pairs = detail::use_conjugate_pairs<Scalar>(L);
  std::vector<char> done(J, 0);
  std::vector<Eigen::VectorXd> svals(J);
  for (std::size_t k = 0; k < J; ++k) {
    if (done[k]) continue;
    const std::size_t mk = pairs ? L.mirror_slice(k) : k;
    MatrixXcd uk, vk;
    Eigen::VectorXd sk;
    if (pairs && mk == k) {
      Eigen::BDCSVD<MatrixXd> svd(xbar.slice(k).real(),
                                  Eigen::ComputeFullU | Eigen::ComputeFullV);
      uk = svd.matrixU().cast<cplx>();
      vk = svd.matrixV().cast<cplx>();
      sk = svd.singularValues();
    } else {
      Eigen::BDCSVD<MatrixXcd> svd(MatrixXcd(xbar.slice(k)),
                                   Eigen::ComputeFullU | Eigen::ComputeFullV);
      uk = svd.matrixU();
      vk = svd.matrixV();
      sk = svd.singularValues();
    }
    auto store = [&](std::size_t j, const MatrixXcd& u, const MatrixXcd& v) {
      res.u_bar.slice(j) = u;
      res.v_bar.slice(j) = v;
      auto sj = res.s_bar.slice(j);
      for (Eigen::Index i = 0; i < sk.size(); ++i) sj(i, i) = sk(i);
      svals[j] = sk;
      done[j] = 1;
    };
    store(k, uk, vk);
    if (pairs && mk != k) store(mk, uk.conjugate(), vk.conjugate());
  }
  const double scale = leading_singular_value(svals);
  for (std::size_t k = 0; k < J; ++k) res.multirank[k] = numerical_rank(svals[k], rank_tol, scale);
  res.u = L.inverse(res.u_bar);
  res.s = L.inverse(res.s_bar);
  res.v = L.inverse(res.v_bar);
  return res;
}

/// Multi-rank: per slice, the number of singular values above tol times the
/// largest singular value of any slice.
template <class Scalar>
MultiRank multi_rank(const DenseTensor<Scalar>& x, const TransformSpec& L,
                     double tol = kDefaultRankTol) {
  if (tol < 0.0) throw ArgumentError("rank tolerance must be nonnegative");
  const ComplexTensor xbar = L.forward(x);
  std::vector<Eigen::VectorXd> svals(x.slice_count());
  for (std::size_t k = 0; k < x.slice_count(); ++k) {
    Eigen::BDCSVD<MatrixXcd> svd(MatrixXcd(xbar.slice(k)));
    svals[k] = svd.singularValues();
  }
  const double scale = leading_singular_value(svals);
  MultiRank mr;
  mr.ranks.resize(x.slice_count());
  for (std::size_t k = 0; k < x.slice_count(); ++k) mr[k] = numerical_rank(svals[k], tol, scale);
  return mr;
}

template <class Scalar>
std::size_t tubal_rank(const DenseTensor<Scalar>& x, const TransformSpec& L,
                       double tol = kDefaultRankTol) {
  return multi_rank(x, L, tol).tubal();
}

/// Keeps the leading target[k] singular triplets of every transform-domain
/// slice.
template <class Scalar>
DenseTensor<Scalar> truncate_multi_rank(const DenseTensor<Scalar>& x,
                                        const TransformSpec& L,
                                        const MultiRank& target) {
  const std::size_t J = x.slice_count();
  const std::size_t cap = std::min(x.rows(), x.cols());
  if (target.size() != J)
    throw ShapeError("target multi-rank has " + std::to_string(target.size()) +
                     " entries, tensor has " + std::to_string(J) + " slices");
  for (std::size_t k = 0; k < J; ++k)
    if (target[k] > cap)
      throw ArgumentError("target rank " + std::to_string(target[k]) + " of slice " +
                          std::to_string(k) + " exceeds min(I1, I2) = " +
                          std::to_string(cap));
  ComplexTensor xbar = L.forward(x);
  const auto svds = transform_domain_svds(xbar, L, detail::use_conjugate_pairs<Scalar>(L));
  for (std::size_t k = 0; k < J; ++k) {
    const auto r = static_cast<Eigen::Index>(target[k]);
    const auto& f = svds[k];
    xbar.slice(k) = f.u.leftCols(r) * f.s.head(r).asDiagonal() * f.v.leftCols(r).adjoint();
  }
  if constexpr (is_complex_v<Scalar>)
    return L.inverse(xbar);
  else
    return L.inverse_real(xbar);
}

/// Two-factor split from the skinny t-SVD: U-bar = U0-bar S0-bar^{1/2},
/// V-bar = V0-bar S0-bar^{1/2} slice by slice, width r; slices of lower rank
/// are zero-padded.
struct TwoFactors {
  ComplexTensor u, v;          ///< original domain
  ComplexTensor u_bar, v_bar;  ///< transform domain
};

/// Transform-domain split at per-slice widths `ranks` (not padded): slice k of
/// the returned factors keeps the leading ranks[k] columns.
inline std::vector<std::pair<MatrixXcd, MatrixXcd>> split_slices(
    const ComplexTensor& xbar, const TransformSpec& L, const MultiRank& ranks,
    bool conjugate_pairs) {
  const auto svds = transform_domain_svds(xbar, L, conjugate_pairs);
  std::vector<std::pair<MatrixXcd, MatrixXcd>> out(svds.size());
  for (std::size_t k = 0; k < svds.size(); ++k) {
    const auto r = static_cast<Eigen::Index>(ranks[k]);
    const Eigen::VectorXd root = svds[k].s.head(r).cwiseSqrt();
    out[k].first = svds[k].u.leftCols(r) * root.asDiagonal();
    out[k].second = svds[k].v.leftCols(r) * root.asDiagonal();
  }
  return out;
}

template <class Scalar>
TwoFactors factorize_lemma1(const DenseTensor<Scalar>& x, const TransformSpec& L,
                            std::size_t r, double rank_tol = kDefaultRankTol) {
  const std::size_t cap = std::min(x.rows(), x.cols());
  if (r > cap)
    throw ArgumentError("factor width " + std::to_string(r) +
                        " exceeds min(I1, I2) = " + std::to_string(cap));
  const ComplexTensor xbar = L.forward(x);
  MultiRank mr = multi_rank(x, L, rank_tol);
  if (mr.tubal() > r)
    throw ArgumentError("factor width " + std::to_string(r) +
                        " is below the tubal rank " + std::to_string(mr.tubal()));
  const auto parts = split_slices(xbar, L, mr, detail::use_conjugate_pairs<Scalar>(L));
  const Shape tr = x.trailing_shape();
  Shape su{x.rows(), r}, sv{x.cols(), r};
  su.insert(su.end(), tr.begin(), tr.end());
  sv.insert(sv.end(), tr.begin(), tr.end());
  TwoFactors f{ComplexTensor{}, ComplexTensor{}, ComplexTensor(su), ComplexTensor(sv)};
  for (std::size_t k = 0; k < parts.size(); ++k) {
    const auto rk = parts[k].first.cols();
    f.u_bar.slice(k).leftCols(rk) = parts[k].first;
    f.v_bar.slice(k).leftCols(rk) = parts[k].second;
  }
  f.u = L.inverse(f.u_bar);
  f.v = L.inverse(f.v_bar);
  return f;
}

}  // namespace lmhbrtf

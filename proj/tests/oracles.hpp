// Independent reference computations for the inference engine: coordinate
// objectives written from the expected log-joint, an element-loop expected
// residual, and a Monte-Carlo sampler of the same expectation.

#pragma once

#include <boost/math/special_functions/digamma.hpp>
#include <algorithm>
#include <cmath>
#include <random>

#include "lmhbrtf/model.hpp"

namespace lmhbrtf::oracle {

/// Random small but well-conditioned state for property checks.
inline ModelState random_state(const Shape& shape, std::size_t r, std::uint64_t seed) {
  const TransformSpec L = TransformSpec::dft_for(shape);
  std::mt19937_64 g(seed);
  std::normal_distribution<double> n;
  std::uniform_real_distribution<double> u(0.5, 2.0);
  RealTensor y(shape);
  for (auto& v : y.storage()) v = n(g);
  HyperParams hp;
  hp.init_rank = r;
  ModelState st = init_state(y, L, hp, seed);
  const auto cn = [&] { return cplx(n(g), n(g)); };
  for (auto& f : st.factors.slices) {
    for (Eigen::Index i = 0; i < f.u_mean.size(); ++i) f.u_mean(i) = cn();
    for (Eigen::Index i = 0; i < f.v_mean.size(); ++i) f.v_mean(i) = cn();
    const auto rr = static_cast<Eigen::Index>(r);
    MatrixXcd a(rr, rr), b(rr, rr);
    for (Eigen::Index i = 0; i < a.size(); ++i) a(i) = 0.3 * cn();
    for (Eigen::Index i = 0; i < b.size(); ++i) b(i) = 0.3 * cn();
    f.sigma_u = a * a.adjoint() + 0.2 * MatrixXcd::Identity(rr, rr);
    f.sigma_v = b * b.adjoint() + 0.2 * MatrixXcd::Identity(rr, rr);
  }
  for (std::size_t k = 0; k < st.slice_count(); ++k)
    for (Eigen::Index j = 0; j < st.noise.lambda_a[k].size(); ++j) {
      st.noise.lambda_a[k](j) = u(g);
      st.noise.lambda_b[k](j) = u(g);
    }
  for (std::size_t i = 0; i < y.numel(); ++i) {
    st.sparse.s_mean[i] = n(g);
    st.sparse.s_var[i] = 0.1 * u(g);
    st.sparse.beta_a[i] = u(g);
    st.sparse.beta_b[i] = u(g);
  }
  // Mirror slices of the DFT carry conjugate factors; self-mirrored ones are real.
  for (std::size_t k = 0; k < st.slice_count(); ++k) {
    const std::size_t m = L.mirror_slice(k);
    SliceFactors& f = st.factors.slices[k];
    if (m == k) {
      f.u_mean = f.u_mean.real().cast<cplx>();
      f.v_mean = f.v_mean.real().cast<cplx>();
      f.sigma_u = f.sigma_u.real().cast<cplx>();
      f.sigma_v = f.sigma_v.real().cast<cplx>();
    } else if (m > k) {
      SliceFactors& h = st.factors.slices[m];
      h.u_mean = f.u_mean.conjugate();
      h.v_mean = f.v_mean.conjugate();
      h.sigma_u = f.sigma_u.conjugate();
      h.sigma_v = f.sigma_v.conjugate();
      st.noise.lambda_a[m] = st.noise.lambda_a[k];
      st.noise.lambda_b[m] = st.noise.lambda_b[k];
    }
  }
  st.s_bar = L.forward(st.sparse.s_mean);
  st.noise.tau_a = u(g);
  st.noise.tau_b = u(g);
  return st;
}

inline RealTensor observation(const Shape& shape, std::uint64_t seed) {
  std::mt19937_64 g(seed);
  std::normal_distribution<double> n;
  RealTensor y(shape);
  for (auto& v : y.storage()) v = n(g);
  return y;
}

/// E|Ybar - U V^H - Sbar|^2 summed over all entries, element by element.
inline double expected_residual_loops(const ModelState& st, const ComplexTensor& ybar) {
  double total = 0.0;
  for (std::size_t k = 0; k < st.slice_count(); ++k) {
    const SliceFactors& f = st.factors.slices[k];
    const auto r = f.u_mean.cols();
    for (Eigen::Index i = 0; i < f.u_mean.rows(); ++i) {
      for (Eigen::Index j = 0; j < f.v_mean.rows(); ++j) {
        const cplx R = ybar.slice(k)(i, j) - st.s_bar.slice(k)(i, j);
        cplx mean = 0.0;
        for (Eigen::Index a = 0; a < r; ++a) mean += f.u_mean(i, a) * std::conj(f.v_mean(j, a));
        double second = 0.0;
        for (Eigen::Index a = 0; a < r; ++a)
          for (Eigen::Index b = 0; b < r; ++b) {
            const cplx eu = f.u_mean(i, a) * std::conj(f.u_mean(i, b)) + f.sigma_u(b, a);
            const cplx ev = std::conj(f.v_mean(j, a)) * f.v_mean(j, b) + f.sigma_v(a, b);
            second += (eu * ev).real();
          }
        total += std::norm(R) - 2.0 * (std::conj(R) * mean).real() + second;
      }
    }
  }
  double var = 0.0;
  for (double v : st.sparse.s_var.storage()) var += v;
  return total + st.phi * var;
}

/// Monte-Carlo estimate of the same expectation: draws every factor row from
/// its circular complex Gaussian and every sparse entry from its Gaussian.
struct McEstimate {
  double mean = 0.0;
  double std_error = 0.0;
};

inline McEstimate expected_residual_mc(const ModelState& st, const ComplexTensor& ybar,
                                       const TransformSpec& L, std::size_t samples,
                                       std::uint64_t seed) {
  std::mt19937_64 g(seed);
  std::normal_distribution<double> n;
  const double h = std::sqrt(0.5);
  std::vector<MatrixXcd> cu, cv;
  for (const auto& f : st.factors.slices) {
    cu.push_back(f.sigma_u.llt().matrixU());
    cv.push_back(f.sigma_v.llt().matrixU());
  }
  double sum = 0.0, sum2 = 0.0;
  RealTensor s(st.shape);
  for (std::size_t t = 0; t < samples; ++t) {
    for (std::size_t i = 0; i < s.numel(); ++i)
      s[i] = st.sparse.s_mean[i] + std::sqrt(st.sparse.s_var[i]) * n(g);
    const ComplexTensor sbar = L.forward(s);
    double val = 0.0;
    for (std::size_t k = 0; k < st.slice_count(); ++k) {
      const SliceFactors& f = st.factors.slices[k];
      MatrixXcd zu(f.u_mean.rows(), f.u_mean.cols()), zv(f.v_mean.rows(), f.v_mean.cols());
      for (Eigen::Index i = 0; i < zu.size(); ++i) zu(i) = cplx(h * n(g), h * n(g));
      for (Eigen::Index i = 0; i < zv.size(); ++i) zv(i) = cplx(h * n(g), h * n(g));
      const MatrixXcd u = f.u_mean + zu * cu[k];
      const MatrixXcd v = f.v_mean + zv * cv[k];
      val += (ybar.slice(k) - u * v.adjoint() - sbar.slice(k)).squaredNorm();
    }
    sum += val;
    sum2 += val * val;
  }
  const double m = sum / static_cast<double>(samples);
  const double var = (sum2 / static_cast<double>(samples) - m * m) *
                     static_cast<double>(samples) / static_cast<double>(samples - 1);
  return {m, std::sqrt(var / static_cast<double>(samples))};
}

// ---------------------------------------------------------------------------
// Coordinate objectives (expected log-joint terms that involve the factor plus
// its entropy), up to constants.

/// q(U-bar^k) with mean M and row covariance S; the ARD weight is w.
inline double objective_u(const ModelState& st, std::size_t k, const ComplexTensor& ybar,
                          const MatrixXcd& M, const MatrixXcd& S, double w) {
  const SliceFactors& f = st.factors.slices[k];
  const double c = st.noise.tau_mean() / st.phi;
  const double I1 = static_cast<double>(M.rows());
  const MatrixXcd R = ybar.slice(k) - st.s_bar.slice(k);
  const MatrixXcd vtv = f.vtv();
  const Eigen::VectorXd lam = w * st.noise.lambda_mean(k);
  double lik = (R - M * f.v_mean.adjoint()).squaredNorm();
  lik += (M * (static_cast<double>(f.v_mean.rows()) * f.sigma_v) * M.adjoint()).trace().real();
  lik += I1 * (S * vtv).trace().real();
  double prior = (M * lam.cast<cplx>().asDiagonal() * M.adjoint()).trace().real();
  prior += I1 * (lam.cast<cplx>().asDiagonal() * S).trace().real();
  const double logdet = std::log(S.ldlt().vectorD().real().prod());
  return -0.5 * c * lik - 0.5 * prior + 0.5 * I1 * logdet;
}

inline double objective_v(const ModelState& st, std::size_t k, const ComplexTensor& ybar,
                          const MatrixXcd& M, const MatrixXcd& S, double w) {
  const SliceFactors& f = st.factors.slices[k];
  const double c = st.noise.tau_mean() / st.phi;
  const double I2 = static_cast<double>(M.rows());
  const MatrixXcd R = ybar.slice(k) - st.s_bar.slice(k);
  const MatrixXcd utu = f.utu();
  const Eigen::VectorXd lam = w * st.noise.lambda_mean(k);
  double lik = (R - f.u_mean * M.adjoint()).squaredNorm();
  lik += (M * (static_cast<double>(f.u_mean.rows()) * f.sigma_u) * M.adjoint()).trace().real();
  lik += I2 * (S * utu).trace().real();
  double prior = (M * lam.cast<cplx>().asDiagonal() * M.adjoint()).trace().real();
  prior += I2 * (lam.cast<cplx>().asDiagonal() * S).trace().real();
  const double logdet = std::log(S.ldlt().vectorD().real().prod());
  return -0.5 * c * lik - 0.5 * prior + 0.5 * I2 * logdet;
}

/// Gamma coordinate: coef_log E[ln x] - coef_lin E[x] + entropy, q = Ga(a, b).
/// Maximized at a = coef_log + 1, b = coef_lin.
inline double objective_gamma(double a, double b, double coef_log, double coef_lin) {
  using boost::math::digamma;
  const double elog = digamma(a) - std::log(b);
  const double ex = a / b;
  const double entropy = a - std::log(b) + std::lgamma(a) + (1.0 - a) * digamma(a);
  return coef_log * elog - coef_lin * ex + entropy;
}

/// Column energy sum_i E|U_ir|^2 + sum_j E|V_jr|^2, by loops.
inline double column_energy(const SliceFactors& f, Eigen::Index r) {
  double e = 0.0;
  for (Eigen::Index i = 0; i < f.u_mean.rows(); ++i)
    e += std::norm(f.u_mean(i, r)) + f.sigma_u(r, r).real();
  for (Eigen::Index j = 0; j < f.v_mean.rows(); ++j)
    e += std::norm(f.v_mean(j, r)) + f.sigma_v(r, r).real();
  return e;
}

/// Per-element q(S_i) = N(m, v) objective.
inline double objective_s(double z, double tau, double beta, double m, double v) {
  return -0.5 * tau * ((z - m) * (z - m) + v) - 0.5 * beta * (m * m + v) + 0.5 * std::log(v);
}

// ---------------------------------------------------------------------------
// Coordinate-optimality sweep

struct OptimalityReport {
  double worst_slope = 0.0;  ///< |central difference| / max(1, |f0|)
  double worst_rise = 0.0;   ///< (max(f(+h), f(-h)) - f0) / max(1, |f0|)
  std::size_t checks = 0;
};

namespace detail {

template <class F>
void probe(OptimalityReport& rep, F f, double f0, double h) {
  const double fp = f(h), fm = f(-h);
  const double scale = std::max(1.0, std::abs(f0));
  rep.worst_slope = std::max(rep.worst_slope, std::abs(fp - fm) / (2 * h) / scale);
  rep.worst_rise = std::max(rep.worst_rise, (std::max(fp, fm) - f0) / scale);
  ++rep.checks;
}

inline MatrixXcd random_direction(Eigen::Index r, Eigen::Index c, std::mt19937_64& g) {
  std::normal_distribution<double> n;
  MatrixXcd m(r, c);
  for (Eigen::Index i = 0; i < m.size(); ++i) m(i) = cplx(n(g), n(g));
  return m;
}

}  // namespace detail

/// Runs every update once on a random state with Fit/gamma = 1 and probes its
/// coordinate objective along random directions of the updated parameters.
inline OptimalityReport check_update_optimality(const Shape& shape, std::size_t r,
                                                std::uint64_t seed, double h = 1e-5) {
  const TransformSpec L = TransformSpec::dft_for(shape);
  const RealTensor y = observation(shape, seed + 1);
  const ComplexTensor ybar = L.forward(y);
  ModelState st = random_state(shape, r, seed);
  st.noise.fit = st.gamma;
  std::mt19937_64 g(seed + 2);
  std::normal_distribution<double> n;
  OptimalityReport rep;
  const auto rr = static_cast<Eigen::Index>(r);
  const auto I1 = static_cast<Eigen::Index>(shape[0]), I2 = static_cast<Eigen::Index>(shape[1]);
  const auto herm = [&] {
    const MatrixXcd d = detail::random_direction(rr, rr, g);
    return MatrixXcd(d + d.adjoint());
  };

  update_u(st, ybar, st.s_bar, L);
  for (std::size_t k = 0; k < st.slice_count(); ++k) {
    const SliceFactors& f = st.factors.slices[k];
    const double f0 = objective_u(st, k, ybar, f.u_mean, f.sigma_u, 1.0);
    const MatrixXcd dm = detail::random_direction(I1, rr, g), ds = herm();
    detail::probe(rep, [&](double t) { return objective_u(st, k, ybar, f.u_mean + t * dm, f.sigma_u, 1.0); }, f0, h);
    detail::probe(rep, [&](double t) { return objective_u(st, k, ybar, f.u_mean, f.sigma_u + t * ds, 1.0); }, f0, h);
  }

  update_v(st, ybar, st.s_bar, L);
  for (std::size_t k = 0; k < st.slice_count(); ++k) {
    const SliceFactors& f = st.factors.slices[k];
    const double f0 = objective_v(st, k, ybar, f.v_mean, f.sigma_v, 1.0);
    const MatrixXcd dm = detail::random_direction(I2, rr, g), ds = herm();
    detail::probe(rep, [&](double t) { return objective_v(st, k, ybar, f.v_mean + t * dm, f.sigma_v, 1.0); }, f0, h);
    detail::probe(rep, [&](double t) { return objective_v(st, k, ybar, f.v_mean, f.sigma_v + t * ds, 1.0); }, f0, h);
  }

  const auto gamma_probe = [&](double a, double b, double cl, double cb) {
    const double f0 = objective_gamma(a, b, cl, cb);
    for (int d = 0; d < 3; ++d) {
      const double da = n(g), db = n(g);
      detail::probe(rep, [&](double t) { return objective_gamma(a * (1 + t * da), b * (1 + t * db), cl, cb); }, f0, h);
    }
  };

  update_lambda(st);
  const double half_rows = 0.5 * static_cast<double>(shape[0] + shape[1]);
  for (std::size_t k = 0; k < st.slice_count(); ++k)
    for (Eigen::Index c = 0; c < rr; ++c)
      gamma_probe(st.noise.lambda_a[k](c), st.noise.lambda_b[k](c),
                  st.hp.a0_lambda - 1.0 + half_rows,
                  st.hp.b0_lambda + 0.5 * column_energy(st.factors.slices[k], c));

  update_s(st, y, L);
  const RealTensor z = y - reconstruct_x(st, L);
  for (std::size_t i = 0; i < y.numel(); ++i) {
    const double m = st.sparse.s_mean[i], v = st.sparse.s_var[i];
    const double tau = st.noise.tau_mean(), beta = st.sparse.beta_mean(i);
    const double f0 = objective_s(z[i], tau, beta, m, v);
    const double dm = n(g), dv = n(g);
    detail::probe(rep, [&](double t) { return objective_s(z[i], tau, beta, m + t * dm, v * (1 + t * dv)); }, f0, h);
  }

  update_beta(st);
  for (std::size_t i = 0; i < y.numel(); ++i) {
    const double m = st.sparse.s_mean[i], v = st.sparse.s_var[i];
    gamma_probe(st.sparse.beta_a[i], st.sparse.beta_b[i], st.hp.a0_beta - 0.5,
                st.hp.b0_beta + 0.5 * (m * m + v));
  }

  update_tau(st, ybar, L);
  gamma_probe(st.noise.tau_a, st.noise.tau_b,
              st.hp.a0_tau - 1.0 + 0.5 * static_cast<double>(y.numel()),
              st.hp.b0_tau + expected_residual_loops(st, ybar) / (2.0 * st.phi));
  return rep;
}

}  // namespace lmhbrtf::oracle

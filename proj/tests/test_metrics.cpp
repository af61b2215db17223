#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "lmhbrtf/metrics.hpp"
#include "test_util.hpp"

namespace lmhbrtf {
namespace {

using testing::random_real;

RealTensor filled(const Shape& s, double v) {
  RealTensor x(s);
  x.storage().assign(x.numel(), v);
  return x;
}

TEST(Psnr, OneEntryOffByATenth) {
  const RealTensor gt = filled({1, 1, 4}, 1.0);
  RealTensor est = gt;
  est[2] = 1.1;
  EXPECT_NEAR(psnr(est, gt), 10.0 * std::log10(400.0), 1e-9);
  EXPECT_NEAR(psnr(est, gt), 26.0206, 1e-4);
}

TEST(Psnr, IdenticalIsInfiniteAndErrorLowersIt) {
  const RealTensor gt = random_real({6, 5, 3}, 1);
  EXPECT_TRUE(std::isinf(psnr(gt, gt)));
  const RealTensor n = random_real({6, 5, 3}, 2);
  RealTensor a = n, b = n;
  a *= 0.01;
  b *= 0.1;
  EXPECT_GT(psnr(gt + a, gt), psnr(gt + b, gt));
  EXPECT_NEAR(psnr(gt + a, gt) - psnr(gt + b, gt), 20.0, 1e-9);
  EXPECT_THROW(psnr(gt, RealTensor(Shape{6, 5, 2})), ShapeError);
}

// Direct windowed SSIM on one frame.
double ssim_frame(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b, double range) {
  const double c1 = std::pow(0.01 * range, 2), c2 = std::pow(0.03 * range, 2);
  double acc = 0.0;
  int count = 0;
  for (int r = 0; r + 8 <= a.rows(); ++r)
    for (int c = 0; c + 8 <= a.cols(); ++c) {
      double ma = 0, mb = 0;
      for (int i = 0; i < 8; ++i)
        for (int j = 0; j < 8; ++j) {
          ma += a(r + i, c + j) / 64;
          mb += b(r + i, c + j) / 64;
        }
      double va = 0, vb = 0, cv = 0;
      for (int i = 0; i < 8; ++i)
        for (int j = 0; j < 8; ++j) {
          const double da = a(r + i, c + j) - ma, db = b(r + i, c + j) - mb;
          va += da * da / 64;
          vb += db * db / 64;
          cv += da * db / 64;
        }
      acc += (2 * ma * mb + c1) * (2 * cv + c2) / ((ma * ma + mb * mb + c1) * (va + vb + c2));
      ++count;
    }
  return acc / count;
}

TEST(Ssim, IdenticalIsOneNegatedIsNegative) {
  const RealTensor gt = random_real({10, 9, 2}, 3);
  EXPECT_NEAR(ssim(gt, gt), 1.0, 1e-12);
  // Checkerboard: every 8x8 window has mean 0, so only the structure term acts.
  RealTensor board(Shape{8, 10, 1});
  for (std::size_t j = 0; j < 10; ++j)
    for (std::size_t i = 0; i < 8; ++i) board({i, j, 0}) = (i + j) % 2 ? 1.0 : -1.0;
  RealTensor neg = board;
  neg *= -1.0;
  const double c2 = std::pow(0.03 * 2.0, 2);
  EXPECT_NEAR(ssim(neg, board), (-2.0 + c2) / (2.0 + c2), 1e-12);
  EXPECT_LT(ssim(neg, board), 0.0);
}

TEST(Ssim, ConstantFramesClosedForm) {
  const RealTensor a = filled({8, 8, 1}, 0.3), b = filled({8, 8, 1}, 0.7);
  const double c1 = 1e-4;
  EXPECT_NEAR(ssim(a, b), (2 * 0.3 * 0.7 + c1) / (0.09 + 0.49 + c1), 1e-12);
}

TEST(Ssim, MatchesDirectWindowLoop) {
  const RealTensor gt = random_real({11, 13, 3}, 4);
  RealTensor est = gt + random_real({11, 13, 3}, 5);
  const auto [lo, hi] = std::minmax_element(gt.storage().begin(), gt.storage().end());
  double expect = 0.0;
  for (std::size_t f = 0; f < 3; ++f) expect += ssim_frame(est.slice(f), gt.slice(f), *hi - *lo);
  EXPECT_NEAR(ssim(est, gt), expect / 3.0, 1e-12);
}

TEST(Ssim, FrameOrderDoesNotMatter) {
  const RealTensor gt = random_real({9, 9, 3}, 6);
  const RealTensor est = gt + random_real({9, 9, 3}, 7);
  RealTensor gp(gt.shape()), ep(gt.shape());
  for (std::size_t f = 0; f < 3; ++f) {
    gp.slice((f + 1) % 3) = gt.slice(f);
    ep.slice((f + 1) % 3) = est.slice(f);
  }
  EXPECT_NEAR(ssim(ep, gp), ssim(est, gt), 1e-12);
}

TEST(Ssim, SmallFramesAreRejected) {
  const RealTensor x = random_real({7, 9, 1}, 8);
  EXPECT_THROW(ssim(x, x), ShapeError);
  EXPECT_NO_THROW(ssim(x, x, 4));
}

TEST(Ergas, ZeroForIdenticalAndScaleAtUnitRatio) {
  const RealTensor gt = filled({4, 4, 3}, 2.0);
  EXPECT_EQ(ergas(gt, gt), 0.0);
  RealTensor est = filled({4, 4, 3}, 4.0);  // RMSE equals the mean in every band
  EXPECT_NEAR(ergas(est, gt), 100.0, 1e-12);
  EXPECT_NEAR(ergas(est, gt, 0.25), 25.0, 1e-12);
  EXPECT_THROW(ergas(gt, filled({4, 4, 3}, 0.0)), ArgumentError);
}

TEST(Ergas, MatchesNaiveBandLoop) {
  RealTensor gt = random_real({5, 6, 2, 2}, 9);
  for (auto& v : gt.storage()) v += 4.0;
  const RealTensor est = gt + random_real({5, 6, 2, 2}, 10);
  double acc = 0.0;
  for (std::size_t f = 0; f < 4; ++f) {
    double mse = 0.0, mean = 0.0;
    for (std::size_t i = 0; i < 30; ++i) {
      mse += std::pow(est[f * 30 + i] - gt[f * 30 + i], 2) / 30;
      mean += gt[f * 30 + i] / 30;
    }
    acc += mse / (mean * mean) / 4;
  }
  EXPECT_NEAR(ergas(est, gt, 0.5), 50.0 * std::sqrt(acc), 1e-10);
}

TEST(Sam, AnglesOfSimpleSpectra) {
  RealTensor a(Shape{1, 1, 2}), b(Shape{1, 1, 2});
  a[0] = 1.0;
  b[1] = 3.0;
  EXPECT_NEAR(sam(a, b), 90.0, 1e-12);
  EXPECT_NEAR(sam(a, a), 0.0, 1e-12);
  RealTensor c = a;
  c *= 7.0;
  EXPECT_NEAR(sam(c, a), 0.0, 1e-12);
  a[1] = 1.0;
  b[0] = 0.0;
  EXPECT_NEAR(sam(a, b), 45.0, 1e-12);
  EXPECT_THROW(sam(RealTensor(Shape{2, 2, 3}), RealTensor(Shape{2, 2, 3})), ArgumentError);
}

TEST(Sam, ZeroPixelsAreSkipped) {
  RealTensor gt(Shape{2, 1, 2}), est(Shape{2, 1, 2});
  gt[0] = 1.0;
  gt[2] = 1.0;  // pixel 0 = (1, 1); pixel 1 is all zero
  est[0] = 1.0;
  EXPECT_NEAR(sam(est, gt), 45.0, 1e-12);
}

TEST(Report, AllFourMetrics) {
  RealTensor gt = random_real({9, 8, 3}, 11);
  for (auto& v : gt.storage()) v += 5.0;
  const RealTensor est = gt + random_real({9, 8, 3}, 12);
  const MetricReport m = evaluate_metrics(est, gt);
  EXPECT_EQ(m.psnr, psnr(est, gt));
  EXPECT_EQ(m.ssim, ssim(est, gt));
  EXPECT_EQ(m.ergas, ergas(est, gt));
  EXPECT_EQ(m.sam, sam(est, gt));
  EXPECT_GT(m.sam, 0.0);
}

}  // namespace
}  // namespace lmhbrtf

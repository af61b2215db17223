#include <gtest/gtest.h>

#include <numbers>

#include "lmhbrtf/transform.hpp"
#include "test_util.hpp"

namespace lmhbrtf {
namespace {

using testing::random_real;
using testing::rel_err;

TEST(Dft, TwoPointExample) {
  const TransformSpec L = TransformSpec::dft({2});
  const RealTensor x({1, 1, 2}, {1.0, 3.0});
  const ComplexTensor xb = L.forward(x);
  EXPECT_NEAR(std::abs(xb[0] - cplx(4, 0)), 0.0, 1e-15);
  EXPECT_NEAR(std::abs(xb[1] - cplx(-2, 0)), 0.0, 1e-15);
  const ComplexTensor back = L.inverse(ComplexTensor({1, 1, 2}, {cplx(4, 0), cplx(-2, 0)}));
  EXPECT_NEAR(std::abs(back[0] - cplx(1, 0)), 0.0, 1e-15);
  EXPECT_NEAR(std::abs(back[1] - cplx(3, 0)), 0.0, 1e-15);
}

TEST(Dft, ZeroStaysZero) {
  const TransformSpec L = TransformSpec::dft({3, 2});
  EXPECT_EQ(frobenius_norm(L.forward(RealTensor({2, 2, 3, 2}))), 0.0);
  EXPECT_EQ(frobenius_norm(L.inverse(ComplexTensor({2, 2, 3, 2}))), 0.0);
}

TEST(Dft, MatchesExplicitMatrix) {
  const Shape s{2, 3, 4, 3};
  const TransformSpec L = TransformSpec::dft_for(s);
  const RealTensor x = random_real(s, 2);
  ComplexTensor ref = x.to_complex();
  for (std::size_t m = 0; m < 2; ++m) ref = mode_n_product(ref, L.matrix(m), m + 2);
  EXPECT_LE(rel_err(L.forward(x), ref), 1e-13);
}

TEST(Dft, Phi) {
  EXPECT_EQ(TransformSpec::dft({10, 10}).phi(), 100.0);
  EXPECT_EQ(phi(TransformSpec::dft({5, 3, 2})), 30.0);
}

TEST(Dft, RoundTripLinearityParseval) {
  const Shape s{3, 4, 5, 2};
  const TransformSpec L = TransformSpec::dft_for(s);
  const RealTensor x = random_real(s, 7), y = random_real(s, 8);
  EXPECT_LE(rel_err(L.inverse(L.forward(x)), x), 1e-12);
  const ComplexTensor lhs = L.forward(RealTensor(2.0 * x + (-3.0) * y));
  const ComplexTensor rhs = cplx(2.0) * L.forward(x) + cplx(-3.0) * L.forward(y);
  EXPECT_LE(rel_err(lhs, rhs), 1e-12);
  EXPECT_NEAR(squared_norm(L.forward(x)), L.phi() * squared_norm(x), 1e-10 * L.phi() * squared_norm(x));
}

TEST(Dft, ConjugateSymmetricSlices) {
  const Shape s{2, 3, 4, 3};
  const TransformSpec L = TransformSpec::dft_for(s);
  const ComplexTensor xb = L.forward(random_real(s, 4));
  for (std::size_t k = 0; k < xb.slice_count(); ++k) {
    const MatrixXcd a = xb.slice(k), b = xb.slice(L.mirror_slice(k));
    EXPECT_LE((a - b.conjugate()).norm(), 1e-12 * a.norm());
  }
}

TEST(Dft, InverseRealResidueCheck) {
  const TransformSpec L = TransformSpec::dft({3});
  ComplexTensor bad({1, 1, 3});
  bad[1] = cplx(1, 0);  // no conjugate partner: inverse is complex
  EXPECT_THROW(L.inverse_real(bad), NumericalError);
  const RealTensor x = random_real({2, 2, 3}, 1);
  EXPECT_LE(rel_err(L.inverse_real(L.forward(x)), x), 1e-12);
}

TEST(Dft, ShapeMismatch) {
  const TransformSpec L = TransformSpec::dft({3});
  EXPECT_THROW(L.forward(RealTensor({2, 2, 4})), ShapeError);
  EXPECT_THROW(TransformSpec::dft({}), ShapeError);
}

TEST(Explicit, IdentityLeavesDataAndPhiOne) {
  const TransformSpec L =
      TransformSpec::explicit_matrices({MatrixXcd::Identity(3, 3), MatrixXcd::Identity(2, 2)});
  const RealTensor x = random_real({2, 2, 3, 2}, 3);
  EXPECT_LE(rel_err(L.forward(x), x), 1e-15);
  EXPECT_EQ(L.phi(), 1.0);
}

TEST(Explicit, UnitaryDftHasPhiOne) {
  const TransformSpec D = TransformSpec::dft({4});
  const MatrixXcd U = D.matrix(0) / 2.0;
  const TransformSpec L = TransformSpec::explicit_matrices({U});
  EXPECT_NEAR(L.phi(), 1.0, 1e-12);
  const RealTensor x = random_real({2, 3, 4}, 9);
  EXPECT_LE(rel_err(L.inverse(L.forward(x)), x), 1e-12);
  EXPECT_NEAR(squared_norm(L.forward(x)), squared_norm(x), 1e-12 * squared_norm(x));
}

TEST(Explicit, ScaledUnitaryPhiIsProductOfScales) {
  const TransformSpec D = TransformSpec::dft({3, 2});
  const TransformSpec L = TransformSpec::explicit_matrices({D.matrix(0), D.matrix(1)});
  EXPECT_NEAR(L.phi(), 6.0, 1e-12);
  const RealTensor x = random_real({2, 2, 3, 2}, 5);
  EXPECT_LE(rel_err(L.forward(x), D.forward(x)), 1e-12);
}

TEST(Explicit, RejectsSingularAndNonUnitary) {
  MatrixXcd sing = MatrixXcd::Identity(3, 3);
  sing(2, 2) = 0.0;
  EXPECT_THROW(TransformSpec::explicit_matrices({sing}), ArgumentError);
  MatrixXcd skew = MatrixXcd::Identity(2, 2);
  skew(0, 1) = 0.5;
  EXPECT_THROW(TransformSpec::explicit_matrices({skew}), ArgumentError);
  EXPECT_THROW(TransformSpec::explicit_matrices({MatrixXcd::Identity(2, 3)}), ArgumentError);
}

TEST(Mirror, IndexMap) {
  const TransformSpec L = TransformSpec::dft({3, 4});
  // (1, 1) -> (2, 3): j = 1 + 3*1 = 4 -> 2 + 3*3 = 11.
  EXPECT_EQ(L.mirror_slice(4), 11u);
  EXPECT_EQ(L.mirror_slice(0), 0u);
  for (std::size_t k = 0; k < 12; ++k) EXPECT_EQ(L.mirror_slice(L.mirror_slice(k)), k);
}

}  // namespace
}  // namespace lmhbrtf

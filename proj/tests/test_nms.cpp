#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "tin/nms.hpp"

using namespace tin;

TEST(Nms, ZeroMapStaysZero) {
  EXPECT_TRUE((nms_thin(EdgeMap::Zero(9, 9)) == 0.0).all());
}

TEST(Nms, ProfileKeepsOnlyThePeak) {
  const double profile[] = {0.0, 0.2, 0.8, 1.0, 0.8, 0.2, 0.0};
  EdgeMap m(12, 7);
  for (Index y = 0; y < 12; ++y)
    for (Index x = 0; x < 7; ++x) m(y, x) = profile[x];
  const EdgeMap out = nms_thin(m);
  for (Index y = 0; y < 12; ++y) {
    for (Index x = 0; x < 7; ++x) EXPECT_EQ(out(y, x), x == 3 ? 1.0 : 0.0) << y << "," << x;
  }
}

TEST(Nms, OnePixelRidgeIsUnchanged) {
  EdgeMap col = EdgeMap::Zero(15, 15), row = EdgeMap::Zero(15, 15);
  col.col(7).setConstant(0.9);
  row.row(4).setConstant(0.6);
  EXPECT_TRUE((nms_thin(col) == col).all());
  EXPECT_TRUE((nms_thin(row) == row).all());
}

TEST(Orientation, VerticalRidgeHasHorizontalNormal) {
  EdgeMap m = EdgeMap::Zero(11, 11);
  m.col(5).setOnes();
  const EdgeMap theta = estimate_orientation(m);
  for (Index y = 0; y < 11; ++y) {
    for (Index x : {3, 4, 6, 7}) {
      const double a = std::abs(theta(y, x));
      EXPECT_TRUE(a < 1e-9 || std::abs(a - std::numbers::pi) < 1e-9) << y << "," << x;
    }
  }
}

TEST(Orientation, TransposeReflectsAngles) {
  EdgeMap m(9, 9);
  for (Index y = 0; y < 9; ++y)
    for (Index x = 0; x < 9; ++x) m(y, x) = std::sin(0.7 * x + 0.3 * y * y) + 0.1 * x;
  const EdgeMap a = estimate_orientation(m);
  const EdgeMap b = estimate_orientation(EdgeMap(m.transpose()));
  for (Index y = 0; y < 9; ++y) {
    for (Index x = 0; x < 9; ++x) {
      // atan2(dx, dy) = pi/2 - atan2(dy, dx), modulo 2 pi.
      double d = b(x, y) - (std::numbers::pi / 2 - a(y, x));
      d = std::remainder(d, 2.0 * std::numbers::pi);
      EXPECT_NEAR(d, 0.0, 1e-9);
    }
  }
}

TEST(Smooth, PreservesConstants) {
  const EdgeMap c = EdgeMap::Constant(6, 8, 0.3);
  EXPECT_LT((gaussian_smooth(c) - 0.3).abs().maxCoeff(), 1e-15);
}

TEST(Sample, BilinearAndClamped) {
  EdgeMap m(2, 2);
  m << 0, 1, 2, 3;
  EXPECT_DOUBLE_EQ(sample_bilinear(m, 0.5, 0.5), 1.5);
  EXPECT_DOUBLE_EQ(sample_bilinear(m, -3.0, 0.0), 0.0);
  EXPECT_DOUBLE_EQ(sample_bilinear(m, 5.0, 5.0), 3.0);
}

TEST(Nms, OutputIsSubsetOfInput) {
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(0, 1);
  EdgeMap m(20, 17);
  for (Index i = 0; i < m.size(); ++i) m.data()[i] = u(rng);
  const EdgeMap out = nms_thin(m);
  EXPECT_TRUE(((out == 0.0) || (out == m)).all());
  EXPECT_GT((out > 0.0).count(), 0);
}

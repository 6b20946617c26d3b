#include <gtest/gtest.h>

#include <numbers>

#include "tin/errors.hpp"
#include "tin/kernels.hpp"

using namespace tin;

TEST(DirectionalBank, AxisKernelsAreExactSobel) {
  const auto bank = directional_bank();
  ASSERT_EQ(bank.size(), 16u);
  EXPECT_EQ(bank[0].weights, sobel_x());
  EXPECT_EQ(bank[4].weights, sobel_y());
  EXPECT_EQ(bank[8].weights, Eigen::Matrix3d(-sobel_x()));
  EXPECT_EQ(sobel_y(), Eigen::Matrix3d(sobel_x().transpose()));
}

TEST(DirectionalBank, ZeroSumAndAntisymmetric) {
  const auto bank = directional_bank(16);
  for (std::size_t k = 0; k < bank.size(); ++k) {
    EXPECT_NEAR(bank[k].weights.sum(), 0.0, 1e-12);
    EXPECT_NEAR(bank[k].angle, 2.0 * std::numbers::pi * static_cast<double>(k) / 16.0, 1e-15);
    const auto& opposite = bank[(k + 8) % 16].weights;
    EXPECT_LT((bank[k].weights + opposite).cwiseAbs().maxCoeff(), 1e-12);
  }
  EXPECT_THROW(directional_bank(0), std::invalid_argument);
}

TEST(Correlate, RampGivesEightInside) {
  GrayImage ramp(6, 7);
  for (Index y = 0; y < 6; ++y)
    for (Index x = 0; x < 7; ++x) ramp(y, x) = static_cast<double>(x);
  const GrayImage gx = correlate3x3(ramp, sobel_x());
  for (Index y = 1; y < 5; ++y)
    for (Index x = 1; x < 6; ++x) EXPECT_DOUBLE_EQ(gx(y, x), 8.0);
}

TEST(SobelDetect, ConstantImageIsZero) {
  EXPECT_TRUE((sobel_detect(GrayImage::Constant(8, 8, 0.4)) == 0.0).all());
}

TEST(SobelDetect, RampNormalisesToOne) {
  GrayImage ramp(8, 8);
  for (Index y = 0; y < 8; ++y)
    for (Index x = 0; x < 8; ++x) ramp(y, x) = x / 7.0;
  const EdgeMap m = sobel_detect(ramp);
  for (Index y = 1; y < 7; ++y)
    for (Index x = 1; x < 7; ++x) EXPECT_NEAR(m(y, x), 1.0, 1e-12);
}

TEST(SobelDetect, StepPeaksBesideTheStep) {
  GrayImage step = GrayImage::Zero(9, 12);
  step.rightCols(6).setOnes();  // step between columns 5 and 6
  const EdgeMap m = sobel_detect(step);
  for (Index y = 0; y < 9; ++y) {
    EXPECT_DOUBLE_EQ(m(y, 5), 1.0);
    EXPECT_DOUBLE_EQ(m(y, 6), 1.0);
    EXPECT_DOUBLE_EQ(m(y, 2), 0.0);
    EXPECT_DOUBLE_EQ(m(y, 9), 0.0);
  }
}

TEST(SobelDetect, RejectsTinyImages) {
  EXPECT_THROW(sobel_detect(GrayImage::Zero(2, 5)), ShapeError);
}

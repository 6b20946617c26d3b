#pragma once

#include <optional>
#include <vector>

#include "tin/types.hpp"

namespace tin {

struct AugmentVariant {
  double rotation_deg = 0.0;
  bool flip = false;
  double scale = 1.0;
};

/// Rotations x flips x scales, enumerated rotation-major, then flip, then scale.
struct AugmentPlan {
  std::vector<double> rotations_deg;
  std::vector<bool> flips;
  std::vector<double> scales;

  /// 16 rotations in 22.5 degree steps, {none, horizontal}, {0.5, 1, 1.5}.
  static AugmentPlan standard();
  static AugmentPlan identity();

  std::vector<AugmentVariant> variants() const;
};

constexpr Index kMinAugmentSize = 16;

/// Largest axis-aligned rectangle inside a height x width image rotated
/// by `radians`, floored to whole pixels.
std::pair<Index, Index> rotated_crop_size(Index height, Index width, double radians);

/// Output size of a variant applied to a height x width sample.
std::pair<Index, Index> variant_size(Index height, Index width, const AugmentVariant& v);

Sample flip_horizontal(const Sample& sample);
/// Image bilinear, labels nearest-neighbour; both align-corners.
Sample rescale(const Sample& sample, double factor);
/// Rotation about the image centre, cropped to the interior rectangle.
Sample rotate_crop(const Sample& sample, double radians);

/// Scale, then rotate/crop, then flip. Returns nothing when the result
/// would be smaller than kMinAugmentSize on either side.
std::optional<Sample> apply_variant(const Sample& sample, const AugmentVariant& v);

std::vector<Sample> augment(const Sample& sample, const AugmentPlan& plan);

}  // namespace tin

#include "tin/augment.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "tin/autograd.hpp"

namespace tin {

AugmentPlan AugmentPlan::standard() {
  AugmentPlan plan;
  for (int k = 0; k < 16; ++k) plan.rotations_deg.push_back(22.5 * k);
  plan.flips = {false, true};
  plan.scales = {0.5, 1.0, 1.5};
  return plan;
}

AugmentPlan AugmentPlan::identity() { return AugmentPlan{{0.0}, {false}, {1.0}}; }

std::vector<AugmentVariant> AugmentPlan::variants() const {
  std::vector<AugmentVariant> out;
  for (double r : rotations_deg) {
    for (bool f : flips) {
      for (double s : scales) out.push_back({r, f, s});
    }
  }
  return out;
}

std::pair<Index, Index> rotated_crop_size(Index height, Index width, double radians) {
  const double w = static_cast<double>(width), h = static_cast<double>(height);
  const double sin_a = std::abs(std::sin(radians)), cos_a = std::abs(std::cos(radians));
  if (sin_a < 1e-12) return {height, width};
  if (cos_a < 1e-12) return {width, height};
  const bool width_longer = w >= h;
  const double long_side = width_longer ? w : h, short_side = width_longer ? h : w;
  double wr, hr;
  if (short_side <= 2.0 * sin_a * cos_a * long_side || std::abs(sin_a - cos_a) < 1e-10) {
    // Half-constrained: two crop corners touch the longer sides.
    const double x = 0.5 * short_side;
    wr = width_longer ? x / sin_a : x / cos_a;
    hr = width_longer ? x / cos_a : x / sin_a;
  } else {
    const double cos_2a = cos_a * cos_a - sin_a * sin_a;
    wr = (w * cos_a - h * sin_a) / cos_2a;
    hr = (h * cos_a - w * sin_a) / cos_2a;
  }
  return {static_cast<Index>(std::floor(hr + 1e-6)), static_cast<Index>(std::floor(wr + 1e-6))};
}

namespace {

Index scaled_extent(Index n, double factor) {
  return std::max<Index>(1, static_cast<Index>(std::lround(static_cast<double>(n) * factor)));
}

double radians_of(double degrees) { return degrees * std::numbers::pi / 180.0; }

}  // namespace

std::pair<Index, Index> variant_size(Index height, Index width, const AugmentVariant& v) {
  if (v.scale != 1.0) {
    height = scaled_extent(height, v.scale);
    width = scaled_extent(width, v.scale);
  }
  if (v.rotation_deg == 0.0) return {height, width};
  return rotated_crop_size(height, width, radians_of(v.rotation_deg));
}

Sample flip_horizontal(const Sample& sample) {
  Sample out = sample;
  const Index c = sample.image.dim(1), h = sample.image.dim(2), w = sample.image.dim(3);
  for (Index k = 0; k < c; ++k) {
    for (Index y = 0; y < h; ++y) {
      for (Index x = 0; x < w; ++x) out.image(0, k, y, x) = sample.image(0, k, y, w - 1 - x);
    }
  }
  out.gt.values = sample.gt.values.rowwise().reverse();
  return out;
}

Sample rescale(const Sample& sample, double factor) {
  if (!(factor > 0.0)) throw std::invalid_argument("rescale factor must be positive");
  const Index h = sample.image.dim(2), w = sample.image.dim(3);
  const Index oh = scaled_extent(h, factor), ow = scaled_extent(w, factor);
  Sample out;
  out.image = resize_bilinear_values(sample.image, oh, ow);
  out.gt.values.resize(oh, ow);
  auto nearest = [](Index o, Index in, Index out_n) -> Index {
    if (out_n <= 1) return 0;
    return static_cast<Index>(std::lround(static_cast<double>(o * (in - 1)) /
                                          static_cast<double>(out_n - 1)));
  };
  for (Index y = 0; y < oh; ++y) {
    for (Index x = 0; x < ow; ++x) {
      out.gt.values(y, x) = sample.gt.values(nearest(y, h, oh), nearest(x, w, ow));
    }
  }
  return out;
}

Sample rotate_crop(const Sample& sample, double radians) {
  const Index c = sample.image.dim(1), h = sample.image.dim(2), w = sample.image.dim(3);
  const auto [oh, ow] = rotated_crop_size(h, w, radians);
  if (oh < 1 || ow < 1) throw ShapeError("rotate_crop: empty crop");
  // Snap right angles so quarter turns copy pixels exactly.
  auto snap = [](double v) {
    if (std::abs(v) < 1e-12) return 0.0;
    if (std::abs(std::abs(v) - 1.0) < 1e-12) return std::copysign(1.0, v);
    return v;
  };
  const double cos_a = snap(std::cos(radians)), sin_a = snap(std::sin(radians));
  const double cx = 0.5 * static_cast<double>(w - 1), cy = 0.5 * static_cast<double>(h - 1);
  const double ocx = 0.5 * static_cast<double>(ow - 1), ocy = 0.5 * static_cast<double>(oh - 1);

  Sample out;
  out.image = Tensor<float>({1, c, oh, ow});
  out.gt.values.resize(oh, ow);
  for (Index v = 0; v < oh; ++v) {
    for (Index u = 0; u < ow; ++u) {
      const double dx = static_cast<double>(u) - ocx, dy = static_cast<double>(v) - ocy;
      const double sx = std::clamp(cx + cos_a * dx + sin_a * dy, 0.0, static_cast<double>(w - 1));
      const double sy = std::clamp(cy - sin_a * dx + cos_a * dy, 0.0, static_cast<double>(h - 1));
      const Index x0 = static_cast<Index>(std::floor(sx)), y0 = static_cast<Index>(std::floor(sy));
      const Index x1 = std::min(x0 + 1, w - 1), y1 = std::min(y0 + 1, h - 1);
      const float fx = static_cast<float>(sx - static_cast<double>(x0));
      const float fy = static_cast<float>(sy - static_cast<double>(y0));
      for (Index k = 0; k < c; ++k) {
        const auto& img = sample.image;
        out.image(0, k, v, u) =
            (1 - fy) * ((1 - fx) * img(0, k, y0, x0) + fx * img(0, k, y0, x1)) +
            fy * ((1 - fx) * img(0, k, y1, x0) + fx * img(0, k, y1, x1));
      }
      out.gt.values(v, u) = sample.gt.values(static_cast<Index>(std::lround(sy)),
                                             static_cast<Index>(std::lround(sx)));
    }
  }
  return out;
}

std::optional<Sample> apply_variant(const Sample& sample, const AugmentVariant& v) {
  const auto [h, w] = variant_size(sample.image.dim(2), sample.image.dim(3), v);
  if (h < kMinAugmentSize || w < kMinAugmentSize) return std::nullopt;
  Sample out = v.scale == 1.0 ? sample : rescale(sample, v.scale);
  if (v.rotation_deg != 0.0) out = rotate_crop(out, radians_of(v.rotation_deg));
  if (v.flip) out = flip_horizontal(out);
  return out;
}

std::vector<Sample> augment(const Sample& sample, const AugmentPlan& plan) {
  if (sample.image.dim(2) != sample.gt.height() || sample.image.dim(3) != sample.gt.width()) {
    throw ShapeError("augment: image and ground truth sizes differ");
  }
  std::vector<Sample> out;
  for (const AugmentVariant& v : plan.variants()) {
    if (auto s = apply_variant(sample, v)) out.push_back(std::move(*s));
  }
  return out;
}

}  // namespace tin

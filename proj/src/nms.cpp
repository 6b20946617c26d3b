#include "tin/nms.hpp"

#include <algorithm>
#include <array>
#include <cmath>

namespace tin {

namespace {

std::array<double, 5> gaussian_taps() {
  std::array<double, 5> taps{};
  double total = 0.0;
  for (int i = 0; i < 5; ++i) {
    const double d = i - 2;
    taps[static_cast<std::size_t>(i)] = std::exp(-0.5 * d * d);
    total += taps[static_cast<std::size_t>(i)];
  }
  for (double& t : taps) t /= total;
  return taps;
}

}  // namespace

EdgeMap gaussian_smooth(const EdgeMap& map) {
  static const std::array<double, 5> taps = gaussian_taps();
  const Index h = map.rows(), w = map.cols();
  EdgeMap rows(h, w), out(h, w);
  // Separable: horizontal then vertical pass.
  for (Index y = 0; y < h; ++y) {
    for (Index x = 0; x < w; ++x) {
      double acc = 0.0;
      for (Index k = -2; k <= 2; ++k) {
        acc += taps[static_cast<std::size_t>(k + 2)] * map(y, std::clamp<Index>(x + k, 0, w - 1));
      }
      rows(y, x) = acc;
    }
  }
  for (Index y = 0; y < h; ++y) {
    for (Index x = 0; x < w; ++x) {
      double acc = 0.0;
      for (Index k = -2; k <= 2; ++k) {
        acc += taps[static_cast<std::size_t>(k + 2)] * rows(std::clamp<Index>(y + k, 0, h - 1), x);
      }
      out(y, x) = acc;
    }
  }
  return out;
}

EdgeMap estimate_orientation(const EdgeMap& map) {
  const EdgeMap s = gaussian_smooth(map);
  const Index h = s.rows(), w = s.cols();
  EdgeMap angle(h, w);
  for (Index y = 0; y < h; ++y) {
    for (Index x = 0; x < w; ++x) {
      const double dx = 0.5 * (s(y, std::min(x + 1, w - 1)) - s(y, std::max<Index>(x - 1, 0)));
      const double dy = 0.5 * (s(std::min(y + 1, h - 1), x) - s(std::max<Index>(y - 1, 0), x));
      angle(y, x) = std::atan2(dy, dx);
    }
  }
  return angle;
}

double sample_bilinear(const EdgeMap& map, double x, double y) {
  const Index h = map.rows(), w = map.cols();
  x = std::clamp(x, 0.0, static_cast<double>(w - 1));
  y = std::clamp(y, 0.0, static_cast<double>(h - 1));
  const Index x0 = static_cast<Index>(std::floor(x)), y0 = static_cast<Index>(std::floor(y));
  const Index x1 = std::min(x0 + 1, w - 1), y1 = std::min(y0 + 1, h - 1);
  const double fx = x - static_cast<double>(x0), fy = y - static_cast<double>(y0);
  return (1 - fy) * ((1 - fx) * map(y0, x0) + fx * map(y0, x1)) +
         fy * ((1 - fx) * map(y1, x0) + fx * map(y1, x1));
}

EdgeMap nms_thin(const EdgeMap& map, const EdgeMap& orientation) {
  const Index h = map.rows(), w = map.cols();
  EdgeMap out = EdgeMap::Zero(h, w);
  for (Index y = 0; y < h; ++y) {
    for (Index x = 0; x < w; ++x) {
      const double v = map(y, x);
      if (v <= 0.0) continue;
      const double c = std::cos(orientation(y, x)), s = std::sin(orientation(y, x));
      const double xd = static_cast<double>(x), yd = static_cast<double>(y);
      if (v >= sample_bilinear(map, xd + c, yd + s) && v >= sample_bilinear(map, xd - c, yd - s)) {
        out(y, x) = v;
      }
    }
  }
  return out;
}

EdgeMap nms_thin(const EdgeMap& map) { return nms_thin(map, estimate_orientation(map)); }

}  // namespace tin

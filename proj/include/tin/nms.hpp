#pragma once

#include "tin/types.hpp"

namespace tin {

/// 5x5 Gaussian blur (sigma = 1) with replicated borders.
EdgeMap gaussian_smooth(const EdgeMap& map);

/// Edge-normal angle atan2(dy, dx) of the smoothed map, using central
/// differences. y grows downwards.
EdgeMap estimate_orientation(const EdgeMap& map);

/// Bilinear sample at (x, y) with coordinates clamped to the map.
double sample_bilinear(const EdgeMap& map, double x, double y);

/// Keeps a pixel when it is >= both bilinear samples one pixel away along
/// its edge normal; everything else becomes 0.
EdgeMap nms_thin(const EdgeMap& map);
EdgeMap nms_thin(const EdgeMap& map, const EdgeMap& orientation);

}  // namespace tin

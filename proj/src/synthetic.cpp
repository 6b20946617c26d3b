#include "tin/synthetic.hpp"

#include <Eigen/Core>

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <limits>
#include <numbers>
#include <random>
#include <vector>

#include "tin/errors.hpp"
#include "tin/io.hpp"

namespace tin {

namespace {

struct Region {
  bool circle = true;
  double cx = 0, cy = 0, radius = 0;
  std::vector<Eigen::Vector2d> vertices;
  std::array<double, 3> color{};

  bool contains(double x, double y) const {
    if (circle) return (x - cx) * (x - cx) + (y - cy) * (y - cy) <= radius * radius;
    bool inside = false;
    for (std::size_t i = 0, j = vertices.size() - 1; i < vertices.size(); j = i++) {
      const Eigen::Vector2d& a = vertices[i];
      const Eigen::Vector2d& b = vertices[j];
      if ((a.y() > y) != (b.y() > y) &&
          x < (b.x() - a.x()) * (y - a.y()) / (b.y() - a.y()) + a.x()) {
        inside = !inside;
      }
    }
    return inside;
  }

  // Unsigned distance from (x, y) to the outline.
  double distance(double x, double y) const {
    if (circle) return std::abs(std::hypot(x - cx, y - cy) - radius);
    const Eigen::Vector2d p(x, y);
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0, j = vertices.size() - 1; i < vertices.size(); j = i++) {
      const Eigen::Vector2d ab = vertices[i] - vertices[j];
      const double t = std::clamp((p - vertices[j]).dot(ab) / ab.squaredNorm(), 0.0, 1.0);
      best = std::min(best, (vertices[j] + t * ab - p).norm());
    }
    return best;
  }
};

double mean_of(const std::array<double, 3>& c) { return (c[0] + c[1] + c[2]) / 3.0; }

// Sequential deletion of simple points in raster order, keeping endpoints,
// until nothing changes. Turns 4-connected staircases into 8-connected
// curves without splitting or shortening them.
void thin_labels(LabelMap& m) {
  constexpr std::array<int, 8> dy{-1, -1, 0, 1, 1, 1, 0, -1};
  constexpr std::array<int, 8> dx{0, 1, 1, 1, 0, -1, -1, -1};
  const Index h = m.rows(), w = m.cols();
  auto on = [&](Index y, Index x) { return y >= 0 && y < h && x >= 0 && x < w && m(y, x) > 0; };
  for (bool changed = true; changed;) {
    changed = false;
    for (Index y = 0; y < h; ++y) {
      for (Index x = 0; x < w; ++x) {
        if (!m(y, x)) continue;
        std::array<bool, 8> nb{};
        int count = 0;
        for (int i = 0; i < 8; ++i) count += nb[i] = on(y + dy[i], x + dx[i]);
        if (count < 2) continue;
        // The neighbours must form one 8-connected group without (y, x).
        std::array<bool, 8> seen{};
        int groups = 0;
        for (int i = 0; i < 8; ++i) {
          if (!nb[i] || seen[i]) continue;
          ++groups;
          std::vector<int> stack{i};
          seen[i] = true;
          while (!stack.empty()) {
            const int k = stack.back();
            stack.pop_back();
            for (int j = 0; j < 8; ++j) {
              if (nb[j] && !seen[j] && std::max(std::abs(dy[j] - dy[k]), std::abs(dx[j] - dx[k])) == 1) {
                seen[j] = true;
                stack.push_back(j);
              }
            }
          }
        }
        if (groups == 1) {
          m(y, x) = 0;
          changed = true;
        }
      }
    }
  }
}

}  // namespace

std::vector<Sample> make_synthetic(int count, std::uint64_t seed, const SyntheticOptions& opt) {
  if (count < 0 || opt.size < 16 || opt.min_shapes < 1 || opt.max_shapes < opt.min_shapes) {
    throw std::invalid_argument("make_synthetic: invalid options");
  }
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::normal_distribution<double> noise(0.0, opt.noise_std);
  const double s = static_cast<double>(opt.size);
  const Index n = opt.size;

  std::vector<Sample> out;
  for (int img = 0; img < count; ++img) {
    // Gray levels at least 0.25 apart so every boundary has contrast.
    std::vector<double> levels;
    auto pick_color = [&]() {
      double g = 0.0;
      for (int attempt = 0; attempt < 1000; ++attempt) {
        g = 0.1 + 0.8 * unit(rng);
        if (std::all_of(levels.begin(), levels.end(),
                        [&](double l) { return std::abs(l - g) >= 0.25; })) {
          break;
        }
      }
      levels.push_back(g);
      std::array<double, 3> c{};
      for (double& v : c) v = std::clamp(g + 0.2 * (unit(rng) - 0.5), 0.0, 1.0);
      const double shift = g - mean_of(c);
      for (double& v : c) v += shift;
      return c;
    };

    const std::array<double, 3> background = pick_color();
    const int shapes = opt.min_shapes +
                       static_cast<int>(unit(rng) * (opt.max_shapes - opt.min_shapes + 1) * 0.999999);
    std::vector<Region> regions;
    for (int k = 0; k < shapes; ++k) {
      Region r;
      r.circle = unit(rng) < 0.5;
      r.cx = s * (0.2 + 0.6 * unit(rng));
      r.cy = s * (0.2 + 0.6 * unit(rng));
      r.radius = s * (0.12 + 0.16 * unit(rng));
      if (!r.circle) {
        const int corners = 3 + static_cast<int>(unit(rng) * 4 * 0.999999);
        std::vector<double> angles(static_cast<std::size_t>(corners));
        for (double& a : angles) a = 2.0 * std::numbers::pi * unit(rng);
        std::sort(angles.begin(), angles.end());
        // Keep polygons from collapsing into slivers.
        for (int i = 0; i < corners; ++i) {
          angles[static_cast<std::size_t>(i)] =
              0.5 * angles[static_cast<std::size_t>(i)] + std::numbers::pi * i / corners;
        }
        for (double a : angles) {
          const double rad = r.radius * (0.75 + 0.25 * unit(rng));
          r.vertices.emplace_back(r.cx + rad * std::cos(a), r.cy + rad * std::sin(a));
        }
      }
      r.color = pick_color();
      regions.push_back(std::move(r));
    }

    Sample sample{Tensor<float>({1, 3, n, n}), GroundTruth{LabelMap::Zero(n, n)}};
    Plane<int> owner = Plane<int>::Zero(n, n);
    const int ss = opt.supersample;
    for (Index y = 0; y < n; ++y) {
      for (Index x = 0; x < n; ++x) {
        std::array<double, 3> px = background;
        for (std::size_t k = 0; k < regions.size(); ++k) {
          int hits = 0;
          for (int i = 0; i < ss; ++i) {
            for (int j = 0; j < ss; ++j) {
              hits += regions[k].contains(static_cast<double>(x) + (j + 0.5) / ss,
                                          static_cast<double>(y) + (i + 0.5) / ss);
            }
          }
          const double cov = static_cast<double>(hits) / (ss * ss);
          for (int c = 0; c < 3; ++c) px[c] = px[c] * (1.0 - cov) + regions[k].color[c] * cov;
          if (regions[k].contains(static_cast<double>(x) + 0.5, static_cast<double>(y) + 0.5)) {
            owner(y, x) = static_cast<int>(k) + 1;
          }
        }
        for (int c = 0; c < 3; ++c) {
          sample.image(0, c, y, x) = static_cast<float>(std::clamp(px[c] + noise(rng), 0.0, 1.0));
        }
      }
    }
    // Where 4-neighbours have different owners the outline of the front
    // shape runs between them; label whichever centre lies nearer to it.
    auto mark_nearer = [&](Index ya, Index xa, Index yb, Index xb) {
      const int a = owner(ya, xa), b = owner(yb, xb);
      if (a == b) return;
      const Region& front = regions[static_cast<std::size_t>(std::max(a, b) - 1)];
      const double da = front.distance(xa + 0.5, ya + 0.5);
      const double db = front.distance(xb + 0.5, yb + 0.5);
      const bool pick_a = da < db || (da == db && a > b);
      if (pick_a) sample.gt.values(ya, xa) = 255;
      else sample.gt.values(yb, xb) = 255;
    };
    for (Index y = 0; y < n; ++y) {
      for (Index x = 0; x < n; ++x) {
        if (x + 1 < n) mark_nearer(y, x, y, x + 1);
        if (y + 1 < n) mark_nearer(y, x, y + 1, x);
      }
    }
    thin_labels(sample.gt.values);
    out.push_back(std::move(sample));
  }
  return out;
}

Sample make_square(Index size, Index margin) {
  if (margin < 1 || 2 * margin + 3 > size) throw std::invalid_argument("make_square: bad margin");
  // Sides a quarter pixel inside pixel boundaries; exactly through pixel
  // centres the labelled side would be a coin toss.
  const double lo = static_cast<double>(margin) + 0.25;
  const double hi = static_cast<double>(size - margin) - 0.25;
  auto coverage = [&](Index i) {
    return std::clamp(std::min(i + 1.0, hi) - std::max(static_cast<double>(i), lo), 0.0, 1.0);
  };
  auto inside = [&](Index i) { return i + 0.5 >= lo && i + 0.5 < hi; };
  Sample s{Tensor<float>({1, 3, size, size}), GroundTruth{LabelMap::Zero(size, size)}};
  for (Index y = 0; y < size; ++y) {
    for (Index x = 0; x < size; ++x) {
      const float v = static_cast<float>(coverage(y) * coverage(x));
      for (Index c = 0; c < 3; ++c) s.image(0, c, y, x) = v;
      const bool edge = inside(y) && inside(x) &&
                        !(inside(y - 1) && inside(y + 1) && inside(x - 1) && inside(x + 1));
      if (edge) s.gt.values(y, x) = 255;
    }
  }
  return s;
}

void write_synthetic(const std::filesystem::path& dir, const std::vector<Sample>& samples) {
  std::filesystem::create_directories(dir);
  std::ofstream manifest(dir / "manifest.tsv");
  if (!manifest) throw DataError("cannot write manifest in '" + dir.string() + "'");
  for (std::size_t i = 0; i < samples.size(); ++i) {
    char img[32], gt[32];
    std::snprintf(img, sizeof img, "img_%03zu.png", i);
    std::snprintf(gt, sizeof gt, "gt_%03zu.png", i);
    save_image(dir / img, samples[i].image);
    save_gt(dir / gt, samples[i].gt);
    manifest << img << '\t' << gt << '\n';
  }
}

}  // namespace tin

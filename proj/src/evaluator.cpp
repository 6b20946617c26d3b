#include "tin/evaluator.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <iomanip>
#include <ostream>
#include <stdexcept>
#include <tuple>

namespace tin {

double precision_of(const MatchCounts& c) {
  const Index d = c.tp + c.fp;
  return d > 0 ? static_cast<double>(c.tp) / static_cast<double>(d) : 0.0;
}

double recall_of(const MatchCounts& c) {
  const Index d = c.tp + c.fn;
  return d > 0 ? static_cast<double>(c.tp) / static_cast<double>(d) : 0.0;
}

double f_measure(double precision, double recall) {
  const double s = precision + recall;
  return s > 0.0 ? 2.0 * precision * recall / s : 0.0;
}

double f_measure(const MatchCounts& c) { return f_measure(precision_of(c), recall_of(c)); }

PRPoint PRPoint::from(double threshold, const MatchCounts& counts) {
  PRPoint p;
  p.threshold = threshold;
  p.counts = counts;
  p.precision = precision_of(counts);
  p.recall = recall_of(counts);
  p.f = f_measure(p.precision, p.recall);
  return p;
}

double tolerance_radius(double max_tolerance, Index height, Index width) {
  const double h = static_cast<double>(height), w = static_cast<double>(width);
  return max_tolerance * std::sqrt(h * h + w * w);
}

namespace {

struct Pixel {
  Index y, x;
};

std::vector<Pixel> edge_pixels(const BinaryMap& map) {
  std::vector<Pixel> out;
  for (Index y = 0; y < map.rows(); ++y) {
    for (Index x = 0; x < map.cols(); ++x) {
      if (map(y, x)) out.push_back({y, x});
    }
  }
  return out;
}

void check_same_size(const BinaryMap& a, const BinaryMap& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) {
    throw ShapeError("edge maps must have equal sizes");
  }
}

// Calls visit(pred_index, gt_index, squared_distance) for every pair within radius.
void for_each_candidate(const std::vector<Pixel>& preds, const BinaryMap& gt, double radius,
                        const std::function<void(std::size_t, std::size_t, Index)>& visit) {
  if (radius < 0.0) throw std::invalid_argument("matching radius must be >= 0");
  Plane<Index> gt_index = Plane<Index>::Constant(gt.rows(), gt.cols(), -1);
  Index next = 0;
  for (Index y = 0; y < gt.rows(); ++y) {
    for (Index x = 0; x < gt.cols(); ++x) {
      if (gt(y, x)) gt_index(y, x) = next++;
    }
  }
  const double r2 = radius * radius + 1e-9;
  const Index reach = static_cast<Index>(std::floor(radius + 1e-9));
  for (std::size_t pi = 0; pi < preds.size(); ++pi) {
    const Pixel p = preds[pi];
    for (Index y = std::max<Index>(p.y - reach, 0); y <= std::min(p.y + reach, gt.rows() - 1); ++y) {
      for (Index x = std::max<Index>(p.x - reach, 0); x <= std::min(p.x + reach, gt.cols() - 1);
           ++x) {
        const Index gi = gt_index(y, x);
        if (gi < 0) continue;
        const Index d2 = (y - p.y) * (y - p.y) + (x - p.x) * (x - p.x);
        if (static_cast<double>(d2) <= r2) visit(pi, static_cast<std::size_t>(gi), d2);
      }
    }
  }
}

}  // namespace

MatchCounts match_edges(const BinaryMap& pred, const BinaryMap& gt, double radius) {
  check_same_size(pred, gt);
  const std::vector<Pixel> preds = edge_pixels(pred);
  const Index gt_total = gt.count();
  std::vector<std::tuple<Index, std::size_t, std::size_t>> pairs;
  for_each_candidate(preds, gt, radius, [&](std::size_t pi, std::size_t gi, Index d2) {
    pairs.emplace_back(d2, pi, gi);
  });
  std::sort(pairs.begin(), pairs.end());
  std::vector<bool> pred_used(preds.size(), false);
  std::vector<bool> gt_used(static_cast<std::size_t>(gt_total), false);
  MatchCounts c;
  for (const auto& [d2, pi, gi] : pairs) {
    if (pred_used[pi] || gt_used[gi]) continue;
    pred_used[pi] = gt_used[gi] = true;
    ++c.tp;
  }
  c.fp = static_cast<Index>(preds.size()) - c.tp;
  c.fn = gt_total - c.tp;
  return c;
}

MatchCounts match_oracle(const BinaryMap& pred, const BinaryMap& gt, double radius) {
  check_same_size(pred, gt);
  constexpr Index kMaxPixels = 200;
  const std::vector<Pixel> preds = edge_pixels(pred);
  const Index gt_total = gt.count();
  if (static_cast<Index>(preds.size()) > kMaxPixels || gt_total > kMaxPixels) {
    throw std::length_error("match_oracle: more than 200 edge pixels on one side");
  }
  std::vector<std::vector<std::size_t>> adjacency(preds.size());
  for_each_candidate(preds, gt, radius, [&](std::size_t pi, std::size_t gi, Index) {
    adjacency[pi].push_back(gi);
  });

  std::vector<long> owner(static_cast<std::size_t>(gt_total), -1);
  std::vector<char> seen;
  std::function<bool(std::size_t)> augment = [&](std::size_t pi) {
    for (std::size_t gi : adjacency[pi]) {
      if (seen[gi]) continue;
      seen[gi] = 1;
      if (owner[gi] < 0 || augment(static_cast<std::size_t>(owner[gi]))) {
        owner[gi] = static_cast<long>(pi);
        return true;
      }
    }
    return false;
  };
  MatchCounts c;
  for (std::size_t pi = 0; pi < preds.size(); ++pi) {
    seen.assign(static_cast<std::size_t>(gt_total), 0);
    if (augment(pi)) ++c.tp;
  }
  c.fp = static_cast<Index>(preds.size()) - c.tp;
  c.fn = gt_total - c.tp;
  return c;
}

std::vector<double> uniform_thresholds(int count) {
  if (count < 1) throw std::invalid_argument("threshold count must be >= 1");
  std::vector<double> t(static_cast<std::size_t>(count));
  for (int i = 0; i < count; ++i) t[static_cast<std::size_t>(i)] = (i + 1.0) / (count + 1.0);
  return t;
}

BinaryMap binarize_gt(const GroundTruth& gt, int threshold) {
  return gt.values.cast<int>() >= threshold;
}

PRCurve pr_sweep_radius(const EdgeMap& pred, const GroundTruth& gt,
                       const std::vector<double>& thresholds, double radius, int gt_threshold) {
  if (pred.rows() != gt.height() || pred.cols() != gt.width()) {
    throw ShapeError("pr_sweep: prediction and ground truth sizes differ");
  }
  if (!(radius >= 0.0)) throw std::invalid_argument("pr_sweep: radius must be >= 0");
  for (std::size_t i = 0; i < thresholds.size(); ++i) {
    if (!(thresholds[i] > 0.0 && thresholds[i] < 1.0) ||
        (i > 0 && !(thresholds[i] > thresholds[i - 1]))) {
      throw std::invalid_argument("thresholds must be strictly increasing in (0,1)");
    }
  }
  const BinaryMap target = binarize_gt(gt, gt_threshold);
  PRCurve curve;
  curve.reserve(thresholds.size());
  for (double t : thresholds) {
    curve.push_back(PRPoint::from(t, match_edges(pred >= t, target, radius)));
  }
  return curve;
}

PRCurve pr_sweep(const EdgeMap& pred, const GroundTruth& gt, const std::vector<double>& thresholds,
                 double max_tolerance, int gt_threshold) {
  return pr_sweep_radius(pred, gt, thresholds,
                         tolerance_radius(max_tolerance, gt.height(), gt.width()), gt_threshold);
}

EvalReport ods_ois(std::vector<PRCurve> curves, double tolerance) {
  if (curves.empty()) throw std::invalid_argument("ods_ois: no images to aggregate");
  const std::size_t n = curves.front().size();
  if (n == 0) throw std::invalid_argument("ods_ois: empty threshold grid");
  for (const PRCurve& c : curves) {
    if (c.size() != n) throw std::invalid_argument("ods_ois: curves use different grids");
    for (std::size_t i = 0; i < n; ++i) {
      if (c[i].threshold != curves.front()[i].threshold) {
        throw std::invalid_argument("ods_ois: curves use different grids");
      }
    }
  }
  EvalReport report;
  report.tolerance = tolerance;
  report.dataset.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    MatchCounts total;
    for (const PRCurve& c : curves) total += c[i].counts;
    report.dataset.push_back(PRPoint::from(curves.front()[i].threshold, total));
    if (i == 0 || report.dataset.back().f > report.ods) {
      report.ods = report.dataset.back().f;
      report.ods_threshold = report.dataset.back().threshold;
    }
  }
  MatchCounts best_total;
  for (const PRCurve& c : curves) {
    std::size_t best = 0;
    for (std::size_t i = 1; i < n; ++i) {
      if (c[i].f > c[best].f) best = i;
    }
    best_total += c[best].counts;
  }
  report.ois = f_measure(best_total);
  report.per_image = std::move(curves);
  return report;
}

void write_report(std::ostream& os, const EvalReport& report) {
  os << std::setprecision(9) << report.ods << '\t' << report.ois << '\t' << report.tolerance
     << '\n';
  for (const PRPoint& p : report.dataset) {
    os << p.threshold << '\t' << p.counts.tp << '\t' << p.counts.fp << '\t' << p.counts.fn
       << '\t' << p.precision << '\t' << p.recall << '\t' << p.f << '\n';
  }
}

}  // namespace tin

#pragma once

#include <iosfwd>
#include <vector>

#include "tin/types.hpp"

namespace tin {

struct MatchCounts {
  Index tp = 0;
  Index fp = 0;
  Index fn = 0;

  MatchCounts& operator+=(const MatchCounts& o) {
    tp += o.tp;
    fp += o.fp;
    fn += o.fn;
    return *this;
  }
  bool operator==(const MatchCounts&) const = default;
};

double precision_of(const MatchCounts& c);
double recall_of(const MatchCounts& c);
double f_measure(double precision, double recall);
double f_measure(const MatchCounts& c);

struct PRPoint {
  double threshold = 0.0;
  MatchCounts counts;
  double precision = 0.0;
  double recall = 0.0;
  double f = 0.0;

  static PRPoint from(double threshold, const MatchCounts& counts);
};

using PRCurve = std::vector<PRPoint>;

struct EvalReport {
  std::vector<PRCurve> per_image;
  PRCurve dataset;  // per-threshold counts summed over images
  double ods = 0.0;
  double ois = 0.0;
  double ods_threshold = 0.0;
  double tolerance = 0.0;
};

/// Matching radius in pixels for a tolerance given as a fraction of the
/// image diagonal.
double tolerance_radius(double max_tolerance, Index height, Index width);

/// One-to-one matching of predicted and ground-truth edge pixels within
/// `radius`, built greedily over candidate pairs in ascending distance
/// (ties broken by row-major prediction index, then ground-truth index).
MatchCounts match_edges(const BinaryMap& pred, const BinaryMap& gt, double radius);

/// Exact maximum-cardinality matching under the same radius constraint
/// (augmenting paths). Throws std::length_error above 200 pixels per side.
MatchCounts match_oracle(const BinaryMap& pred, const BinaryMap& gt, double radius);

/// `count` evenly spaced thresholds (i + 1) / (count + 1).
std::vector<double> uniform_thresholds(int count = 99);

BinaryMap binarize_gt(const GroundTruth& gt, int threshold = 64);

/// Binarises `pred` at each threshold (value >= t) and matches it against
/// the ground truth.
PRCurve pr_sweep(const EdgeMap& pred, const GroundTruth& gt, const std::vector<double>& thresholds,
                 double max_tolerance, int gt_threshold = 64);

/// Same sweep with the matching radius given directly in pixels.
PRCurve pr_sweep_radius(const EdgeMap& pred, const GroundTruth& gt,
                        const std::vector<double>& thresholds, double radius,
                        int gt_threshold = 64);

/// ODS: best F over thresholds of dataset-summed counts.
/// OIS: F of the counts summed at each image's own best threshold.
EvalReport ods_ois(std::vector<PRCurve> curves, double tolerance = 0.0);

/// Header line `ods<TAB>ois<TAB>tolerance`, then one
/// `t<TAB>tp<TAB>fp<TAB>fn<TAB>P<TAB>R<TAB>F` row per threshold (dataset totals).
void write_report(std::ostream& os, const EvalReport& report);

}  // namespace tin

#pragma once

#include <cstddef>
#include <vector>

#include "had/types.hpp"

namespace had {

// Operating points swept over every distinct score value, descending. The
// first entry is the (0, 0) anchor at threshold +infinity; the point at
// threshold t counts the pixels with score >= t, so tied scores flip
// together. The final point is always (1, 1).
struct RocCurve {
  std::vector<double> thresholds;
  std::vector<double> fpr;
  std::vector<double> tpr;
  std::size_t anomaly_count = 0;
  std::size_t background_count = 0;

  std::size_t size() const { return thresholds.size(); }
};

// Full and partial areas. The raw partial area integrates the curve up to
// the FPR cut; the standardized form rescales it so a chance detector maps
// to 0.5 and a perfect one to 1. Both are reported because published
// low-FPR tables are ambiguous about which they use.
struct AucReport {
  double auc_full = 0.0;
  double pauc_raw_1e2 = 0.0;
  double pauc_raw_1e3 = 0.0;
  double pauc_std_1e2 = 0.0;
  double pauc_std_1e3 = 0.0;
};

struct OperatingPoint {
  double threshold = 0.0;
  double achieved_fpr = 0.0;
  // True when every positive-rate point exceeds the target and the best
  // zero-FPR point is returned instead.
  bool unachievable = false;
};

RocCurve roc(const ScoreMap& scores, const GroundTruthMask& truth);

// Trapezoidal area under the curve up to fpr = max_fpr, with linear
// interpolation at the cut.
double partial_auc(const RocCurve& curve, double max_fpr);
double standardized_partial_auc(double raw, double max_fpr);
AucReport auc_report(const RocCurve& curve);

// Largest admissible operating point: the highest achieved FPR <= target,
// reported with the largest threshold realizing it. When even the smallest
// positive FPR step exceeds the target, the best zero-FPR point is
// returned and flagged.
OperatingPoint threshold_at_fpr(const RocCurve& curve, double target_fpr);

// Detection uses strict inequality: pixel marked iff score > threshold.
GroundTruthMask binary_map(const ScoreMap& scores, double threshold);

}  // namespace had

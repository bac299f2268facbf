#include "had/eval.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace had {

RocCurve roc(const ScoreMap& scores, const GroundTruthMask& truth) {
  require(scores.rows == truth.rows && scores.cols == truth.cols, Errc::ShapeMismatch,
          "score map " + std::to_string(scores.rows) + "x" + std::to_string(scores.cols) +
              " vs mask " + std::to_string(truth.rows) + "x" + std::to_string(truth.cols));
  const std::size_t n = scores.scores.size();
  require(truth.labels.size() == n, Errc::ShapeMismatch, "mask label count mismatch");
  for (std::size_t i = 0; i < n; ++i) {
    require(std::isfinite(scores.scores[i]), Errc::NonFinite,
            "score at flat index " + std::to_string(i));
  }

  const std::size_t n_anom = truth.anomaly_count();
  const std::size_t n_bg = n - n_anom;
  require(n_anom >= 1, Errc::NoAnomalies, "mask marks no anomalies");
  require(n_bg >= 1, Errc::NoBackground, "mask marks no background");

  std::vector<std::pair<double, bool>> ranked(n);
  for (std::size_t i = 0; i < n; ++i) {
    ranked[i] = {scores.scores[i], truth.labels[i] != 0};
  }
  std::sort(ranked.begin(), ranked.end(),
            [](const auto& a, const auto& b) { return a.first > b.first; });

  RocCurve curve;
  curve.anomaly_count = n_anom;
  curve.background_count = n_bg;
  curve.thresholds.push_back(std::numeric_limits<double>::infinity());
  curve.fpr.push_back(0.0);
  curve.tpr.push_back(0.0);

  std::size_t tp = 0;
  std::size_t fp = 0;
  std::size_t i = 0;
  while (i < n) {
    const double value = ranked[i].first;
    std::size_t j = i;
    while (j < n && ranked[j].first == value) {
      if (ranked[j].second) {
        ++tp;
      } else {
        ++fp;
      }
      ++j;
    }
    curve.thresholds.push_back(value);
    curve.fpr.push_back(static_cast<double>(fp) / static_cast<double>(n_bg));
    curve.tpr.push_back(static_cast<double>(tp) / static_cast<double>(n_anom));
    i = j;
  }
  return curve;
}

double partial_auc(const RocCurve& curve, double max_fpr) {
  require(max_fpr > 0.0 && max_fpr <= 1.0, Errc::InvalidArgument,
          "FPR cut must lie in (0, 1]");
  require(curve.size() >= 2, Errc::InvalidArgument, "curve has too few points");
  double area = 0.0;
  for (std::size_t i = 1; i < curve.size(); ++i) {
    const double f0 = curve.fpr[i - 1];
    const double t0 = curve.tpr[i - 1];
    const double f1 = curve.fpr[i];
    const double t1 = curve.tpr[i];
    if (f0 >= max_fpr) break;
    if (f1 <= max_fpr) {
      area += (f1 - f0) * 0.5 * (t0 + t1);
    } else {
      const double t_cut = t0 + (t1 - t0) * (max_fpr - f0) / (f1 - f0);
      area += (max_fpr - f0) * 0.5 * (t0 + t_cut);
      break;
    }
  }
  return area;
}

double standardized_partial_auc(double raw, double max_fpr) {
  const double chance = 0.5 * max_fpr * max_fpr;
  return 0.5 * (1.0 + (raw - chance) / (max_fpr - chance));
}

AucReport auc_report(const RocCurve& curve) {
  AucReport report;
  report.auc_full = partial_auc(curve, 1.0);
  report.pauc_raw_1e2 = partial_auc(curve, 1e-2);
  report.pauc_raw_1e3 = partial_auc(curve, 1e-3);
  report.pauc_std_1e2 = standardized_partial_auc(report.pauc_raw_1e2, 1e-2);
  report.pauc_std_1e3 = standardized_partial_auc(report.pauc_raw_1e3, 1e-3);
  return report;
}

OperatingPoint threshold_at_fpr(const RocCurve& curve, double target_fpr) {
  require(target_fpr > 0.0 && target_fpr <= 1.0, Errc::InvalidArgument,
          "target FPR must lie in (0, 1]");
  require(curve.size() >= 2, Errc::InvalidArgument, "curve has too few points");

  double achieved = 0.0;
  for (std::size_t i = 1; i < curve.size(); ++i) {
    if (curve.fpr[i] <= target_fpr) achieved = std::max(achieved, curve.fpr[i]);
  }

  OperatingPoint point;
  point.achieved_fpr = achieved;
  if (achieved == 0.0) {
    // Target below the smallest positive step: return the best zero-FPR
    // point (the lowest threshold before any false positive).
    point.unachievable = true;
    std::size_t pick = 0;
    for (std::size_t i = 1; i < curve.size(); ++i) {
      if (curve.fpr[i] == 0.0) pick = i;
    }
    point.threshold = pick == 0 ? curve.thresholds.front() : curve.thresholds[pick];
    return point;
  }
  for (std::size_t i = 1; i < curve.size(); ++i) {
    if (curve.fpr[i] == achieved) {
      point.threshold = curve.thresholds[i];
      break;  // largest threshold realizing the achieved rate
    }
  }
  return point;
}

GroundTruthMask binary_map(const ScoreMap& scores, double threshold) {
  GroundTruthMask mask;
  mask.rows = scores.rows;
  mask.cols = scores.cols;
  mask.labels.resize(scores.scores.size());
  for (std::size_t i = 0; i < scores.scores.size(); ++i) {
    mask.labels[i] = scores.scores[i] > threshold ? 1 : 0;
  }
  return mask;
}

}  // namespace had

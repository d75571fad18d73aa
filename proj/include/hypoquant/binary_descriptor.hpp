#pragma once

#include <span>
#include <string>
#include <vector>

#include "hypoquant/stats.hpp"
#include "hypoquant/types.hpp"

namespace hypoquant {

/// Fraction of ROI pixels strictly below a threshold.
struct HypoLoadResult {
  std::string subjectId;
  double threshold = 0.0;
  std::size_t hypoCount = 0;
  std::size_t total = 0;
  double hypoLoad = 0.0;  // hypoCount / total
};

/// Threshold from a reference region: mean - std.
double reference_threshold(double refMean, double refStd);

HypoLoadResult hypo_load(std::span<const double> values, double threshold,
                         std::string subjectId = {});

/// Normalized ROI values of one labeled subject, input to the adaptive sweep.
struct LabeledValues {
  std::string subjectId;
  std::vector<double> values;
  Cluster label = Cluster::light;
};

struct ThresholdCandidate {
  double threshold = 0.0;
  double tpr = 0.0;
  double fpr = 0.0;
};

struct ThresholdReport {
  std::vector<ThresholdCandidate> candidates;  // ascending threshold
  std::size_t chosenIndex = 0;

  double chosen() const { return candidates.at(chosenIndex).threshold; }
};

/// `count` evenly spaced values over [lo, hi], endpoints exact.
std::vector<double> candidate_thresholds(double lo, double hi, std::size_t count);

/// Dark-vs-rest rates of a predicted clustering against ground truth.
ThresholdCandidate dark_rates(const Clustering& predicted, const Clustering& truth, double threshold);

/// Sweeps `count` thresholds over the global range of the values. Each one
/// ranks subjects by ascending HypoLoad, cuts the ranking into the
/// ground-truth cluster sizes and scores TPR/FPR with dark as the positive
/// class. The winner maximizes TPR - FPR; ties go to the smaller threshold.
ThresholdReport adaptive_threshold_select(std::span<const LabeledValues> subjects,
                                          std::size_t count = 101, unsigned threads = 1);

/// Concentric bands around the outermost posterior mask pixel.
struct Tessellation {
  Pixel center;
  double deltaR = 1.0;
  std::vector<std::vector<Pixel>> bands;
};

/// Center is the member with the largest row (smallest column on ties).
/// Band i holds pixels at distance d with i*dr <= d < (i+1)*dr, dr = rmax/N;
/// the outer band is closed at rmax. Binning is exact: it compares integer
/// squared distances.
Tessellation tessellate(const RoiMask& mask, std::size_t bandCount);

/// Per-band hypo counts; empty bands report total 0.
std::vector<HypoLoadResult> subregion_counts(const GrayImage& image, const Tessellation& tess,
                                             double threshold);

/// Per-band HypoLoad; an empty band yields 0.
std::vector<double> subregion_features(const GrayImage& image, const Tessellation& tess,
                                       double threshold);

}  // namespace hypoquant

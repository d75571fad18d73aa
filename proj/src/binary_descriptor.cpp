#include "hypoquant/binary_descriptor.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>

#include "hypoquant/parallel.hpp"

namespace hypoquant {

double reference_threshold(double refMean, double refStd) {
  if (refStd < 0) throw DataError("reference standard deviation is negative");
  return refMean - refStd;
}

HypoLoadResult hypo_load(std::span<const double> values, double threshold, std::string subjectId) {
  if (values.empty()) throw DataError("HypoLoad of an empty ROI is undefined");
  HypoLoadResult r{std::move(subjectId), threshold, 0, values.size(), 0.0};
  for (double v : values)
    if (v < threshold) ++r.hypoCount;
  r.hypoLoad = static_cast<double>(r.hypoCount) / static_cast<double>(r.total);
  return r;
}

std::vector<double> candidate_thresholds(double lo, double hi, std::size_t count) {
  if (count < 2) throw DataError("adaptive threshold needs at least 2 candidates");
  if (!(hi > lo)) throw DataError("degenerate value range: all normalized values are equal");
  std::vector<double> out(count);
  for (std::size_t k = 0; k < count; ++k)
    out[k] = lo + (hi - lo) * static_cast<double>(k) / static_cast<double>(count - 1);
  out.front() = lo;
  out.back() = hi;
  return out;
}

ThresholdCandidate dark_rates(const Clustering& predicted, const Clustering& truth, double threshold) {
  std::size_t darkTruth = 0, restTruth = 0, truePos = 0, falsePos = 0;
  for (const auto& [id, t] : truth.assignment) {
    bool predictedDark = predicted.assignment.at(id) == Cluster::dark;
    if (t == Cluster::dark) {
      ++darkTruth;
      if (predictedDark) ++truePos;
    } else {
      ++restTruth;
      if (predictedDark) ++falsePos;
    }
  }
  ThresholdCandidate c{threshold, 0.0, 0.0};
  if (darkTruth) c.tpr = static_cast<double>(truePos) / static_cast<double>(darkTruth);
  if (restTruth) c.fpr = static_cast<double>(falsePos) / static_cast<double>(restTruth);
  return c;
}

ThresholdReport adaptive_threshold_select(std::span<const LabeledValues> subjects,
                                          std::size_t count, unsigned threads) {
  if (subjects.size() < 2) throw DataError("adaptive threshold needs at least 2 subjects");
  std::vector<std::string> ids;
  std::vector<Cluster> labels;
  double lo = std::numeric_limits<double>::infinity();
  double hi = -lo;
  for (const auto& s : subjects) {
    if (s.values.empty()) throw DataError("subject '" + s.subjectId + "' has no ROI values");
    ids.push_back(s.subjectId);
    labels.push_back(s.label);
    auto [a, b] = std::minmax_element(s.values.begin(), s.values.end());
    lo = std::min(lo, *a);
    hi = std::max(hi, *b);
  }
  Clustering truth = clustering_from_labels(ids, labels);
  ClusterSizes sizes = cluster_sizes(truth);

  ThresholdReport report;
  auto thresholds = candidate_thresholds(lo, hi, count);
  report.candidates.resize(count);
  parallel_for(count, threads, [&](std::size_t k) {
    std::vector<double> loads(subjects.size());
    for (std::size_t i = 0; i < subjects.size(); ++i)
      loads[i] = hypo_load(subjects[i].values, thresholds[k]).hypoLoad;
    Clustering predicted = rank_to_clusters(ranking_from_scores(ids, loads, true), sizes);
    report.candidates[k] = dark_rates(predicted, truth, thresholds[k]);
  });

  double best = -std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < count; ++k) {
    double j = report.candidates[k].tpr - report.candidates[k].fpr;
    if (j > best) {
      best = j;
      report.chosenIndex = k;
    }
  }
  return report;
}

Tessellation tessellate(const RoiMask& mask, std::size_t bandCount) {
  if (bandCount < 1) throw DataError("tessellation needs at least one band");
  if (mask.size() == 0) throw DataError("cannot tessellate an empty mask");
  const auto& members = mask.members();
  Pixel center = members.front();
  for (const Pixel& p : members)
    if (p.row > center.row || (p.row == center.row && p.col < center.col)) center = p;

  auto dist2 = [&](const Pixel& p) {
    std::int64_t dr = p.row - center.row, dc = p.col - center.col;
    return dr * dr + dc * dc;
  };
  std::int64_t r2max = 0;
  for (const Pixel& p : members) r2max = std::max(r2max, dist2(p));

  Tessellation t;
  t.center = center;
  t.bands.resize(bandCount);
  const auto n = static_cast<std::int64_t>(bandCount);
  if (r2max == 0) {
    // Single-pixel mask: rmax is 0, everything sits in band 0.
    t.deltaR = 1.0;
    t.bands[0] = members;
    return t;
  }
  t.deltaR = std::sqrt(static_cast<double>(r2max)) / static_cast<double>(bandCount);
  for (const Pixel& p : members) {
    // Largest i with i*rmax <= N*d, compared in squares.
    std::int64_t lhs = n * n * dist2(p);
    auto i = static_cast<std::int64_t>(
        std::floor(static_cast<double>(n) * std::sqrt(static_cast<double>(dist2(p)) /
                                                      static_cast<double>(r2max))));
    while ((i + 1) * (i + 1) * r2max <= lhs) ++i;
    while (i > 0 && i * i * r2max > lhs) --i;
    i = std::min(i, n - 1);
    t.bands[static_cast<std::size_t>(i)].push_back(p);
  }
  return t;
}

std::vector<HypoLoadResult> subregion_counts(const GrayImage& image, const Tessellation& tess,
                                             double threshold) {
  std::vector<HypoLoadResult> out;
  out.reserve(tess.bands.size());
  for (const auto& band : tess.bands) {
    HypoLoadResult r{{}, threshold, 0, band.size(), 0.0};
    for (const Pixel& p : band) {
      if (!image.contains(p)) throw DataError("tessellation pixel outside image");
      if (image.at(p) < threshold) ++r.hypoCount;
    }
    if (r.total) r.hypoLoad = static_cast<double>(r.hypoCount) / static_cast<double>(r.total);
    out.push_back(r);
  }
  return out;
}

std::vector<double> subregion_features(const GrayImage& image, const Tessellation& tess,
                                       double threshold) {
  std::vector<double> out;
  for (const auto& r : subregion_counts(image, tess, threshold)) out.push_back(r.hypoLoad);
  return out;
}

}  // namespace hypoquant

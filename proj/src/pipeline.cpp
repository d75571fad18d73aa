#include "hypoquant/pipeline.hpp"

#include "hypoquant/parallel.hpp"

namespace hypoquant {

std::vector<double> BinaryOutcome::hypo_loads() const {
  std::vector<double> out;
  out.reserve(results.size());
  for (const auto& r : results) out.push_back(r.hypoLoad);
  return out;
}

std::vector<std::vector<double>> BinaryOutcome::band_features() const {
  std::vector<std::vector<double>> out;
  out.reserve(bandCounts.size());
  for (const auto& bands : bandCounts) {
    std::vector<double> f;
    for (const auto& b : bands) f.push_back(b.hypoLoad);
    out.push_back(std::move(f));
  }
  return out;
}

GrayImage binary_value_image(const Subject& subject, const BinaryOptions& options) {
  if (options.mode == ThresholdMode::adaptive)
    return normalize_by_roi_mean(subject.image, subject.mask(options.hemisphere));
  return subject.image;
}

std::vector<HypoLoadResult> band_counts(const GrayImage& values, const Subject& subject,
                                        Hemisphere hemisphere, std::size_t bands, double threshold) {
  std::vector<Hemisphere> parts;
  if (hemisphere == Hemisphere::whole)
    parts = {Hemisphere::left, Hemisphere::right};
  else
    parts = {hemisphere};
  std::vector<HypoLoadResult> pooled(bands, HypoLoadResult{subject.id, threshold, 0, 0, 0.0});
  for (Hemisphere h : parts) {
    auto counts = subregion_counts(values, tessellate(subject.mask(h), bands), threshold);
    for (std::size_t i = 0; i < bands; ++i) {
      pooled[i].hypoCount += counts[i].hypoCount;
      pooled[i].total += counts[i].total;
    }
  }
  for (auto& b : pooled)
    if (b.total) b.hypoLoad = static_cast<double>(b.hypoCount) / static_cast<double>(b.total);
  return pooled;
}

BinaryOutcome run_binary(const Dataset& dataset, const BinaryOptions& options) {
  if (dataset.size() < 2) throw DataError("binary description needs at least 2 subjects");
  const std::size_t n = dataset.size();
  std::vector<GrayImage> valueImages(n);
  std::vector<std::vector<double>> roiValues(n);
  parallel_for(n, options.threads, [&](std::size_t i) {
    const auto& s = dataset.subjects[i];
    valueImages[i] = binary_value_image(s, options);
    roiValues[i] = extract_roi(valueImages[i], s.mask(options.hemisphere)).values;
  });

  BinaryOutcome out;
  std::vector<double> thresholds(n, 0.0);
  if (options.mode == ThresholdMode::adaptive) {
    auto labels = dataset.labels();
    std::vector<LabeledValues> labeled;
    labeled.reserve(n);
    for (std::size_t i = 0; i < n; ++i)
      labeled.push_back({dataset.subjects[i].id, roiValues[i], labels[i]});
    out.report = adaptive_threshold_select(labeled, options.candidates, options.threads);
    thresholds.assign(n, out.report->chosen());
  } else {
    if (!options.referenceRect) throw DataError("reference threshold mode needs a reference rectangle");
    for (std::size_t i = 0; i < n; ++i) {
      auto stats = reference_region_stats(dataset.subjects[i].image, *options.referenceRect);
      thresholds[i] = reference_threshold(stats.mean, stats.std);
    }
  }

  out.results.resize(n);
  if (options.tessellation > 0) out.bandCounts.resize(n);
  parallel_for(n, options.threads, [&](std::size_t i) {
    const auto& s = dataset.subjects[i];
    out.results[i] = hypo_load(roiValues[i], thresholds[i], s.id);
    if (options.tessellation > 0)
      out.bandCounts[i] = band_counts(valueImages[i], s, options.hemisphere, options.tessellation,
                                      thresholds[i]);
  });
  out.ranking = ranking_from_scores(dataset.ids(), out.hypo_loads(), true);
  return out;
}

std::vector<RoiVector> sample_rows(const Dataset& dataset, const NonbinaryOptions& options) {
  const std::size_t length = min_roi_size(dataset, options.hemisphere);
  std::vector<RoiVector> rows(dataset.size());
  parallel_for(dataset.size(), options.threads, [&](std::size_t i) {
    const auto& s = dataset.subjects[i];
    NormalizedImage normalized = normalize_intensity(s.image);
    RoiIntensities roi = extract_roi(normalized.image(), s.mask(options.hemisphere));
    if (options.rowNormalization == RowNormalization::roi) roi.values = normalize_roi(roi.values);
    rows[i] = options.sampling == SamplingMethod::shuffle
                  ? raster_shuffle_sample(roi, length, options.seed, s.id)
                  : balanced_sample(roi.values, length, s.id);
  });
  return rows;
}

NonbinaryOutcome run_nonbinary(const Dataset& dataset, const NonbinaryOptions& options,
                               std::span<const double> hypoLoads) {
  if (dataset.size() < 2) throw DataError("nonbinary description needs at least 2 subjects");
  if (hypoLoads.size() != dataset.size()) throw DataError("need one HypoLoad per subject");
  NonbinaryOutcome out;
  out.rows = sample_rows(dataset, options);
  out.sampleLength = out.rows.front().values.size();
  out.model = fit_pca(out.rows, options.varianceFraction);
  if (out.model.degenerate)
    throw DataError("PCA model is degenerate: every sampled ROI row is identical");
  out.projections.resize(out.rows.size());
  parallel_for(out.rows.size(), options.threads, [&](std::size_t i) {
    out.projections[i] = project(out.model, out.rows[i].values, out.rows[i].subjectId);
  });
  out.result = nonbinary_rank(out.projections, hypoLoads);
  return out;
}

Clustering ground_truth(const Dataset& dataset) {
  return clustering_from_labels(dataset.ids(), dataset.labels());
}

}  // namespace hypoquant

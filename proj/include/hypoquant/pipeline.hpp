#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "hypoquant/binary_descriptor.hpp"
#include "hypoquant/dataset_io.hpp"
#include "hypoquant/eigen.hpp"
#include "hypoquant/preprocess.hpp"
#include "hypoquant/sampling.hpp"
#include "hypoquant/stats.hpp"

namespace hypoquant {

enum class ThresholdMode { reference, adaptive };

/// Optional per-row normalization before PCA: none, or (v - mean) / mean.
enum class RowNormalization { none, roi };

struct BinaryOptions {
  Hemisphere hemisphere = Hemisphere::whole;
  ThresholdMode mode = ThresholdMode::adaptive;
  std::size_t candidates = 101;
  std::optional<Rect> referenceRect;  // required in reference mode
  std::size_t tessellation = 0;       // band count; 0 skips band features
  unsigned threads = 1;
};

/// Binary description of a dataset. In adaptive mode every value is
/// ROI-normalized and one threshold applies to all subjects; in reference
/// mode each subject uses mean - std of its own reference rectangle on the
/// raw image.
struct BinaryOutcome {
  std::vector<HypoLoadResult> results;  // dataset order
  std::optional<ThresholdReport> report;
  std::vector<std::vector<HypoLoadResult>> bandCounts;  // per subject, when tessellating
  Ranking ranking;                                      // ascending HypoLoad

  std::vector<double> hypo_loads() const;
  std::vector<std::vector<double>> band_features() const;
};

BinaryOutcome run_binary(const Dataset& dataset, const BinaryOptions& options);

/// Image in the value space the binary thresholds refer to.
GrayImage binary_value_image(const Subject& subject, const BinaryOptions& options);

/// Pooled band counts: each hemisphere is tessellated around its own
/// center; for the whole brain band i pools left band i and right band i.
std::vector<HypoLoadResult> band_counts(const GrayImage& values, const Subject& subject,
                                        Hemisphere hemisphere, std::size_t bands, double threshold);

struct NonbinaryOptions {
  Hemisphere hemisphere = Hemisphere::whole;
  SamplingMethod sampling = SamplingMethod::balanced;
  std::uint64_t seed = 42;
  double varianceFraction = 0.70;
  RowNormalization rowNormalization = RowNormalization::none;
  unsigned threads = 1;
};

struct NonbinaryOutcome {
  std::size_t sampleLength = 0;
  std::vector<RoiVector> rows;
  EigenModel model;
  std::vector<Projection> projections;
  NonbinaryResult result;
};

/// Sampled ROI rows of every subject: intensity-normalized image, ROI in
/// raster order, optional row normalization, then sampling to the
/// smallest ROI size.
std::vector<RoiVector> sample_rows(const Dataset& dataset, const NonbinaryOptions& options);

/// Fits PCA on the sampled rows and ranks subjects by eigenspace distance
/// to the subject with the highest HypoLoad.
NonbinaryOutcome run_nonbinary(const Dataset& dataset, const NonbinaryOptions& options,
                               std::span<const double> hypoLoads);

/// Ground truth clustering of a fully labeled dataset.
Clustering ground_truth(const Dataset& dataset);

}  // namespace hypoquant

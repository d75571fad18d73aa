#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <vector>

#include "hypoquant/dataset_io.hpp"
#include "hypoquant/preprocess.hpp"
#include "hypoquant/stats.hpp"

namespace hypoquant {

struct Ellipse {
  double centerRow = 0.0;
  double centerCol = 0.0;
  double radiusRows = 1.0;
  double radiusCols = 1.0;
};

/// Synthetic study: every subject gets two elliptical ROIs on a noisy
/// tissue background, and a contiguous dark blob covering a planted
/// fraction of each ROI.
struct PhantomSpec {
  std::size_t subjectCount = 30;
  int width = 64;
  int height = 64;
  Ellipse left{32.0, 20.0, 12.0, 8.0};
  Ellipse right{32.0, 44.0, 12.0, 8.0};
  double baseIntensity = 1000.0;
  double darkDelta = 600.0;
  double noiseSigma = 60.0;
  /// Strictly increasing, in [0, 1). Empty means evenly spaced over
  /// [0, maxFraction].
  std::vector<double> fractions;
  double maxFraction = 0.6;
  /// Border width (pixels) held near zero intensity, standing in for the
  /// air around the head so every image spans a comparable range.
  int airMargin = 4;
  /// Per-subject integer jitter of ellipse radii, giving personalized ROI sizes.
  int radiusJitter = 0;
  int maxval = 4095;
  std::uint64_t seed = 42;

  std::vector<double> resolved_fractions() const;
  /// Rescales the default ellipse layout (designed for 64x64) to the
  /// current width and height.
  void fit_geometry();
  /// Tissue-only rectangle between the ROIs, usable as a reference region.
  Rect reference_rect() const;
  bool separable() const { return darkDelta > 3.0 * noiseSigma; }
  void validate() const;
};

struct PhantomData {
  Dataset dataset;            // subjects in a seeded shuffled order
  std::vector<double> subjectFractions;  // planted fraction per dataset subject
  Ranking planted;            // light -> dark (ascending fraction)
  Clustering plantedClusters; // terciles of the planted ranking, remainder dark
  std::vector<double> fractions;  // planted order (ascending)
  /// Blob pixel counts per dataset subject: [left, right].
  std::vector<std::array<std::size_t, 2>> blobCounts;
};

/// Planted tercile sizes: floor(n/3) light and mid, the rest dark.
ClusterSizes tercile_sizes(std::size_t n);

std::vector<Pixel> ellipse_pixels(const Ellipse& e, int width, int height);

/// First `count` ROI pixels reached by a 4-connected breadth-first search
/// from `seed`. Throws if the ROI component holds fewer pixels.
std::vector<Pixel> grow_blob(const RoiMask& roi, Pixel seed, std::size_t count);

PhantomData generate_phantom(const PhantomSpec& spec);

/// Writes manifest.json, images/, masks/, planted_ranking.csv and
/// planted_clusters.csv under `outDir` and returns the in-memory data.
PhantomData write_phantom(const PhantomSpec& spec, const std::filesystem::path& outDir);

}  // namespace hypoquant

#pragma once

#include <span>
#include <vector>

#include "hypoquant/types.hpp"

namespace hypoquant {

/// Image whose intensities were min-max mapped onto [0, 255].
class NormalizedImage {
 public:
  explicit NormalizedImage(GrayImage image) : image_(std::move(image)) {}
  const GrayImage& image() const { return image_; }
  operator const GrayImage&() const { return image_; }

 private:
  GrayImage image_;
};

/// ROI pixel values with their coordinates, in raster order.
struct RoiIntensities {
  std::vector<double> values;
  std::vector<Pixel> coords;

  std::size_t size() const { return values.size(); }
};

struct Rect {
  int row0 = 0;
  int col0 = 0;
  int rows = 1;
  int cols = 1;
};

struct RegionStats {
  double mean = 0.0;
  double std = 0.0;  // population (divide by N)
};

/// Affine map of the image's own [min, max] onto [0, 255]; a constant image
/// maps to all zeros.
NormalizedImage normalize_intensity(const GrayImage& image);

/// (v - mean) / mean for every value. Throws DataError on a zero mean.
std::vector<double> normalize_roi(std::span<const double> values);

RoiIntensities extract_roi(const GrayImage& image, const RoiMask& mask);

RegionStats reference_region_stats(const GrayImage& image, const Rect& rect);

/// Whole image mapped through v -> (v - m) / m with m the mean over `mask`,
/// so thresholds on ROI-normalized values can be applied per pixel.
GrayImage normalize_by_roi_mean(const GrayImage& image, const RoiMask& mask);

}  // namespace hypoquant

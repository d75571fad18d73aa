#include "hypoquant/preprocess.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace hypoquant {

NormalizedImage normalize_intensity(const GrayImage& image) {
  const auto& px = image.pixels();
  auto [lo_it, hi_it] = std::minmax_element(px.begin(), px.end());
  double lo = *lo_it;
  double hi = *hi_it;
  std::vector<double> out(px.size(), 0.0);
  if (hi > lo) {
    double range = hi - lo;
    for (std::size_t i = 0; i < px.size(); ++i)
      out[i] = px[i] == hi ? 255.0 : (px[i] - lo) * 255.0 / range;
  }
  return NormalizedImage(GrayImage(image.width(), image.height(), std::move(out)));
}

namespace {

double mean_of(std::span<const double> values) {
  double sum = 0.0;
  for (double v : values) sum += v;
  return sum / static_cast<double>(values.size());
}

}  // namespace

std::vector<double> normalize_roi(std::span<const double> values) {
  if (values.empty()) throw DataError("cannot normalize an empty ROI");
  double mean = mean_of(values);
  if (mean == 0.0) throw DataError("ROI mean is zero; (v - mean) / mean is undefined");
  std::vector<double> out;
  out.reserve(values.size());
  for (double v : values) out.push_back((v - mean) / mean);
  return out;
}

RoiIntensities extract_roi(const GrayImage& image, const RoiMask& mask) {
  if (!mask.matches(image))
    throw DataError("mask is " + std::to_string(mask.width()) + "x" +
                    std::to_string(mask.height()) + " but image is " +
                    std::to_string(image.width()) + "x" + std::to_string(image.height()));
  RoiIntensities out;
  out.values.reserve(mask.size());
  out.coords = mask.members();
  for (const Pixel& p : out.coords) out.values.push_back(image.at(p));
  return out;
}

RegionStats reference_region_stats(const GrayImage& image, const Rect& rect) {
  if (rect.rows < 1 || rect.cols < 1 || rect.row0 < 0 || rect.col0 < 0 ||
      rect.row0 + rect.rows > image.height() || rect.col0 + rect.cols > image.width())
    throw DataError("reference rectangle (" + std::to_string(rect.row0) + "," +
                    std::to_string(rect.col0) + "," + std::to_string(rect.rows) + "," +
                    std::to_string(rect.cols) + ") exceeds " + std::to_string(image.width()) +
                    "x" + std::to_string(image.height()) + " image");
  std::vector<double> values;
  values.reserve(static_cast<std::size_t>(rect.rows) * static_cast<std::size_t>(rect.cols));
  for (int r = rect.row0; r < rect.row0 + rect.rows; ++r)
    for (int c = rect.col0; c < rect.col0 + rect.cols; ++c) values.push_back(image.at(r, c));
  RegionStats s;
  s.mean = mean_of(values);
  double ss = 0.0;
  for (double v : values) ss += (v - s.mean) * (v - s.mean);
  s.std = std::sqrt(ss / static_cast<double>(values.size()));
  return s;
}

GrayImage normalize_by_roi_mean(const GrayImage& image, const RoiMask& mask) {
  auto roi = extract_roi(image, mask);
  double mean = mean_of(roi.values);
  if (mean == 0.0) throw DataError("ROI mean is zero; (v - mean) / mean is undefined");
  std::vector<double> out;
  out.reserve(image.size());
  for (double v : image.pixels()) out.push_back((v - mean) / mean);
  return GrayImage(image.width(), image.height(), std::move(out));
}

}  // namespace hypoquant

#include "hypoquant/types.hpp"

#include <algorithm>
#include <cmath>
#include <iterator>

namespace hypoquant {

std::string_view to_string(Hemisphere h) {
  switch (h) {
    case Hemisphere::left: return "left";
    case Hemisphere::right: return "right";
    case Hemisphere::whole: return "whole";
  }
  return "whole";
}

Hemisphere parse_hemisphere(std::string_view s) {
  if (s == "left") return Hemisphere::left;
  if (s == "right") return Hemisphere::right;
  if (s == "whole") return Hemisphere::whole;
  throw DataError("unknown hemisphere '" + std::string(s) + "'");
}

std::string_view to_string(Cluster c) {
  switch (c) {
    case Cluster::light: return "light";
    case Cluster::mid: return "mid";
    case Cluster::dark: return "dark";
  }
  return "light";
}

std::optional<Cluster> parse_cluster(std::string_view s) {
  if (s == "light") return Cluster::light;
  if (s == "mid") return Cluster::mid;
  if (s == "dark") return Cluster::dark;
  return std::nullopt;
}

std::size_t ClusterSizes::of(Cluster c) const {
  switch (c) {
    case Cluster::light: return light;
    case Cluster::mid: return mid;
    case Cluster::dark: return dark;
  }
  return 0;
}

GrayImage::GrayImage(int width, int height, std::vector<double> pixels)
    : width_(width), height_(height), pixels_(std::move(pixels)) {
  if (width < 1 || height < 1)
    throw DataError("image dimensions must be positive, got " + std::to_string(width) +
                    "x" + std::to_string(height));
  if (pixels_.size() != static_cast<std::size_t>(width) * static_cast<std::size_t>(height))
    throw DataError("pixel count " + std::to_string(pixels_.size()) + " does not match " +
                    std::to_string(width) + "x" + std::to_string(height));
  for (double v : pixels_)
    if (!std::isfinite(v)) throw DataError("image contains a non-finite intensity");
}

GrayImage::GrayImage(int width, int height, double fill)
    : GrayImage(width, height,
                std::vector<double>(static_cast<std::size_t>(std::max(width, 0)) *
                                        static_cast<std::size_t>(std::max(height, 0)),
                                    fill)) {}

RoiMask::RoiMask(int width, int height, std::vector<Pixel> members, Hemisphere hemisphere)
    : width_(width), height_(height), members_(std::move(members)), hemisphere_(hemisphere) {
  if (members_.empty()) throw DataError("ROI mask is empty");
  std::sort(members_.begin(), members_.end());
  members_.erase(std::unique(members_.begin(), members_.end()), members_.end());
  for (const Pixel& p : members_)
    if (p.row < 0 || p.col < 0 || p.row >= height_ || p.col >= width_)
      throw DataError("ROI coordinate (" + std::to_string(p.row) + "," +
                      std::to_string(p.col) + ") outside " + std::to_string(width_) + "x" +
                      std::to_string(height_) + " grid");
}

RoiMask RoiMask::merge(const RoiMask& left, const RoiMask& right) {
  if (left.width_ != right.width_ || left.height_ != right.height_)
    throw DataError("cannot merge masks of different dimensions");
  std::vector<Pixel> merged;
  merged.reserve(left.size() + right.size());
  std::set_union(left.members_.begin(), left.members_.end(), right.members_.begin(),
                 right.members_.end(), std::back_inserter(merged));
  return RoiMask(left.width_, left.height_, std::move(merged), Hemisphere::whole);
}

}  // namespace hypoquant

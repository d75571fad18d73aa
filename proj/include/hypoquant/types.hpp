#pragma once

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace hypoquant {

/// Base class for every error raised on bad input data.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed file content (bad header, truncated payload, bad JSON).
class FormatError : public Error {
 public:
  using Error::Error;
};

/// Well-formed input that violates a precondition of an operation.
class DataError : public Error {
 public:
  using Error::Error;
};

struct Pixel {
  int row = 0;
  int col = 0;

  friend bool operator==(const Pixel&, const Pixel&) = default;
  friend auto operator<=>(const Pixel&, const Pixel&) = default;  // raster order
};

enum class Hemisphere { left, right, whole };

std::string_view to_string(Hemisphere h);
Hemisphere parse_hemisphere(std::string_view s);

/// Ground-truth darkness category. Two-cluster studies use only light/dark.
enum class Cluster { light, mid, dark };

std::string_view to_string(Cluster c);
std::optional<Cluster> parse_cluster(std::string_view s);

/// Cluster cardinalities in light, mid, dark order. mid == 0 means a
/// two-cluster (light/dark) study.
struct ClusterSizes {
  std::size_t light = 0;
  std::size_t mid = 0;
  std::size_t dark = 0;

  std::size_t total() const { return light + mid + dark; }
  bool two_cluster() const { return mid == 0; }
  std::size_t of(Cluster c) const;

  friend bool operator==(const ClusterSizes&, const ClusterSizes&) = default;
};

/// Single-slice grayscale image, row-major, finite intensities.
class GrayImage {
 public:
  GrayImage() = default;
  GrayImage(int width, int height, std::vector<double> pixels);
  GrayImage(int width, int height, double fill = 0.0);

  int width() const { return width_; }
  int height() const { return height_; }
  std::size_t size() const { return pixels_.size(); }

  double at(int row, int col) const { return pixels_[index(row, col)]; }
  double& at(int row, int col) { return pixels_[index(row, col)]; }
  double at(Pixel p) const { return at(p.row, p.col); }

  bool contains(Pixel p) const {
    return p.row >= 0 && p.col >= 0 && p.row < height_ && p.col < width_;
  }

  const std::vector<double>& pixels() const { return pixels_; }

 private:
  std::size_t index(int row, int col) const {
    return static_cast<std::size_t>(row) * static_cast<std::size_t>(width_) +
           static_cast<std::size_t>(col);
  }

  int width_ = 0;
  int height_ = 0;
  std::vector<double> pixels_;
};

/// Region of interest on an image grid. Members are unique and kept in
/// raster order.
class RoiMask {
 public:
  RoiMask() = default;
  RoiMask(int width, int height, std::vector<Pixel> members, Hemisphere hemisphere);

  int width() const { return width_; }
  int height() const { return height_; }
  Hemisphere hemisphere() const { return hemisphere_; }
  const std::vector<Pixel>& members() const { return members_; }
  std::size_t size() const { return members_.size(); }

  bool matches(const GrayImage& image) const {
    return image.width() == width_ && image.height() == height_;
  }

  static RoiMask merge(const RoiMask& left, const RoiMask& right);

 private:
  int width_ = 0;
  int height_ = 0;
  std::vector<Pixel> members_;
  Hemisphere hemisphere_ = Hemisphere::whole;
};

}  // namespace hypoquant

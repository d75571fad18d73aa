#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "hypoquant/types.hpp"

namespace hypoquant {

struct Subject {
  std::string id;
  GrayImage image;
  std::map<Hemisphere, RoiMask> masks;
  std::optional<Cluster> label;

  const RoiMask& mask(Hemisphere h) const;
};

struct Dataset {
  std::vector<Subject> subjects;
  /// Present only when every subject carries a label.
  std::optional<ClusterSizes> clusterSizes;

  std::size_t size() const { return subjects.size(); }
  std::vector<std::string> ids() const;
  /// Ground-truth labels in subject order; throws if any subject is unlabeled.
  std::vector<Cluster> labels() const;
};

/// Builds a Dataset from in-memory subjects, validating ids and masks and
/// deriving clusterSizes exactly as load_manifest does.
Dataset make_dataset(std::vector<Subject> subjects);

/// Binary PGM (P5). 8-bit or 16-bit big-endian samples, read verbatim.
GrayImage decode_pgm(std::span<const std::uint8_t> bytes);
GrayImage load_pgm(const std::filesystem::path& path);

/// Writes P5 with the given maxval. Samples must be integers in [0, maxval].
std::vector<std::uint8_t> encode_pgm(const GrayImage& image, int maxval);
void save_pgm(const std::filesystem::path& path, const GrayImage& image, int maxval);

/// Mask from P5 (nonzero = ROI) or P4 (set bit = ROI).
RoiMask decode_mask(std::span<const std::uint8_t> bytes, const GrayImage& image,
                    Hemisphere hemisphere = Hemisphere::whole);
RoiMask load_mask(const std::filesystem::path& path, const GrayImage& image,
                  Hemisphere hemisphere = Hemisphere::whole);

/// Stores a mask as 8-bit P5 with ROI = 255.
void save_mask(const std::filesystem::path& path, const RoiMask& mask);

/// JSON manifest: {"subjects":[{"id","image","roi_left","roi_right","label"?}]}
/// with file paths relative to the manifest's directory.
Dataset load_manifest(const std::filesystem::path& path);

std::vector<std::uint8_t> read_binary_file(const std::filesystem::path& path);

}  // namespace hypoquant

#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "hypoquant/dataset_io.hpp"
#include "hypoquant/preprocess.hpp"

namespace hypoquant {

enum class SamplingMethod { shuffle, balanced };

std::string_view to_string(SamplingMethod m);
SamplingMethod parse_sampling(std::string_view s);

/// Fixed-length ROI description of one subject; one row of the PCA matrix.
struct RoiVector {
  std::string subjectId;
  std::vector<double> values;
  SamplingMethod method = SamplingMethod::balanced;
  std::uint64_t seed = 0;  // shuffle only
};

/// Smallest ROI over the dataset for the given hemisphere.
std::size_t min_roi_size(const Dataset& dataset, Hemisphere hemisphere);

/// Seeded Fisher-Yates permutation of 0..n-1.
std::vector<std::size_t> shuffled_indices(std::size_t n, std::uint64_t seed);

/// Keeps the first `length` entries of a permutation and sorts them
/// ascending, restoring raster order of the selected subset.
std::vector<std::size_t> take_sorted_prefix(std::span<const std::size_t> permutation,
                                            std::size_t length);

/// Raster-order subset of `length` pixels chosen by a seeded shuffle.
RoiVector raster_shuffle_sample(const RoiIntensities& roi, std::size_t length,
                                std::uint64_t seed, std::string subjectId = {});

/// Fractional raster positions k * (n - 1) / (length - 1), k = 0..length-1.
std::vector<double> balanced_positions(std::size_t n, std::size_t length);

/// Resamples the raster sequence at evenly spaced fractional positions with
/// linear interpolation between flanking pixels. First and last are kept.
RoiVector balanced_sample(std::span<const double> values, std::size_t length,
                          std::string subjectId = {});

}  // namespace hypoquant

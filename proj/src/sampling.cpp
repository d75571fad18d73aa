#include "hypoquant/sampling.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "hypoquant/rng.hpp"

namespace hypoquant {

std::string_view to_string(SamplingMethod m) {
  return m == SamplingMethod::shuffle ? "shuffle" : "balanced";
}

SamplingMethod parse_sampling(std::string_view s) {
  if (s == "shuffle") return SamplingMethod::shuffle;
  if (s == "balanced") return SamplingMethod::balanced;
  throw DataError("unknown sampling method '" + std::string(s) + "'");
}

std::size_t min_roi_size(const Dataset& dataset, Hemisphere hemisphere) {
  if (dataset.subjects.empty()) throw DataError("dataset has no subjects");
  std::size_t best = std::numeric_limits<std::size_t>::max();
  for (const auto& s : dataset.subjects) best = std::min(best, s.mask(hemisphere).size());
  return best;
}

std::vector<std::size_t> shuffled_indices(std::size_t n, std::uint64_t seed) {
  std::vector<std::size_t> idx(n);
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  Rng rng(seed);
  for (std::size_t i = n; i > 1; --i) {
    auto j = static_cast<std::size_t>(rng.below(i));
    std::swap(idx[i - 1], idx[j]);
  }
  return idx;
}

std::vector<std::size_t> take_sorted_prefix(std::span<const std::size_t> permutation,
                                            std::size_t length) {
  if (length > permutation.size())
    throw DataError("cannot select " + std::to_string(length) + " of " +
                    std::to_string(permutation.size()) + " entries");
  std::vector<std::size_t> out(permutation.begin(),
                               permutation.begin() + static_cast<std::ptrdiff_t>(length));
  std::sort(out.begin(), out.end());
  return out;
}

RoiVector raster_shuffle_sample(const RoiIntensities& roi, std::size_t length,
                                std::uint64_t seed, std::string subjectId) {
  if (length < 1 || length > roi.size())
    throw DataError("shuffle sampling needs 1 <= L <= " + std::to_string(roi.size()) +
                    ", got L = " + std::to_string(length));
  auto perm = shuffled_indices(roi.size(), seed);
  auto picked = take_sorted_prefix(perm, length);
  RoiVector out{std::move(subjectId), {}, SamplingMethod::shuffle, seed};
  out.values.reserve(length);
  for (std::size_t i : picked) out.values.push_back(roi.values[i]);
  return out;
}

std::vector<double> balanced_positions(std::size_t n, std::size_t length) {
  if (length < 2) throw DataError("balanced sampling needs L >= 2");
  if (length > n)
    throw DataError("balanced sampling never upsamples: L = " + std::to_string(length) +
                    " > " + std::to_string(n));
  std::vector<double> pos(length);
  // k * (n-1) is exact in integers; one division keeps every position correctly rounded.
  for (std::size_t k = 0; k < length; ++k)
    pos[k] = static_cast<double>(k * (n - 1)) / static_cast<double>(length - 1);
  return pos;
}

RoiVector balanced_sample(std::span<const double> values, std::size_t length,
                          std::string subjectId) {
  auto pos = balanced_positions(values.size(), length);
  RoiVector out{std::move(subjectId), {}, SamplingMethod::balanced, 0};
  out.values.reserve(length);
  for (double p : pos) {
    auto lo = static_cast<std::size_t>(std::floor(p));
    double frac = p - static_cast<double>(lo);
    if (frac == 0.0 || lo + 1 >= values.size()) {
      out.values.push_back(values[lo]);
    } else {
      out.values.push_back((1.0 - frac) * values[lo] + frac * values[lo + 1]);
    }
  }
  return out;
}

}  // namespace hypoquant

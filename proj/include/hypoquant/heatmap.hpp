#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <vector>

#include "hypoquant/csv.hpp"
#include "hypoquant/stats.hpp"

namespace hypoquant {

/// Linear ramp: -1 blue, 0 white, +1 red. Values are clamped to [-1, 1];
/// NaN (flagged) entries are mid gray.
std::array<std::uint8_t, 3> heat_color(double tau);

/// Binary PPM (P6), one 16x16 cell per matrix entry.
std::vector<std::uint8_t> render_heatmap_ppm(const CorrMatrix& m, int cellSize = 16);
void save_heatmap_ppm(const std::filesystem::path& path, const CorrMatrix& m);

/// Labeled CSV: header "feature,<col labels...>", one row per row label.
CsvTable correlation_table(const CorrMatrix& m);

}  // namespace hypoquant

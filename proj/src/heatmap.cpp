#include "hypoquant/heatmap.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <string>

#include "hypoquant/types.hpp"

namespace hypoquant {

std::array<std::uint8_t, 3> heat_color(double tau) {
  if (std::isnan(tau)) return {128, 128, 128};
  double t = std::clamp(tau, -1.0, 1.0);
  if (t < 0) {
    auto w = static_cast<std::uint8_t>(std::lround(255.0 * (1.0 + t)));
    return {w, w, 255};
  }
  auto w = static_cast<std::uint8_t>(std::lround(255.0 * (1.0 - t)));
  return {255, w, w};
}

std::vector<std::uint8_t> render_heatmap_ppm(const CorrMatrix& m, int cellSize) {
  const auto rows = static_cast<int>(m.rowLabels.size());
  const auto cols = static_cast<int>(m.colLabels.size());
  const int width = cols * cellSize, height = rows * cellSize;
  std::string header = "P6\n" + std::to_string(width) + " " + std::to_string(height) + "\n255\n";
  std::vector<std::uint8_t> out(header.begin(), header.end());
  out.reserve(out.size() + static_cast<std::size_t>(width) * static_cast<std::size_t>(height) * 3);
  for (int y = 0; y < height; ++y)
    for (int x = 0; x < width; ++x) {
      auto rgb = heat_color(m.at(static_cast<std::size_t>(y / cellSize),
                                 static_cast<std::size_t>(x / cellSize)));
      out.insert(out.end(), rgb.begin(), rgb.end());
    }
  return out;
}

void save_heatmap_ppm(const std::filesystem::path& path, const CorrMatrix& m) {
  auto bytes = render_heatmap_ppm(m);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot open '" + path.string() + "' for writing");
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
}

CsvTable correlation_table(const CorrMatrix& m) {
  std::vector<std::string> header{"feature"};
  header.insert(header.end(), m.colLabels.begin(), m.colLabels.end());
  CsvTable t(std::move(header));
  for (std::size_t r = 0; r < m.rowLabels.size(); ++r) {
    std::vector<std::string> row{m.rowLabels[r]};
    for (std::size_t c = 0; c < m.colLabels.size(); ++c)
      row.push_back(m.is_flagged(r, c) ? "nan" : format_real(m.at(r, c)));
    t.add_row(std::move(row));
  }
  return t;
}

}  // namespace hypoquant

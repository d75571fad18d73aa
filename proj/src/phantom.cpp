#include "hypoquant/phantom.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <numeric>

#include <json.hpp>

#include "hypoquant/csv.hpp"
#include "hypoquant/rng.hpp"

namespace hypoquant {

std::vector<double> PhantomSpec::resolved_fractions() const {
  if (!fractions.empty()) return fractions;
  std::vector<double> out(subjectCount, 0.0);
  for (std::size_t i = 0; i < subjectCount && subjectCount > 1; ++i)
    out[i] = maxFraction * static_cast<double>(i) / static_cast<double>(subjectCount - 1);
  return out;
}

void PhantomSpec::fit_geometry() {
  const PhantomSpec base;
  double sr = static_cast<double>(height) / base.height;
  double sc = static_cast<double>(width) / base.width;
  auto scale = [&](const Ellipse& e) {
    return Ellipse{e.centerRow * sr, e.centerCol * sc, e.radiusRows * sr, e.radiusCols * sc};
  };
  left = scale(base.left);
  right = scale(base.right);
}

Rect PhantomSpec::reference_rect() const {
  int rows = std::max(1, height / 8);
  int cols = std::max(1, width / 4);
  return Rect{airMargin + 2, (width - cols) / 2, rows, cols};
}

void PhantomSpec::validate() const {
  if (subjectCount < 1) throw DataError("phantom needs at least one subject");
  if (width < 8 || height < 8) throw DataError("phantom images must be at least 8x8");
  if (airMargin < 0 || 2 * airMargin >= std::min(width, height))
    throw DataError("air margin leaves no tissue");
  if (noiseSigma < 0 || darkDelta <= 0 || baseIntensity <= darkDelta)
    throw DataError("phantom intensities need 0 < darkDelta < baseIntensity and noiseSigma >= 0");
  if (maxval < 1 || maxval > 65535) throw DataError("maxval outside [1, 65535]");
  if (radiusJitter < 0) throw DataError("radius jitter must be non-negative");
  auto f = resolved_fractions();
  if (f.size() != subjectCount)
    throw DataError("phantom has " + std::to_string(subjectCount) + " subjects but " +
                    std::to_string(f.size()) + " fractions");
  for (std::size_t i = 0; i < f.size(); ++i) {
    if (!(f[i] >= 0.0 && f[i] < 1.0)) throw DataError("planted fractions must lie in [0, 1)");
    if (i > 0 && !(f[i] > f[i - 1])) throw DataError("planted fractions must be strictly increasing");
  }
  for (const Ellipse* e : {&left, &right}) {
    double rr = e->radiusRows + radiusJitter, rc = e->radiusCols + radiusJitter;
    if (e->radiusRows - radiusJitter < 1 || e->radiusCols - radiusJitter < 1 ||
        e->centerRow - rr < airMargin || e->centerRow + rr > height - 1 - airMargin ||
        e->centerCol - rc < airMargin || e->centerCol + rc > width - 1 - airMargin)
      throw DataError("ROI ellipse does not fit inside the tissue area");
  }
}

ClusterSizes tercile_sizes(std::size_t n) {
  ClusterSizes s;
  s.light = n / 3;
  s.mid = n / 3;
  s.dark = n - s.light - s.mid;
  return s;
}

std::vector<Pixel> ellipse_pixels(const Ellipse& e, int width, int height) {
  std::vector<Pixel> out;
  for (int r = 0; r < height; ++r)
    for (int c = 0; c < width; ++c) {
      double dr = (r - e.centerRow) / e.radiusRows;
      double dc = (c - e.centerCol) / e.radiusCols;
      if (dr * dr + dc * dc <= 1.0) out.push_back({r, c});
    }
  return out;
}

std::vector<Pixel> grow_blob(const RoiMask& roi, Pixel seed, std::size_t count) {
  const auto& members = roi.members();
  if (!std::binary_search(members.begin(), members.end(), seed))
    throw DataError("blob seed lies outside the ROI");
  std::vector<char> visited(static_cast<std::size_t>(roi.width()) * roi.height(), 0);
  auto key = [&](Pixel p) { return static_cast<std::size_t>(p.row) * roi.width() + p.col; };
  std::vector<Pixel> blob;
  if (count == 0) return blob;
  std::deque<Pixel> queue{seed};
  visited[key(seed)] = 1;
  constexpr int dr[] = {-1, 0, 0, 1};
  constexpr int dc[] = {0, -1, 1, 0};
  while (!queue.empty() && blob.size() < count) {
    Pixel p = queue.front();
    queue.pop_front();
    blob.push_back(p);
    for (int k = 0; k < 4; ++k) {
      Pixel q{p.row + dr[k], p.col + dc[k]};
      if (q.row < 0 || q.col < 0 || q.row >= roi.height() || q.col >= roi.width()) continue;
      if (visited[key(q)] || !std::binary_search(members.begin(), members.end(), q)) continue;
      visited[key(q)] = 1;
      queue.push_back(q);
    }
  }
  if (blob.size() < count)
    throw DataError("blob of " + std::to_string(count) + " pixels is unrealizable: connected ROI holds " +
                    std::to_string(blob.size()));
  return blob;
}

PhantomData generate_phantom(const PhantomSpec& spec) {
  spec.validate();
  PhantomData out;
  out.fractions = spec.resolved_fractions();
  const std::size_t n = spec.subjectCount;
  const auto digits = std::to_string(n).size();

  // Manifest order is a seeded permutation of the planted order, so no
  // dataset-order tie-break can reproduce the ground truth by accident.
  std::vector<std::size_t> plantedRank(n);
  {
    std::vector<std::size_t> perm(n);
    std::iota(perm.begin(), perm.end(), std::size_t{0});
    Rng order(Rng::splitmix64(spec.seed ^ 0xA5A5A5A5A5A5A5A5ull));
    for (std::size_t i = n; i > 1; --i) std::swap(perm[i - 1], perm[order.below(i)]);
    plantedRank = perm;
  }
  std::vector<double> subjectFraction(n);
  for (std::size_t i = 0; i < n; ++i) subjectFraction[i] = out.fractions[plantedRank[i]];

  std::vector<Subject> subjects;
  for (std::size_t i = 0; i < n; ++i) {
    Rng rng = Rng::stream(spec.seed, i);
    std::string id = std::to_string(i + 1);
    id = "s" + std::string(digits > id.size() ? digits - id.size() : 0, '0') + id;

    // Radii jitter is drawn first, once per subject, shared by both hemispheres.
    double jitter = 0.0;
    if (spec.radiusJitter > 0)
      jitter = static_cast<double>(rng.below(2 * static_cast<std::uint64_t>(spec.radiusJitter) + 1)) -
               spec.radiusJitter;
    auto shape = [&](Ellipse e) {
      e.radiusRows += jitter;
      e.radiusCols += jitter;
      return e;
    };
    RoiMask left(spec.width, spec.height, ellipse_pixels(shape(spec.left), spec.width, spec.height),
                 Hemisphere::left);
    RoiMask right(spec.width, spec.height,
                  ellipse_pixels(shape(spec.right), spec.width, spec.height), Hemisphere::right);

    std::vector<char> dark(static_cast<std::size_t>(spec.width) * spec.height, 0);
    std::array<std::size_t, 2> counts{};
    int side = 0;
    for (const auto* roi : {&left, &right}) {
      const Ellipse& e = side == 0 ? spec.left : spec.right;
      Pixel seed{static_cast<int>(std::lround(e.centerRow)), static_cast<int>(std::lround(e.centerCol))};
      auto want = static_cast<std::size_t>(std::lround(subjectFraction[i] * static_cast<double>(roi->size())));
      for (const Pixel& p : grow_blob(*roi, seed, want))
        dark[static_cast<std::size_t>(p.row) * spec.width + p.col] = 1;
      counts[static_cast<std::size_t>(side++)] = want;
    }
    out.blobCounts.push_back(counts);

    GrayImage image(spec.width, spec.height, 0.0);
    for (int r = 0; r < spec.height; ++r)
      for (int c = 0; c < spec.width; ++c) {
        bool air = r < spec.airMargin || c < spec.airMargin || r >= spec.height - spec.airMargin ||
                   c >= spec.width - spec.airMargin;
        double mean = air ? 0.0
                      : dark[static_cast<std::size_t>(r) * spec.width + c]
                          ? spec.baseIntensity - spec.darkDelta
                          : spec.baseIntensity;
        double v = mean + spec.noiseSigma * rng.gaussian();
        image.at(r, c) = std::clamp(std::round(v), 0.0, static_cast<double>(spec.maxval));
      }

    Subject s;
    s.id = id;
    s.image = std::move(image);
    s.masks.emplace(Hemisphere::left, std::move(left));
    s.masks.emplace(Hemisphere::right, std::move(right));
    subjects.push_back(std::move(s));
  }

  out.planted.orderedIds.resize(n);
  for (std::size_t i = 0; i < n; ++i) out.planted.orderedIds[plantedRank[i]] = subjects[i].id;
  out.plantedClusters = rank_to_clusters(out.planted, tercile_sizes(n));
  for (auto& s : subjects) s.label = out.plantedClusters.assignment.at(s.id);
  out.subjectFractions = subjectFraction;
  out.dataset = make_dataset(std::move(subjects));
  return out;
}

PhantomData write_phantom(const PhantomSpec& spec, const std::filesystem::path& outDir) {
  PhantomData data = generate_phantom(spec);
  std::filesystem::create_directories(outDir / "images");
  std::filesystem::create_directories(outDir / "masks");

  nlohmann::ordered_json manifest;
  manifest["subjects"] = nlohmann::ordered_json::array();
  for (const auto& s : data.dataset.subjects) {
    std::string image = "images/" + s.id + ".pgm";
    std::string roiLeft = "masks/" + s.id + "_left.pgm";
    std::string roiRight = "masks/" + s.id + "_right.pgm";
    save_pgm(outDir / image, s.image, spec.maxval);
    save_mask(outDir / roiLeft, s.mask(Hemisphere::left));
    save_mask(outDir / roiRight, s.mask(Hemisphere::right));
    nlohmann::ordered_json entry;
    entry["id"] = s.id;
    entry["image"] = image;
    entry["roi_left"] = roiLeft;
    entry["roi_right"] = roiRight;
    entry["label"] = std::string(to_string(*s.label));
    manifest["subjects"].push_back(std::move(entry));
  }
  write_text_file(outDir / "manifest.json", manifest.dump(2) + "\n");

  CsvTable ranking({"rank", "id", "fraction"});
  for (std::size_t i = 0; i < data.planted.orderedIds.size(); ++i)
    ranking.add_row({std::to_string(i + 1), data.planted.orderedIds[i], format_real(data.fractions[i])});
  ranking.write(outDir / "planted_ranking.csv");

  CsvTable clusters({"id", "cluster"});
  for (const auto& id : data.planted.orderedIds)
    clusters.add_row({id, std::string(to_string(data.plantedClusters.assignment.at(id)))});
  clusters.write(outDir / "planted_clusters.csv");
  return data;
}

}  // namespace hypoquant

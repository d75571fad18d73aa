#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <set>

#include "hypoquant/csv.hpp"
#include "hypoquant/phantom.hpp"
#include "hypoquant/pipeline.hpp"
#include "test_util.hpp"

using namespace hypoquant;

namespace {

PhantomSpec small_spec() {
  PhantomSpec s;
  s.subjectCount = 9;
  s.width = 32;
  s.height = 32;
  s.left = {16, 10, 6, 4};
  s.right = {16, 22, 6, 4};
  s.airMargin = 2;
  return s;
}

}  // namespace

TEST_CASE("tercile_sizes") {
  CHECK(tercile_sizes(30) == ClusterSizes{10, 10, 10});
  CHECK(tercile_sizes(10) == ClusterSizes{3, 3, 4});
  CHECK(tercile_sizes(2) == ClusterSizes{0, 0, 2});
}

TEST_CASE("grow_blob is connected and sized") {
  RoiMask roi(10, 10, ellipse_pixels({5, 5, 3, 3}, 10, 10), Hemisphere::left);
  for (std::size_t count : {0u, 1u, 5u, 20u}) {
    auto blob = grow_blob(roi, {5, 5}, count);
    CHECK(blob.size() == count);
    std::set<Pixel> s(blob.begin(), blob.end());
    CHECK(s.size() == count);
    for (std::size_t i = 1; i < blob.size(); ++i) {
      bool touches = false;
      for (std::size_t j = 0; j < i; ++j)
        touches |= std::abs(blob[i].row - blob[j].row) + std::abs(blob[i].col - blob[j].col) == 1;
      CHECK(touches);
    }
  }
  CHECK_THROWS_AS(grow_blob(roi, {5, 5}, roi.size() + 1), DataError);
  CHECK_THROWS_AS(grow_blob(roi, {0, 0}, 1), DataError);
}

TEST_CASE("generate_phantom is deterministic and planted correctly") {
  auto spec = small_spec();
  auto a = generate_phantom(spec);
  auto b = generate_phantom(spec);
  REQUIRE(a.dataset.subjects.size() == 9);
  for (std::size_t i = 0; i < 9; ++i) {
    CHECK(a.dataset.subjects[i].id == b.dataset.subjects[i].id);
    CHECK(a.dataset.subjects[i].image.pixels() == b.dataset.subjects[i].image.pixels());
  }
  CHECK(a.planted.orderedIds == b.planted.orderedIds);
  CHECK(a.planted.orderedIds != a.dataset.ids());  // manifest order is shuffled
  REQUIRE(a.dataset.clusterSizes);
  CHECK(*a.dataset.clusterSizes == ClusterSizes{3, 3, 3});

  for (std::size_t i = 0; i < 9; ++i) {
    const auto& s = a.dataset.subjects[i];
    auto rank = static_cast<std::size_t>(
        std::find(a.planted.orderedIds.begin(), a.planted.orderedIds.end(), s.id) -
        a.planted.orderedIds.begin());
    CHECK(a.subjectFractions[i] == a.fractions[rank]);
    auto want = static_cast<std::size_t>(std::lround(a.subjectFractions[i] * s.mask(Hemisphere::left).size()));
    CHECK(a.blobCounts[i][0] == want);
    for (double v : s.image.pixels()) {
      CHECK(v >= 0.0);
      CHECK(v <= spec.maxval);
      CHECK(v == std::round(v));
    }
  }

  auto spec2 = spec;
  spec2.seed = 43;
  auto c = generate_phantom(spec2);
  CHECK(c.dataset.subjects[0].image.pixels() != a.dataset.subjects[0].image.pixels());
}

TEST_CASE("phantom spec validation") {
  auto s = small_spec();
  s.fractions = {0.1, 0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8};
  CHECK_THROWS_AS(generate_phantom(s), DataError);
  s = small_spec();
  s.fractions = {0.1};
  CHECK_THROWS_AS(generate_phantom(s), DataError);
  s = small_spec();
  s.left = {16, 2, 6, 4};
  CHECK_THROWS_AS(generate_phantom(s), DataError);
  CHECK(PhantomSpec{}.separable());
  Rect r = PhantomSpec{}.reference_rect();
  CHECK(r.row0 == 6);
  CHECK(r.col0 == 24);
  CHECK(r.rows == 8);
  CHECK(r.cols == 16);
}

TEST_CASE("write_phantom round trips through the manifest") {
  TempDir dir("phantom");
  auto spec = small_spec();
  auto data = write_phantom(spec, dir.path());
  auto loaded = load_manifest(dir.path() / "manifest.json");
  REQUIRE(loaded.subjects.size() == data.dataset.subjects.size());
  for (std::size_t i = 0; i < loaded.subjects.size(); ++i) {
    CHECK(loaded.subjects[i].id == data.dataset.subjects[i].id);
    CHECK(loaded.subjects[i].image.pixels() == data.dataset.subjects[i].image.pixels());
    CHECK(loaded.subjects[i].mask(Hemisphere::whole).members() ==
          data.dataset.subjects[i].mask(Hemisphere::whole).members());
    CHECK(loaded.subjects[i].label == data.dataset.subjects[i].label);
  }
  auto ranking = read_csv(dir.path() / "planted_ranking.csv");
  CHECK(ranking.header() == std::vector<std::string>{"rank", "id", "fraction"});
  CHECK(ranking.rows().size() == 9);
}

TEST_CASE("pipeline recovers the planted ordering on a small phantom") {
  auto spec = small_spec();
  auto data = generate_phantom(spec);
  BinaryOptions bo;
  auto bin = run_binary(data.dataset, bo);
  CHECK(kendall_tau(bin.ranking.orderedIds, data.planted.orderedIds).tau() >= 0.8);
  CHECK(accuracy(rank_to_clusters(bin.ranking, *data.dataset.clusterSizes), data.plantedClusters).accuracy >=
        0.8);

  NonbinaryOptions no;
  auto nb = run_nonbinary(data.dataset, no, bin.hypo_loads());
  CHECK(nb.model.retained >= 1);
  CHECK(kendall_tau(nb.result.ranking.orderedIds, data.planted.orderedIds).tau() >= 0.7);
}

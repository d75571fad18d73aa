#include <doctest.h>

#include <cmath>
#include <random>

#include "hypoquant/preprocess.hpp"

using namespace hypoquant;

TEST_CASE("normalize_intensity maps the image range onto [0, 255]") {
  GrayImage img(3, 1, std::vector<double>{0, 600, 1200});
  auto n = normalize_intensity(img).image();
  CHECK(n.at(0, 0) == 0.0);
  CHECK(n.at(0, 1) == doctest::Approx(127.5).epsilon(1e-15));  // 600 * 255 / 1200
  CHECK(n.at(0, 2) == 255.0);
}

TEST_CASE("normalize_intensity of a constant image is all zeros") {
  auto n = normalize_intensity(GrayImage(2, 2, 42.0)).image();
  for (double v : n.pixels()) CHECK(v == 0.0);
}

TEST_CASE("normalize_intensity is idempotent and hits both endpoints") {
  std::mt19937_64 gen(11);
  std::uniform_real_distribution<double> dist(-500.0, 3000.0);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<double> px(48);
    for (double& v : px) v = dist(gen);
    auto once = normalize_intensity(GrayImage(8, 6, px)).image();
    auto twice = normalize_intensity(once).image();
    auto [lo, hi] = std::minmax_element(once.pixels().begin(), once.pixels().end());
    CHECK(*lo == 0.0);
    CHECK(*hi == 255.0);
    for (std::size_t i = 0; i < px.size(); ++i) CHECK(std::abs(once.pixels()[i] - twice.pixels()[i]) <= 1e-12);
  }
}

TEST_CASE("normalize_roi") {
  SUBCASE("constant ROI") {
    auto out = normalize_roi(std::vector<double>{100, 100, 100});
    CHECK(out == std::vector<double>{0, 0, 0});
  }
  SUBCASE("two values around mean 100") {
    auto out = normalize_roi(std::vector<double>{50, 150});
    CHECK(out == std::vector<double>{-0.5, 0.5});
  }
  SUBCASE("zero mean") { CHECK_THROWS_AS(normalize_roi(std::vector<double>{0, 0}), DataError); }
  SUBCASE("output mean is zero and order does not matter") {
    std::mt19937_64 gen(3);
    std::uniform_real_distribution<double> dist(1.0, 1000.0);
    for (int trial = 0; trial < 50; ++trial) {
      std::vector<double> v(37);
      for (double& x : v) x = dist(gen);
      auto out = normalize_roi(v);
      double mean = 0.0;
      for (double x : out) mean += x;
      CHECK(std::abs(mean / static_cast<double>(out.size())) <= 1e-12);

      std::vector<double> rev(v.rbegin(), v.rend());
      auto outRev = normalize_roi(rev);
      for (std::size_t i = 0; i < v.size(); ++i)
        CHECK(std::abs(outRev[v.size() - 1 - i] - out[i]) <= 1e-12);
    }
  }
}

TEST_CASE("extract_roi lists values in raster order") {
  GrayImage img(2, 2, std::vector<double>{1, 2, 3, 4});
  auto roi = extract_roi(img, RoiMask(2, 2, {{1, 0}, {0, 1}}, Hemisphere::whole));
  CHECK(roi.values == std::vector<double>{2, 3});
  CHECK(roi.coords == std::vector<Pixel>{{0, 1}, {1, 0}});

  auto full = extract_roi(img, RoiMask(2, 2, {{0, 0}, {0, 1}, {1, 0}, {1, 1}}, Hemisphere::whole));
  CHECK(full.values == img.pixels());

  CHECK_THROWS_AS(extract_roi(img, RoiMask(3, 3, {{0, 0}}, Hemisphere::whole)), DataError);
}

TEST_CASE("extract_roi values are a subsequence of the raster pixel list") {
  std::mt19937_64 gen(5);
  GrayImage img(7, 5, 0.0);
  for (int r = 0; r < 5; ++r)
    for (int c = 0; c < 7; ++c) img.at(r, c) = r * 7 + c;  // value == raster index
  std::vector<Pixel> members;
  for (int r = 0; r < 5; ++r)
    for (int c = 0; c < 7; ++c)
      if (gen() % 3 == 0) members.push_back({r, c});
  members.push_back({4, 6});
  std::shuffle(members.begin(), members.end(), gen);
  auto roi = extract_roi(img, RoiMask(7, 5, members, Hemisphere::whole));
  for (std::size_t i = 1; i < roi.values.size(); ++i) CHECK(roi.values[i] > roi.values[i - 1]);
}

TEST_CASE("reference_region_stats uses the population standard deviation") {
  GrayImage img(3, 2, std::vector<double>{90, 100, 110, 100, 100, 100});
  auto s = reference_region_stats(img, Rect{0, 0, 1, 3});
  CHECK(s.mean == doctest::Approx(100.0));
  CHECK(s.std == doctest::Approx(std::sqrt(200.0 / 3.0)).epsilon(1e-14));  // 8.164965...
  CHECK(s.std == doctest::Approx(8.164965).epsilon(1e-7));

  auto flat = reference_region_stats(img, Rect{1, 0, 1, 3});
  CHECK(flat.mean == 100.0);
  CHECK(flat.std == 0.0);

  GrayImage one(1, 1, 7.0);
  auto single = reference_region_stats(one, Rect{0, 0, 1, 1});
  CHECK(single.mean == 7.0);
  CHECK(single.std == 0.0);

  CHECK_THROWS_AS(reference_region_stats(img, Rect{1, 1, 2, 2}), DataError);
  CHECK_THROWS_AS(reference_region_stats(img, Rect{0, 0, 0, 1}), DataError);
}

TEST_CASE("normalize_by_roi_mean agrees with normalize_roi on the ROI") {
  GrayImage img(3, 1, std::vector<double>{50, 150, 400});
  RoiMask mask(3, 1, {{0, 0}, {0, 1}}, Hemisphere::whole);
  auto whole = normalize_by_roi_mean(img, mask);
  auto roi = normalize_roi(extract_roi(img, mask).values);
  CHECK(whole.at(0, 0) == roi[0]);
  CHECK(whole.at(0, 1) == roi[1]);
  CHECK(whole.at(0, 2) == doctest::Approx(3.0));
}

#include <doctest.h>

#include <algorithm>
#include <numeric>
#include <random>
#include <set>

#include "hypoquant/rng.hpp"
#include "hypoquant/sampling.hpp"

using namespace hypoquant;

namespace {

// Oracle: piecewise-linear interpolation written from scratch with
// long-double positions.
double interp_oracle(const std::vector<double>& v, std::size_t k, std::size_t length) {
  if (length == 1) return v[0];
  long double pos = static_cast<long double>(k) * (v.size() - 1) / (length - 1);
  auto lo = static_cast<std::size_t>(pos);
  if (lo + 1 >= v.size()) return v.back();
  long double w = pos - lo;
  return static_cast<double>((1 - w) * v[lo] + w * v[lo + 1]);
}

}  // namespace

TEST_CASE("take_sorted_prefix restores raster order of the chosen subset") {
  // 1-based permutation 8,2,1,6,7,12,10,11,9,5,3,4 with L = 8.
  std::vector<std::size_t> perm{7, 1, 0, 5, 6, 11, 9, 10, 8, 4, 2, 3};
  auto picked = take_sorted_prefix(perm, 8);
  CHECK(picked == std::vector<std::size_t>{0, 1, 5, 6, 7, 9, 10, 11});
  CHECK_THROWS_AS(take_sorted_prefix(perm, 13), DataError);
}

TEST_CASE("shuffled_indices is a reproducible permutation") {
  for (std::size_t n : {1u, 2u, 7u, 100u}) {
    auto a = shuffled_indices(n, 99);
    auto b = shuffled_indices(n, 99);
    CHECK(a == b);
    auto sorted = a;
    std::sort(sorted.begin(), sorted.end());
    std::vector<std::size_t> iota(n);
    std::iota(iota.begin(), iota.end(), std::size_t{0});
    CHECK(sorted == iota);
  }
  CHECK(shuffled_indices(50, 1) != shuffled_indices(50, 2));
}

TEST_CASE("shuffled_indices is close to uniform on small n") {
  // Every one of the 6 permutations of 3 should appear ~1/6 of the time.
  std::map<std::vector<std::size_t>, int> freq;
  const int trials = 6000;
  for (int s = 0; s < trials; ++s) ++freq[shuffled_indices(3, static_cast<std::uint64_t>(s))];
  CHECK(freq.size() == 6);
  for (const auto& [perm, count] : freq) CHECK(std::abs(count - trials / 6) < 150);
}

TEST_CASE("raster_shuffle_sample") {
  RoiIntensities roi;
  for (int i = 0; i < 12; ++i) {
    roi.values.push_back(100.0 + i);
    roi.coords.push_back({i / 4, i % 4});
  }
  SUBCASE("subset in raster order and reproducible") {
    auto a = raster_shuffle_sample(roi, 5, 17, "x");
    auto b = raster_shuffle_sample(roi, 5, 17, "x");
    CHECK(a.values == b.values);
    CHECK(a.values.size() == 5);
    CHECK(std::is_sorted(a.values.begin(), a.values.end()));
    CHECK(a.subjectId == "x");
    CHECK(a.method == SamplingMethod::shuffle);
  }
  SUBCASE("full length returns the ROI") {
    auto a = raster_shuffle_sample(roi, 12, 3);
    CHECK(a.values == roi.values);
  }
  SUBCASE("too long") { CHECK_THROWS_AS(raster_shuffle_sample(roi, 13, 3), DataError); }
  SUBCASE("matches the permutation prefix") {
    auto perm = shuffled_indices(12, 23);
    auto idx = take_sorted_prefix(perm, 6);
    auto a = raster_shuffle_sample(roi, 6, 23);
    for (std::size_t k = 0; k < idx.size(); ++k) CHECK(a.values[k] == roi.values[idx[k]]);
  }
}

TEST_CASE("balanced_positions") {
  auto p = balanced_positions(9, 6);
  std::vector<double> expect{0.0, 1.6, 3.2, 4.8, 6.4, 8.0};
  REQUIRE(p.size() == expect.size());
  for (std::size_t k = 0; k < p.size(); ++k) CHECK(p[k] == doctest::Approx(expect[k]).epsilon(1e-15));
  CHECK_THROWS_AS(balanced_positions(5, 1), DataError);
  CHECK_THROWS_AS(balanced_positions(3, 4), DataError);
  CHECK_THROWS_AS(balanced_positions(3, 0), DataError);
}

TEST_CASE("balanced_sample fixtures") {
  SUBCASE("nine values to six") {
    std::vector<double> v{0, 10, 20, 30, 40, 50, 60, 70, 80};
    auto s = balanced_sample(v, 6).values;
    std::vector<double> expect{0, 16, 32, 48, 64, 80};
    for (std::size_t k = 0; k < s.size(); ++k) CHECK(s[k] == doctest::Approx(expect[k]).epsilon(1e-14));
  }
  SUBCASE("length equal to n is the identity") {
    std::vector<double> v{3, 1, 4, 1, 5};
    CHECK(balanced_sample(v, 5).values == v);
  }
  SUBCASE("length one is rejected") {
    std::vector<double> v{3, 1, 4};
    CHECK_THROWS_AS(balanced_sample(v, 1), DataError);
  }
}

TEST_CASE("balanced_sample agrees with the interpolation oracle") {
  std::mt19937_64 gen(2024);
  std::uniform_real_distribution<double> dist(0.0, 255.0);
  for (int trial = 0; trial < 200; ++trial) {
    std::size_t n = 2 + gen() % 300;
    std::size_t len = 2 + gen() % (n - 1);
    std::vector<double> v(n);
    for (double& x : v) x = dist(gen);
    auto s = balanced_sample(v, len).values;
    REQUIRE(s.size() == len);
    CHECK(s.front() == v.front());
    CHECK(s.back() == v.back());
    auto [lo, hi] = std::minmax_element(v.begin(), v.end());
    for (std::size_t k = 0; k < len; ++k) {
      CHECK(std::abs(s[k] - interp_oracle(v, k, len)) <= 1e-9);
      CHECK(s[k] >= *lo - 1e-9);
      CHECK(s[k] <= *hi + 1e-9);
    }
  }
}

TEST_CASE("Rng bounded draws stay in range and streams differ") {
  Rng a = Rng::stream(5, 0), b = Rng::stream(5, 1);
  bool differ = false;
  for (int i = 0; i < 100; ++i) {
    auto x = a.below(7), y = b.below(7);
    CHECK(x < 7);
    CHECK(y < 7);
    differ |= x != y;
  }
  CHECK(differ);
  Rng g(1);
  double sum = 0, sq = 0;
  const int n = 20000;
  for (int i = 0; i < n; ++i) {
    double z = g.gaussian();
    sum += z;
    sq += z * z;
  }
  CHECK(std::abs(sum / n) < 0.05);
  CHECK(std::abs(sq / n - 1.0) < 0.05);
}

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include "hypoquant/eigen.hpp"

using namespace hypoquant;

namespace {

Matrix random_symmetric(std::size_t n, std::mt19937_64& gen) {
  std::normal_distribution<double> nd;
  Matrix a(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i; j < n; ++j) a(i, j) = a(j, i) = nd(gen);
  return a;
}

// Oracle: roots of the characteristic polynomial (closed form, n <= 3),
// descending.
std::vector<double> charpoly_eigenvalues(const Matrix& a) {
  if (a.rows() == 1) return {a(0, 0)};
  if (a.rows() == 2) {
    double m = (a(0, 0) + a(1, 1)) / 2, d = (a(0, 0) - a(1, 1)) / 2;
    double r = std::sqrt(d * d + a(0, 1) * a(0, 1));
    return {m + r, m - r};
  }
  double p1 = a(0, 1) * a(0, 1) + a(0, 2) * a(0, 2) + a(1, 2) * a(1, 2);
  double q = (a(0, 0) + a(1, 1) + a(2, 2)) / 3;
  double p2 = (a(0, 0) - q) * (a(0, 0) - q) + (a(1, 1) - q) * (a(1, 1) - q) +
              (a(2, 2) - q) * (a(2, 2) - q) + 2 * p1;
  double p = std::sqrt(p2 / 6);
  if (p == 0) return {q, q, q};
  Matrix b(3, 3);
  for (std::size_t i = 0; i < 3; ++i)
    for (std::size_t j = 0; j < 3; ++j) b(i, j) = (a(i, j) - (i == j ? q : 0.0)) / p;
  double detB = b(0, 0) * (b(1, 1) * b(2, 2) - b(1, 2) * b(2, 1)) -
                b(0, 1) * (b(1, 0) * b(2, 2) - b(1, 2) * b(2, 0)) +
                b(0, 2) * (b(1, 0) * b(2, 1) - b(1, 1) * b(2, 0));
  double r = std::clamp(detB / 2, -1.0, 1.0);
  double phi = std::acos(r) / 3;
  double e1 = q + 2 * p * std::cos(phi);
  double e3 = q + 2 * p * std::cos(phi + 2 * std::numbers::pi / 3);
  return {e1, 3 * q - e1 - e3, e3};
}

}  // namespace

TEST_CASE("eigensolve_symmetric small fixtures") {
  SUBCASE("diagonal") {
    auto d = eigensolve_symmetric(Matrix::from_rows({{1, 0}, {0, 3}}));
    CHECK(d.values == std::vector<double>{3, 1});
    CHECK(d.vectors[0] == std::vector<double>{0, 1});
  }
  SUBCASE("2x2 with coupling") {
    auto d = eigensolve_symmetric(Matrix::from_rows({{2, 1}, {1, 2}}));
    CHECK(d.values[0] == doctest::Approx(3.0));
    CHECK(d.values[1] == doctest::Approx(1.0));
    CHECK(d.vectors[0][0] == doctest::Approx(std::sqrt(0.5)));
    CHECK(d.vectors[0][1] == doctest::Approx(std::sqrt(0.5)));
    // [1,-1]/sqrt2: first component wins the magnitude tie and is positive.
    CHECK(d.vectors[1][0] == doctest::Approx(std::sqrt(0.5)));
    CHECK(d.vectors[1][1] == doctest::Approx(-std::sqrt(0.5)));
  }
  SUBCASE("1x1") {
    auto d = eigensolve_symmetric(Matrix::from_rows({{-4}}));
    CHECK(d.values == std::vector<double>{-4});
    CHECK(d.vectors[0] == std::vector<double>{1});
  }
  SUBCASE("errors") {
    CHECK_THROWS_AS(eigensolve_symmetric(Matrix::from_rows({{1, 2}, {0, 1}})), DataError);
    CHECK_THROWS_AS(eigensolve_symmetric(Matrix(2, 3)), DataError);
    CHECK(eigensolve_symmetric(Matrix()).values.empty());
  }
}

TEST_CASE("eigenvalues match the characteristic polynomial for n <= 3") {
  std::mt19937_64 gen(101);
  for (int trial = 0; trial < 300; ++trial) {
    std::size_t n = 1 + gen() % 3;
    auto a = random_symmetric(n, gen);
    auto d = eigensolve_symmetric(a);
    auto oracle = charpoly_eigenvalues(a);
    for (std::size_t i = 0; i < n; ++i) CHECK(std::abs(d.values[i] - oracle[i]) <= 1e-9);
  }
}

TEST_CASE("eigensolve_symmetric residual, orthonormality and sign") {
  std::mt19937_64 gen(202);
  for (int trial = 0; trial < 30; ++trial) {
    std::size_t n = 1 + gen() % 25;
    auto a = random_symmetric(n, gen);
    double fro = a.frobenius_norm();
    auto d = eigensolve_symmetric(a);
    CHECK(std::is_sorted(d.values.rbegin(), d.values.rend()));
    for (std::size_t k = 0; k < n; ++k) {
      const auto& v = d.vectors[k];
      double res = 0.0;
      for (std::size_t i = 0; i < n; ++i) {
        double s = 0.0;
        for (std::size_t j = 0; j < n; ++j) s += a(i, j) * v[j];
        res += (s - d.values[k] * v[i]) * (s - d.values[k] * v[i]);
      }
      CHECK(std::sqrt(res) <= 1e-8 * fro);
      for (std::size_t l = 0; l < n; ++l)
        CHECK(std::abs(dot(v, d.vectors[l]) - (k == l ? 1.0 : 0.0)) <= 1e-8);
      auto big = std::max_element(v.begin(), v.end(),
                                  [](double x, double y) { return std::abs(x) < std::abs(y); });
      CHECK(*big > 0.0);
    }
  }
}

TEST_CASE("canonicalize_sign") {
  std::vector<double> v{0.5, -0.8};
  canonicalize_sign(v);
  CHECK(v == std::vector<double>{-0.5, 0.8});
  std::vector<double> tie{-0.5, 0.5};
  canonicalize_sign(tie);
  CHECK(tie == std::vector<double>{0.5, -0.5});
}

TEST_CASE("select_components") {
  std::vector<double> e{7, 2, 1};
  CHECK(select_components(e, 0.70) == 1);
  CHECK(select_components(e, 0.71) == 2);
  CHECK(select_components(e, 0.90) == 2);
  CHECK(select_components(e, 1.0) == 3);
  CHECK_THROWS_AS(select_components(e, 0.0), DataError);
  CHECK_THROWS_AS(select_components(e, 1.5), DataError);

  std::mt19937_64 gen(5);
  std::uniform_real_distribution<double> u(0.0, 10.0);
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<double> ev(1 + gen() % 10);
    for (double& x : ev) x = u(gen) + 1e-3;
    std::sort(ev.rbegin(), ev.rend());
    std::size_t prev = 0;
    for (double f = 0.05; f <= 1.0; f += 0.05) {
      std::size_t n = select_components(ev, f);
      CHECK(n >= prev);
      CHECK(n >= 1);
      CHECK(n <= ev.size());
      prev = n;
    }
  }
}

TEST_CASE("fit_pca two-row fixture") {
  auto m = fit_pca(std::vector<std::vector<double>>{{1, 0}, {0, 1}}, 0.7);
  CHECK(m.mean == std::vector<double>{0.5, 0.5});
  REQUIRE(m.eigenvalues.size() == 1);
  CHECK(m.eigenvalues[0] == doctest::Approx(1.0));
  CHECK(m.eigenvectors[0][0] == doctest::Approx(std::sqrt(0.5)));
  CHECK(m.eigenvectors[0][1] == doctest::Approx(-std::sqrt(0.5)));
  CHECK(m.retained == 1);
  auto p = project(m, std::vector<double>{1, 0});
  CHECK(p.g[0] == doctest::Approx(std::sqrt(0.5)));
}

TEST_CASE("fit_pca degenerate and invalid input") {
  auto m = fit_pca(std::vector<std::vector<double>>{{2, 2}, {2, 2}, {2, 2}});
  CHECK(m.degenerate);
  CHECK_THROWS_AS(fit_pca(std::vector<std::vector<double>>{{1, 2}}), DataError);
  CHECK_THROWS_AS(fit_pca(std::vector<std::vector<double>>{{1, 2}, {1}}), DataError);
}

TEST_CASE("Gram and scatter paths agree and decorrelate the data") {
  std::mt19937_64 gen(303);
  std::normal_distribution<double> nd;
  for (int trial = 0; trial < 20; ++trial) {
    std::size_t n = 3 + gen() % 8, len = 2 + gen() % 15;
    std::vector<std::vector<double>> rows(n, std::vector<double>(len));
    for (auto& r : rows)
      for (double& x : r) x = nd(gen);
    auto g = fit_pca(rows, 0.7, CovariancePath::gram);
    auto s = fit_pca(rows, 0.7, CovariancePath::scatter);
    CHECK(fit_pca(rows, 0.7).path == (len > n ? CovariancePath::gram : CovariancePath::scatter));
    REQUIRE(g.eigenvalues.size() == s.eigenvalues.size());
    CHECK(g.eigenvalues.size() <= std::min(n - 1, len));
    double scale = s.eigenvalues.empty() ? 1.0 : s.eigenvalues[0];
    for (std::size_t k = 0; k < g.eigenvalues.size(); ++k) {
      CHECK(std::abs(g.eigenvalues[k] - s.eigenvalues[k]) <= 1e-8 * scale);
      CHECK(std::abs(std::abs(dot(g.eigenvectors[k], s.eigenvectors[k])) - 1.0) <= 1e-6);
    }
    // Coefficients are uncorrelated and carry the eigenvalue as their scatter.
    std::size_t k = s.eigenvalues.size();
    std::vector<std::vector<double>> coef;
    for (const auto& r : rows) coef.push_back(project_all(s, r));
    for (std::size_t a = 0; a < k; ++a)
      for (std::size_t b = 0; b < k; ++b) {
        double c = 0.0;
        for (const auto& cv : coef) c += cv[a] * cv[b];
        CHECK(std::abs(c - (a == b ? s.eigenvalues[a] : 0.0)) <= 1e-8 * scale);
      }
    // Full reconstruction with all components (n - 1 <= len) is exact.
    if (k == n - 1)
      for (const auto& r : rows) {
        auto back = reconstruct(s, project_all(s, r));
        for (std::size_t i = 0; i < len; ++i) CHECK(std::abs(back[i] - r[i]) <= 1e-6);
      }
  }
}

TEST_CASE("nonbinary_rank picks the darkest subject as reference") {
  std::vector<Projection> p{{"a", {0.0}}, {"b", {3.0}}, {"c", {1.0}}, {"d", {3.0}}};
  std::vector<double> loads{0.1, 0.5, 0.2, 0.5};
  auto r = nonbinary_rank(p, loads);
  CHECK(r.referenceId == "b");
  CHECK(r.distances == std::vector<double>{3.0, 0.0, 2.0, 0.0});
  CHECK(r.ranking.orderedIds == std::vector<std::string>{"a", "c", "b", "d"});
  CHECK(nonbinary_features(p[1]) == std::vector<double>{3.0});
  CHECK_THROWS_AS(nonbinary_rank(p, std::vector<double>{1.0}), DataError);
}

#include "hypoquant/eigen.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace hypoquant {

namespace {

constexpr int kMaxSweeps = 100;
constexpr double kOffDiagonalTolerance = 1e-12;
constexpr double kSymmetryTolerance = 1e-10;

double max_off_diagonal(const Matrix& a) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = i + 1; j < a.cols(); ++j) m = std::max(m, std::abs(a(i, j)));
  return m;
}

// A <- J^T A J and V <- V J for the rotation in the (p, q) plane that
// annihilates a(p, q).
void rotate(Matrix& a, Matrix& v, std::size_t p, std::size_t q) {
  const double apq = a(p, q);
  if (apq == 0.0) return;
  const double theta = (a(q, q) - a(p, p)) / (2.0 * apq);
  const double t = (theta >= 0 ? 1.0 : -1.0) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
  const double c = 1.0 / std::sqrt(t * t + 1.0);
  const double s = t * c;
  const std::size_t n = a.rows();
  for (std::size_t k = 0; k < n; ++k) {
    double akp = a(k, p), akq = a(k, q);
    a(k, p) = c * akp - s * akq;
    a(k, q) = s * akp + c * akq;
  }
  for (std::size_t k = 0; k < n; ++k) {
    double apk = a(p, k), aqk = a(q, k);
    a(p, k) = c * apk - s * aqk;
    a(q, k) = s * apk + c * aqk;
  }
  a(p, q) = a(q, p) = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    double vkp = v(k, p), vkq = v(k, q);
    v(k, p) = c * vkp - s * vkq;
    v(k, q) = s * vkp + c * vkq;
  }
}

void check_rows(const std::vector<std::vector<double>>& rows) {
  if (rows.size() < 2) throw DataError("PCA needs at least 2 rows, got " + std::to_string(rows.size()));
  for (const auto& r : rows)
    if (r.size() != rows.front().size())
      throw DataError("ragged PCA rows: lengths " + std::to_string(rows.front().size()) + " and " +
                      std::to_string(r.size()));
  if (rows.front().empty()) throw DataError("PCA rows are empty");
}

}  // namespace

void canonicalize_sign(std::vector<double>& v) {
  std::size_t best = 0;
  for (std::size_t i = 1; i < v.size(); ++i)
    if (std::abs(v[i]) > std::abs(v[best])) best = i;
  if (!v.empty() && v[best] < 0)
    for (double& x : v) x = -x;
}

EigenDecomposition eigensolve_symmetric(const Matrix& input) {
  if (input.rows() != input.cols())
    throw DataError("eigensolver needs a square matrix, got " + std::to_string(input.rows()) + "x" +
                    std::to_string(input.cols()));
  const std::size_t n = input.rows();
  const double scale = input.frobenius_norm();
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j)
      if (std::abs(input(i, j) - input(j, i)) > kSymmetryTolerance * std::max(scale, 1e-300))
        throw DataError("matrix is not symmetric at (" + std::to_string(i) + "," +
                        std::to_string(j) + ")");

  Matrix a = input;
  Matrix v = Matrix::identity(n);
  EigenDecomposition out;
  const double tolerance = kOffDiagonalTolerance * scale;
  for (int sweep = 0; sweep < kMaxSweeps; ++sweep) {
    if (max_off_diagonal(a) <= tolerance) break;
    for (std::size_t p = 0; p + 1 < n; ++p)
      for (std::size_t q = p + 1; q < n; ++q) rotate(a, v, p, q);
    out.sweeps = sweep + 1;
  }

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t x, std::size_t y) { return a(x, x) > a(y, y); });
  for (std::size_t k : order) {
    out.values.push_back(a(k, k));
    std::vector<double> vec(n);
    for (std::size_t i = 0; i < n; ++i) vec[i] = v(i, k);
    canonicalize_sign(vec);
    out.vectors.push_back(std::move(vec));
  }
  return out;
}

std::size_t select_components(std::span<const double> eigenvalues, double fraction) {
  if (!(fraction > 0.0 && fraction <= 1.0))
    throw DataError("variance fraction must lie in (0, 1]");
  double total = 0.0;
  for (double v : eigenvalues) total += v;
  if (eigenvalues.empty() || !(total > 0.0))
    throw DataError("cannot select components of an all-zero spectrum");
  double cumulative = 0.0;
  for (std::size_t n = 0; n < eigenvalues.size(); ++n) {
    cumulative += eigenvalues[n];
    if (cumulative / total >= fraction) return n + 1;
  }
  return eigenvalues.size();
}

EigenModel fit_pca(const std::vector<std::vector<double>>& rows, double fraction,
                   CovariancePath path) {
  check_rows(rows);
  const std::size_t count = rows.size();
  const std::size_t length = rows.front().size();

  EigenModel model;
  model.path = path;
  model.mean.assign(length, 0.0);
  for (const auto& r : rows)
    for (std::size_t j = 0; j < length; ++j) model.mean[j] += r[j];
  for (double& m : model.mean) m /= static_cast<double>(count);

  Matrix centered(count, length);
  double energy = 0.0;
  for (std::size_t i = 0; i < count; ++i)
    for (std::size_t j = 0; j < length; ++j) {
      centered(i, j) = rows[i][j] - model.mean[j];
      energy += rows[i][j] * rows[i][j];
    }

  const std::size_t keep = std::min(count - 1, length);
  Matrix ct = centered.transposed();
  if (path == CovariancePath::gram) {
    EigenDecomposition eig = eigensolve_symmetric(centered * ct);
    const double cutoff = 1e-12 * std::max(eig.values.front(), 0.0);
    for (std::size_t k = 0; k < keep && k < eig.values.size(); ++k) {
      if (!(eig.values[k] > cutoff) || eig.values[k] <= 0.0) break;
      std::vector<double> vec(length, 0.0);
      for (std::size_t j = 0; j < length; ++j)
        for (std::size_t i = 0; i < count; ++i) vec[j] += centered(i, j) * eig.vectors[k][i];
      double len = norm(vec);
      for (double& x : vec) x /= len;
      canonicalize_sign(vec);
      model.eigenvectors.push_back(std::move(vec));
      model.eigenvalues.push_back(eig.values[k]);
    }
  } else {
    EigenDecomposition eig = eigensolve_symmetric(ct * centered);
    for (std::size_t k = 0; k < keep; ++k) {
      model.eigenvectors.push_back(std::move(eig.vectors[k]));
      model.eigenvalues.push_back(std::max(eig.values[k], 0.0));
    }
  }

  double total = std::accumulate(model.eigenvalues.begin(), model.eigenvalues.end(), 0.0);
  if (model.eigenvalues.empty() || !(total > 1e-20 * energy) || total == 0.0) {
    model.degenerate = true;
    model.eigenvectors.clear();
    model.eigenvalues.assign(keep, 0.0);
    model.retained = 0;
    return model;
  }
  model.retained = select_components(model.eigenvalues, fraction);
  return model;
}

EigenModel fit_pca(const std::vector<std::vector<double>>& rows, double fraction) {
  check_rows(rows);
  return fit_pca(rows, fraction,
                 rows.front().size() > rows.size() ? CovariancePath::gram : CovariancePath::scatter);
}

EigenModel fit_pca(const std::vector<RoiVector>& rows, double fraction) {
  std::vector<std::vector<double>> data;
  data.reserve(rows.size());
  for (const auto& r : rows) data.push_back(r.values);
  return fit_pca(data, fraction);
}

namespace {

void check_usable(const EigenModel& model, std::size_t length) {
  if (model.degenerate)
    throw DataError("PCA model is degenerate: all ROI rows are identical");
  if (length != model.dimension())
    throw DataError("row length " + std::to_string(length) + " does not match model dimension " +
                    std::to_string(model.dimension()));
}

}  // namespace

Projection project(const EigenModel& model, std::span<const double> row, std::string subjectId) {
  check_usable(model, row.size());
  Projection p{std::move(subjectId), {}};
  p.g.reserve(model.retained);
  for (std::size_t k = 0; k < model.retained; ++k) {
    double g = 0.0;
    for (std::size_t j = 0; j < row.size(); ++j) g += model.eigenvectors[k][j] * (row[j] - model.mean[j]);
    p.g.push_back(g);
  }
  return p;
}

std::vector<double> project_all(const EigenModel& model, std::span<const double> row) {
  check_usable(model, row.size());
  std::vector<double> g;
  g.reserve(model.eigenvectors.size());
  for (const auto& e : model.eigenvectors) {
    double s = 0.0;
    for (std::size_t j = 0; j < row.size(); ++j) s += e[j] * (row[j] - model.mean[j]);
    g.push_back(s);
  }
  return g;
}

std::vector<double> reconstruct(const EigenModel& model, std::span<const double> g) {
  if (g.size() != model.eigenvectors.size())
    throw DataError("reconstruction needs " + std::to_string(model.eigenvectors.size()) +
                    " coefficients, got " + std::to_string(g.size()));
  std::vector<double> x = model.mean;
  for (std::size_t k = 0; k < g.size(); ++k)
    for (std::size_t j = 0; j < x.size(); ++j) x[j] += g[k] * model.eigenvectors[k][j];
  return x;
}

NonbinaryResult nonbinary_rank(std::span<const Projection> projections,
                               std::span<const double> hypoLoads) {
  if (projections.size() != hypoLoads.size())
    throw DataError("need one HypoLoad per projected subject");
  if (projections.empty()) throw DataError("no projections to rank");
  NonbinaryResult r;
  for (std::size_t i = 1; i < hypoLoads.size(); ++i)
    if (hypoLoads[i] > hypoLoads[r.referenceIndex]) r.referenceIndex = i;
  const auto& ref = projections[r.referenceIndex].g;
  r.referenceId = projections[r.referenceIndex].subjectId;
  for (const auto& p : projections) {
    if (p.g.size() != ref.size()) throw DataError("projections differ in dimension");
    double ss = 0.0;
    for (std::size_t k = 0; k < ref.size(); ++k) ss += (p.g[k] - ref[k]) * (p.g[k] - ref[k]);
    r.ids.push_back(p.subjectId);
    r.distances.push_back(std::sqrt(ss));
  }
  r.ranking = ranking_from_scores(r.ids, r.distances, false);
  return r;
}

std::vector<double> nonbinary_features(const Projection& projection) { return projection.g; }

}  // namespace hypoquant

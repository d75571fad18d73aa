#pragma once

#include <span>
#include <string>
#include <vector>

#include "hypoquant/matrix.hpp"
#include "hypoquant/sampling.hpp"
#include "hypoquant/stats.hpp"

namespace hypoquant {

struct EigenDecomposition {
  std::vector<double> values;                // descending
  std::vector<std::vector<double>> vectors;  // vectors[i] pairs with values[i]
  int sweeps = 0;
};

/// Cyclic Jacobi rotations on a symmetric matrix. Stops once every
/// off-diagonal entry is below 1e-12 * ||A||_F or after 100 sweeps.
/// Eigenvectors are unit length with their largest-magnitude component
/// positive (first such component on ties).
EigenDecomposition eigensolve_symmetric(const Matrix& a);

/// Flips v so its largest-magnitude component is positive.
void canonicalize_sign(std::vector<double>& v);

/// Minimal n whose leading eigenvalues hold at least `fraction` of the total.
std::size_t select_components(std::span<const double> eigenvalues, double fraction = 0.70);

enum class CovariancePath { gram, scatter };

/// PCA basis over the sampled ROI rows. Covariance is unscaled (no 1/N).
struct EigenModel {
  std::vector<double> mean;
  std::vector<std::vector<double>> eigenvectors;  // data space, orthonormal
  std::vector<double> eigenvalues;                // descending, >= 0
  std::size_t retained = 0;
  bool degenerate = false;  // every row identical: no usable basis
  CovariancePath path = CovariancePath::scatter;

  std::size_t dimension() const { return mean.size(); }
};

/// Fits the model, using the N x N Gram matrix when rows are longer than
/// the row count and the L x L scatter matrix otherwise. At most
/// min(N - 1, L) components are kept.
EigenModel fit_pca(const std::vector<std::vector<double>>& rows, double fraction = 0.70);
EigenModel fit_pca(const std::vector<RoiVector>& rows, double fraction = 0.70);

/// Same fit with an explicit covariance route (used to cross-check both).
EigenModel fit_pca(const std::vector<std::vector<double>>& rows, double fraction,
                   CovariancePath path);

struct Projection {
  std::string subjectId;
  std::vector<double> g;  // retained coefficients
};

/// g_i = e_i . (y - mean) for the retained eigenvectors.
Projection project(const EigenModel& model, std::span<const double> row, std::string subjectId = {});

/// Coefficients on every stored eigenvector.
std::vector<double> project_all(const EigenModel& model, std::span<const double> row);

/// sum_j g_j e_j + mean; g must cover every stored eigenvector.
std::vector<double> reconstruct(const EigenModel& model, std::span<const double> g);

/// Eigenspace distances to the darkest subject (max HypoLoad, first on ties).
struct NonbinaryResult {
  std::string referenceId;
  std::size_t referenceIndex = 0;
  std::vector<std::string> ids;
  std::vector<double> distances;  // dataset order
  Ranking ranking;                // light -> dark: distance descending
};

NonbinaryResult nonbinary_rank(std::span<const Projection> projections,
                               std::span<const double> hypoLoads);

/// Nonbinary features: the retained coefficients in eigenvalue order.
std::vector<double> nonbinary_features(const Projection& projection);

}  // namespace hypoquant

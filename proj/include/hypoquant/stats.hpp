#pragma once

#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "hypoquant/types.hpp"

namespace hypoquant {

/// Subject ids ordered light -> dark.
struct Ranking {
  std::vector<std::string> orderedIds;
};

struct Clustering {
  std::map<std::string, Cluster> assignment;
};

/// Concordant (P) and discordant (Q) counts between two total orders.
struct KendallResult {
  std::int64_t concordant = 0;
  std::int64_t discordant = 0;
  std::int64_t pairs = 0;  // N (N - 1) / 2

  /// (P - Q) / (N (N - 1) / 2); 1 for fewer than two items.
  double tau() const {
    return pairs == 0 ? 1.0
                      : static_cast<double>(concordant - discordant) / static_cast<double>(pairs);
  }
};

/// Kendall's tau between two orderings of the same items. B is aligned to
/// A's order and, walking that row, every later entry ranked higher in B
/// counts toward P and every lower one toward Q.
KendallResult kendall_tau(std::span<const std::size_t> orderA, std::span<const std::size_t> orderB);
KendallResult kendall_tau(const std::vector<std::string>& orderA,
                          const std::vector<std::string>& orderB);

/// Stable ordering of indices by value (ties keep index order).
std::vector<std::size_t> value_ranking(std::span<const double> values, bool descending = false);

/// For every query subject q, the other subjects ordered by ascending
/// Euclidean distance between feature vectors; ties keep dataset order.
std::vector<std::vector<std::size_t>> feature_rankings(
    std::span<const std::vector<double>> features);

/// A named feature (or multi-dimensional description): one vector per subject.
struct Feature {
  std::string name;
  std::vector<std::vector<double>> values;

  /// True when every subject carries the same vector.
  bool constant() const;
};

/// Feature built from one scalar per subject.
Feature scalar_feature(std::string name, std::span<const double> values);

struct CorrMatrix {
  std::vector<std::string> rowLabels;
  std::vector<std::string> colLabels;
  std::vector<double> values;  // row-major; NaN where flagged
  std::vector<bool> flagged;   // entry involves a constant feature

  double at(std::size_t r, std::size_t c) const { return values[r * colLabels.size() + c]; }
  bool is_flagged(std::size_t r, std::size_t c) const { return flagged[r * colLabels.size() + c]; }
};

/// Entry (i, j) is the mean over query subjects of the tau between the
/// query rankings induced by rows[i] and cols[j]. Queries are evaluated on
/// up to `threads` workers; the result does not depend on the count.
CorrMatrix correlation_matrix(std::span<const Feature> rows, std::span<const Feature> cols,
                              unsigned threads = 1);

/// Mean of several matrices with identical labels (multi-run averaging).
CorrMatrix average_matrices(std::span<const CorrMatrix> runs);

/// Orders ids by score; ascending puts the smallest score first. Ties keep
/// dataset order.
Ranking ranking_from_scores(const std::vector<std::string>& ids, std::span<const double> scores,
                            bool ascending);

/// First `light` ids -> light, next `mid` -> mid, remainder -> dark.
Clustering rank_to_clusters(const Ranking& ranking, const ClusterSizes& sizes);

Clustering clustering_from_labels(const std::vector<std::string>& ids,
                                  const std::vector<Cluster>& labels);

ClusterSizes cluster_sizes(const Clustering& clustering);

struct ClusterAgreement {
  Cluster cluster = Cluster::light;
  std::size_t common = 0;
  std::size_t truthSize = 0;
};

struct AccuracyReport {
  std::vector<ClusterAgreement> clusters;  // light, mid, dark order; present clusters only
  double accuracy = 0.0;                   // mean of common / truthSize
};

AccuracyReport accuracy(const Clustering& predicted, const Clustering& truth);

}  // namespace hypoquant

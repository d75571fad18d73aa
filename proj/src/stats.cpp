#include "hypoquant/stats.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <set>

#include "hypoquant/parallel.hpp"

namespace hypoquant {

KendallResult kendall_tau(std::span<const std::size_t> orderA,
                          std::span<const std::size_t> orderB) {
  if (orderA.size() != orderB.size())
    throw DataError("rankings differ in length (" + std::to_string(orderA.size()) + " vs " +
                    std::to_string(orderB.size()) + ")");
  const std::size_t n = orderA.size();
  std::size_t maxId = 0;
  for (std::size_t id : orderA) maxId = std::max(maxId, id);
  constexpr std::size_t unset = std::numeric_limits<std::size_t>::max();
  std::vector<std::size_t> posB(maxId + 1, unset);
  for (std::size_t i = 0; i < n; ++i) {
    if (orderB[i] > maxId || posB[orderB[i]] != unset)
      throw DataError("rankings are not permutations of the same items");
    posB[orderB[i]] = i;
  }
  // Rank-B row in rank-A order.
  std::vector<std::size_t> row(n);
  for (std::size_t i = 0; i < n; ++i) {
    if (posB[orderA[i]] == unset) throw DataError("rankings are not permutations of the same items");
    row[i] = posB[orderA[i]];
  }
  KendallResult r;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) {
      if (row[j] > row[i])
        ++r.concordant;
      else
        ++r.discordant;
    }
  r.pairs = n < 2 ? 0 : static_cast<std::int64_t>(n * (n - 1) / 2);
  return r;
}

KendallResult kendall_tau(const std::vector<std::string>& orderA,
                          const std::vector<std::string>& orderB) {
  std::map<std::string, std::size_t> index;
  for (std::size_t i = 0; i < orderA.size(); ++i)
    if (!index.emplace(orderA[i], i).second)
      throw DataError("duplicate id '" + orderA[i] + "' in ranking");
  std::vector<std::size_t> a(orderA.size()), b;
  std::iota(a.begin(), a.end(), std::size_t{0});
  b.reserve(orderB.size());
  std::set<std::string> seen;
  for (const auto& id : orderB) {
    auto it = index.find(id);
    if (it == index.end()) throw DataError("id '" + id + "' missing from the first ranking");
    if (!seen.insert(id).second) throw DataError("duplicate id '" + id + "' in ranking");
    b.push_back(it->second);
  }
  if (b.size() != a.size()) throw DataError("rankings cover different id sets");
  return kendall_tau(a, b);
}

std::vector<std::size_t> value_ranking(std::span<const double> values, bool descending) {
  std::vector<std::size_t> idx(values.size());
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
    return descending ? values[a] > values[b] : values[a] < values[b];
  });
  return idx;
}

std::vector<std::vector<std::size_t>> feature_rankings(
    std::span<const std::vector<double>> features) {
  const std::size_t n = features.size();
  for (const auto& f : features)
    if (f.size() != features.front().size())
      throw DataError("feature vectors differ in dimension");
  std::vector<std::vector<std::size_t>> out(n);
  std::vector<double> dist(n);
  for (std::size_t q = 0; q < n; ++q) {
    for (std::size_t s = 0; s < n; ++s) {
      double ss = 0.0;
      for (std::size_t k = 0; k < features[q].size(); ++k) {
        double d = features[s][k] - features[q][k];
        ss += d * d;
      }
      dist[s] = std::sqrt(ss);
    }
    auto& order = out[q];
    order.reserve(n - 1);
    for (std::size_t s = 0; s < n; ++s)
      if (s != q) order.push_back(s);
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return dist[a] < dist[b]; });
  }
  return out;
}

bool Feature::constant() const {
  for (const auto& v : values)
    if (v != values.front()) return false;
  return true;
}

Feature scalar_feature(std::string name, std::span<const double> values) {
  Feature f{std::move(name), {}};
  f.values.reserve(values.size());
  for (double v : values) f.values.push_back({v});
  return f;
}

CorrMatrix correlation_matrix(std::span<const Feature> rows, std::span<const Feature> cols,
                              unsigned threads) {
  if (rows.empty() || cols.empty()) throw DataError("correlation matrix needs features");
  const std::size_t n = rows.front().values.size();
  if (n < 3) throw DataError("correlation matrix needs at least 3 subjects");
  for (auto group : {rows, cols})
    for (const auto& f : group)
      if (f.values.size() != n)
        throw DataError("feature '" + f.name + "' has " + std::to_string(f.values.size()) +
                        " subjects, expected " + std::to_string(n));

  auto rankings_of = [&](std::span<const Feature> group) {
    std::vector<std::vector<std::vector<std::size_t>>> out(group.size());
    parallel_for(group.size(), threads,
                 [&](std::size_t i) { out[i] = feature_rankings(group[i].values); });
    return out;
  };
  auto rowRanks = rankings_of(rows);
  auto colRanks = rankings_of(cols);

  CorrMatrix m;
  for (const auto& f : rows) m.rowLabels.push_back(f.name);
  for (const auto& f : cols) m.colLabels.push_back(f.name);
  const std::size_t nr = rows.size(), nc = cols.size();
  m.values.assign(nr * nc, std::numeric_limits<double>::quiet_NaN());
  std::vector<char> flagged(nr * nc, 0);

  parallel_for(nr * nc, threads, [&](std::size_t cell) {
    std::size_t i = cell / nc, j = cell % nc;
    if (rows[i].constant() || cols[j].constant()) {
      flagged[cell] = 1;
      return;
    }
    double sum = 0.0;
    for (std::size_t q = 0; q < n; ++q) sum += kendall_tau(rowRanks[i][q], colRanks[j][q]).tau();
    m.values[cell] = sum / static_cast<double>(n);
  });
  m.flagged.assign(flagged.begin(), flagged.end());
  return m;
}

CorrMatrix average_matrices(std::span<const CorrMatrix> runs) {
  if (runs.empty()) throw DataError("no correlation matrices to average");
  CorrMatrix out = runs.front();
  for (std::size_t r = 1; r < runs.size(); ++r) {
    const auto& m = runs[r];
    if (m.rowLabels != out.rowLabels || m.colLabels != out.colLabels)
      throw DataError("cannot average correlation matrices with different labels");
    for (std::size_t k = 0; k < out.values.size(); ++k) {
      out.values[k] += m.values[k];
      out.flagged[k] = out.flagged[k] || m.flagged[k];
    }
  }
  for (std::size_t k = 0; k < out.values.size(); ++k)
    out.values[k] = out.flagged[k] ? std::numeric_limits<double>::quiet_NaN()
                                   : out.values[k] / static_cast<double>(runs.size());
  return out;
}

Ranking ranking_from_scores(const std::vector<std::string>& ids, std::span<const double> scores,
                            bool ascending) {
  if (ids.size() != scores.size()) throw DataError("ids and scores differ in length");
  Ranking r;
  for (std::size_t i : value_ranking(scores, !ascending)) r.orderedIds.push_back(ids[i]);
  return r;
}

Clustering rank_to_clusters(const Ranking& ranking, const ClusterSizes& sizes) {
  if (sizes.total() != ranking.orderedIds.size())
    throw DataError("cluster sizes sum to " + std::to_string(sizes.total()) + " but ranking has " +
                    std::to_string(ranking.orderedIds.size()) + " subjects");
  Clustering c;
  for (std::size_t i = 0; i < ranking.orderedIds.size(); ++i) {
    Cluster k = i < sizes.light              ? Cluster::light
                : i < sizes.light + sizes.mid ? Cluster::mid
                                              : Cluster::dark;
    if (!c.assignment.emplace(ranking.orderedIds[i], k).second)
      throw DataError("duplicate id '" + ranking.orderedIds[i] + "' in ranking");
  }
  return c;
}

Clustering clustering_from_labels(const std::vector<std::string>& ids,
                                  const std::vector<Cluster>& labels) {
  if (ids.size() != labels.size()) throw DataError("ids and labels differ in length");
  Clustering c;
  for (std::size_t i = 0; i < ids.size(); ++i)
    if (!c.assignment.emplace(ids[i], labels[i]).second)
      throw DataError("duplicate id '" + ids[i] + "'");
  return c;
}

ClusterSizes cluster_sizes(const Clustering& clustering) {
  ClusterSizes s;
  for (const auto& [id, k] : clustering.assignment) {
    switch (k) {
      case Cluster::light: ++s.light; break;
      case Cluster::mid: ++s.mid; break;
      case Cluster::dark: ++s.dark; break;
    }
  }
  return s;
}

AccuracyReport accuracy(const Clustering& predicted, const Clustering& truth) {
  if (predicted.assignment.size() != truth.assignment.size())
    throw DataError("predicted and ground-truth clusterings cover different subjects");
  std::set<Cluster> vocabPred, vocabTruth;
  for (const auto& [id, k] : truth.assignment) vocabTruth.insert(k);
  for (const auto& [id, k] : predicted.assignment) {
    vocabPred.insert(k);
    if (!truth.assignment.contains(id))
      throw DataError("subject '" + id + "' missing from ground truth");
  }
  if (vocabPred != vocabTruth) throw DataError("cluster vocabularies differ");

  AccuracyReport report;
  double sum = 0.0;
  for (Cluster k : {Cluster::light, Cluster::mid, Cluster::dark}) {
    if (!vocabTruth.contains(k)) continue;
    ClusterAgreement a{k, 0, 0};
    for (const auto& [id, t] : truth.assignment) {
      if (t != k) continue;
      ++a.truthSize;
      if (predicted.assignment.at(id) == k) ++a.common;
    }
    sum += static_cast<double>(a.common) / static_cast<double>(a.truthSize);
    report.clusters.push_back(a);
  }
  report.accuracy = sum / static_cast<double>(report.clusters.size());
  return report;
}

}  // namespace hypoquant

#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "splitlaw/embedding_io.hpp"

namespace splitlaw {

/// Centroids double as the router weights: queries go to the nearest row.
struct ClusterModel {
  std::vector<float> centroids;  // K x d, row-major
  std::vector<std::uint32_t> sizes;
  std::uint32_t n_clusters = 0;  // K
  std::uint32_t dim = 0;
  double inertia = 0.0;  // sum of squared distances to assigned centroids
  std::uint64_t seed = 0;

  std::span<const float> centroid(std::uint32_t c) const {
    return {centroids.data() + std::size_t(c) * dim, dim};
  }
};

/// Lloyd iterations with a balance-constrained assignment step: points are
/// ordered by assignment regret (nearest minus second-nearest distance,
/// ascending) and greedily take their nearest centroid that still has
/// capacity; cluster sizes never differ by more than one. k-means++
/// initialization, deterministic per seed. Terminates at an assignment
/// fixpoint (or when the balanced assignment stops improving inertia) or
/// after max_iter rounds.
ClusterModel balanced_kmeans(const EmbeddingSet& emb, int n_clusters, std::uint64_t seed,
                             int max_iter = 100);

/// Index of the nearest centroid in Euclidean distance; ties break to the
/// lowest index.
std::uint32_t assign(const ClusterModel& model, std::span<const float> x);

/// The k nearest centroids, ascending distance, same tie rule as assign.
std::vector<std::uint32_t> route_topk(const ClusterModel& model, std::span<const float> x, int k);

/// Fraction of prefixes whose paired document (same id) ranks among the k
/// nearest document embeddings, exhaustive search.
double recall_at_k(const EmbeddingSet& prefixes, const EmbeddingSet& docs, int k);

/// Same matrix format as embeddings plus a JSON metadata sidecar
/// {K, sizes, inertia, seed} at matrix_path + ".json".
void save_cluster_model(const ClusterModel& model, const std::string& matrix_path);
ClusterModel load_cluster_model(const std::string& matrix_path);

}  // namespace splitlaw

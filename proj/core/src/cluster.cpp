#include "splitlaw/cluster.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <numeric>
#include <random>
#include <unordered_map>

#include <json.hpp>

#include "splitlaw/errors.hpp"

namespace splitlaw {

namespace {

double sq_dist(std::span<const float> a, std::span<const float> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double diff = static_cast<double>(a[i]) - static_cast<double>(b[i]);
    s += diff * diff;
  }
  return s;
}

std::vector<float> kmeans_pp_init(const EmbeddingSet& emb, int k, std::mt19937_64& rng) {
  const std::uint32_t n = emb.n, d = emb.d;
  std::vector<float> centroids;
  centroids.reserve(std::size_t(k) * d);
  std::vector<char> chosen(n, 0);

  std::uniform_int_distribution<std::uint32_t> uniform(0, n - 1);
  std::uint32_t first = uniform(rng);
  chosen[first] = 1;
  centroids.insert(centroids.end(), emb.row(first).begin(), emb.row(first).end());

  std::vector<double> dist2(n, std::numeric_limits<double>::infinity());
  for (int c = 1; c < k; ++c) {
    std::span<const float> last(centroids.data() + std::size_t(c - 1) * d, d);
    double total = 0.0;
    for (std::uint32_t i = 0; i < n; ++i) {
      dist2[i] = std::min(dist2[i], sq_dist(emb.row(i), last));
      total += dist2[i];
    }
    std::uint32_t pick = n;  // sentinel
    if (total > 0.0) {
      std::uniform_real_distribution<double> u(0.0, total);
      double target = u(rng);
      for (std::uint32_t i = 0; i < n; ++i) {
        target -= dist2[i];
        if (target <= 0.0) {
          pick = i;
          break;
        }
      }
      if (pick == n) pick = n - 1;
      if (chosen[pick]) pick = n;  // duplicate point, fall through
    }
    if (pick == n) {  // all remaining mass is zero; take the first unchosen
      for (std::uint32_t i = 0; i < n; ++i)
        if (!chosen[i]) {
          pick = i;
          break;
        }
    }
    chosen[pick] = 1;
    centroids.insert(centroids.end(), emb.row(pick).begin(), emb.row(pick).end());
  }
  return centroids;
}

struct BalancedAssignment {
  std::vector<std::uint32_t> labels;
  double inertia = 0.0;  // against the centroids used for the assignment
};

/// Greedy capacity-constrained assignment: most-confident points first
/// (smallest nearest-minus-second-nearest gap), each taking its nearest
/// centroid with remaining capacity. Sizes end up within one of each other.
BalancedAssignment balanced_assign(const EmbeddingSet& emb, const std::vector<float>& centroids,
                                   int k) {
  const std::uint32_t n = emb.n, d = emb.d;
  std::vector<double> dists(std::size_t(n) * k);
  std::vector<double> regret(n);
  for (std::uint32_t i = 0; i < n; ++i) {
    double best = std::numeric_limits<double>::infinity();
    double second = std::numeric_limits<double>::infinity();
    for (int c = 0; c < k; ++c) {
      const double dist =
          sq_dist(emb.row(i), {centroids.data() + std::size_t(c) * d, d});
      dists[std::size_t(i) * k + c] = dist;
      if (dist < best) {
        second = best;
        best = dist;
      } else if (dist < second) {
        second = dist;
      }
    }
    regret[i] = k > 1 ? best - second : 0.0;
  }

  std::vector<std::uint32_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::uint32_t a, std::uint32_t b) {
    if (regret[a] != regret[b]) return regret[a] < regret[b];
    return a < b;
  });

  const std::uint32_t base = n / static_cast<std::uint32_t>(k);
  std::uint32_t extras = n % static_cast<std::uint32_t>(k);
  std::vector<std::uint32_t> counts(k, 0);

  BalancedAssignment result;
  result.labels.assign(n, 0);
  std::vector<std::pair<double, int>> prefs(k);
  for (std::uint32_t idx : order) {
    for (int c = 0; c < k; ++c) prefs[c] = {dists[std::size_t(idx) * k + c], c};
    std::sort(prefs.begin(), prefs.end());
    for (const auto& [dist, c] : prefs) {
      const bool has_base = counts[c] < base;
      const bool has_extra = counts[c] == base && extras > 0;
      if (has_base || has_extra) {
        if (has_extra) --extras;
        ++counts[c];
        result.labels[idx] = static_cast<std::uint32_t>(c);
        result.inertia += dist;
        break;
      }
    }
  }
  return result;
}

double assignment_inertia(const EmbeddingSet& emb, const std::vector<float>& centroids,
                          std::uint32_t d, const std::vector<std::uint32_t>& labels) {
  double total = 0.0;
  for (std::uint32_t i = 0; i < emb.n; ++i)
    total += sq_dist(emb.row(i), {centroids.data() + std::size_t(labels[i]) * d, d});
  return total;
}

std::vector<float> mean_update(const EmbeddingSet& emb, const std::vector<std::uint32_t>& labels,
                               int k) {
  const std::uint32_t d = emb.d;
  std::vector<double> sums(std::size_t(k) * d, 0.0);
  std::vector<std::uint32_t> counts(k, 0);
  for (std::uint32_t i = 0; i < emb.n; ++i) {
    const auto row = emb.row(i);
    double* dst = sums.data() + std::size_t(labels[i]) * d;
    for (std::uint32_t j = 0; j < d; ++j) dst[j] += row[j];
    ++counts[labels[i]];
  }
  std::vector<float> centroids(std::size_t(k) * d);
  for (int c = 0; c < k; ++c) {
    const double inv = counts[c] > 0 ? 1.0 / counts[c] : 0.0;
    for (std::uint32_t j = 0; j < d; ++j)
      centroids[std::size_t(c) * d + j] =
          static_cast<float>(sums[std::size_t(c) * d + j] * inv);
  }
  return centroids;
}

}  // namespace

ClusterModel balanced_kmeans(const EmbeddingSet& emb, int n_clusters, std::uint64_t seed,
                             int max_iter) {
  if (emb.n == 0) throw DomainError("cannot cluster an empty embedding set");
  if (n_clusters < 1) throw DomainError("K must be >= 1");
  if (static_cast<std::uint32_t>(n_clusters) > emb.n)
    throw DomainError("K = " + std::to_string(n_clusters) + " exceeds n = " +
                      std::to_string(emb.n));

  std::mt19937_64 rng(seed);
  std::vector<float> centroids = kmeans_pp_init(emb, n_clusters, rng);
  BalancedAssignment assignment = balanced_assign(emb, centroids, n_clusters);

  for (int iter = 0; iter < max_iter; ++iter) {
    centroids = mean_update(emb, assignment.labels, n_clusters);
    BalancedAssignment next = balanced_assign(emb, centroids, n_clusters);
    if (next.labels == assignment.labels) {
      assignment = std::move(next);
      break;
    }
    // Keep the old assignment when the greedy pass does not improve it; the
    // per-iteration inertia then never increases.
    const double old_inertia =
        assignment_inertia(emb, centroids, emb.d, assignment.labels);
    if (next.inertia >= old_inertia) {
      assignment.inertia = old_inertia;
      break;
    }
    assignment = std::move(next);
  }

  ClusterModel model;
  model.n_clusters = static_cast<std::uint32_t>(n_clusters);
  model.dim = emb.d;
  model.seed = seed;
  model.centroids = mean_update(emb, assignment.labels, n_clusters);
  model.sizes.assign(n_clusters, 0);
  for (std::uint32_t label : assignment.labels) ++model.sizes[label];
  model.inertia = assignment_inertia(emb, model.centroids, emb.d, assignment.labels);
  return model;
}

std::uint32_t assign(const ClusterModel& model, std::span<const float> x) {
  if (x.size() != model.dim)
    throw DomainError("query dimension " + std::to_string(x.size()) + " != model dimension " +
                      std::to_string(model.dim));
  std::uint32_t best = 0;
  double best_dist = std::numeric_limits<double>::infinity();
  for (std::uint32_t c = 0; c < model.n_clusters; ++c) {
    const double dist = sq_dist(x, model.centroid(c));
    if (dist < best_dist) {
      best_dist = dist;
      best = c;
    }
  }
  return best;
}

std::vector<std::uint32_t> route_topk(const ClusterModel& model, std::span<const float> x,
                                      int k) {
  if (x.size() != model.dim)
    throw DomainError("query dimension " + std::to_string(x.size()) + " != model dimension " +
                      std::to_string(model.dim));
  if (k < 1 || static_cast<std::uint32_t>(k) > model.n_clusters)
    throw DomainError("k must be in [1, K]");
  std::vector<std::pair<double, std::uint32_t>> ranked(model.n_clusters);
  for (std::uint32_t c = 0; c < model.n_clusters; ++c)
    ranked[c] = {sq_dist(x, model.centroid(c)), c};
  std::sort(ranked.begin(), ranked.end());
  std::vector<std::uint32_t> out(k);
  for (int i = 0; i < k; ++i) out[i] = ranked[i].second;
  return out;
}

double recall_at_k(const EmbeddingSet& prefixes, const EmbeddingSet& docs, int k) {
  if (prefixes.n != docs.n) throw DomainError("prefix/document counts differ");
  if (prefixes.d != docs.d) throw DomainError("prefix/document dimensions differ");
  if (k < 1) throw DomainError("k must be >= 1");

  std::unordered_map<std::string, std::uint32_t> doc_index;
  doc_index.reserve(docs.n);
  for (std::uint32_t j = 0; j < docs.n; ++j)
    if (!doc_index.emplace(docs.ids[j], j).second)
      throw DomainError("duplicate document id '" + docs.ids[j] + "'");

  std::size_t hits = 0;
  for (std::uint32_t i = 0; i < prefixes.n; ++i) {
    const auto it = doc_index.find(prefixes.ids[i]);
    if (it == doc_index.end())
      throw DomainError("prefix id '" + prefixes.ids[i] + "' has no paired document");
    const std::uint32_t self = it->second;
    const double self_dist = sq_dist(prefixes.row(i), docs.row(self));
    // Rank of the paired document under (distance, index) ordering.
    std::size_t rank = 0;
    for (std::uint32_t j = 0; j < docs.n; ++j) {
      if (j == self) continue;
      const double dist = sq_dist(prefixes.row(i), docs.row(j));
      if (dist < self_dist || (dist == self_dist && j < self)) ++rank;
    }
    if (rank < static_cast<std::size_t>(k)) ++hits;
  }
  return static_cast<double>(hits) / static_cast<double>(prefixes.n);
}

void save_cluster_model(const ClusterModel& model, const std::string& matrix_path) {
  write_matrix(matrix_path, model.centroids, model.n_clusters, model.dim);
  nlohmann::ordered_json meta;
  meta["K"] = model.n_clusters;
  meta["sizes"] = model.sizes;
  meta["inertia"] = model.inertia;
  meta["seed"] = model.seed;
  std::ofstream out(matrix_path + ".json");
  if (!out) throw IoError("cannot open '" + matrix_path + ".json' for writing");
  out << meta.dump(2) << '\n';
}

ClusterModel load_cluster_model(const std::string& matrix_path) {
  EmbeddingSet matrix = read_matrix(matrix_path);
  std::ifstream in(matrix_path + ".json");
  if (!in) throw IoError("cannot open '" + matrix_path + ".json'");
  nlohmann::json meta = nlohmann::json::parse(in, nullptr, true, true);

  ClusterModel model;
  model.centroids = std::move(matrix.data);
  model.n_clusters = matrix.n;
  model.dim = matrix.d;
  model.inertia = meta.at("inertia").get<double>();
  model.seed = meta.at("seed").get<std::uint64_t>();
  model.sizes = meta.at("sizes").get<std::vector<std::uint32_t>>();
  if (meta.at("K").get<std::uint32_t>() != model.n_clusters)
    throw IoError("metadata K does not match centroid matrix rows");
  return model;
}

}  // namespace splitlaw

#pragma once

#include <cstdint>
#include <vector>

#include "splitlaw/dataset.hpp"
#include "splitlaw/embedding_io.hpp"
#include "splitlaw/law.hpp"

namespace splitlaw {

/// Cartesian run grid mirroring a multi-size training sweep.
struct GridSpec {
  std::vector<double> sizes;     // parameter counts
  std::vector<double> pt_grid;   // billions
  std::vector<double> cpt_grid;  // billions
  double noise_sigma = 0.01;     // nats/token, additive Gaussian on loss
  std::uint64_t seed = 0;
};

struct SynthRuns {
  Dataset dataset;
  std::size_t out_of_band = 0;  // losses outside (0.5, 4.0); caller should warn
};

/// One RunRecord per grid cell with loss = eval_split_law + N(0, sigma^2).
/// Deterministic per seed (independent of evaluation order: per-cell RNG
/// streams). Throws DomainError on an all-zero (D, D_k) cell.
SynthRuns generate_runs(const SplitLawParams& params, const GridSpec& grid, int domain_id,
                        int n_domains = 0);

struct SynthBlobs {
  EmbeddingSet docs;
  EmbeddingSet prefixes;  // docs + isotropic noise, paired ids
  std::vector<std::uint32_t> labels;
};

/// K Gaussian clusters (per-coordinate std = noise) with centers at mutual
/// distance >= separation; prefixes are the docs plus one more noise draw.
SynthBlobs generate_blobs(int n_clusters, int n_per_cluster, int dim, double separation,
                          double noise, std::uint64_t seed);

}  // namespace splitlaw

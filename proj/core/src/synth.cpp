#include "splitlaw/synth.hpp"

#include <cmath>
#include <random>

#include "splitlaw/errors.hpp"
#include "splitlaw/rng.hpp"

namespace splitlaw {

SynthRuns generate_runs(const SplitLawParams& params, const GridSpec& grid, int domain_id,
                        int n_domains) {
  if (grid.sizes.empty() || grid.pt_grid.empty() || grid.cpt_grid.empty())
    throw DomainError("grid axes must be nonempty");
  if (grid.noise_sigma < 0.0) throw DomainError("noise sigma must be nonnegative");
  if (domain_id < 0) throw DomainError("domain_id must be nonnegative");
  for (double pt : grid.pt_grid)
    for (double cpt : grid.cpt_grid)
      if (pt == 0.0 && cpt == 0.0)
        throw DomainError("grid contains an all-zero (D, D_k) cell");

  SynthRuns out;
  out.dataset.n_domains = n_domains >= 1 ? n_domains : domain_id + 1;
  out.dataset.domain_weights.assign(out.dataset.n_domains, 1.0 / out.dataset.n_domains);

  std::uint64_t cell = 0;
  for (double n : grid.sizes) {
    for (double pt : grid.pt_grid) {
      for (double cpt : grid.cpt_grid) {
        RunRecord rec;
        rec.n_params = n;
        rec.pt_tokens = pt;
        rec.cpt_tokens = cpt;
        rec.domain_id = domain_id;
        rec.loss = eval_split_law(params, n, pt, cpt);
        if (grid.noise_sigma > 0.0) {
          std::mt19937_64 rng(derive_seed(grid.seed, cell));
          std::normal_distribution<double> gauss(0.0, grid.noise_sigma);
          rec.loss += gauss(rng);
        }
        rec.source_tag = "synth";
        if (rec.loss <= 0.5 || rec.loss >= 4.0) ++out.out_of_band;
        out.dataset.records.push_back(std::move(rec));
        ++cell;
      }
    }
  }
  return out;
}

SynthBlobs generate_blobs(int n_clusters, int n_per_cluster, int dim, double separation,
                          double noise, std::uint64_t seed) {
  if (n_clusters < 1 || n_per_cluster < 1 || dim < 1)
    throw DomainError("blob counts and dimension must be >= 1");
  if (separation <= 0.0) throw DomainError("separation must be positive");
  if (noise < 0.0) throw DomainError("noise must be nonnegative");

  // Centers on scaled axis points: center_i = separation * (i + 1) * e_{i mod dim}.
  // Any two differ either in axis (distance >= separation * sqrt(2)) or by at
  // least dim steps along one axis (distance >= separation * dim).
  std::vector<std::vector<double>> centers(n_clusters, std::vector<double>(dim, 0.0));
  for (int c = 0; c < n_clusters; ++c)
    centers[c][c % dim] = separation * static_cast<double>(c + 1);

  const std::uint32_t n = static_cast<std::uint32_t>(n_clusters) *
                          static_cast<std::uint32_t>(n_per_cluster);
  SynthBlobs out;
  out.docs.n = out.prefixes.n = n;
  out.docs.d = out.prefixes.d = static_cast<std::uint32_t>(dim);
  out.docs.data.resize(std::size_t(n) * dim);
  out.prefixes.data.resize(std::size_t(n) * dim);
  out.labels.resize(n);

  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::uint32_t row = 0;
  for (int c = 0; c < n_clusters; ++c) {
    for (int i = 0; i < n_per_cluster; ++i, ++row) {
      out.labels[row] = static_cast<std::uint32_t>(c);
      out.docs.ids.push_back(std::to_string(row));
      out.prefixes.ids.push_back(std::to_string(row));
      float* doc = out.docs.data.data() + std::size_t(row) * dim;
      float* prefix = out.prefixes.data.data() + std::size_t(row) * dim;
      for (int j = 0; j < dim; ++j)
        doc[j] = static_cast<float>(centers[c][j] + noise * gauss(rng));
      for (int j = 0; j < dim; ++j)
        prefix[j] = static_cast<float>(doc[j] + noise * gauss(rng));
    }
  }
  return out;
}

}  // namespace splitlaw

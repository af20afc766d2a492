#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace splitlaw {

/// Row-major n x d matrix of document (or prefix) embeddings plus their ids.
struct EmbeddingSet {
  std::vector<float> data;  // n * d, row-major
  std::vector<std::string> ids;
  std::uint32_t n = 0;
  std::uint32_t d = 0;

  std::span<const float> row(std::uint32_t i) const { return {data.data() + std::size_t(i) * d, d}; }
};

/// Binary matrix format: little-endian header {magic "EMB1", u32 n, u32 d}
/// followed by n*d float32 values row-major. Ids live in a sidecar text file,
/// one per line.
void write_matrix(const std::string& path, std::span<const float> data, std::uint32_t n,
                  std::uint32_t d);
EmbeddingSet read_matrix(const std::string& path);  // ids left empty

void write_ids(const std::string& path, std::span<const std::string> ids);
std::vector<std::string> read_ids(const std::string& path);

EmbeddingSet read_embeddings(const std::string& matrix_path, const std::string& ids_path);
void write_embeddings(const EmbeddingSet& emb, const std::string& matrix_path,
                      const std::string& ids_path);

}  // namespace splitlaw

#include "splitlaw/embedding_io.hpp"

#include <cmath>
#include <cstring>
#include <fstream>

#include "splitlaw/errors.hpp"

namespace splitlaw {

namespace {

constexpr char kMagic[4] = {'E', 'M', 'B', '1'};

void write_u32(std::ofstream& out, std::uint32_t v) {
  unsigned char bytes[4] = {static_cast<unsigned char>(v & 0xff),
                            static_cast<unsigned char>((v >> 8) & 0xff),
                            static_cast<unsigned char>((v >> 16) & 0xff),
                            static_cast<unsigned char>((v >> 24) & 0xff)};
  out.write(reinterpret_cast<const char*>(bytes), 4);
}

std::uint32_t read_u32(std::ifstream& in) {
  unsigned char bytes[4];
  in.read(reinterpret_cast<char*>(bytes), 4);
  return static_cast<std::uint32_t>(bytes[0]) | (static_cast<std::uint32_t>(bytes[1]) << 8) |
         (static_cast<std::uint32_t>(bytes[2]) << 16) |
         (static_cast<std::uint32_t>(bytes[3]) << 24);
}

}  // namespace

void write_matrix(const std::string& path, std::span<const float> data, std::uint32_t n,
                  std::uint32_t d) {
  if (data.size() != std::size_t(n) * d) throw IoError("matrix data size does not match n*d");
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open '" + path + "' for writing");
  out.write(kMagic, 4);
  write_u32(out, n);
  write_u32(out, d);
  // float32 payload is written natively; this code targets little-endian hosts
  out.write(reinterpret_cast<const char*>(data.data()),
            static_cast<std::streamsize>(data.size() * sizeof(float)));
  if (!out) throw IoError("short write to '" + path + "'");
}

EmbeddingSet read_matrix(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path + "'");
  char magic[4];
  in.read(magic, 4);
  if (!in || std::memcmp(magic, kMagic, 4) != 0)
    throw IoError("'" + path + "' is not an EMB1 matrix (bad magic)");
  EmbeddingSet emb;
  emb.n = read_u32(in);
  emb.d = read_u32(in);
  if (!in) throw IoError("'" + path + "' has a truncated header");
  if (emb.n == 0 || emb.d == 0) throw IoError("'" + path + "' declares an empty matrix");
  emb.data.resize(std::size_t(emb.n) * emb.d);
  in.read(reinterpret_cast<char*>(emb.data.data()),
          static_cast<std::streamsize>(emb.data.size() * sizeof(float)));
  if (!in) throw IoError("'" + path + "' is shorter than its declared n*d payload");
  for (float v : emb.data)
    if (!std::isfinite(v)) throw IoError("'" + path + "' contains non-finite values");
  return emb;
}

void write_ids(const std::string& path, std::span<const std::string> ids) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open '" + path + "' for writing");
  for (const auto& id : ids) out << id << '\n';
}

std::vector<std::string> read_ids(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open '" + path + "'");
  std::vector<std::string> ids;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    ids.push_back(line);
  }
  return ids;
}

EmbeddingSet read_embeddings(const std::string& matrix_path, const std::string& ids_path) {
  EmbeddingSet emb = read_matrix(matrix_path);
  emb.ids = read_ids(ids_path);
  if (emb.ids.size() != emb.n)
    throw IoError("id count (" + std::to_string(emb.ids.size()) + ") does not match matrix rows (" +
                  std::to_string(emb.n) + ")");
  return emb;
}

void write_embeddings(const EmbeddingSet& emb, const std::string& matrix_path,
                      const std::string& ids_path) {
  write_matrix(matrix_path, emb.data, emb.n, emb.d);
  write_ids(ids_path, emb.ids);
}

}  // namespace splitlaw

#pragma once

#include <cstdint>
#include <istream>
#include <ostream>
#include <span>
#include <string>
#include <vector>

namespace graphgan {

/// Dense V x k matrix of vertex embeddings, one row per vertex.
class EmbeddingTable {
 public:
  EmbeddingTable() = default;
  EmbeddingTable(std::size_t vertex_count, std::size_t dim)
      : dim_(dim), data_(vertex_count * dim, 0.0) {}

  /// Entries i.i.d. uniform on [-0.5/k, +0.5/k]; identical (V, k, seed)
  /// give a bitwise-identical table.
  static EmbeddingTable random_init(std::size_t vertex_count, std::size_t dim,
                                    std::uint64_t seed);

  std::size_t vertex_count() const { return dim_ == 0 ? 0 : data_.size() / dim_; }
  std::size_t dim() const { return dim_; }

  std::span<double> row(std::size_t v) { return {data_.data() + v * dim_, dim_}; }
  std::span<const double> row(std::size_t v) const { return {data_.data() + v * dim_, dim_}; }

  double dot(std::size_t u, std::size_t v) const;

  bool all_finite() const;

  friend bool operator==(const EmbeddingTable&, const EmbeddingTable&) = default;

 private:
  std::size_t dim_ = 0;
  std::vector<double> data_;
};

/// Text format: header `V k`, then `<label> <f_1> ... <f_k>` per vertex
/// with round-trip decimal precision.
void export_embeddings(const EmbeddingTable& table,
                       const std::vector<std::string>& labels, std::ostream& out);
void export_embeddings_file(const EmbeddingTable& table,
                            const std::vector<std::string>& labels,
                            const std::string& path);

struct ImportedEmbeddings {
  EmbeddingTable table;
  std::vector<std::string> labels;
};

ImportedEmbeddings import_embeddings(std::istream& in);
ImportedEmbeddings import_embeddings_file(const std::string& path);

}  // namespace graphgan

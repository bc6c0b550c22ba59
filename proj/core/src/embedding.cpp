#include "graphgan/embedding.hpp"

#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "graphgan/rng.hpp"
#include "graphgan/text.hpp"

namespace graphgan {

EmbeddingTable EmbeddingTable::random_init(std::size_t vertex_count, std::size_t dim,
                                           std::uint64_t seed) {
  if (vertex_count == 0 || dim == 0)
    throw std::invalid_argument("embedding init: V and k must be >= 1");
  EmbeddingTable table(vertex_count, dim);
  auto rng = stream_rng(seed, {0x1ab1e5eedULL});
  const double half_width = 0.5 / static_cast<double>(dim);
  for (std::size_t v = 0; v < vertex_count; ++v)
    for (double& x : table.row(v))
      x = (uniform_unit(rng) * 2.0 - 1.0) * half_width;
  return table;
}

double EmbeddingTable::dot(std::size_t u, std::size_t v) const {
  auto a = row(u);
  auto b = row(v);
  double acc = 0.0;
  for (std::size_t i = 0; i < dim_; ++i) acc += a[i] * b[i];
  return acc;
}

bool EmbeddingTable::all_finite() const {
  for (double x : data_)
    if (!std::isfinite(x)) return false;
  return true;
}

void export_embeddings(const EmbeddingTable& table,
                       const std::vector<std::string>& labels, std::ostream& out) {
  if (labels.size() != table.vertex_count())
    throw std::invalid_argument("export: label count does not match table");
  out << table.vertex_count() << ' ' << table.dim() << '\n';
  for (std::size_t v = 0; v < table.vertex_count(); ++v) {
    out << labels[v];
    for (double x : table.row(v)) out << ' ' << format_double(x);
    out << '\n';
  }
  if (!out) throw std::runtime_error("export: write failure");
}

void export_embeddings_file(const EmbeddingTable& table,
                            const std::vector<std::string>& labels,
                            const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("export: cannot open " + path);
  export_embeddings(table, labels, out);
}

ImportedEmbeddings import_embeddings(std::istream& in) {
  std::string header;
  if (!std::getline(in, header)) throw std::runtime_error("import: missing header");
  std::istringstream head(header);
  std::size_t vertex_count = 0, dim = 0;
  if (!(head >> vertex_count >> dim) || vertex_count == 0 || dim == 0)
    throw std::runtime_error("import: bad header '" + header + "'");
  ImportedEmbeddings result{EmbeddingTable(vertex_count, dim), {}};
  result.labels.reserve(vertex_count);
  std::string line;
  for (std::size_t v = 0; v < vertex_count; ++v) {
    if (!std::getline(in, line))
      throw std::runtime_error("import: expected " + std::to_string(vertex_count) +
                               " rows, got " + std::to_string(v));
    std::istringstream fields(line);
    std::string label, token;
    if (!(fields >> label)) throw std::runtime_error("import: empty row " + std::to_string(v));
    auto row = result.table.row(v);
    for (std::size_t i = 0; i < dim; ++i) {
      if (!(fields >> token) || !parse_double(token, row[i]))
        throw std::runtime_error("import: row '" + label + "' does not have " +
                                 std::to_string(dim) + " values");
    }
    if (fields >> token)
      throw std::runtime_error("import: row '" + label + "' has extra values");
    result.labels.push_back(std::move(label));
  }
  return result;
}

ImportedEmbeddings import_embeddings_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("import: cannot open " + path);
  return import_embeddings(in);
}

}  // namespace graphgan

#include "graphgan/discriminator.hpp"

#include <cmath>
#include <stdexcept>
#include <unordered_map>
#include <vector>

namespace graphgan {

double d_score(VertexId v, VertexId v_c, const EmbeddingTable& theta_d) {
  return 1.0 / (1.0 + std::exp(-theta_d.dot(v, v_c)));
}

void discriminator_step(std::span<const LabeledPair> pairs, EmbeddingTable& theta_d,
                        double learning_rate) {
  const std::size_t k = theta_d.dim();
  std::unordered_map<VertexId, std::vector<double>> batch;
  auto accumulate = [&](VertexId row, VertexId other, double coeff) {
    auto [it, inserted] = batch.try_emplace(row, k, 0.0);
    auto other_row = theta_d.row(other);
    for (std::size_t d = 0; d < k; ++d) it->second[d] += coeff * other_row[d];
  };
  for (const LabeledPair& pair : pairs) {
    if (pair.v == pair.v_c)
      throw std::invalid_argument("discriminator_step: pair with v == v_c");
    double d = d_score(pair.v, pair.v_c, theta_d);
    // ascent on log D for positives, log(1 - D) for negatives
    double coeff = pair.positive ? (1.0 - d) : -d;
    accumulate(pair.v, pair.v_c, coeff);
    accumulate(pair.v_c, pair.v, coeff);
  }
  for (auto& [vertex, delta] : batch) {
    auto row = theta_d.row(vertex);
    for (std::size_t d = 0; d < k; ++d) {
      row[d] += learning_rate * delta[d];
      if (!std::isfinite(row[d]))
        throw std::runtime_error("discriminator_step: non-finite parameter at vertex " +
                                 std::to_string(vertex));
    }
  }
}

}  // namespace graphgan

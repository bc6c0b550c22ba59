#pragma once

#include <span>

#include "graphgan/embedding.hpp"
#include "graphgan/graph.hpp"

namespace graphgan {

/// Probability that an edge exists between v and v_c: the sigmoid of the
/// inner product of their discriminator embeddings. Symmetric.
double d_score(VertexId v, VertexId v_c, const EmbeddingTable& theta_d);

struct LabeledPair {
  VertexId v;
  VertexId v_c;
  bool positive;  // true: observed edge; false: generated
};

/// One gradient-ascent step on sum of log D over positives plus
/// log(1 - D) over negatives. Only the rows of the paired vertices move;
/// the batch is accumulated and applied once.
void discriminator_step(std::span<const LabeledPair> pairs, EmbeddingTable& theta_d,
                        double learning_rate);

}  // namespace graphgan

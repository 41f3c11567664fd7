#pragma once

#include <string>
#include <vector>

#include "graphmax/matrix.hpp"

namespace graphmax {

// One K-dimensional vector per graph, the final product of training. Labels
// ride along for downstream evaluation; -1 marks an unlabeled graph.
struct EmbeddingTable {
  std::vector<int> graph_ids;
  std::vector<int> labels;
  Matrix vectors;  // M x K, row i belongs to graph_ids[i]

  int size() const { return static_cast<int>(graph_ids.size()); }
  int dim() const { return vectors.cols(); }
  bool has_labels() const;
  void validate() const;
};

// CSV with header `graph_id, label, x_1, ..., x_K`; values at full double
// precision so a round-trip is byte-stable.
void write_embedding_csv(const EmbeddingTable& table, const std::string& path);
EmbeddingTable read_embedding_csv(const std::string& path);

// CSV with header `graph_id, s_1, ..., s_D`, one periphery summary per graph.
void write_summary_csv(const std::vector<Matrix>& summaries, const std::string& path);

}  // namespace graphmax

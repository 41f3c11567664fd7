#pragma once

#include <string>

#include "graphmax/graph.hpp"

namespace graphmax {

// Loads a dataset in the TU-Dortmund flat-file layout from `directory`:
//   <name>_A.txt               comma-separated 1-based global edge pairs
//   <name>_graph_indicator.txt 1-based graph id per node line
//   <name>_graph_labels.txt    one class label per graph
//   <name>_node_labels.txt     optional node label per node
//   <name>_node_attributes.txt optional comma-separated reals per node
// Edges are symmetrized, self-loops dropped, duplicates collapsed; graph
// labels are remapped to contiguous 0-based ids; node ids become per-graph
// 0-based indices in file order.
GraphDataset load_tu_dataset(const std::string& directory, const std::string& name);

// FNV-1a over the raw bytes of the dataset files, for run manifests.
std::uint64_t tu_dataset_checksum(const std::string& directory, const std::string& name);

}  // namespace graphmax

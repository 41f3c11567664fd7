#pragma once

#include <map>
#include <string>
#include <vector>

#include "graphmax/matrix.hpp"

namespace graphmax {

// One undirected graph. Adjacency is {0,1}-valued, symmetric, zero-diagonal
// from ingest onward; self-loops appear only inside computations that add
// them explicitly.
struct Graph {
  Matrix adjacency;              // n x n
  Matrix features;               // n x D once a feature policy has run
  Matrix attributes;             // raw node attributes from file, empty if absent
  std::vector<int> node_labels;  // raw node labels from file, empty if absent
  int label = -1;                // class id, -1 when unlabeled

  int node_count() const { return adjacency.rows(); }
  bool has_label() const { return label >= 0; }
};

struct GraphDataset {
  std::string name;
  std::vector<Graph> graphs;
  int feature_dim = 0;  // 0 until build_node_features has run
  int num_classes = 0;

  int size() const { return static_cast<int>(graphs.size()); }
  int max_nodes() const;
  bool has_node_labels() const;
  bool has_attributes() const;
};

enum class FeaturePolicy { kUseAttributes, kOneHotNodeLabel, kOneHotDegree };

FeaturePolicy parse_feature_policy(const std::string& name);
std::string to_string(FeaturePolicy policy);

// Fills every graph's feature matrix with a common dimension D:
// raw attributes, one-hot over the dataset-wide node-label alphabet, or
// one-hot over degrees capped at the dataset max degree.
GraphDataset build_node_features(GraphDataset dataset, FeaturePolicy policy);

struct ValidationReport {
  int symmetry_violations = 0;      // unordered entry pairs that disagree
  int self_loops = 0;
  int isolated_nodes = 0;
  std::vector<int> class_histogram;
  std::map<int, int> node_count_histogram;
  std::string summary() const;
};

// Read-only integrity sweep.
ValidationReport validate(const GraphDataset& dataset);

// Binary cache with a version header; round-trips bit-for-bit.
void save_dataset_cache(const GraphDataset& dataset, const std::string& path);
GraphDataset load_dataset_cache(const std::string& path);

}  // namespace graphmax

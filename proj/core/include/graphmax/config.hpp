#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "graphmax/graph.hpp"

namespace graphmax {

struct EncoderConfig {
  int num_layers = 2;
  std::vector<int> hidden_units = {128};  // widths of non-final layers
  int patience = 30;
  int max_epochs = 2000;
  double learning_rate = 1e-3;
};

struct HierarchyConfig {
  int num_levels = 3;      // R
  double pool_ratio = 0.5; // gamma
  int embed_dim = 128;     // K
  int n_p = 4;             // negatives per graph, periphery objective
  int n_h = 4;             // negatives per graph, hierarchical objective
  int patience = 1000;
  int max_epochs = 3000;
  double learning_rate = 1e-3;
};

// full       both objectives, trained periphery summaries
// +NF        summaries are row-means of raw features; no encoder training
// +EF        summaries are row-means of the encoder embedding H
// -P         periphery objective and discriminator dropped
// -H         hierarchical objective and discriminator dropped
enum class Variant { kFull, kNodeFeatures, kEmbeddingFeatures, kNoPeriphery, kNoHierarchy };

Variant parse_variant(const std::string& name);
std::string to_string(Variant variant);

struct HyperConfig {
  std::string dataset;
  FeaturePolicy feature_policy = FeaturePolicy::kOneHotNodeLabel;
  std::uint64_t seed = 0;
  Variant variant = Variant::kFull;
  int workers = 1;
  EncoderConfig encoder;
  HierarchyConfig hierarchy;

  void validate() const;  // throws std::invalid_argument naming the field
};

// Per-dataset defaults; unknown names get the generic (MUTAG-shaped) row.
HyperConfig default_config(const std::string& dataset_name);

// Strict parse: unknown keys are errors naming the key. Fields omitted fall
// back to the per-dataset defaults selected by "dataset".
HyperConfig parse_config_json(const std::string& text);
HyperConfig load_config_file(const std::string& path);
std::string config_to_json(const HyperConfig& config);

}  // namespace graphmax

#include "graphmax/graph.hpp"

#include <algorithm>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>

#include "binio.hpp"

namespace graphmax {

int GraphDataset::max_nodes() const {
  int m = 0;
  for (const Graph& g : graphs) m = std::max(m, g.node_count());
  return m;
}

bool GraphDataset::has_node_labels() const {
  return !graphs.empty() && !graphs.front().node_labels.empty();
}

bool GraphDataset::has_attributes() const {
  return !graphs.empty() && !graphs.front().attributes.empty();
}

FeaturePolicy parse_feature_policy(const std::string& name) {
  if (name == "use-attributes") return FeaturePolicy::kUseAttributes;
  if (name == "one-hot-node-label") return FeaturePolicy::kOneHotNodeLabel;
  if (name == "one-hot-degree") return FeaturePolicy::kOneHotDegree;
  throw std::invalid_argument(
      "feature_policy: unknown value '" + name +
      "' (want use-attributes, one-hot-node-label, or one-hot-degree)");
}

std::string to_string(FeaturePolicy policy) {
  switch (policy) {
    case FeaturePolicy::kUseAttributes: return "use-attributes";
    case FeaturePolicy::kOneHotNodeLabel: return "one-hot-node-label";
    case FeaturePolicy::kOneHotDegree: return "one-hot-degree";
  }
  return "?";
}

namespace {

int degree_of(const Graph& g, int v) {
  int d = 0;
  for (int u = 0; u < g.node_count(); ++u) {
    if (g.adjacency(v, u) != 0.0) ++d;
  }
  return d;
}

}  // namespace

GraphDataset build_node_features(GraphDataset dataset, FeaturePolicy policy) {
  if (dataset.graphs.empty()) {
    throw std::invalid_argument("build_node_features: empty dataset");
  }
  switch (policy) {
    case FeaturePolicy::kUseAttributes: {
      if (!dataset.has_attributes()) {
        throw std::invalid_argument("build_node_features: dataset '" + dataset.name +
                                    "' has no node attributes");
      }
      int d = dataset.graphs.front().attributes.cols();
      for (Graph& g : dataset.graphs) g.features = g.attributes;
      dataset.feature_dim = d;
      break;
    }
    case FeaturePolicy::kOneHotNodeLabel: {
      if (!dataset.has_node_labels()) {
        throw std::invalid_argument("build_node_features: dataset '" + dataset.name +
                                    "' has no node labels");
      }
      std::set<int> alphabet;
      for (const Graph& g : dataset.graphs) {
        alphabet.insert(g.node_labels.begin(), g.node_labels.end());
      }
      std::map<int, int> index;
      int next = 0;
      for (int v : alphabet) index[v] = next++;
      int d = static_cast<int>(alphabet.size());
      for (Graph& g : dataset.graphs) {
        g.features = Matrix(g.node_count(), d);
        for (int v = 0; v < g.node_count(); ++v) {
          g.features(v, index.at(g.node_labels[v])) = 1.0;
        }
      }
      dataset.feature_dim = d;
      break;
    }
    case FeaturePolicy::kOneHotDegree: {
      int max_degree = 0;
      for (const Graph& g : dataset.graphs) {
        for (int v = 0; v < g.node_count(); ++v) {
          max_degree = std::max(max_degree, degree_of(g, v));
        }
      }
      int d = max_degree + 1;
      for (Graph& g : dataset.graphs) {
        g.features = Matrix(g.node_count(), d);
        for (int v = 0; v < g.node_count(); ++v) {
          g.features(v, std::min(degree_of(g, v), max_degree)) = 1.0;
        }
      }
      dataset.feature_dim = d;
      break;
    }
  }
  return dataset;
}

ValidationReport validate(const GraphDataset& dataset) {
  ValidationReport report;
  report.class_histogram.assign(std::max(dataset.num_classes, 0), 0);
  for (const Graph& g : dataset.graphs) {
    int n = g.node_count();
    for (int i = 0; i < n; ++i) {
      if (g.adjacency(i, i) != 0.0) ++report.self_loops;
      bool isolated = true;
      for (int j = 0; j < n; ++j) {
        if (j > i && g.adjacency(i, j) != g.adjacency(j, i)) ++report.symmetry_violations;
        if (j != i && g.adjacency(i, j) != 0.0) isolated = false;
      }
      if (isolated) ++report.isolated_nodes;
    }
    if (g.has_label()) {
      if (g.label >= static_cast<int>(report.class_histogram.size())) {
        report.class_histogram.resize(g.label + 1, 0);
      }
      ++report.class_histogram[g.label];
    }
    ++report.node_count_histogram[n];
  }
  return report;
}

std::string ValidationReport::summary() const {
  std::ostringstream out;
  out << "symmetry_violations=" << symmetry_violations << " self_loops=" << self_loops
      << " isolated_nodes=" << isolated_nodes << " classes=[";
  for (std::size_t i = 0; i < class_histogram.size(); ++i) {
    if (i > 0) out << ",";
    out << class_histogram[i];
  }
  out << "]";
  return out.str();
}

namespace {

constexpr char kCacheMagic[8] = {'G', 'M', 'X', 'D', 'A', 'T', 'A', '\0'};
constexpr std::uint32_t kCacheVersion = 1;

using namespace binio;

}  // namespace

void save_dataset_cache(const GraphDataset& dataset, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("save_dataset_cache: cannot open " + path);
  out.write(kCacheMagic, sizeof(kCacheMagic));
  write_u32(out, kCacheVersion);
  write_string(out, dataset.name);
  write_u32(out, static_cast<std::uint32_t>(dataset.graphs.size()));
  write_i32(out, dataset.feature_dim);
  write_i32(out, dataset.num_classes);
  for (const Graph& g : dataset.graphs) {
    write_i32(out, g.label);
    write_matrix(out, g.adjacency);
    write_matrix(out, g.features);
    write_matrix(out, g.attributes);
    write_u32(out, static_cast<std::uint32_t>(g.node_labels.size()));
    for (int v : g.node_labels) write_i32(out, v);
  }
  if (!out) throw std::runtime_error("save_dataset_cache: write failed for " + path);
}

GraphDataset load_dataset_cache(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("load_dataset_cache: cannot open " + path);
  char magic[8] = {};
  if (!in.read(magic, sizeof(magic)) || std::memcmp(magic, kCacheMagic, sizeof(magic)) != 0) {
    throw std::runtime_error("load_dataset_cache: bad magic in " + path);
  }
  std::uint32_t version = read_u32(in, "version");
  if (version != kCacheVersion) {
    throw std::runtime_error("load_dataset_cache: unsupported version " +
                             std::to_string(version) + " in " + path);
  }
  GraphDataset dataset;
  dataset.name = read_string(in, "name");
  std::uint32_t count = read_u32(in, "graph count");
  dataset.feature_dim = read_i32(in, "feature_dim");
  dataset.num_classes = read_i32(in, "num_classes");
  dataset.graphs.resize(count);
  for (Graph& g : dataset.graphs) {
    g.label = read_i32(in, "label");
    g.adjacency = read_matrix(in, "adjacency");
    g.features = read_matrix(in, "features");
    g.attributes = read_matrix(in, "attributes");
    std::uint32_t nl = read_u32(in, "node label count");
    g.node_labels.resize(nl);
    for (std::uint32_t i = 0; i < nl; ++i) g.node_labels[i] = read_i32(in, "node label");
  }
  return dataset;
}

}  // namespace graphmax

#include "graphmax/tu_loader.hpp"

#include <algorithm>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>

#include "graphmax/log.hpp"

namespace graphmax {

namespace {

std::string file_path(const std::string& directory, const std::string& name,
                      const std::string& suffix) {
  return (std::filesystem::path(directory) / (name + suffix)).string();
}

std::vector<std::string> read_lines(const std::string& path, bool required) {
  std::ifstream in(path);
  if (!in) {
    if (required) {
      throw std::runtime_error("load_tu_dataset: missing required file " + path);
    }
    return {};
  }
  std::vector<std::string> lines;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    lines.push_back(line);
  }
  // Trailing blank lines are common in the distributed archives.
  while (!lines.empty() && lines.back().find_first_not_of(" \t") == std::string::npos) {
    lines.pop_back();
  }
  return lines;
}

long parse_long(const std::string& text, const std::string& path, std::size_t lineno) {
  std::size_t pos = 0;
  long v = 0;
  try {
    v = std::stol(text, &pos);
  } catch (const std::exception&) {
    throw std::runtime_error("load_tu_dataset: " + path + " line " +
                             std::to_string(lineno) + ": expected integer, got '" + text + "'");
  }
  if (text.find_first_not_of(" \t", pos) != std::string::npos) {
    throw std::runtime_error("load_tu_dataset: " + path + " line " +
                             std::to_string(lineno) + ": trailing junk in '" + text + "'");
  }
  return v;
}

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> fields;
  std::string field;
  std::istringstream in(line);
  while (std::getline(in, field, ',')) fields.push_back(field);
  return fields;
}

}  // namespace

GraphDataset load_tu_dataset(const std::string& directory, const std::string& name) {
  if (!std::filesystem::is_directory(directory)) {
    throw std::runtime_error("load_tu_dataset: no such directory " + directory);
  }
  const std::string a_path = file_path(directory, name, "_A.txt");
  const std::string ind_path = file_path(directory, name, "_graph_indicator.txt");
  const std::string glab_path = file_path(directory, name, "_graph_labels.txt");
  const std::string nlab_path = file_path(directory, name, "_node_labels.txt");
  const std::string nattr_path = file_path(directory, name, "_node_attributes.txt");

  std::vector<std::string> indicator_lines = read_lines(ind_path, true);
  const int total_nodes = static_cast<int>(indicator_lines.size());
  if (total_nodes == 0) {
    throw std::runtime_error("load_tu_dataset: " + ind_path + " is empty");
  }

  // node -> graph id (1-based in file).
  std::vector<int> node_graph(total_nodes);
  int num_graphs = 0;
  for (int i = 0; i < total_nodes; ++i) {
    long gid = parse_long(indicator_lines[i], ind_path, i + 1);
    if (gid < 1) {
      throw std::runtime_error("load_tu_dataset: " + ind_path + " line " +
                               std::to_string(i + 1) + ": graph id " + std::to_string(gid) +
                               " must be >= 1");
    }
    node_graph[i] = static_cast<int>(gid);
    num_graphs = std::max(num_graphs, static_cast<int>(gid));
  }

  std::vector<int> node_count(num_graphs, 0);
  std::vector<int> local_index(total_nodes);
  for (int i = 0; i < total_nodes; ++i) {
    local_index[i] = node_count[node_graph[i] - 1]++;
  }
  for (int g = 0; g < num_graphs; ++g) {
    if (node_count[g] == 0) {
      throw std::runtime_error("load_tu_dataset: dangling graph id " + std::to_string(g + 1) +
                               " has no nodes in " + ind_path);
    }
  }

  std::vector<std::string> label_lines = read_lines(glab_path, true);
  if (static_cast<int>(label_lines.size()) != num_graphs) {
    throw std::runtime_error("load_tu_dataset: " + glab_path + " has " +
                             std::to_string(label_lines.size()) + " lines but indicator names " +
                             std::to_string(num_graphs) + " graphs");
  }
  std::vector<long> raw_labels(num_graphs);
  std::map<long, int> label_map;
  for (int g = 0; g < num_graphs; ++g) {
    raw_labels[g] = parse_long(label_lines[g], glab_path, g + 1);
    label_map[raw_labels[g]] = 0;
  }
  int next_class = 0;
  for (auto& [raw, mapped] : label_map) mapped = next_class++;

  GraphDataset dataset;
  dataset.name = name;
  dataset.num_classes = next_class;
  dataset.graphs.resize(num_graphs);
  for (int g = 0; g < num_graphs; ++g) {
    dataset.graphs[g].adjacency = Matrix(node_count[g], node_count[g]);
    dataset.graphs[g].label = label_map.at(raw_labels[g]);
  }

  std::vector<std::string> edge_lines = read_lines(a_path, true);
  for (std::size_t lineno = 1; lineno <= edge_lines.size(); ++lineno) {
    const std::string& line = edge_lines[lineno - 1];
    if (line.find_first_not_of(" \t") == std::string::npos) continue;
    std::vector<std::string> fields = split_csv(line);
    if (fields.size() != 2) {
      throw std::runtime_error("load_tu_dataset: " + a_path + " line " +
                               std::to_string(lineno) + ": expected 'u, v', got '" + line + "'");
    }
    long u = parse_long(fields[0], a_path, lineno);
    long v = parse_long(fields[1], a_path, lineno);
    if (u < 1 || u > total_nodes || v < 1 || v > total_nodes) {
      throw std::runtime_error("load_tu_dataset: " + a_path + " line " +
                               std::to_string(lineno) + ": node id out of range [1, " +
                               std::to_string(total_nodes) + "]");
    }
    int gu = node_graph[u - 1];
    int gv = node_graph[v - 1];
    if (gu != gv) {
      throw std::runtime_error("load_tu_dataset: " + a_path + " line " +
                               std::to_string(lineno) + ": edge joins graphs " +
                               std::to_string(gu) + " and " + std::to_string(gv));
    }
    if (u == v) continue;  // self-loops are stripped on ingest
    Matrix& adj = dataset.graphs[gu - 1].adjacency;
    adj(local_index[u - 1], local_index[v - 1]) = 1.0;
    adj(local_index[v - 1], local_index[u - 1]) = 1.0;
  }

  std::vector<std::string> nlab_lines = read_lines(nlab_path, false);
  if (!nlab_lines.empty()) {
    if (static_cast<int>(nlab_lines.size()) != total_nodes) {
      throw std::runtime_error("load_tu_dataset: " + nlab_path + " has " +
                               std::to_string(nlab_lines.size()) + " lines but indicator names " +
                               std::to_string(total_nodes) + " nodes");
    }
    for (int g = 0; g < num_graphs; ++g) {
      dataset.graphs[g].node_labels.resize(node_count[g]);
    }
    for (int i = 0; i < total_nodes; ++i) {
      long v = parse_long(nlab_lines[i], nlab_path, i + 1);
      dataset.graphs[node_graph[i] - 1].node_labels[local_index[i]] = static_cast<int>(v);
    }
  }

  std::vector<std::string> attr_lines = read_lines(nattr_path, false);
  if (!attr_lines.empty()) {
    if (static_cast<int>(attr_lines.size()) != total_nodes) {
      throw std::runtime_error("load_tu_dataset: " + nattr_path + " has " +
                               std::to_string(attr_lines.size()) + " lines but indicator names " +
                               std::to_string(total_nodes) + " nodes");
    }
    int attr_dim = static_cast<int>(split_csv(attr_lines[0]).size());
    for (int g = 0; g < num_graphs; ++g) {
      dataset.graphs[g].attributes = Matrix(node_count[g], attr_dim);
    }
    for (int i = 0; i < total_nodes; ++i) {
      std::vector<std::string> fields = split_csv(attr_lines[i]);
      if (static_cast<int>(fields.size()) != attr_dim) {
        throw std::runtime_error("load_tu_dataset: " + nattr_path + " line " +
                                 std::to_string(i + 1) + ": expected " +
                                 std::to_string(attr_dim) + " values, got " +
                                 std::to_string(fields.size()));
      }
      Matrix& attrs = dataset.graphs[node_graph[i] - 1].attributes;
      for (int j = 0; j < attr_dim; ++j) {
        try {
          attrs(local_index[i], j) = std::stod(fields[j]);
        } catch (const std::exception&) {
          throw std::runtime_error("load_tu_dataset: " + nattr_path + " line " +
                                   std::to_string(i + 1) + ": bad real '" + fields[j] + "'");
        }
      }
    }
  }

  log_info("loaded " + name + ": " + std::to_string(num_graphs) + " graphs, max " +
           std::to_string(dataset.max_nodes()) + " nodes, " +
           std::to_string(dataset.num_classes) + " classes");
  return dataset;
}

std::uint64_t tu_dataset_checksum(const std::string& directory, const std::string& name) {
  std::uint64_t hash = 0xcbf29ce484222325ULL;
  auto mix_file = [&hash](const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) return;
    char buf[1 << 16];
    while (in.read(buf, sizeof(buf)) || in.gcount() > 0) {
      for (std::streamsize i = 0; i < in.gcount(); ++i) {
        hash ^= static_cast<unsigned char>(buf[i]);
        hash *= 0x100000001b3ULL;
      }
    }
  };
  for (const char* suffix : {"_A.txt", "_graph_indicator.txt", "_graph_labels.txt",
                             "_node_labels.txt", "_node_attributes.txt"}) {
    mix_file(file_path(directory, name, suffix));
  }
  return hash;
}

}  // namespace graphmax

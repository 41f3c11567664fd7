#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "graphmax/graph.hpp"
#include "graphmax/synthetic.hpp"
#include "graphmax/tu_loader.hpp"

using namespace graphmax;
namespace fs = std::filesystem;

namespace {

// Scratch directory holding one hand-built dataset in the flat-file layout.
struct TuDir {
  fs::path root;

  explicit TuDir(const std::string& tag) {
    root = fs::temp_directory_path() / ("graphmax_io_" + tag);
    fs::remove_all(root);
    fs::create_directories(root);
  }
  ~TuDir() { fs::remove_all(root); }

  void file(const std::string& name, const std::string& content) const {
    std::ofstream out(root / name, std::ios::binary);
    out << content;
  }
  std::string dir() const { return root.string(); }
};

// Triangle (nodes 1-3, label 7) plus a single edge (nodes 4-5, label 2).
void write_toy(const TuDir& d, const std::string& name = "TOY") {
  d.file(name + "_A.txt",
         "1, 2\n2, 1\n1, 3\n3, 1\n2, 3\n3, 2\n4, 5\n5, 4\n");
  d.file(name + "_graph_indicator.txt", "1\n1\n1\n2\n2\n");
  d.file(name + "_graph_labels.txt", "7\n2\n");
  d.file(name + "_node_labels.txt", "0\n1\n0\n2\n1\n");
}

}  // namespace

TEST_CASE("toy directory loads with hand-checked structure") {
  TuDir d("toy");
  write_toy(d);
  GraphDataset ds = load_tu_dataset(d.dir(), "TOY");

  REQUIRE(ds.size() == 2);
  CHECK(ds.name == "TOY");
  CHECK(ds.graphs[0].node_count() == 3);
  CHECK(ds.graphs[1].node_count() == 2);
  CHECK(ds.max_nodes() == 3);
  CHECK(ds.num_classes == 2);
  // Raw labels 7 and 2 remap in sorted order: 2 -> 0, 7 -> 1.
  CHECK(ds.graphs[0].label == 1);
  CHECK(ds.graphs[1].label == 0);

  const Matrix& tri = ds.graphs[0].adjacency;
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) {
      CHECK(tri(i, j) == (i == j ? 0.0 : 1.0));
    }
  }
  CHECK(ds.graphs[1].adjacency(0, 1) == 1.0);
  CHECK(ds.graphs[1].adjacency(1, 0) == 1.0);
  CHECK(ds.graphs[0].node_labels == std::vector<int>{0, 1, 0});
  CHECK(ds.graphs[1].node_labels == std::vector<int>{2, 1});

  int total_nodes = 0;
  for (const Graph& g : ds.graphs) total_nodes += g.node_count();
  CHECK(total_nodes == 5);  // line count of the indicator file
}

TEST_CASE("edges are symmetrized, deduplicated, and self-loops dropped") {
  TuDir d("edges");
  // Edge 1-2 listed once and only in one direction, edge 2-3 listed three
  // times, plus a self-loop on node 1.
  d.file("E_A.txt", "1, 2\n2, 3\n3, 2\n2, 3\n1, 1\n");
  d.file("E_graph_indicator.txt", "1\n1\n1\n");
  d.file("E_graph_labels.txt", "0\n");
  GraphDataset ds = load_tu_dataset(d.dir(), "E");

  const Matrix& a = ds.graphs[0].adjacency;
  CHECK(a(0, 1) == 1.0);
  CHECK(a(1, 0) == 1.0);
  CHECK(a(1, 2) == 1.0);
  CHECK(a(2, 1) == 1.0);
  CHECK(a(0, 2) == 0.0);
  for (int i = 0; i < 3; ++i) CHECK(a(i, i) == 0.0);
}

TEST_CASE("windows line endings and blank edge lines are tolerated") {
  TuDir d("crlf");
  d.file("W_A.txt", "1, 2\r\n\r\n2, 1\r\n");
  d.file("W_graph_indicator.txt", "1\r\n1\r\n");
  d.file("W_graph_labels.txt", "3\r\n");
  GraphDataset ds = load_tu_dataset(d.dir(), "W");
  CHECK(ds.size() == 1);
  CHECK(ds.graphs[0].adjacency(0, 1) == 1.0);
  CHECK(ds.graphs[0].label == 0);
}

TEST_CASE("loader rejects malformed inputs with precise messages") {
  SUBCASE("missing mandatory file names it") {
    TuDir d("miss");
    d.file("M_graph_indicator.txt", "1\n");
    d.file("M_graph_labels.txt", "0\n");
    try {
      load_tu_dataset(d.dir(), "M");
      FAIL("expected an error");
    } catch (const std::runtime_error& e) {
      CHECK(std::string(e.what()).find("M_A.txt") != std::string::npos);
    }
  }
  SUBCASE("edge joining two graphs carries the line number") {
    TuDir d("cross");
    d.file("C_A.txt", "1, 2\n2, 3\n");
    d.file("C_graph_indicator.txt", "1\n1\n2\n");
    d.file("C_graph_labels.txt", "0\n1\n");
    try {
      load_tu_dataset(d.dir(), "C");
      FAIL("expected an error");
    } catch (const std::runtime_error& e) {
      std::string msg = e.what();
      CHECK(msg.find("line 2") != std::string::npos);
      CHECK(msg.find("joins graphs") != std::string::npos);
    }
  }
  SUBCASE("node id out of range carries the line number") {
    TuDir d("range");
    d.file("R_A.txt", "1, 2\n1, 9\n");
    d.file("R_graph_indicator.txt", "1\n1\n");
    d.file("R_graph_labels.txt", "0\n");
    try {
      load_tu_dataset(d.dir(), "R");
      FAIL("expected an error");
    } catch (const std::runtime_error& e) {
      std::string msg = e.what();
      CHECK(msg.find("line 2") != std::string::npos);
      CHECK(msg.find("out of range") != std::string::npos);
    }
  }
  SUBCASE("dangling graph id is rejected") {
    TuDir d("dangle");
    d.file("D_A.txt", "1, 2\n");
    d.file("D_graph_indicator.txt", "1\n3\n");  // graph 2 has no nodes
    d.file("D_graph_labels.txt", "0\n1\n0\n");
    CHECK_THROWS_WITH_AS(load_tu_dataset(d.dir(), "D"),
                         doctest::Contains("dangling graph id"), std::runtime_error);
  }
  SUBCASE("graph label count must match the indicator") {
    TuDir d("count");
    d.file("N_A.txt", "1, 2\n");
    d.file("N_graph_indicator.txt", "1\n1\n");
    d.file("N_graph_labels.txt", "0\n1\n");
    CHECK_THROWS_AS(load_tu_dataset(d.dir(), "N"), std::runtime_error);
  }
  SUBCASE("non-integer tokens are rejected with file and line") {
    TuDir d("junk");
    d.file("J_A.txt", "1, 2\n");
    d.file("J_graph_indicator.txt", "1\nbanana\n");
    d.file("J_graph_labels.txt", "0\n");
    try {
      load_tu_dataset(d.dir(), "J");
      FAIL("expected an error");
    } catch (const std::runtime_error& e) {
      std::string msg = e.what();
      CHECK(msg.find("graph_indicator") != std::string::npos);
      CHECK(msg.find("line 2") != std::string::npos);
    }
  }
  SUBCASE("missing directory is rejected") {
    CHECK_THROWS_WITH_AS(load_tu_dataset("/nonexistent/nowhere", "X"),
                         doctest::Contains("no such directory"), std::runtime_error);
  }
}

TEST_CASE("node attributes load row-aligned") {
  TuDir d("attrs");
  write_toy(d);
  d.file("TOY_node_attributes.txt",
         "1.5, -2.0\n0.0, 3.25\n1.0, 1.0\n4.0, 0.5\n-1.0, 2.0\n");
  GraphDataset ds = load_tu_dataset(d.dir(), "TOY");
  REQUIRE(ds.has_attributes());
  CHECK(ds.graphs[0].attributes.rows() == 3);
  CHECK(ds.graphs[0].attributes.cols() == 2);
  CHECK(ds.graphs[0].attributes(1, 1) == 3.25);
  CHECK(ds.graphs[1].attributes(0, 0) == 4.0);

  GraphDataset with = build_node_features(ds, FeaturePolicy::kUseAttributes);
  CHECK(with.feature_dim == 2);
  CHECK(max_abs_diff(with.graphs[0].features, with.graphs[0].attributes) == 0.0);
}

TEST_CASE("one-hot node labels use the dataset-wide alphabet") {
  TuDir d("onehot");
  write_toy(d);
  GraphDataset ds = build_node_features(load_tu_dataset(d.dir(), "TOY"),
                                        FeaturePolicy::kOneHotNodeLabel);
  // Alphabet {0, 1, 2} across both graphs.
  CHECK(ds.feature_dim == 3);
  for (const Graph& g : ds.graphs) {
    REQUIRE(g.features.cols() == 3);
    for (int v = 0; v < g.node_count(); ++v) {
      double row_sum = 0.0;
      for (int j = 0; j < 3; ++j) row_sum += g.features(v, j);
      CHECK(row_sum == 1.0);
    }
  }
  // Node 4 (graph 2, local 0) has label 2 -> slot 2.
  CHECK(ds.graphs[1].features(0, 2) == 1.0);

  GraphDataset no_labels = ds;
  for (Graph& g : no_labels.graphs) g.node_labels.clear();
  CHECK_THROWS_WITH_AS(build_node_features(no_labels, FeaturePolicy::kOneHotNodeLabel),
                       doctest::Contains("no node labels"), std::invalid_argument);
}

TEST_CASE("one-hot degree caps at the dataset max degree") {
  GraphDataset ds;
  ds.name = "deg";
  ds.num_classes = 1;
  Graph lone;
  lone.adjacency = Matrix(1, 1);
  lone.label = 0;
  ds.graphs.push_back(lone);
  Graph star = make_complete_graph(4);  // degrees 3 = dataset max
  star.label = 0;
  ds.graphs.push_back(star);

  GraphDataset out = build_node_features(ds, FeaturePolicy::kOneHotDegree);
  CHECK(out.feature_dim == 4);
  // Degree 0 in a dataset whose max degree is 3 -> [1, 0, 0, 0].
  CHECK(out.graphs[0].features(0, 0) == 1.0);
  for (int j = 1; j < 4; ++j) CHECK(out.graphs[0].features(0, j) == 0.0);
  for (int v = 0; v < 4; ++v) CHECK(out.graphs[1].features(v, 3) == 1.0);
}

TEST_CASE("validation reports violations and histograms") {
  TuDir d("validate");
  write_toy(d);
  GraphDataset ds = load_tu_dataset(d.dir(), "TOY");

  ValidationReport clean = validate(ds);
  CHECK(clean.symmetry_violations == 0);
  CHECK(clean.self_loops == 0);
  CHECK(clean.isolated_nodes == 0);
  int histogram_total = 0;
  for (int count : clean.class_histogram) histogram_total += count;
  CHECK(histogram_total == ds.size());
  CHECK(clean.node_count_histogram.at(3) == 1);
  CHECK(clean.node_count_histogram.at(2) == 1);
  CHECK(!clean.summary().empty());

  GraphDataset corrupt = ds;
  corrupt.graphs[0].adjacency(0, 1) = 0.0;  // break one unordered pair
  corrupt.graphs[0].adjacency(2, 2) = 1.0;  // and plant a self-loop
  ValidationReport dirty = validate(corrupt);
  CHECK(dirty.symmetry_violations == 1);
  CHECK(dirty.self_loops == 1);
}

TEST_CASE("isolated nodes are counted") {
  GraphDataset ds;
  ds.name = "iso";
  ds.num_classes = 1;
  Graph g;
  g.adjacency = Matrix(3, 3);
  g.adjacency(0, 1) = g.adjacency(1, 0) = 1.0;  // node 2 isolated
  g.label = 0;
  ds.graphs.push_back(g);
  CHECK(validate(ds).isolated_nodes == 1);
}

TEST_CASE("dataset cache round-trips bit-for-bit") {
  TuDir d("cache");
  write_toy(d);
  GraphDataset ds = build_node_features(load_tu_dataset(d.dir(), "TOY"),
                                        FeaturePolicy::kOneHotNodeLabel);
  std::string cache = (d.root / "toy.cache").string();
  save_dataset_cache(ds, cache);
  GraphDataset back = load_dataset_cache(cache);

  REQUIRE(back.size() == ds.size());
  CHECK(back.name == ds.name);
  CHECK(back.feature_dim == ds.feature_dim);
  CHECK(back.num_classes == ds.num_classes);
  for (int g = 0; g < ds.size(); ++g) {
    CHECK(max_abs_diff(back.graphs[g].adjacency, ds.graphs[g].adjacency) == 0.0);
    CHECK(max_abs_diff(back.graphs[g].features, ds.graphs[g].features) == 0.0);
    CHECK(back.graphs[g].label == ds.graphs[g].label);
    CHECK(back.graphs[g].node_labels == ds.graphs[g].node_labels);
  }

  std::string garbage = (d.root / "garbage.cache").string();
  d.file("garbage.cache", "this is not a cache file");
  CHECK_THROWS_WITH_AS(load_dataset_cache(garbage), doctest::Contains("bad magic"),
                       std::runtime_error);
  CHECK_THROWS_AS(load_dataset_cache((d.root / "absent.cache").string()),
                  std::runtime_error);
}

TEST_CASE("dataset checksum tracks file bytes") {
  TuDir d("sum");
  write_toy(d);
  std::uint64_t first = tu_dataset_checksum(d.dir(), "TOY");
  CHECK(first == tu_dataset_checksum(d.dir(), "TOY"));
  d.file("TOY_graph_labels.txt", "7\n3\n");
  CHECK(first != tu_dataset_checksum(d.dir(), "TOY"));
}

TEST_CASE("synthetic cycles and cliques have the advertised structure") {
  GraphDataset ds = make_cycle_clique_dataset(5, 8, 16, 99);
  REQUIRE(ds.size() == 10);
  CHECK(ds.num_classes == 2);

  int cycles = 0, cliques = 0;
  for (const Graph& g : ds.graphs) {
    int n = g.node_count();
    CHECK(n >= 8);
    CHECK(n <= 16);
    std::set<int> degrees;
    for (int v = 0; v < n; ++v) {
      int deg = 0;
      for (int u = 0; u < n; ++u) deg += g.adjacency(v, u) != 0.0 ? 1 : 0;
      degrees.insert(deg);
    }
    REQUIRE(degrees.size() == 1);
    if (g.label == 0) {
      CHECK(*degrees.begin() == 2);
      ++cycles;
    } else {
      CHECK(*degrees.begin() == n - 1);
      ++cliques;
    }
  }
  CHECK(cycles == 5);
  CHECK(cliques == 5);
  CHECK(validate(ds).symmetry_violations == 0);

  GraphDataset again = make_cycle_clique_dataset(5, 8, 16, 99);
  for (int g = 0; g < ds.size(); ++g) {
    CHECK(max_abs_diff(again.graphs[g].adjacency, ds.graphs[g].adjacency) == 0.0);
  }

  Graph ring = make_cycle_graph(5);
  CHECK(ring.adjacency(0, 1) == 1.0);
  CHECK(ring.adjacency(0, 4) == 1.0);
  CHECK(ring.adjacency(0, 2) == 0.0);

  Rng rng(3);
  Graph random = make_random_graph(rng, 12, 0.4);
  for (int i = 0; i < 12; ++i) {
    CHECK(random.adjacency(i, i) == 0.0);
    for (int j = 0; j < 12; ++j) {
      CHECK(random.adjacency(i, j) == random.adjacency(j, i));
      CHECK((random.adjacency(i, j) == 0.0 || random.adjacency(i, j) == 1.0));
    }
  }
}

TEST_CASE("feature policy names parse both ways") {
  CHECK(parse_feature_policy("one-hot-degree") == FeaturePolicy::kOneHotDegree);
  CHECK(to_string(FeaturePolicy::kUseAttributes) == "use-attributes");
  CHECK_THROWS_AS(parse_feature_policy("bogus"), std::invalid_argument);
}

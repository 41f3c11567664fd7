#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <vector>

#include "graphmax/checkpoint.hpp"
#include "graphmax/trainer.hpp"
#include "graphmax/synthetic.hpp"

using namespace graphmax;
namespace fs = std::filesystem;

namespace {

GraphDataset toy_dataset(int per_class = 3, std::uint64_t seed = 5) {
  GraphDataset ds = make_cycle_clique_dataset(per_class, 4, 6, seed);
  return build_node_features(ds, FeaturePolicy::kOneHotDegree);
}

HyperConfig toy_config(Variant variant = Variant::kFull) {
  HyperConfig c;
  c.dataset = "toy";
  c.feature_policy = FeaturePolicy::kOneHotDegree;
  c.seed = 11;
  c.variant = variant;
  c.workers = 1;
  c.encoder.num_layers = 2;
  c.encoder.hidden_units = {8};
  c.encoder.patience = 5;
  c.encoder.max_epochs = 15;
  c.hierarchy.num_levels = 3;
  c.hierarchy.pool_ratio = 0.5;
  c.hierarchy.embed_dim = 6;
  c.hierarchy.n_p = 2;
  c.hierarchy.n_h = 2;
  c.hierarchy.patience = 5;
  c.hierarchy.max_epochs = 12;
  return c;
}

Matrix column_means(const Matrix& m) {
  Matrix out(1, m.cols());
  for (int j = 0; j < m.cols(); ++j) {
    double acc = 0.0;
    for (int i = 0; i < m.rows(); ++i) acc += m(i, j);
    out(0, j) = acc / m.rows();
  }
  return out;
}

}  // namespace

TEST_CASE("phase one summaries depend on the variant") {
  GraphDataset ds = toy_dataset();

  SUBCASE("full trains the encoder and summarizes the periphery") {
    Phase1Result r = train_phase1(ds, toy_config(Variant::kFull));
    CHECK(r.encoder_trained);
    REQUIRE(static_cast<int>(r.summaries.size()) == ds.size());
    for (int g = 0; g < ds.size(); ++g) {
      PeripheryOutput p = periphery(ds.graphs[g], encode(r.encoder, ds.graphs[g]));
      CHECK(max_abs_diff(r.summaries[g], p.summary) == 0.0);
    }
    CHECK(r.epochs_run >= 1);
    CHECK(std::isfinite(r.best_loss));
  }
  SUBCASE("raw-feature variant skips training and averages X") {
    Phase1Result r = train_phase1(ds, toy_config(Variant::kNodeFeatures));
    CHECK(!r.encoder_trained);
    CHECK(r.epochs_run == 0);
    REQUIRE(static_cast<int>(r.summaries.size()) == ds.size());
    for (int g = 0; g < ds.size(); ++g) {
      CHECK(max_abs_diff(r.summaries[g], column_means(ds.graphs[g].features)) == 0.0);
    }
  }
  SUBCASE("embedding-feature variant averages H instead of S") {
    Phase1Result r = train_phase1(ds, toy_config(Variant::kEmbeddingFeatures));
    CHECK(r.encoder_trained);
    for (int g = 0; g < ds.size(); ++g) {
      Matrix h = encode(r.encoder, ds.graphs[g]);
      CHECK(max_abs_diff(r.summaries[g], column_means(h)) <= 1e-15);
    }
  }
  SUBCASE("dropping the periphery objective leaves no summaries") {
    Phase1Result r = train_phase1(ds, toy_config(Variant::kNoPeriphery));
    CHECK(!r.encoder_trained);
    CHECK(r.summaries.empty());
    CHECK(r.epochs_run == 0);
  }
}

TEST_CASE("phase two trains both discriminators and descends") {
  GraphDataset ds = toy_dataset();
  HyperConfig config = toy_config();
  Phase1Result p1 = train_phase1(ds, config);
  std::ostringstream metrics;
  Phase2Result p2 = train_phase2(ds, p1.summaries, config, &metrics);

  CHECK(p2.periphery_active);
  CHECK(p2.hierarchical_active);
  CHECK(p2.params.store.index_of("discriminator.periphery.w") >= 0);
  CHECK(p2.params.store.index_of("discriminator.hierarchical.w") >= 0);

  REQUIRE(!p2.loss_trace.empty());
  // Zero-initialized discriminators start both objectives at 2 ln 2 each.
  CHECK(std::abs(p2.loss_trace.front() - 4.0 * std::log(2.0)) <= 1e-9);
  CHECK(p2.best_loss < p2.loss_trace.front());
  CHECK(p2.best_loss == p2.loss_trace[p2.best_epoch - 1]);
  for (double v : p2.loss_trace) CHECK(p2.best_loss <= v);

  // Metrics lines decompose the combined loss into the two objectives.
  std::istringstream in(metrics.str());
  std::string line;
  int lines = 0;
  while (std::getline(in, line)) {
    ++lines;
    int epoch;
    double total, lp, lh, secs;
    REQUIRE(std::sscanf(line.c_str(), "%d, %lg, %lg, %lg, %lg", &epoch, &total, &lp, &lh,
                        &secs) == 5);
    CHECK(epoch == lines);
    CHECK(total == doctest::Approx(lp + lh).epsilon(1e-12));
    CHECK(lp > 0.0);
    CHECK(lh > 0.0);
  }
  CHECK(lines == p2.epochs_run);
}

TEST_CASE("variants drop the matching discriminator") {
  GraphDataset ds = toy_dataset();
  SUBCASE("no-periphery keeps only the hierarchical scorer") {
    HyperConfig config = toy_config(Variant::kNoPeriphery);
    Phase2Result p2 = train_phase2(ds, {}, config);
    CHECK(!p2.periphery_active);
    CHECK(p2.hierarchical_active);
    CHECK(p2.params.store.index_of("discriminator.periphery.w") < 0);
    CHECK(p2.params.store.index_of("discriminator.hierarchical.w") >= 0);
    CHECK(std::abs(p2.loss_trace.front() - 2.0 * std::log(2.0)) <= 1e-9);
  }
  SUBCASE("no-hierarchy keeps only the periphery scorer and allows two levels") {
    HyperConfig config = toy_config(Variant::kNoHierarchy);
    config.hierarchy.num_levels = 2;
    Phase1Result p1 = train_phase1(ds, config);
    Phase2Result p2 = train_phase2(ds, p1.summaries, config);
    CHECK(p2.periphery_active);
    CHECK(!p2.hierarchical_active);
    CHECK(p2.params.store.index_of("discriminator.periphery.w") >= 0);
    CHECK(p2.params.store.index_of("discriminator.hierarchical.w") < 0);
  }
}

TEST_CASE("configuration dead ends are named") {
  GraphDataset ds = toy_dataset();
  SUBCASE("two levels with the hierarchical objective points at -H") {
    HyperConfig config = toy_config();
    config.hierarchy.num_levels = 2;
    Phase1Result p1 = train_phase1(ds, config);
    CHECK_THROWS_WITH_AS(train_phase2(ds, p1.summaries, config),
                         doctest::Contains("use the -H variant"), std::invalid_argument);
  }
  SUBCASE("dropping periphery on a two-level hierarchy leaves nothing to train") {
    HyperConfig config = toy_config(Variant::kNoPeriphery);
    config.hierarchy.num_levels = 2;
    CHECK_THROWS_WITH_AS(train_phase2(ds, {}, config),
                         doctest::Contains("no objective remains"), std::invalid_argument);
  }
  SUBCASE("negative counts must leave room in the dataset") {
    HyperConfig config = toy_config();
    config.hierarchy.n_p = ds.size();
    Phase1Result p1 = train_phase1(ds, config);
    CHECK_THROWS_WITH_AS(train_phase2(ds, p1.summaries, config), doctest::Contains("n_p"),
                         std::invalid_argument);
    config.hierarchy.n_p = 2;
    config.hierarchy.n_h = ds.size() + 3;
    CHECK_THROWS_WITH_AS(train_phase2(ds, p1.summaries, config), doctest::Contains("n_h"),
                         std::invalid_argument);
  }
  SUBCASE("a one-graph dataset has no negatives") {
    GraphDataset single;
    single.name = "one";
    single.num_classes = 1;
    single.graphs.push_back(toy_dataset().graphs[0]);
    single.feature_dim = single.graphs[0].features.cols();
    HyperConfig config = toy_config();
    CHECK_THROWS_WITH_AS(train_phase2(single, {Matrix(1, single.feature_dim)}, config),
                         doctest::Contains("2 graphs"), std::invalid_argument);
  }
  SUBCASE("summary misalignment is rejected") {
    HyperConfig config = toy_config();
    CHECK_THROWS_WITH_AS(train_phase2(ds, {}, config), doctest::Contains("one summary per"),
                         std::invalid_argument);
  }
}

TEST_CASE("embedding tables are deterministic and equivariant") {
  GraphDataset ds = toy_dataset();
  HyperConfig config = toy_config();
  TrainRun run = run_training(ds, config);
  REQUIRE(run.table.size() == ds.size());
  CHECK(run.table.dim() == config.hierarchy.embed_dim);
  CHECK(run.table.has_labels());

  SUBCASE("identical configuration reproduces every byte") {
    TrainRun again = run_training(ds, config);
    CHECK(max_abs_diff(run.table.vectors, again.table.vectors) == 0.0);
    CHECK(run.table.graph_ids == again.table.graph_ids);
    CHECK(run.table.labels == again.table.labels);
  }
  SUBCASE("duplicate graphs embed to identical rows") {
    GraphDataset dup = ds;
    dup.graphs.push_back(ds.graphs[0]);
    EmbeddingTable table = embed(dup, run.phase2.params);
    for (int j = 0; j < table.dim(); ++j) {
      CHECK(table.vectors(0, j) == table.vectors(ds.size(), j));
    }
  }
  SUBCASE("node relabeling moves the embedding by at most rounding") {
    GraphDataset perm = ds;
    const Graph& g = ds.graphs[0];
    int n = g.node_count();
    Rng rng(2);
    std::vector<int> p(n);
    for (int i = 0; i < n; ++i) p[i] = i;
    rng.shuffle(p);
    Graph pg = g;
    pg.adjacency = Matrix(n, n);
    pg.features = Matrix(n, g.features.cols());
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < n; ++j) pg.adjacency(p[i], p[j]) = g.adjacency(i, j);
      for (int j = 0; j < g.features.cols(); ++j) pg.features(p[i], j) = g.features(i, j);
    }
    perm.graphs[0] = pg;
    EmbeddingTable table = embed(perm, run.phase2.params);
    for (int j = 0; j < table.dim(); ++j) {
      CHECK(std::abs(table.vectors(0, j) - run.table.vectors(0, j)) <= 1e-8);
    }
  }
}

TEST_CASE("worker count does not change the epoch losses") {
  GraphDataset ds = toy_dataset(4);
  HyperConfig one = toy_config();
  one.hierarchy.max_epochs = 4;
  HyperConfig four = one;
  four.workers = 4;
  Phase1Result p1 = train_phase1(ds, one);
  Phase2Result a = train_phase2(ds, p1.summaries, one);
  Phase2Result b = train_phase2(ds, p1.summaries, four);
  REQUIRE(a.loss_trace.size() == b.loss_trace.size());
  // Same loss values; gradient reduction order may differ in last bits, so
  // epoch-0 losses (identical zero-init params) must agree to rounding.
  CHECK(std::abs(a.loss_trace.front() - b.loss_trace.front()) <= 1e-12);
}

TEST_CASE("ablation covers every variant and tolerates per-variant failures") {
  GraphDataset ds = toy_dataset();
  SUBCASE("all five variants run on a sound base configuration") {
    std::vector<AblationEntry> entries = run_ablation(ds, toy_config());
    REQUIRE(entries.size() == 5);
    for (const AblationEntry& e : entries) {
      INFO(to_string(e.variant) << ": " << e.error);
      CHECK(e.ok);
      CHECK(e.error.empty());
      CHECK(e.table.size() == ds.size());
      CHECK(e.seconds >= 0.0);
    }
    CHECK(entries[0].variant == Variant::kFull);
  }
  SUBCASE("a two-level hierarchy sinks every variant except -H") {
    HyperConfig base = toy_config();
    base.hierarchy.num_levels = 2;
    std::vector<AblationEntry> entries = run_ablation(ds, base);
    REQUIRE(entries.size() == 5);
    for (const AblationEntry& e : entries) {
      if (e.variant == Variant::kNoHierarchy) {
        CHECK(e.ok);
      } else {
        CHECK(!e.ok);
        CHECK(!e.error.empty());
      }
    }
  }
}

TEST_CASE("parameter files round-trip bitwise and reject corruption") {
  GraphDataset ds = toy_dataset();
  HyperConfig config = toy_config();
  config.hierarchy.max_epochs = 2;
  config.hierarchy.patience = 2;
  TrainRun run = run_training(ds, config);

  fs::path dir = fs::temp_directory_path() / "graphmax_ckpt";
  fs::create_directories(dir);
  fs::path file = dir / "model.params";
  save_param_store(run.phase2.params.store, file.string());

  ParamStore back = load_param_store(file.string());
  REQUIRE(back.size() == run.phase2.params.store.size());
  for (int k = 0; k < back.size(); ++k) {
    CHECK(back.names[k] == run.phase2.params.store.names[k]);
    CHECK(max_abs_diff(back.values[k], run.phase2.params.store.values[k]) == 0.0);
  }

  SUBCASE("truncated files are rejected") {
    std::ifstream in(file, std::ios::binary);
    std::string bytes((std::istreambuf_iterator<char>(in)), {});
    in.close();
    std::ofstream out(dir / "cut.params", std::ios::binary);
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size() / 2));
    out.close();
    CHECK_THROWS_AS(load_param_store((dir / "cut.params").string()), std::runtime_error);
  }
  SUBCASE("foreign files are rejected by magic") {
    std::ofstream out(dir / "noise.params", std::ios::binary);
    out << "definitely not parameters";
    out.close();
    CHECK_THROWS_WITH_AS(load_param_store((dir / "noise.params").string()),
                         doctest::Contains("not a parameter file"), std::runtime_error);
  }
  fs::remove_all(dir);
}

TEST_CASE("embedding tables round-trip through their CSV form") {
  GraphDataset ds = toy_dataset();
  HyperConfig config = toy_config();
  config.hierarchy.max_epochs = 2;
  config.hierarchy.patience = 2;
  TrainRun run = run_training(ds, config);

  fs::path dir = fs::temp_directory_path() / "graphmax_csv";
  fs::create_directories(dir);
  fs::path file = dir / "embeddings.csv";
  write_embedding_csv(run.table, file.string());

  EmbeddingTable back = read_embedding_csv(file.string());
  CHECK(back.graph_ids == run.table.graph_ids);
  CHECK(back.labels == run.table.labels);
  CHECK(max_abs_diff(back.vectors, run.table.vectors) == 0.0);

  SUBCASE("header and row validation name the line") {
    std::ofstream out(dir / "bad.csv");
    out << "graph_id, label, x_1\n0, 1, not-a-number\n";
    out.close();
    CHECK_THROWS_WITH_AS(read_embedding_csv((dir / "bad.csv").string()),
                         doctest::Contains("bad.csv:2"), std::runtime_error);
    std::ofstream out2(dir / "head.csv");
    out2 << "wrong, header\n";
    out2.close();
    CHECK_THROWS_AS(read_embedding_csv((dir / "head.csv").string()), std::runtime_error);
  }
  fs::remove_all(dir);
}

#include "graphmax/trainer.hpp"

#include <chrono>
#include <cstdio>
#include <limits>
#include <ostream>
#include <stdexcept>

#include "graphmax/adam.hpp"
#include "graphmax/log.hpp"
#include "graphmax/parallel.hpp"
#include "graphmax/rng.hpp"

namespace graphmax {

namespace {

Matrix column_means(const Matrix& m) {
  Matrix out(1, m.cols());
  for (int j = 0; j < m.cols(); ++j) {
    double acc = 0.0;
    for (int i = 0; i < m.rows(); ++i) acc += m(i, j);
    out(0, j) = acc / m.rows();
  }
  return out;
}

void check_trainable_dataset(const GraphDataset& dataset, const char* who) {
  if (dataset.graphs.empty()) {
    throw std::invalid_argument(std::string(who) + ": empty dataset");
  }
  if (dataset.feature_dim < 1) {
    throw std::invalid_argument(std::string(who) +
                                ": dataset has no features; run a feature policy");
  }
}

}  // namespace

Phase1Result train_phase1(const GraphDataset& dataset, const HyperConfig& config,
                          std::ostream* metrics) {
  check_trainable_dataset(dataset, "train_phase1");
  Phase1Result result;
  auto t0 = std::chrono::steady_clock::now();

  switch (config.variant) {
    case Variant::kNoPeriphery:
      break;  // no summaries needed, nothing to train
    case Variant::kNodeFeatures:
      for (const Graph& graph : dataset.graphs) {
        result.summaries.push_back(column_means(graph.features));
      }
      break;
    case Variant::kFull:
    case Variant::kNoHierarchy:
    case Variant::kEmbeddingFeatures: {
      EncoderTrainResult trained =
          train_encoder(dataset, config.encoder, split_seed(config.seed, seed_stream::kEncoderInit),
                        config.workers, metrics);
      result.encoder = trained.encoder;
      result.encoder_trained = true;
      result.best_loss = trained.best_loss;
      result.best_epoch = trained.best_epoch;
      result.epochs_run = trained.epochs_run;
      for (const Graph& graph : dataset.graphs) {
        PeripheryOutput p = periphery(graph, encode(result.encoder, graph));
        result.summaries.push_back(config.variant == Variant::kEmbeddingFeatures
                                       ? column_means(p.H)
                                       : p.summary);
      }
      break;
    }
  }

  result.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return result;
}

Phase2Result train_phase2(const GraphDataset& dataset, const std::vector<Matrix>& summaries,
                          const HyperConfig& config, std::ostream* metrics) {
  check_trainable_dataset(dataset, "train_phase2");
  const int m = dataset.size();
  const HierarchyConfig& hc = config.hierarchy;
  const bool use_p = config.variant != Variant::kNoPeriphery;
  const bool use_h = config.variant != Variant::kNoHierarchy;

  if (use_h && hc.num_levels < 3) {
    if (!use_p) {
      throw std::invalid_argument(
          "train_phase2: no objective remains (-P drops the periphery objective and a 2-level "
          "hierarchy has no intermediate embeddings for the hierarchical one)");
    }
    throw std::invalid_argument(
        "train_phase2: a 2-level hierarchy has no intermediate embeddings for the hierarchical "
        "objective; use the -H variant");
  }
  if (m < 2) {
    throw std::invalid_argument("train_phase2: need at least 2 graphs (no negatives exist)");
  }
  if (use_p) {
    if (static_cast<int>(summaries.size()) != m) {
      throw std::invalid_argument("train_phase2: expected one summary per graph, got " +
                                  std::to_string(summaries.size()) + " for " + std::to_string(m) +
                                  " graphs");
    }
    for (const Matrix& s : summaries) {
      if (s.rows() != 1 || s.cols() != dataset.feature_dim) {
        throw std::invalid_argument("train_phase2: summaries must be 1x" +
                                    std::to_string(dataset.feature_dim) + ", got " +
                                    s.shape_str());
      }
      require_finite(s, "train_phase2");
    }
    if (hc.n_p >= m) {
      throw std::invalid_argument("train_phase2: n_p=" + std::to_string(hc.n_p) + " needs " +
                                  std::to_string(hc.n_p + 1) + " graphs, dataset has " +
                                  std::to_string(m));
    }
  }
  if (use_h && hc.n_h >= m) {
    throw std::invalid_argument("train_phase2: n_h=" + std::to_string(hc.n_h) + " needs " +
                                std::to_string(hc.n_h + 1) + " graphs, dataset has " +
                                std::to_string(m));
  }

  LevelSpec spec =
      derive_level_sizes(dataset.max_nodes(), hc.pool_ratio, hc.num_levels, hc.embed_dim);
  Phase2Result result;
  result.params =
      init_hierarchy(spec, dataset.feature_dim, split_seed(config.seed, seed_stream::kHierarchyInit));
  HierarchyParams params = result.params;
  DiscriminatorRefs d_p, d_h;
  if (use_p) {
    d_p = init_discriminator(params.store, "discriminator.periphery", spec.embed_dim,
                             dataset.feature_dim);
  }
  if (use_h) {
    d_h = init_discriminator(params.store, "discriminator.hierarchical", spec.embed_dim,
                             spec.embed_dim);
  }
  result.params = params;
  result.periphery_d = d_p;
  result.hierarchical_d = d_h;
  result.periphery_active = use_p;
  result.hierarchical_active = use_h;
  result.best_loss = std::numeric_limits<double>::infinity();

  NegativeSampler sampler_p(hc.n_p, split_seed(config.seed, seed_stream::kPeripherySampler));
  NegativeSampler sampler_h(hc.n_h, split_seed(config.seed, seed_stream::kHierarchicalSampler));
  Adam adam(params.store.values, AdamConfig{hc.learning_rate});
  auto t0 = std::chrono::steady_clock::now();

  const int worker_count = std::max(config.workers, 1);
  int stall = 0;
  for (int epoch = 1; epoch <= hc.max_epochs; ++epoch) {
    auto e0 = std::chrono::steady_clock::now();
    std::vector<std::vector<int>> negatives_p, negatives_h;
    if (use_p) negatives_p = draw_all_negatives(sampler_p, m);
    if (use_h) negatives_h = draw_all_negatives(sampler_h, m);

    std::vector<double> worker_p(static_cast<std::size_t>(worker_count), 0.0);
    std::vector<double> worker_h(static_cast<std::size_t>(worker_count), 0.0);
    std::vector<std::vector<Matrix>> worker_grads(static_cast<std::size_t>(worker_count));
    try {
      parallel_chunks(m, config.workers, [&](int w, int begin, int end) {
        if (begin == end) return;
        Tape tape;
        std::vector<Var> bound = params.store.bind(tape);
        SplitDiscriminator sd_p, sd_h;
        if (use_p) sd_p = split_discriminator(tape, d_p, bound);
        if (use_h) sd_h = split_discriminator(tape, d_h, bound);

        // Each needed graph is forwarded once per tape; negatives of the
        // hierarchical objective pull in graphs outside this chunk.
        std::vector<HierarchyForward> cache(static_cast<std::size_t>(m));
        std::vector<char> have(static_cast<std::size_t>(m), 0);
        auto forward = [&](int g) -> const HierarchyForward& {
          if (!have[g]) {
            const Graph& graph = dataset.graphs[static_cast<std::size_t>(g)];
            cache[g] = forward_hierarchy_on_tape(tape, params, bound,
                                                 tape.constant(graph.adjacency),
                                                 tape.constant(graph.features));
            have[g] = 1;
          }
          return cache[g];
        };

        Var p_sum{}, h_sum{};
        for (int g = begin; g < end; ++g) {
          const HierarchyForward& fwd = forward(g);
          if (use_p) {
            std::vector<Var> negs;
            negs.reserve(negatives_p[g].size());
            for (int id : negatives_p[g]) negs.push_back(tape.constant(summaries[id]));
            Var term = periphery_term(tape, sd_p, fwd.x_g, tape.constant(summaries[g]), negs);
            p_sum = (g == begin) ? term : tape.add(p_sum, term);
          }
          if (use_h) {
            std::vector<std::vector<Var>> neg_blocks;
            neg_blocks.reserve(negatives_h[g].size());
            for (int id : negatives_h[g]) neg_blocks.push_back(forward(id).intermediates);
            Var term = hierarchical_term(tape, sd_h, fwd.x_g, fwd.intermediates, neg_blocks);
            h_sum = (g == begin) ? term : tape.add(h_sum, term);
          }
        }
        Var chunk_loss = use_p ? (use_h ? tape.add(p_sum, h_sum) : p_sum) : h_sum;
        tape.backward(chunk_loss);
        if (use_p) worker_p[w] = tape.value(p_sum)(0, 0);
        if (use_h) worker_h[w] = tape.value(h_sum)(0, 0);
        worker_grads[w] = ParamStore::collect_grads(tape, bound);
      });
    } catch (const std::exception& e) {
      throw std::runtime_error("train_phase2: epoch " + std::to_string(epoch) +
                               " failed: " + e.what());
    }

    double total_p = 0.0, total_h = 0.0;
    std::vector<Matrix> grads;
    for (std::size_t w = 0; w < worker_grads.size(); ++w) {
      total_p += worker_p[w];
      total_h += worker_h[w];
      if (worker_grads[w].empty()) continue;
      if (grads.empty()) {
        grads = std::move(worker_grads[w]);
      } else {
        for (std::size_t k = 0; k < grads.size(); ++k) {
          grads[k] = add(grads[k], worker_grads[w][k]);
        }
      }
    }
    const double loss_p = total_p / m;
    const double loss_h = total_h / m;
    const double loss = loss_p + loss_h;
    for (Matrix& g : grads) g = scaled(g, 1.0 / m);

    result.loss_trace.push_back(loss);
    if (loss < result.best_loss - 1e-6) {
      result.best_loss = loss;
      result.best_epoch = epoch;
      result.params = params;  // snapshot of the parameters this loss was measured at
      stall = 0;
    } else {
      ++stall;
    }

    double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - e0).count();
    if (metrics != nullptr) {
      char line[160];
      std::snprintf(line, sizeof(line), "%d, %.17g, %.17g, %.17g, %.3f\n", epoch, loss, loss_p,
                    loss_h, secs);
      *metrics << line;
    }
    result.epochs_run = epoch;
    if (stall > hc.patience) break;

    adam.step(params.store.values, grads);
  }

  result.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  log_info("phase2: best loss " + std::to_string(result.best_loss) + " at epoch " +
           std::to_string(result.best_epoch) + "/" + std::to_string(result.epochs_run));
  return result;
}

EmbeddingTable embed(const GraphDataset& dataset, const HierarchyParams& params) {
  if (dataset.graphs.empty()) throw std::invalid_argument("embed: empty dataset");
  EmbeddingTable table;
  const int k = params.spec.embed_dim;
  table.vectors = Matrix(dataset.size(), k);
  for (int i = 0; i < dataset.size(); ++i) {
    const Graph& graph = dataset.graphs[static_cast<std::size_t>(i)];
    LevelTrace trace = forward_hierarchy(params, graph);
    for (int j = 0; j < k; ++j) table.vectors(i, j) = trace.x_g(0, j);
    table.graph_ids.push_back(i);
    table.labels.push_back(graph.label);
  }
  table.validate();
  return table;
}

TrainRun run_training(const GraphDataset& dataset, const HyperConfig& config,
                      std::ostream* phase1_metrics, std::ostream* phase2_metrics) {
  config.validate();
  TrainRun run;
  run.phase1 = train_phase1(dataset, config, phase1_metrics);
  run.phase2 = train_phase2(dataset, run.phase1.summaries, config, phase2_metrics);
  run.table = embed(dataset, run.phase2.params);
  return run;
}

std::vector<AblationEntry> run_ablation(const GraphDataset& dataset,
                                        const HyperConfig& base_config) {
  base_config.validate();
  const Variant variants[] = {Variant::kFull, Variant::kNodeFeatures, Variant::kEmbeddingFeatures,
                              Variant::kNoPeriphery, Variant::kNoHierarchy};
  std::vector<AblationEntry> entries;
  for (Variant v : variants) {
    AblationEntry entry;
    entry.variant = v;
    HyperConfig config = base_config;
    config.variant = v;
    auto t0 = std::chrono::steady_clock::now();
    try {
      TrainRun run = run_training(dataset, config);
      entry.table = std::move(run.table);
      entry.ok = true;
    } catch (const std::exception& e) {
      entry.ok = false;
      entry.error = e.what();
      log_error("ablation variant " + to_string(v) + " failed: " + entry.error);
    }
    entry.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    entries.push_back(std::move(entry));
  }
  return entries;
}

}  // namespace graphmax

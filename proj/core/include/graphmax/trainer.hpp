#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "graphmax/config.hpp"
#include "graphmax/embedding.hpp"
#include "graphmax/hierarchy.hpp"
#include "graphmax/infomax.hpp"
#include "graphmax/periphery.hpp"

namespace graphmax {

// First training phase: a periphery summary per graph plus the encoder that
// produced it. Variants change what the summary is: full and -H train the
// encoder and summarize the periphery S; +EF trains it and summarizes the
// node embeddings H; +NF skips training and summarizes raw features; -P
// produces no summaries at all.
struct Phase1Result {
  EncoderParams encoder;  // untouched unless encoder_trained
  bool encoder_trained = false;
  std::vector<Matrix> summaries;  // one 1 x D row per graph; empty for -P
  double best_loss = 0.0;
  int best_epoch = 0;
  int epochs_run = 0;
  double seconds = 0.0;
};

Phase1Result train_phase1(const GraphDataset& dataset, const HyperConfig& config,
                          std::ostream* metrics = nullptr);

// Second phase: the coarsening hierarchy plus whichever discriminators the
// variant keeps, trained jointly on the unweighted sum of the active
// objectives. Early-stops on the combined loss; returns best-epoch params.
struct Phase2Result {
  HierarchyParams params;  // store also holds the active discriminators
  DiscriminatorRefs periphery_d;
  DiscriminatorRefs hierarchical_d;
  bool periphery_active = false;
  bool hierarchical_active = false;
  double best_loss = 0.0;
  int best_epoch = 0;
  int epochs_run = 0;
  double seconds = 0.0;
  std::vector<double> loss_trace;  // combined loss per epoch, pre-update
};

Phase2Result train_phase2(const GraphDataset& dataset, const std::vector<Matrix>& summaries,
                          const HyperConfig& config, std::ostream* metrics = nullptr);

// One hierarchy forward per graph with frozen parameters.
EmbeddingTable embed(const GraphDataset& dataset, const HierarchyParams& params);

struct TrainRun {
  Phase1Result phase1;
  Phase2Result phase2;
  EmbeddingTable table;
};

TrainRun run_training(const GraphDataset& dataset, const HyperConfig& config,
                      std::ostream* phase1_metrics = nullptr,
                      std::ostream* phase2_metrics = nullptr);

// Every variant with the shared seed and otherwise identical settings. A
// failing variant records its error and the rest still run.
struct AblationEntry {
  Variant variant = Variant::kFull;
  bool ok = false;
  std::string error;
  EmbeddingTable table;
  double seconds = 0.0;
};

std::vector<AblationEntry> run_ablation(const GraphDataset& dataset,
                                        const HyperConfig& base_config);

}  // namespace graphmax

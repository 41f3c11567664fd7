#include <CLI11.hpp>

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <random>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "graphmax/checkpoint.hpp"
#include "graphmax/config.hpp"
#include "graphmax/embedding.hpp"
#include "graphmax/eval.hpp"
#include "graphmax/graph.hpp"
#include "graphmax/log.hpp"
#include "graphmax/trainer.hpp"
#include "graphmax/tu_loader.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

// Exit codes: 2 missing dataset, 3 invalid config, 1 anything else.
struct ExitError {
  int code;
  std::string message;
};

struct TrainOptions {
  std::string config_path;
  std::string data_dir;
  std::string out_dir;
  std::uint64_t seed = 0;
  bool seed_given = false;
  int workers = 0;  // 0 means "keep config value"
  std::string variant;
};

struct EvalOptions {
  std::string embeddings_path;
  std::string task;
  std::string out_dir = ".";
  std::uint64_t seed = 0;
  bool seed_given = false;
  int workers = 1;
};

std::uint64_t entropy_seed() {
  std::random_device rd;
  return (static_cast<std::uint64_t>(rd()) << 32) ^ static_cast<std::uint64_t>(rd());
}

graphmax::HyperConfig load_config(const TrainOptions& opt) {
  graphmax::HyperConfig config;
  bool config_has_seed = false;
  try {
    config = graphmax::load_config_file(opt.config_path);
    std::ifstream raw(opt.config_path);
    json doc = json::parse(raw);
    config_has_seed = doc.contains("seed");
  } catch (const std::exception& e) {
    throw ExitError{3, e.what()};
  }
  if (!opt.variant.empty()) config.variant = graphmax::parse_variant(opt.variant);
  if (opt.workers > 0) config.workers = opt.workers;
  if (opt.seed_given) {
    config.seed = opt.seed;
  } else if (!config_has_seed) {
    config.seed = entropy_seed();
    graphmax::log_info("no seed given; using " + std::to_string(config.seed));
  }
  try {
    config.validate();
  } catch (const std::exception& e) {
    throw ExitError{3, e.what()};
  }
  return config;
}

graphmax::GraphDataset load_dataset(const std::string& data_dir,
                                    const graphmax::HyperConfig& config) {
  if (!fs::is_directory(data_dir)) {
    throw ExitError{2, "dataset directory " + data_dir + " does not exist"};
  }
  fs::path edges = fs::path(data_dir) / (config.dataset + "_A.txt");
  if (!fs::is_regular_file(edges)) {
    throw ExitError{2, "dataset file " + edges.string() + " does not exist"};
  }
  graphmax::GraphDataset dataset = graphmax::load_tu_dataset(data_dir, config.dataset);
  return graphmax::build_node_features(std::move(dataset), config.feature_policy);
}

void write_file(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw std::runtime_error("cannot open " + path.string());
  out << text;
  out.flush();
  if (!out) throw std::runtime_error("write failed for " + path.string());
}

void require_artifacts(const json& artifacts) {
  for (const auto& [key, value] : artifacts.items()) {
    if (!fs::exists(value.get<std::string>())) {
      throw std::runtime_error("artifact " + key + " missing at " + value.get<std::string>());
    }
  }
}

int cmd_train(const TrainOptions& opt) {
  graphmax::HyperConfig config = load_config(opt);
  graphmax::GraphDataset dataset = load_dataset(opt.data_dir, config);
  fs::create_directories(opt.out_dir);
  const fs::path out(opt.out_dir);

  write_file(out / "config.json", graphmax::config_to_json(config));

  graphmax::TrainRun run;
  {
    std::ofstream metrics1(out / "metrics_phase1.csv", std::ios::trunc);
    std::ofstream metrics2(out / "metrics_phase2.csv", std::ios::trunc);
    run = graphmax::run_training(dataset, config, &metrics1, &metrics2);
  }

  json artifacts;
  artifacts["config"] = (out / "config.json").string();
  artifacts["metrics_phase1"] = (out / "metrics_phase1.csv").string();
  artifacts["metrics_phase2"] = (out / "metrics_phase2.csv").string();
  if (run.phase1.encoder_trained) {
    graphmax::save_param_store(run.phase1.encoder.store, (out / "encoder.params").string());
    artifacts["encoder_params"] = (out / "encoder.params").string();
  }
  graphmax::save_param_store(run.phase2.params.store, (out / "model.params").string());
  artifacts["model_params"] = (out / "model.params").string();
  if (!run.phase1.summaries.empty()) {
    graphmax::write_summary_csv(run.phase1.summaries, (out / "summaries.csv").string());
    artifacts["summaries"] = (out / "summaries.csv").string();
  }
  graphmax::write_embedding_csv(run.table, (out / "embeddings.csv").string());
  artifacts["embeddings"] = (out / "embeddings.csv").string();

  json manifest;
  manifest["config"] = json::parse(graphmax::config_to_json(config));
  manifest["dataset_checksum"] = graphmax::tu_dataset_checksum(opt.data_dir, config.dataset);
  manifest["seed"] = config.seed;
  manifest["artifacts"] = artifacts;
  manifest["wall_seconds"] = {{"phase1", run.phase1.seconds},
                              {"phase2", run.phase2.seconds},
                              {"total", run.phase1.seconds + run.phase2.seconds}};
  write_file(out / "manifest.json", manifest.dump(2) + "\n");

  require_artifacts(artifacts);
  std::cout << "wrote " << (out / "manifest.json").string() << "\n";
  return 0;
}

std::string variant_slug(graphmax::Variant v) {
  switch (v) {
    case graphmax::Variant::kFull: return "full";
    case graphmax::Variant::kNodeFeatures: return "plus-nf";
    case graphmax::Variant::kEmbeddingFeatures: return "plus-ef";
    case graphmax::Variant::kNoPeriphery: return "minus-p";
    case graphmax::Variant::kNoHierarchy: return "minus-h";
  }
  return "unknown";
}

std::string format_acc(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

int cmd_ablate(const TrainOptions& opt) {
  graphmax::HyperConfig config = load_config(opt);
  graphmax::GraphDataset dataset = load_dataset(opt.data_dir, config);
  fs::create_directories(opt.out_dir);
  const fs::path out(opt.out_dir);

  write_file(out / "config.json", graphmax::config_to_json(config));
  std::vector<graphmax::AblationEntry> entries = graphmax::run_ablation(dataset, config);

  json artifacts;
  artifacts["config"] = (out / "config.json").string();
  std::string comparison = "variant, mean_acc, std_acc, wall_seconds\n";
  json variant_summaries = json::array();
  for (const graphmax::AblationEntry& entry : entries) {
    const std::string slug = variant_slug(entry.variant);
    json row;
    row["variant"] = graphmax::to_string(entry.variant);
    row["ok"] = entry.ok;
    row["wall_seconds"] = entry.seconds;
    double mean = std::nan(""), std_dev = std::nan("");
    if (entry.ok) {
      fs::path table_path = out / ("embeddings_" + slug + ".csv");
      graphmax::write_embedding_csv(entry.table, table_path.string());
      artifacts["embeddings_" + slug] = table_path.string();
      row["embeddings"] = table_path.string();
      try {
        graphmax::CvReport report =
            graphmax::classify_cv(entry.table, config.seed, config.workers);
        mean = report.mean;
        std_dev = report.std_dev;
        row["mean_acc"] = mean;
        row["std_acc"] = std_dev;
      } catch (const std::exception& e) {
        row["eval_error"] = e.what();
      }
    } else {
      row["error"] = entry.error;
    }
    comparison += graphmax::to_string(entry.variant) + ", " + format_acc(mean) + ", " +
                  format_acc(std_dev) + ", " + format_acc(entry.seconds) + "\n";
    fs::path variant_manifest = out / ("manifest_" + slug + ".json");
    write_file(variant_manifest, row.dump(2) + "\n");
    artifacts["manifest_" + slug] = variant_manifest.string();
    variant_summaries.push_back(row);
  }
  write_file(out / "comparison.csv", comparison);
  artifacts["comparison"] = (out / "comparison.csv").string();

  json manifest;
  manifest["config"] = json::parse(graphmax::config_to_json(config));
  manifest["dataset_checksum"] = graphmax::tu_dataset_checksum(opt.data_dir, config.dataset);
  manifest["seed"] = config.seed;
  manifest["artifacts"] = artifacts;
  manifest["variants"] = variant_summaries;
  write_file(out / "manifest.json", manifest.dump(2) + "\n");

  require_artifacts(artifacts);
  std::cout << "wrote " << (out / "manifest.json").string() << "\n";
  return 0;
}

int cmd_eval(const EvalOptions& opt) {
  graphmax::EmbeddingTable table = graphmax::read_embedding_csv(opt.embeddings_path);
  fs::create_directories(opt.out_dir);
  const fs::path out(opt.out_dir);
  std::uint64_t seed = opt.seed;
  if (!opt.seed_given && (opt.task == "classify" || opt.task == "cluster")) {
    seed = entropy_seed();
    graphmax::log_info("no seed given; using " + std::to_string(seed));
  }

  json artifacts;
  if (opt.task == "classify") {
    graphmax::CvReport report = graphmax::classify_cv(table, seed, opt.workers);
    graphmax::write_cv_report_json(report, (out / "cv_report.json").string());
    graphmax::write_cv_report_csv(report, (out / "cv_folds.csv").string());
    artifacts["cv_report"] = (out / "cv_report.json").string();
    artifacts["cv_folds"] = (out / "cv_folds.csv").string();
    std::cout << "mean accuracy " << report.mean << " (std " << report.std_dev << ", lr "
              << report.chosen_lr << ")\n";
  } else if (opt.task == "cluster") {
    graphmax::ClusterReport report = graphmax::cluster_eval(table, seed);
    graphmax::write_cluster_report_json(report, (out / "cluster_report.json").string());
    artifacts["cluster_report"] = (out / "cluster_report.json").string();
    std::cout << "clustering accuracy " << report.accuracy << " with k=" << report.k << "\n";
  } else {
    graphmax::Matrix coords = graphmax::project_2d(table);
    graphmax::write_projection_csv(table, coords, (out / "projection.csv").string());
    artifacts["projection"] = (out / "projection.csv").string();
    std::cout << "wrote 2-D projection of " << table.size() << " graphs\n";
  }

  json manifest;
  manifest["embeddings"] = opt.embeddings_path;
  manifest["task"] = opt.task;
  manifest["seed"] = seed;
  manifest["artifacts"] = artifacts;
  write_file(out / "manifest.json", manifest.dump(2) + "\n");
  require_artifacts(artifacts);
  return 0;
}

void add_train_flags(CLI::App* cmd, TrainOptions& opt) {
  cmd->add_option("--config", opt.config_path, "Config JSON path")->required();
  cmd->add_option("--data", opt.data_dir, "Dataset directory (TU flat-file layout)")->required();
  cmd->add_option("--out", opt.out_dir, "Output directory")->required();
  cmd->add_option("--seed", opt.seed, "Master seed (overrides the config)")
      ->check(CLI::NonNegativeNumber);
  cmd->add_option("--workers", opt.workers, "Worker threads (overrides the config)")
      ->check(CLI::PositiveNumber);
  cmd->add_option("--variant", opt.variant, "Model variant (overrides the config)")
      ->check(CLI::IsMember({"full", "+NF", "+EF", "-P", "-H"}));
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Unsupervised graph-level representation learning"};
  app.require_subcommand(1);

  TrainOptions train_opt, ablate_opt;
  EvalOptions eval_opt;

  CLI::App* train = app.add_subcommand("train", "Train on a dataset and emit embeddings");
  add_train_flags(train, train_opt);

  CLI::App* ablate = app.add_subcommand("ablate", "Run every model variant and compare");
  add_train_flags(ablate, ablate_opt);

  CLI::App* eval = app.add_subcommand("eval", "Evaluate an embedding table");
  eval->add_option("--embeddings", eval_opt.embeddings_path, "Embedding CSV path")->required();
  eval->add_option("--task", eval_opt.task, "classify | cluster | project")
      ->required()
      ->check(CLI::IsMember({"classify", "cluster", "project"}));
  eval->add_option("--out", eval_opt.out_dir, "Output directory");
  eval->add_option("--seed", eval_opt.seed, "Seed for folds and restarts")
      ->check(CLI::NonNegativeNumber);
  eval->add_option("--workers", eval_opt.workers, "Worker threads")->check(CLI::PositiveNumber);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }

  train_opt.seed_given = train->count("--seed") > 0;
  ablate_opt.seed_given = ablate->count("--seed") > 0;
  eval_opt.seed_given = eval->count("--seed") > 0;

  try {
    if (train->parsed()) return cmd_train(train_opt);
    if (ablate->parsed()) return cmd_ablate(ablate_opt);
    return cmd_eval(eval_opt);
  } catch (const ExitError& e) {
    std::cerr << "error: " << e.message << "\n";
    return e.code;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}

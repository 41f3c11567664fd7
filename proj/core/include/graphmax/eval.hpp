#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "graphmax/embedding.hpp"
#include "graphmax/matrix.hpp"

namespace graphmax {

// Stratified 10-fold cross-validation of a softmax classifier over the
// learning-rate sweep {0.1, 0.01, 0.05, 0.001}; the rate with the best mean
// accuracy wins (ties to the first listed) and the report carries the
// per-fold accuracies at that rate.
struct CvReport {
  std::vector<double> fold_accuracies;  // one entry per fold
  double mean = 0.0;
  double std_dev = 0.0;  // population std over folds
  double chosen_lr = 0.0;
};

CvReport classify_cv(const EmbeddingTable& table, std::uint64_t seed, int workers = 1);

// k-means with k = number of distinct labels, k-means++ seeding, 10 restarts
// keeping the best inertia; accuracy is the best cluster-to-label matching.
struct ClusterReport {
  std::vector<int> assignments;  // per table row
  double accuracy = 0.0;
  int k = 0;
};

ClusterReport cluster_eval(const EmbeddingTable& table, std::uint64_t seed);

// Top-2 principal components of the mean-centered vectors, M x 2. The sign
// of each component puts its largest-magnitude loading positive.
Matrix project_2d(const EmbeddingTable& table);

// Minimum-cost perfect assignment on a square cost matrix; returns the column
// matched to each row.
std::vector<int> min_cost_assignment(const std::vector<std::vector<long long>>& cost);

void write_cv_report_json(const CvReport& report, const std::string& path);
void write_cv_report_csv(const CvReport& report, const std::string& path);
void write_cluster_report_json(const ClusterReport& report, const std::string& path);
// CSV `graph_id, u, v, label` for external plotting.
void write_projection_csv(const EmbeddingTable& table, const Matrix& coords,
                          const std::string& path);

}  // namespace graphmax

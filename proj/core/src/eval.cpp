#include "graphmax/eval.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <climits>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <numeric>
#include <stdexcept>

#include <nlohmann/json.hpp>

#include "graphmax/adam.hpp"
#include "graphmax/autodiff.hpp"
#include "graphmax/log.hpp"
#include "graphmax/parallel.hpp"
#include "graphmax/rng.hpp"

namespace graphmax {

namespace {

constexpr int kFolds = 10;
constexpr int kClassifierEpochs = 500;
const double kLearningRates[] = {0.1, 0.01, 0.05, 0.001};

// Rows reordered by ascending graph_id so fold assembly cannot see the
// table's row order.
std::vector<int> canonical_order(const EmbeddingTable& table) {
  std::vector<int> order(static_cast<std::size_t>(table.size()));
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
    return table.graph_ids[static_cast<std::size_t>(a)] <
           table.graph_ids[static_cast<std::size_t>(b)];
  });
  return order;
}

// Distinct labels in ascending order; index in the result is the class id.
std::vector<int> label_alphabet(const EmbeddingTable& table) {
  std::vector<int> labels = table.labels;
  std::sort(labels.begin(), labels.end());
  labels.erase(std::unique(labels.begin(), labels.end()), labels.end());
  return labels;
}

int class_of(const std::vector<int>& alphabet, int label) {
  return static_cast<int>(std::lower_bound(alphabet.begin(), alphabet.end(), label) -
                          alphabet.begin());
}

struct SoftmaxModel {
  Matrix w;  // K x C
  Matrix b;  // 1 x C
};

SoftmaxModel train_softmax(const Matrix& x, const Matrix& onehot, double learning_rate) {
  std::vector<Matrix> params = {Matrix(x.cols(), onehot.cols()), Matrix(1, onehot.cols())};
  Adam adam(params, AdamConfig{learning_rate});
  for (int epoch = 0; epoch < kClassifierEpochs; ++epoch) {
    Tape tape;
    Var w = tape.leaf(params[0]);
    Var b = tape.leaf(params[1]);
    Var logits = tape.add_row(tape.matmul(tape.constant(x), w), b);
    Var loss = tape.softmax_cross_entropy(logits, onehot);
    tape.backward(loss);
    std::vector<Matrix> grads = {tape.grad(w), tape.grad(b)};
    adam.step(params, grads);
  }
  return {params[0], params[1]};
}

int predict(const SoftmaxModel& model, const Matrix& x, int row) {
  int best = 0;
  double best_score = -std::numeric_limits<double>::infinity();
  for (int c = 0; c < model.w.cols(); ++c) {
    double score = model.b(0, c);
    for (int k = 0; k < model.w.rows(); ++k) score += x(row, k) * model.w(k, c);
    if (score > best_score) {
      best_score = score;
      best = c;
    }
  }
  return best;
}

Matrix gather_rows(const Matrix& src, const std::vector<int>& rows) {
  Matrix out(static_cast<int>(rows.size()), src.cols());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    for (int j = 0; j < src.cols(); ++j) out(static_cast<int>(i), j) = src(rows[i], j);
  }
  return out;
}

double squared_distance(const Matrix& points, int row, const Matrix& centers, int center) {
  double acc = 0.0;
  for (int j = 0; j < points.cols(); ++j) {
    double d = points(row, j) - centers(center, j);
    acc += d * d;
  }
  return acc;
}

}  // namespace

CvReport classify_cv(const EmbeddingTable& table, std::uint64_t seed, int workers) {
  table.validate();
  if (!table.has_labels()) {
    throw std::invalid_argument("classify_cv: table has no labels");
  }
  const int m = table.size();
  if (m < kFolds) {
    throw std::invalid_argument("classify_cv: need at least " + std::to_string(kFolds) +
                                " graphs, got " + std::to_string(m));
  }

  std::vector<int> order = canonical_order(table);
  std::vector<int> alphabet = label_alphabet(table);
  const int num_classes = static_cast<int>(alphabet.size());

  // Stratified folds: each class's members are shuffled then dealt onto a
  // round-robin that continues across classes, so fold sizes differ by at
  // most one overall and by at most one within each class.
  std::vector<std::vector<int>> class_members(static_cast<std::size_t>(num_classes));
  for (int row : order) {
    int c = class_of(alphabet, table.labels[static_cast<std::size_t>(row)]);
    class_members[static_cast<std::size_t>(c)].push_back(row);
  }
  Rng rng(split_seed(seed, seed_stream::kEvalFolds));
  std::vector<int> fold_of(static_cast<std::size_t>(m), -1);
  int next_fold = 0;
  for (int c = 0; c < num_classes; ++c) {
    std::vector<int>& members = class_members[static_cast<std::size_t>(c)];
    if (static_cast<int>(members.size()) < kFolds) {
      log_info("classify_cv: class " + std::to_string(alphabet[static_cast<std::size_t>(c)]) +
               " has only " + std::to_string(members.size()) + " examples");
    }
    rng.shuffle(members);
    for (int row : members) {
      fold_of[static_cast<std::size_t>(row)] = next_fold % kFolds;
      ++next_fold;
    }
  }

  // Per-fold row lists in canonical order.
  std::vector<std::vector<int>> test_rows(kFolds), train_rows(kFolds);
  for (int row : order) {
    int f = fold_of[static_cast<std::size_t>(row)];
    for (int g = 0; g < kFolds; ++g) {
      (g == f ? test_rows[g] : train_rows[g]).push_back(row);
    }
  }

  const int num_rates = static_cast<int>(std::size(kLearningRates));
  std::vector<std::vector<double>> accuracy(static_cast<std::size_t>(num_rates),
                                            std::vector<double>(kFolds, 0.0));
  parallel_chunks(num_rates * kFolds, workers, [&](int, int begin, int end) {
    for (int job = begin; job < end; ++job) {
      const int rate_idx = job / kFolds;
      const int fold = job % kFolds;
      const std::vector<int>& train = train_rows[fold];
      const std::vector<int>& test = test_rows[fold];

      Matrix x_train = gather_rows(table.vectors, train);
      Matrix onehot(static_cast<int>(train.size()), num_classes);
      for (std::size_t i = 0; i < train.size(); ++i) {
        onehot(static_cast<int>(i),
               class_of(alphabet, table.labels[static_cast<std::size_t>(train[i])])) = 1.0;
      }
      SoftmaxModel model = train_softmax(x_train, onehot, kLearningRates[rate_idx]);

      Matrix x_test = gather_rows(table.vectors, test);
      int correct = 0;
      for (std::size_t i = 0; i < test.size(); ++i) {
        int truth = class_of(alphabet, table.labels[static_cast<std::size_t>(test[i])]);
        if (predict(model, x_test, static_cast<int>(i)) == truth) ++correct;
      }
      accuracy[static_cast<std::size_t>(rate_idx)][static_cast<std::size_t>(fold)] =
          static_cast<double>(correct) / static_cast<double>(test.size());
    }
  });

  int best_rate = 0;
  double best_mean = -1.0;
  for (int r = 0; r < num_rates; ++r) {
    double mean = 0.0;
    for (double a : accuracy[static_cast<std::size_t>(r)]) mean += a;
    mean /= kFolds;
    if (mean > best_mean) {
      best_mean = mean;
      best_rate = r;
    }
  }

  CvReport report;
  report.fold_accuracies = accuracy[static_cast<std::size_t>(best_rate)];
  report.chosen_lr = kLearningRates[best_rate];
  report.mean = best_mean;
  double var = 0.0;
  for (double a : report.fold_accuracies) var += (a - report.mean) * (a - report.mean);
  report.std_dev = std::sqrt(var / kFolds);
  return report;
}

std::vector<int> min_cost_assignment(const std::vector<std::vector<long long>>& cost) {
  const int n = static_cast<int>(cost.size());
  if (n == 0) throw std::invalid_argument("min_cost_assignment: empty matrix");
  for (const auto& row : cost) {
    if (static_cast<int>(row.size()) != n) {
      throw std::invalid_argument("min_cost_assignment: matrix must be square");
    }
  }
  const long long kInf = LLONG_MAX / 4;
  // Potentials-based shortest augmenting path, 1-indexed internally.
  std::vector<long long> u(static_cast<std::size_t>(n) + 1, 0), v(static_cast<std::size_t>(n) + 1, 0);
  std::vector<int> p(static_cast<std::size_t>(n) + 1, 0), way(static_cast<std::size_t>(n) + 1, 0);
  for (int i = 1; i <= n; ++i) {
    p[0] = i;
    int j0 = 0;
    std::vector<long long> minv(static_cast<std::size_t>(n) + 1, kInf);
    std::vector<char> used(static_cast<std::size_t>(n) + 1, 0);
    do {
      used[static_cast<std::size_t>(j0)] = 1;
      int i0 = p[static_cast<std::size_t>(j0)];
      int j1 = -1;
      long long delta = kInf;
      for (int j = 1; j <= n; ++j) {
        if (used[static_cast<std::size_t>(j)]) continue;
        long long cur = cost[static_cast<std::size_t>(i0 - 1)][static_cast<std::size_t>(j - 1)] -
                        u[static_cast<std::size_t>(i0)] - v[static_cast<std::size_t>(j)];
        if (cur < minv[static_cast<std::size_t>(j)]) {
          minv[static_cast<std::size_t>(j)] = cur;
          way[static_cast<std::size_t>(j)] = j0;
        }
        if (minv[static_cast<std::size_t>(j)] < delta) {
          delta = minv[static_cast<std::size_t>(j)];
          j1 = j;
        }
      }
      for (int j = 0; j <= n; ++j) {
        if (used[static_cast<std::size_t>(j)]) {
          u[static_cast<std::size_t>(p[static_cast<std::size_t>(j)])] += delta;
          v[static_cast<std::size_t>(j)] -= delta;
        } else {
          minv[static_cast<std::size_t>(j)] -= delta;
        }
      }
      j0 = j1;
    } while (p[static_cast<std::size_t>(j0)] != 0);
    do {
      int j1 = way[static_cast<std::size_t>(j0)];
      p[static_cast<std::size_t>(j0)] = p[static_cast<std::size_t>(j1)];
      j0 = j1;
    } while (j0 != 0);
  }
  std::vector<int> row_to_col(static_cast<std::size_t>(n), -1);
  for (int j = 1; j <= n; ++j) {
    if (p[static_cast<std::size_t>(j)] > 0) {
      row_to_col[static_cast<std::size_t>(p[static_cast<std::size_t>(j)] - 1)] = j - 1;
    }
  }
  return row_to_col;
}

ClusterReport cluster_eval(const EmbeddingTable& table, std::uint64_t seed) {
  table.validate();
  if (!table.has_labels()) {
    throw std::invalid_argument("cluster_eval: table has no labels");
  }
  const int m = table.size();
  std::vector<int> alphabet = label_alphabet(table);
  const int k = static_cast<int>(alphabet.size());
  if (k > m) {
    throw std::invalid_argument("cluster_eval: k=" + std::to_string(k) + " exceeds " +
                                std::to_string(m) + " points");
  }
  const Matrix& points = table.vectors;
  Rng rng(split_seed(seed, seed_stream::kKmeans));

  auto nearest_center = [&](const Matrix& centers, int row) {
    int best = 0;
    double best_d = std::numeric_limits<double>::infinity();
    for (int c = 0; c < k; ++c) {
      double d = squared_distance(points, row, centers, c);
      if (d < best_d) {
        best_d = d;
        best = c;
      }
    }
    return best;
  };

  std::vector<int> best_assignment;
  double best_inertia = std::numeric_limits<double>::infinity();
  for (int restart = 0; restart < 10; ++restart) {
    // k-means++ seeding: next center drawn with probability proportional to
    // the squared distance to the nearest chosen center.
    Matrix centers(k, points.cols());
    std::vector<double> dist2(static_cast<std::size_t>(m),
                              std::numeric_limits<double>::infinity());
    int first = static_cast<int>(rng.below(static_cast<std::uint64_t>(m)));
    for (int j = 0; j < points.cols(); ++j) centers(0, j) = points(first, j);
    for (int c = 1; c < k; ++c) {
      double total = 0.0;
      for (int i = 0; i < m; ++i) {
        double d = squared_distance(points, i, centers, c - 1);
        if (d < dist2[static_cast<std::size_t>(i)]) dist2[static_cast<std::size_t>(i)] = d;
        total += dist2[static_cast<std::size_t>(i)];
      }
      int chosen;
      if (total <= 0.0) {
        chosen = static_cast<int>(rng.below(static_cast<std::uint64_t>(m)));
      } else {
        double target = rng.uniform() * total;
        double acc = 0.0;
        chosen = m - 1;
        for (int i = 0; i < m; ++i) {
          acc += dist2[static_cast<std::size_t>(i)];
          if (target < acc) {
            chosen = i;
            break;
          }
        }
      }
      for (int j = 0; j < points.cols(); ++j) centers(c, j) = points(chosen, j);
    }

    std::vector<int> assignment(static_cast<std::size_t>(m), -1);
    for (int iter = 0; iter < 100; ++iter) {
      bool changed = false;
      for (int i = 0; i < m; ++i) {
        int c = nearest_center(centers, i);
        if (c != assignment[static_cast<std::size_t>(i)]) {
          assignment[static_cast<std::size_t>(i)] = c;
          changed = true;
        }
      }
      if (!changed) break;

      // Means per cluster; an empty cluster takes the point farthest from
      // its current center.
      std::vector<int> count(static_cast<std::size_t>(k), 0);
      Matrix sums(k, points.cols());
      for (int i = 0; i < m; ++i) {
        int c = assignment[static_cast<std::size_t>(i)];
        ++count[static_cast<std::size_t>(c)];
        for (int j = 0; j < points.cols(); ++j) sums(c, j) += points(i, j);
      }
      for (int c = 0; c < k; ++c) {
        if (count[static_cast<std::size_t>(c)] == 0) {
          int farthest = 0;
          double far_d = -1.0;
          for (int i = 0; i < m; ++i) {
            double d = squared_distance(points, i, centers,
                                        assignment[static_cast<std::size_t>(i)]);
            if (d > far_d) {
              far_d = d;
              farthest = i;
            }
          }
          for (int j = 0; j < points.cols(); ++j) centers(c, j) = points(farthest, j);
        } else {
          for (int j = 0; j < points.cols(); ++j) {
            centers(c, j) = sums(c, j) / count[static_cast<std::size_t>(c)];
          }
        }
      }
    }

    double inertia = 0.0;
    for (int i = 0; i < m; ++i) {
      inertia += squared_distance(points, i, centers, assignment[static_cast<std::size_t>(i)]);
    }
    if (inertia < best_inertia) {
      best_inertia = inertia;
      best_assignment = assignment;
    }
  }

  // Contingency counts, then a maximum matching of clusters to labels.
  std::vector<std::vector<long long>> counts(static_cast<std::size_t>(k),
                                             std::vector<long long>(static_cast<std::size_t>(k), 0));
  for (int i = 0; i < m; ++i) {
    int c = best_assignment[static_cast<std::size_t>(i)];
    int l = class_of(alphabet, table.labels[static_cast<std::size_t>(i)]);
    ++counts[static_cast<std::size_t>(c)][static_cast<std::size_t>(l)];
  }
  std::vector<std::vector<long long>> cost(static_cast<std::size_t>(k),
                                           std::vector<long long>(static_cast<std::size_t>(k), 0));
  for (int c = 0; c < k; ++c) {
    for (int l = 0; l < k; ++l) cost[static_cast<std::size_t>(c)][static_cast<std::size_t>(l)] =
        -counts[static_cast<std::size_t>(c)][static_cast<std::size_t>(l)];
  }
  std::vector<int> matched_label = min_cost_assignment(cost);
  long long matched = 0;
  for (int c = 0; c < k; ++c) {
    matched += counts[static_cast<std::size_t>(c)][static_cast<std::size_t>(matched_label[static_cast<std::size_t>(c)])];
  }

  ClusterReport report;
  report.assignments = best_assignment;
  report.k = k;
  report.accuracy = static_cast<double>(matched) / static_cast<double>(m);
  return report;
}

Matrix project_2d(const EmbeddingTable& table) {
  table.validate();
  const int m = table.size();
  const int k = table.dim();
  if (m < 3) throw std::invalid_argument("project_2d: need at least 3 graphs");
  if (k < 2) throw std::invalid_argument("project_2d: need at least 2 dimensions");

  Matrix centered = table.vectors;
  for (int j = 0; j < k; ++j) {
    double mean = 0.0;
    for (int i = 0; i < m; ++i) mean += centered(i, j);
    mean /= m;
    for (int i = 0; i < m; ++i) centered(i, j) -= mean;
  }

  using EigenRowMajor = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
  Eigen::Map<const EigenRowMajor> x(centered.data(), m, k);
  Eigen::MatrixXd cov = (x.transpose() * x) / static_cast<double>(m);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(cov);
  if (solver.info() != Eigen::Success) {
    throw std::runtime_error("project_2d: eigendecomposition failed");
  }

  // Eigenvalues ascend, so the top components sit in the last columns.
  Matrix coords(m, 2);
  for (int comp = 0; comp < 2; ++comp) {
    Eigen::VectorXd v = solver.eigenvectors().col(k - 1 - comp);
    int peak = 0;
    for (int j = 1; j < k; ++j) {
      if (std::abs(v(j)) > std::abs(v(peak))) peak = j;
    }
    if (v(peak) < 0.0) v = -v;
    for (int i = 0; i < m; ++i) {
      double acc = 0.0;
      for (int j = 0; j < k; ++j) acc += centered(i, j) * v(j);
      coords(i, comp) = acc;
    }
  }
  return coords;
}

namespace {

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

void write_text(const std::string& path, const std::string& text, const char* who) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw std::runtime_error(std::string(who) + ": cannot open " + path);
  out << text;
  out.flush();
  if (!out) throw std::runtime_error(std::string(who) + ": write failed for " + path);
}

}  // namespace

void write_cv_report_json(const CvReport& report, const std::string& path) {
  nlohmann::json doc;
  doc["mean_accuracy"] = report.mean;
  doc["std_accuracy"] = report.std_dev;
  doc["chosen_learning_rate"] = report.chosen_lr;
  doc["fold_accuracies"] = report.fold_accuracies;
  write_text(path, doc.dump(2) + "\n", "write_cv_report_json");
}

void write_cv_report_csv(const CvReport& report, const std::string& path) {
  std::string text = "fold, accuracy\n";
  for (std::size_t i = 0; i < report.fold_accuracies.size(); ++i) {
    text += std::to_string(i + 1) + ", " + format_double(report.fold_accuracies[i]) + "\n";
  }
  write_text(path, text, "write_cv_report_csv");
}

void write_cluster_report_json(const ClusterReport& report, const std::string& path) {
  nlohmann::json doc;
  doc["k"] = report.k;
  doc["accuracy"] = report.accuracy;
  doc["assignments"] = report.assignments;
  write_text(path, doc.dump(2) + "\n", "write_cluster_report_json");
}

void write_projection_csv(const EmbeddingTable& table, const Matrix& coords,
                          const std::string& path) {
  if (coords.rows() != table.size() || coords.cols() != 2) {
    throw std::invalid_argument("write_projection_csv: coordinates must be " +
                                std::to_string(table.size()) + "x2, got " + coords.shape_str());
  }
  std::string text = "graph_id, u, v, label\n";
  for (int i = 0; i < table.size(); ++i) {
    text += std::to_string(table.graph_ids[static_cast<std::size_t>(i)]) + ", " +
            format_double(coords(i, 0)) + ", " + format_double(coords(i, 1)) + ", " +
            std::to_string(table.labels[static_cast<std::size_t>(i)]) + "\n";
  }
  write_text(path, text, "write_projection_csv");
}

}  // namespace graphmax

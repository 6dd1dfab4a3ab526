#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "medlda/topic_state.hpp"

namespace medlda {

using RowMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

enum class TaskKind : std::uint32_t { binary = 0, regression = 1, multiclass = 2, multilabel = 3 };

std::string to_string(TaskKind kind);
TaskKind parse_task_kind(const std::string& name);

// What prediction needs from a trained chain: the point estimate of the
// topics and the sampled classifier weights (one row per task).
struct ModelSnapshot {
  TaskKind task = TaskKind::binary;
  Hyperparams hyper;
  Eigen::MatrixXd phi_hat;  // K x V, rows sum to 1
  RowMatrix etas;           // L x K
  std::uint64_t seed = 0;
  int burn_in = 0;

  int num_topics() const { return static_cast<int>(phi_hat.rows()); }
  std::size_t num_terms() const { return static_cast<std::size_t>(phi_hat.cols()); }
  int num_tasks() const { return static_cast<int>(etas.rows()); }
};

// Bitwise equality of every field.
bool identical(const ModelSnapshot& a, const ModelSnapshot& b);

struct TrainConfig {
  Hyperparams hyper;
  int burn_in = 10;
  std::uint64_t seed = 1;
  // Number of classifier draws averaged into the snapshot after burn-in.
  int eta_samples = 1;
  // Keep the per-iteration margins (zeta or Delta, one row per iteration).
  bool record_margins = false;
};

struct IterationStats {
  int iteration = 0;
  double seconds = 0.0;
  // Training accuracy (classification) or R^2 (regression) of the current
  // classifier on the current topic assignments.
  double train_metric = 0.0;
};

// Random stream layout of every trainer. From a chain root r:
//   r.child(kTokenStream)      topic initialization and all token sweeps
//   r.child(task_stream(i))    classifier draws and augmentation draws of task i
// The regression trainer uses task_stream(0) for eta, lambda and omega. A
// one-vs-all model for category i runs a full binary chain rooted at
// Rng(seed).child(i).
inline constexpr std::uint64_t kTokenStream = 0;
inline constexpr std::uint64_t task_stream(std::size_t task) { return 1 + task; }

}  // namespace medlda

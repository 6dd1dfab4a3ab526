#pragma once

#include <span>
#include <vector>

#include "medlda/binary.hpp"
#include "medlda/model.hpp"

namespace medlda {

// L x D matrix of task labels: +1 where document d has category i, else -1.
RowMatrix labels_from_multiclass(std::span<const int> categories, int num_tasks);
// +1 iff category i is in the document's label set.
RowMatrix labels_from_multilabel(std::span<const std::vector<int>> label_sets, int num_tasks);

// Task i's classifier conditional; identical in form to the binary one.
Eigen::VectorXd draw_eta_task(Rng& rng, const CountState& counts,
                              std::span<const double> task_lambdas,
                              std::span<const double> task_labels, const Hyperparams& hyper);

// Conditional of the excluded token (d, n) under all L tasks: the LDA weight
// times the product of every task's augmented hinge factor. lambdas and
// labels hold document d's value for each task.
void token_conditional_mt(const CountState& counts, const RowMatrix& etas,
                          std::span<const double> lambdas, std::span<const double> labels,
                          const Hyperparams& hyper, std::size_t d, std::size_t n,
                          std::span<double> out);
std::vector<double> token_conditional_mt(const CountState& counts, const RowMatrix& etas,
                                         std::span<const double> lambdas,
                                         std::span<const double> labels, const Hyperparams& hyper,
                                         std::size_t d, std::size_t n);

inline double draw_lambda_mt(Rng& rng, double zeta_d_i, double c) {
  return draw_lambda(rng, zeta_d_i, c);
}

struct MultiTaskState {
  RowMatrix etas;     // L x K
  RowMatrix lambdas;  // L x D
  RowMatrix labels;   // L x D
  CountState counts;
};

struct MultiTaskTrainResult {
  MultiTaskState state;
  ModelSnapshot snapshot;
  std::vector<IterationStats> trace;
};

// Multi-task sampler: per iteration, draw every eta_i, then sweep each
// non-empty document and redraw its L augmentation variables. Task i draws
// from its own stream, so with L = 1 the chain is the binary chain exactly.
// `kind` is recorded in the snapshot (multiclass or multilabel).
MultiTaskTrainResult train_multitask(const Rng& root, std::span<const std::vector<TermId>> docs,
                                     std::size_t num_terms, const RowMatrix& task_labels,
                                     TaskKind kind, const TrainConfig& config);
// Task labels derived from a multiclass or multilabel corpus with L categories.
MultiTaskTrainResult train_multitask(const LabeledCorpus& corpus, int num_tasks,
                                     const TrainConfig& config);

// L independent binary chains, chain i rooted at Rng(config.seed).child(i) and
// trained on task i's labels. Results do not depend on `workers`.
std::vector<BinaryTrainResult> train_one_vs_all(const LabeledCorpus& corpus, int num_tasks,
                                                const TrainConfig& config, int workers);

}  // namespace medlda

#include "medlda/multitask.hpp"

#include <atomic>
#include <chrono>
#include <exception>
#include <stdexcept>
#include <string>
#include <thread>

#include "kernels.hpp"
#include "medlda/predict.hpp"

namespace medlda {

RowMatrix labels_from_multiclass(std::span<const int> categories, int num_tasks) {
  if (num_tasks < 1) throw std::invalid_argument("number of tasks must be >= 1");
  RowMatrix y = RowMatrix::Constant(num_tasks, static_cast<Eigen::Index>(categories.size()), -1.0);
  for (std::size_t d = 0; d < categories.size(); ++d) {
    const int c = categories[d];
    if (c < 0 || c >= num_tasks) {
      throw std::invalid_argument("category " + std::to_string(c) + " of document " +
                                  std::to_string(d) + " outside [0, " +
                                  std::to_string(num_tasks) + ")");
    }
    y(c, static_cast<Eigen::Index>(d)) = 1.0;
  }
  return y;
}

RowMatrix labels_from_multilabel(std::span<const std::vector<int>> label_sets, int num_tasks) {
  if (num_tasks < 1) throw std::invalid_argument("number of tasks must be >= 1");
  RowMatrix y = RowMatrix::Constant(num_tasks, static_cast<Eigen::Index>(label_sets.size()), -1.0);
  for (std::size_t d = 0; d < label_sets.size(); ++d) {
    for (int c : label_sets[d]) {
      if (c < 0 || c >= num_tasks) {
        throw std::invalid_argument("label " + std::to_string(c) + " of document " +
                                    std::to_string(d) + " outside [0, " +
                                    std::to_string(num_tasks) + ")");
      }
      y(c, static_cast<Eigen::Index>(d)) = 1.0;
    }
  }
  return y;
}

Eigen::VectorXd draw_eta_task(Rng& rng, const CountState& counts,
                              std::span<const double> task_lambdas,
                              std::span<const double> task_labels, const Hyperparams& hyper) {
  return draw_eta(rng, counts, task_lambdas, task_labels, hyper);
}

void token_conditional_mt(const CountState& counts, const RowMatrix& etas,
                          std::span<const double> lambdas, std::span<const double> labels,
                          const Hyperparams& hyper, std::size_t d, std::size_t n,
                          std::span<double> out) {
  if (counts.topic(d, n) != kUnassigned) {
    throw std::logic_error("token_conditional_mt: token must be excluded first");
  }
  const int K = counts.num_topics();
  const auto L = static_cast<std::size_t>(etas.rows());
  if (etas.cols() != K || lambdas.size() != L || labels.size() != L ||
      out.size() != static_cast<std::size_t>(K)) {
    throw std::invalid_argument("token_conditional_mt: dimension mismatch");
  }
  detail::SweepScratch s(K, static_cast<int>(L));
  for (std::size_t i = 0; i < L; ++i) {
    s.others[i] = detail::others_discriminant(
        detail::dot_counts(etas.row(static_cast<Eigen::Index>(i)).data(), counts.doc_row(d)),
        counts.doc_length(d));
  }
  detail::hinge_token_weights(counts, hyper, d, n, etas, lambdas, labels, s.others, s);
  std::copy(s.weights.begin(), s.weights.end(), out.begin());
}

std::vector<double> token_conditional_mt(const CountState& counts, const RowMatrix& etas,
                                         std::span<const double> lambdas,
                                         std::span<const double> labels, const Hyperparams& hyper,
                                         std::size_t d, std::size_t n) {
  std::vector<double> out(static_cast<std::size_t>(counts.num_topics()));
  token_conditional_mt(counts, etas, lambdas, labels, hyper, d, n, out);
  return out;
}

namespace {

std::span<const double> row_span(const RowMatrix& m, Eigen::Index i) {
  return {m.row(i).data(), static_cast<std::size_t>(m.cols())};
}

}  // namespace

MultiTaskTrainResult train_multitask(const Rng& root, std::span<const std::vector<TermId>> docs,
                                     std::size_t num_terms, const RowMatrix& task_labels,
                                     TaskKind kind, const TrainConfig& config) {
  const Hyperparams& hyper = config.hyper;
  hyper.validate();
  if (config.burn_in < 0) throw std::invalid_argument("burn-in must be >= 0");
  if (config.eta_samples < 1) throw std::invalid_argument("eta_samples must be >= 1");
  const auto L = task_labels.rows();
  if (L < 1) throw std::invalid_argument("multi-task training needs at least one task");
  if (static_cast<std::size_t>(task_labels.cols()) != docs.size()) {
    throw std::invalid_argument("task labels must have one column per document");
  }
  for (Eigen::Index i = 0; i < task_labels.size(); ++i) {
    const double y = task_labels.data()[i];
    if (y != 1.0 && y != -1.0) throw std::invalid_argument("task labels must be -1 or +1");
  }

  const int K = hyper.num_topics;
  const std::size_t D = docs.size();
  const auto Di = static_cast<Eigen::Index>(D);
  Rng tokens = root.child(kTokenStream);
  std::vector<Rng> tasks;
  tasks.reserve(static_cast<std::size_t>(L));
  for (Eigen::Index i = 0; i < L; ++i) tasks.push_back(root.child(task_stream(static_cast<std::size_t>(i))));

  MultiTaskTrainResult result;
  auto& st = result.state;
  st.counts = init_assignments(tokens, {docs.begin(), docs.end()}, K, num_terms);
  st.labels = task_labels;
  st.lambdas = RowMatrix::Ones(L, Di);
  st.etas = RowMatrix::Zero(L, K);

  detail::SweepScratch scratch(K, static_cast<int>(L));
  std::vector<double> lam_d(static_cast<std::size_t>(L)), y_d(static_cast<std::size_t>(L));
  std::vector<double> scores(static_cast<std::size_t>(L));
  using Clock = std::chrono::steady_clock;
  for (int it = 0; it < config.burn_in; ++it) {
    const auto t0 = Clock::now();
    for (Eigen::Index i = 0; i < L; ++i) {
      st.etas.row(i) = draw_eta_task(tasks[static_cast<std::size_t>(i)], st.counts,
                                     row_span(st.lambdas, i), row_span(st.labels, i), hyper)
                           .transpose();
    }
    std::size_t correct = 0, decisions = 0;
    for (std::size_t d = 0; d < D; ++d) {
      if (st.counts.doc_length(d) == 0) continue;
      const auto dd = static_cast<Eigen::Index>(d);
      for (Eigen::Index i = 0; i < L; ++i) {
        lam_d[static_cast<std::size_t>(i)] = st.lambdas(i, dd);
        y_d[static_cast<std::size_t>(i)] = st.labels(i, dd);
      }
      detail::sweep_document_hinge(st.counts, d, st.etas, lam_d, y_d, hyper, tokens, scratch);
      for (Eigen::Index i = 0; i < L; ++i) {
        const auto ii = static_cast<std::size_t>(i);
        const double score = detail::doc_score(st.etas.row(i).data(), st.counts, d);
        scores[ii] = score;
        const double zeta = hyper.ell - y_d[ii] * score;
        if (hyper.c > 0.0) st.lambdas(i, dd) = draw_lambda_mt(tasks[ii], zeta, hyper.c);
      }
      if (kind == TaskKind::multiclass && L > 1) {
        const auto best = std::max_element(scores.begin(), scores.end()) - scores.begin();
        correct += (y_d[static_cast<std::size_t>(best)] == 1.0);
        ++decisions;
      } else {
        for (std::size_t i = 0; i < scores.size(); ++i) {
          correct += ((scores[i] >= 0.0 ? 1.0 : -1.0) == y_d[i]);
          ++decisions;
        }
      }
    }
    const double secs = std::chrono::duration<double>(Clock::now() - t0).count();
    result.trace.push_back({it + 1, secs, decisions ? double(correct) / double(decisions) : 0.0});
  }

  auto& snap = result.snapshot;
  snap.task = kind;
  snap.hyper = hyper;
  snap.phi_hat = estimate_phi_hat(st.counts, hyper.beta);
  snap.etas = RowMatrix::Zero(L, K);
  for (Eigen::Index i = 0; i < L; ++i) {
    Eigen::VectorXd eta_hat = Eigen::VectorXd::Zero(K);
    for (int s = 0; s < config.eta_samples; ++s) {
      eta_hat += draw_eta_task(tasks[static_cast<std::size_t>(i)], st.counts,
                               row_span(st.lambdas, i), row_span(st.labels, i), hyper);
    }
    eta_hat /= config.eta_samples;
    snap.etas.row(i) = eta_hat.transpose();
  }
  snap.seed = config.seed;
  snap.burn_in = config.burn_in;
  return result;
}

namespace {

RowMatrix corpus_task_labels(const LabeledCorpus& corpus, int num_tasks, TaskKind& kind) {
  switch (corpus.kind) {
    case ResponseKind::multiclass:
      kind = TaskKind::multiclass;
      return labels_from_multiclass(corpus.class_labels(), num_tasks);
    case ResponseKind::multilabel:
      kind = TaskKind::multilabel;
      return labels_from_multilabel(corpus.label_sets(), num_tasks);
    default:
      throw std::invalid_argument("multi-task training needs multiclass or multilabel responses, got " +
                                  to_string(corpus.kind));
  }
}

}  // namespace

MultiTaskTrainResult train_multitask(const LabeledCorpus& corpus, int num_tasks,
                                     const TrainConfig& config) {
  TaskKind kind{};
  const RowMatrix labels = corpus_task_labels(corpus, num_tasks, kind);
  const auto words = token_lists(corpus);
  return train_multitask(Rng(config.seed), words, corpus.num_terms(), labels, kind, config);
}

std::vector<BinaryTrainResult> train_one_vs_all(const LabeledCorpus& corpus, int num_tasks,
                                                const TrainConfig& config, int workers) {
  if (num_tasks < 2) throw std::invalid_argument("one-vs-all needs at least two categories");
  if (workers < 1) throw std::invalid_argument("worker count must be >= 1");
  TaskKind kind{};
  const RowMatrix labels = corpus_task_labels(corpus, num_tasks, kind);
  const auto words = token_lists(corpus);
  const Rng root(config.seed);

  std::vector<BinaryTrainResult> results(static_cast<std::size_t>(num_tasks));
  std::vector<std::exception_ptr> errors(results.size());
  std::atomic<int> next{0};
  auto work = [&] {
    for (int i = next++; i < num_tasks; i = next++) {
      try {
        const auto y = row_span(labels, i);
        results[static_cast<std::size_t>(i)] =
            train_binary(root.child(static_cast<std::uint64_t>(i)), words, corpus.num_terms(), y,
                         config);
      } catch (...) {
        errors[static_cast<std::size_t>(i)] = std::current_exception();
      }
    }
  };
  const int n = std::min(workers, num_tasks);
  if (n == 1) {
    work();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(n));
    for (int w = 0; w < n; ++w) pool.emplace_back(work);
    for (auto& t : pool) t.join();
  }
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  return results;
}

}  // namespace medlda

#include "medlda/predict.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <exception>
#include <stdexcept>
#include <thread>

#include "medlda/sampling.hpp"

namespace medlda {

Eigen::MatrixXd estimate_phi_hat(const CountState& counts, double beta) {
  const int K = counts.num_topics();
  const auto V = static_cast<Eigen::Index>(counts.num_terms());
  Eigen::MatrixXd phi(K, V);
  const double beta_sum = beta * static_cast<double>(V);
  for (Eigen::Index t = 0; t < V; ++t) {
    const auto row = counts.term_row(static_cast<TermId>(t));
    for (int k = 0; k < K; ++k) {
      phi(k, t) = (row[static_cast<std::size_t>(k)] + beta) /
                  (static_cast<double>(counts.topic_total(k)) + beta_sum);
    }
  }
  return phi;
}

void TestInferenceConfig::validate() const {
  if (max_iterations < 1) throw std::invalid_argument("max_iterations must be >= 1");
  if (samples < 1) throw std::invalid_argument("number of test samples must be >= 1");
  if (!(likelihood_rel_tol >= 0.0)) throw std::invalid_argument("likelihood tolerance must be >= 0");
}

void test_token_conditional(const Eigen::MatrixXd& phi_hat,
                            std::span<const std::int32_t> doc_counts, double alpha_k, TermId word,
                            std::span<double> out) {
  const auto K = static_cast<std::size_t>(phi_hat.rows());
  const double* col = phi_hat.col(word).data();
  for (std::size_t k = 0; k < K; ++k) out[k] = col[k] * (doc_counts[k] + alpha_k);
}

namespace {

// sum_n log sum_k phi[k, w_n] theta_k with theta the smoothed proportions.
double doc_log_likelihood(const Eigen::MatrixXd& phi, std::span<const TermId> doc,
                          std::span<const std::int32_t> counts, double alpha_k) {
  const auto K = static_cast<std::size_t>(phi.rows());
  const double denom = static_cast<double>(doc.size()) + static_cast<double>(K) * alpha_k;
  double ll = 0.0;
  for (TermId w : doc) {
    const double* col = phi.col(w).data();
    double p = 0.0;
    for (std::size_t k = 0; k < K; ++k) p += col[k] * (counts[k] + alpha_k);
    ll += std::log(p / denom);
  }
  return ll;
}

}  // namespace

std::vector<double> infer_test_topics(Rng& rng, const Eigen::MatrixXd& phi_hat,
                                      std::span<const TermId> doc, double alpha_k,
                                      const TestInferenceConfig& config) {
  config.validate();
  const auto K = static_cast<std::size_t>(phi_hat.rows());
  if (K == 0) throw std::invalid_argument("infer_test_topics: phi_hat has no topics");
  if (doc.empty()) return std::vector<double>(K, 1.0 / static_cast<double>(K));
  for (TermId w : doc) {
    if (w < 0 || w >= phi_hat.cols()) {
      throw std::invalid_argument("infer_test_topics: token outside the model vocabulary");
    }
  }

  std::vector<Topic> z(doc.size());
  std::vector<std::int32_t> counts(K, 0);
  for (auto& zn : z) {
    zn = static_cast<Topic>(rng.index(K));
    ++counts[static_cast<std::size_t>(zn)];
  }
  std::vector<double> weights(K);
  auto sweep = [&] {
    for (std::size_t n = 0; n < doc.size(); ++n) {
      --counts[static_cast<std::size_t>(z[n])];
      test_token_conditional(phi_hat, counts, alpha_k, doc[n], weights);
      z[n] = static_cast<Topic>(sample_categorical(rng, weights));
      ++counts[static_cast<std::size_t>(z[n])];
    }
  };

  double ll = doc_log_likelihood(phi_hat, doc, counts, alpha_k);
  for (int it = 0; it < config.max_iterations; ++it) {
    sweep();
    const double next = doc_log_likelihood(phi_hat, doc, counts, alpha_k);
    const double change = std::abs(next - ll) / std::max(std::abs(ll), 1e-300);
    ll = next;
    if (change < config.likelihood_rel_tol) break;
  }

  std::vector<double> mean(K, 0.0);
  const double len = static_cast<double>(doc.size());
  for (int s = 0; s < config.samples; ++s) {
    if (s > 0) sweep();
    for (std::size_t k = 0; k < K; ++k) mean[k] += counts[k] / len;
  }
  for (auto& m : mean) m /= config.samples;
  return mean;
}

double discriminant(std::span<const double> eta, std::span<const double> zbar) {
  if (eta.size() != zbar.size()) throw std::invalid_argument("discriminant: dimension mismatch");
  double s = 0.0;
  for (std::size_t k = 0; k < eta.size(); ++k) s += eta[k] * zbar[k];
  return s;
}

namespace {

std::span<const double> eta_row(const ModelSnapshot& m, Eigen::Index i) {
  return {m.etas.row(i).data(), static_cast<std::size_t>(m.etas.cols())};
}

}  // namespace

int predict_binary(const ModelSnapshot& snapshot, std::span<const double> zbar) {
  return discriminant(eta_row(snapshot, 0), zbar) >= 0.0 ? 1 : -1;
}

int predict_multiclass(const ModelSnapshot& snapshot, std::span<const double> zbar) {
  int best = 0;
  double top = discriminant(eta_row(snapshot, 0), zbar);
  for (Eigen::Index i = 1; i < snapshot.etas.rows(); ++i) {
    const double v = discriminant(eta_row(snapshot, i), zbar);
    if (v > top) {
      top = v;
      best = static_cast<int>(i);
    }
  }
  return best;
}

int predict_multiclass(std::span<const ModelSnapshot> models,
                       std::span<const std::vector<double>> zbars) {
  if (models.empty() || models.size() != zbars.size()) {
    throw std::invalid_argument("predict_multiclass: one zbar per model required");
  }
  int best = 0;
  double top = discriminant(eta_row(models[0], 0), zbars[0]);
  for (std::size_t i = 1; i < models.size(); ++i) {
    const double v = discriminant(eta_row(models[i], 0), zbars[i]);
    if (v > top) {
      top = v;
      best = static_cast<int>(i);
    }
  }
  return best;
}

std::vector<int> predict_multilabel(const ModelSnapshot& snapshot, std::span<const double> zbar) {
  std::vector<int> out;
  for (Eigen::Index i = 0; i < snapshot.etas.rows(); ++i) {
    if (discriminant(eta_row(snapshot, i), zbar) > 0.0) out.push_back(static_cast<int>(i));
  }
  return out;
}

double predict_regression(const ModelSnapshot& snapshot, std::span<const double> zbar) {
  return discriminant(eta_row(snapshot, 0), zbar);
}

namespace {

Response predict_document(std::span<const ModelSnapshot> models, std::span<const TermId> doc,
                          const TestInferenceConfig& config, const Rng& stream) {
  if (models.size() == 1) {
    const auto& m = models[0];
    Rng rng = stream;
    const auto zb = infer_test_topics(rng, m.phi_hat, doc, m.hyper.alpha_k(), config);
    switch (m.task) {
      case TaskKind::binary: return BinaryLabel{predict_binary(m, zb)};
      case TaskKind::regression: return RealScore{predict_regression(m, zb)};
      case TaskKind::multiclass: return ClassLabel{predict_multiclass(m, zb)};
      case TaskKind::multilabel: return LabelSet{predict_multilabel(m, zb)};
    }
    throw std::logic_error("unknown task kind");
  }
  std::vector<std::vector<double>> zbars;
  zbars.reserve(models.size());
  for (std::size_t i = 0; i < models.size(); ++i) {
    Rng rng = stream.child(i);
    zbars.push_back(infer_test_topics(rng, models[i].phi_hat, doc, models[i].hyper.alpha_k(), config));
  }
  return ClassLabel{predict_multiclass(models, zbars)};
}

}  // namespace

std::vector<Response> predict_corpus(std::span<const ModelSnapshot> models,
                                     const LabeledCorpus& corpus,
                                     const TestInferenceConfig& config, std::uint64_t seed,
                                     int workers) {
  config.validate();
  if (models.empty()) throw std::invalid_argument("predict_corpus: no models given");
  if (workers < 1) throw std::invalid_argument("worker count must be >= 1");
  if (models.size() > 1) {
    for (const auto& m : models) {
      if (m.task != TaskKind::binary || m.num_tasks() != 1) {
        throw std::invalid_argument("an ensemble must consist of single-task binary models");
      }
    }
  }
  // Tokens beyond a model's vocabulary are rejected per document.
  for (const auto& m : models) {
    if (m.num_tasks() < 1) throw std::invalid_argument("snapshot has no classifier weights");
  }

  const std::size_t D = corpus.num_docs();
  std::vector<Response> out(D);
  std::vector<std::exception_ptr> errors(D);
  const Rng root(seed);
  std::atomic<std::size_t> next{0};
  auto work = [&] {
    for (std::size_t d = next++; d < D; d = next++) {
      try {
        out[d] = predict_document(models, corpus.docs[d].tokens, config, root.child(d));
      } catch (...) {
        errors[d] = std::current_exception();
      }
    }
  };
  const auto n = static_cast<std::size_t>(workers) < D ? static_cast<std::size_t>(workers) : D;
  if (n <= 1) {
    work();
  } else {
    std::vector<std::thread> pool;
    for (std::size_t w = 0; w < n; ++w) pool.emplace_back(work);
    for (auto& t : pool) t.join();
  }
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  return out;
}

std::string format_predictions(const LabeledCorpus& corpus,
                               std::span<const Response> predictions) {
  if (predictions.size() != corpus.num_docs()) {
    throw std::invalid_argument("format_predictions: one prediction per document required");
  }
  std::string out;
  for (std::size_t d = 0; d < predictions.size(); ++d) {
    out += corpus.docs[d].id;
    out += '\t';
    if (const auto* r = std::get_if<RealScore>(&predictions[d])) {
      char buf[64];
      std::snprintf(buf, sizeof buf, "%.17g", r->value);
      out += buf;
    } else {
      out += format_response(predictions[d]);
    }
    out += '\n';
  }
  return out;
}

}  // namespace medlda

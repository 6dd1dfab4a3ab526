#include "medlda/binary.hpp"

#include <chrono>
#include <cmath>
#include <stdexcept>

#include "kernels.hpp"
#include "medlda/predict.hpp"
#include "medlda/sampling.hpp"

namespace medlda {

double compute_zeta(std::span<const double> eta, std::span<const double> zbar, double y,
                    double ell) {
  return ell - y * discriminant(eta, zbar);
}

Eigen::VectorXd EtaPosterior::mean() const {
  return precision.llt().solve(linear);
}

Eigen::MatrixXd EtaPosterior::covariance() const {
  return precision.llt().solve(Eigen::MatrixXd::Identity(precision.rows(), precision.cols()));
}

namespace {

Eigen::VectorXd zbar_vector(const CountState& counts, std::size_t d) {
  const auto row = counts.doc_row(d);
  Eigen::VectorXd z(static_cast<Eigen::Index>(row.size()));
  const auto len = static_cast<double>(counts.doc_length(d));
  for (std::size_t k = 0; k < row.size(); ++k) z[static_cast<Eigen::Index>(k)] = row[k] / len;
  return z;
}

void symmetrize_from_lower(Eigen::MatrixXd& m) {
  m.triangularView<Eigen::StrictlyUpper>() = m.transpose();
}

}  // namespace

EtaPosterior hinge_eta_posterior(const CountState& counts, std::span<const double> lambdas,
                                 std::span<const double> labels, const Hyperparams& hyper) {
  const int K = counts.num_topics();
  if (lambdas.size() != counts.num_docs() || labels.size() != counts.num_docs()) {
    throw std::invalid_argument("hinge_eta_posterior: per-document vector size mismatch");
  }
  EtaPosterior post{Eigen::MatrixXd::Identity(K, K) / hyper.nu2, Eigen::VectorXd::Zero(K)};
  const double c = hyper.c;
  for (std::size_t d = 0; d < counts.num_docs(); ++d) {
    if (counts.doc_length(d) == 0) continue;
    const double lambda = lambdas[d];
    if (!(lambda > 0.0)) throw std::invalid_argument("hinge_eta_posterior: lambda must be > 0");
    const Eigen::VectorXd z = zbar_vector(counts, d);
    post.precision.selfadjointView<Eigen::Lower>().rankUpdate(z, c * c / lambda);
    post.linear += (c * labels[d] * (lambda + c * hyper.ell) / lambda) * z;
  }
  symmetrize_from_lower(post.precision);
  return post;
}

Eigen::VectorXd draw_eta(Rng& rng, const CountState& counts, std::span<const double> lambdas,
                         std::span<const double> labels, const Hyperparams& hyper) {
  const auto post = hinge_eta_posterior(counts, lambdas, labels, hyper);
  return sample_mvn_information(rng, post.linear, post.precision).sample;
}

void supervised_token_conditional(const CountState& counts, std::span<const double> eta,
                                  double lambda_d, double y_d, const Hyperparams& hyper,
                                  std::size_t d, std::size_t n, std::span<double> out) {
  if (counts.topic(d, n) != kUnassigned) {
    throw std::logic_error("supervised_token_conditional: token must be excluded first");
  }
  const int K = counts.num_topics();
  if (eta.size() != static_cast<std::size_t>(K) || out.size() != eta.size()) {
    throw std::invalid_argument("supervised_token_conditional: dimension mismatch");
  }
  RowMatrix etas = Eigen::Map<const RowMatrix>(eta.data(), 1, K);
  detail::SweepScratch s(K, 1);
  const double others =
      detail::others_discriminant(detail::dot_counts(eta.data(), counts.doc_row(d)),
                                  counts.doc_length(d));
  const double lambdas[] = {lambda_d};
  const double labels[] = {y_d};
  const double other_arr[] = {others};
  detail::hinge_token_weights(counts, hyper, d, n, etas, lambdas, labels, other_arr, s);
  std::copy(s.weights.begin(), s.weights.end(), out.begin());
}

std::vector<double> supervised_token_conditional(const CountState& counts,
                                                 std::span<const double> eta, double lambda_d,
                                                 double y_d, const Hyperparams& hyper,
                                                 std::size_t d, std::size_t n) {
  std::vector<double> out(eta.size());
  supervised_token_conditional(counts, eta, lambda_d, y_d, hyper, d, n, out);
  return out;
}

double draw_lambda(Rng& rng, double zeta_d, double c) {
  return sample_augmentation(rng, c, zeta_d);
}

BinaryTrainResult train_binary(const Rng& root, std::span<const std::vector<TermId>> docs,
                               std::size_t num_terms, std::span<const double> labels,
                               const TrainConfig& config) {
  const Hyperparams& hyper = config.hyper;
  hyper.validate();
  if (config.burn_in < 0) throw std::invalid_argument("burn-in must be >= 0");
  if (config.eta_samples < 1) throw std::invalid_argument("eta_samples must be >= 1");
  if (labels.size() != docs.size()) throw std::invalid_argument("one label per document required");
  for (double y : labels) {
    if (y != 1.0 && y != -1.0) throw std::invalid_argument("binary labels must be -1 or +1");
  }

  const int K = hyper.num_topics;
  const std::size_t D = docs.size();
  Rng tokens = root.child(kTokenStream);
  Rng task = root.child(task_stream(0));

  BinaryTrainResult result;
  auto& st = result.state;
  st.counts = init_assignments(tokens, {docs.begin(), docs.end()}, K, num_terms);
  st.lambda.assign(D, 1.0);
  st.zeta.assign(D, 0.0);
  st.eta = Eigen::VectorXd::Zero(K);

  detail::SweepScratch scratch(K, 1);
  RowMatrix etas(1, K);
  using Clock = std::chrono::steady_clock;
  for (int it = 0; it < config.burn_in; ++it) {
    const auto t0 = Clock::now();
    st.eta = draw_eta(task, st.counts, st.lambda, labels, hyper);
    etas.row(0) = st.eta.transpose();
    std::size_t correct = 0, scored = 0;
    for (std::size_t d = 0; d < D; ++d) {
      if (st.counts.doc_length(d) == 0) continue;
      detail::sweep_document_hinge(st.counts, d, etas, std::span(&st.lambda[d], 1),
                                   labels.subspan(d, 1), hyper, tokens, scratch);
      const double score = detail::doc_score(st.eta.data(), st.counts, d);
      st.zeta[d] = hyper.ell - labels[d] * score;
      if (hyper.c > 0.0) st.lambda[d] = draw_lambda(task, st.zeta[d], hyper.c);
      correct += ((score >= 0.0 ? 1.0 : -1.0) == labels[d]);
      ++scored;
    }
    const double secs = std::chrono::duration<double>(Clock::now() - t0).count();
    result.trace.push_back({it + 1, secs, scored ? double(correct) / double(scored) : 0.0});
    if (config.record_margins) result.margins.push_back(st.zeta);
  }

  Eigen::VectorXd eta_hat = Eigen::VectorXd::Zero(K);
  for (int s = 0; s < config.eta_samples; ++s) {
    eta_hat += draw_eta(task, st.counts, st.lambda, labels, hyper);
  }
  eta_hat /= config.eta_samples;

  auto& snap = result.snapshot;
  snap.task = TaskKind::binary;
  snap.hyper = hyper;
  snap.phi_hat = estimate_phi_hat(st.counts, hyper.beta);
  snap.etas = eta_hat.transpose();
  snap.seed = config.seed;
  snap.burn_in = config.burn_in;
  return result;
}

BinaryTrainResult train_binary(const LabeledCorpus& corpus, const TrainConfig& config) {
  const auto words = token_lists(corpus);
  const auto labels = corpus.binary_labels();
  return train_binary(Rng(config.seed), words, corpus.num_terms(), labels, config);
}

double expected_hinge(std::span<const std::vector<double>> zeta_samples) {
  if (zeta_samples.empty()) throw std::invalid_argument("expected_hinge needs at least one sample");
  // Summed per document in the same order as hinge_of_mean_margin, so the
  // Jensen inequality between the two also holds in floating point.
  const std::size_t D = zeta_samples.front().size();
  const auto m = static_cast<double>(zeta_samples.size());
  double total = 0.0;
  for (std::size_t d = 0; d < D; ++d) {
    double sum = 0.0;
    for (const auto& sample : zeta_samples) sum += std::max(0.0, sample.at(d));
    total += sum / m;
  }
  return total;
}

double expected_hinge(std::span<const Eigen::VectorXd> etas, std::span<const CountState> counts,
                      std::span<const double> labels, double ell) {
  if (etas.size() != counts.size()) throw std::invalid_argument("expected_hinge: sample mismatch");
  std::vector<std::vector<double>> zetas;
  zetas.reserve(etas.size());
  for (std::size_t s = 0; s < etas.size(); ++s) {
    auto& row = zetas.emplace_back();
    for (std::size_t d = 0; d < counts[s].num_docs(); ++d) {
      if (counts[s].doc_length(d) == 0) continue;
      const auto z = zbar(counts[s], d);
      row.push_back(compute_zeta({etas[s].data(), static_cast<std::size_t>(etas[s].size())}, z,
                                 labels[d], ell));
    }
  }
  return expected_hinge(zetas);
}

double hinge_of_mean_margin(std::span<const std::vector<double>> zeta_samples) {
  if (zeta_samples.empty()) throw std::invalid_argument("hinge_of_mean_margin needs samples");
  const std::size_t D = zeta_samples.front().size();
  double total = 0.0;
  for (std::size_t d = 0; d < D; ++d) {
    double mean = 0.0;
    for (const auto& sample : zeta_samples) mean += sample.at(d);
    total += std::max(0.0, mean / static_cast<double>(zeta_samples.size()));
  }
  return total;
}

}  // namespace medlda

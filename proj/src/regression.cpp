#include "medlda/regression.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "kernels.hpp"
#include "medlda/sampling.hpp"

namespace medlda {

double eps_insensitive_loss(double delta, double epsilon) {
  return std::max(0.0, std::abs(delta) - epsilon);
}

AuxCoefficients aux_coefficients(double lambda, double omega, double y, double epsilon) {
  return {1.0 / lambda + 1.0 / omega, (y - epsilon) / lambda + (y + epsilon) / omega};
}

EtaPosterior regression_eta_posterior(const CountState& counts, std::span<const double> lambdas,
                                      std::span<const double> omegas,
                                      std::span<const double> scores, const Hyperparams& hyper) {
  const int K = counts.num_topics();
  const std::size_t D = counts.num_docs();
  if (lambdas.size() != D || omegas.size() != D || scores.size() != D) {
    throw std::invalid_argument("regression_eta_posterior: per-document vector size mismatch");
  }
  EtaPosterior post{Eigen::MatrixXd::Identity(K, K) / hyper.nu2, Eigen::VectorXd::Zero(K)};
  const double c2 = hyper.c * hyper.c;
  Eigen::VectorXd z(K);
  for (std::size_t d = 0; d < D; ++d) {
    const auto len = counts.doc_length(d);
    if (len == 0) continue;
    if (!(lambdas[d] > 0.0) || !(omegas[d] > 0.0)) {
      throw std::invalid_argument("regression_eta_posterior: lambda and omega must be > 0");
    }
    const auto row = counts.doc_row(d);
    for (int k = 0; k < K; ++k) z[k] = row[static_cast<std::size_t>(k)] / static_cast<double>(len);
    const auto aux = aux_coefficients(lambdas[d], omegas[d], scores[d], hyper.epsilon);
    post.precision.selfadjointView<Eigen::Lower>().rankUpdate(z, c2 * aux.rho);
    post.linear += (c2 * aux.psi) * z;
  }
  post.precision.triangularView<Eigen::StrictlyUpper>() = post.precision.transpose();
  return post;
}

Eigen::VectorXd draw_eta_reg(Rng& rng, const CountState& counts, std::span<const double> lambdas,
                             std::span<const double> omegas, std::span<const double> scores,
                             const Hyperparams& hyper) {
  const auto post = regression_eta_posterior(counts, lambdas, omegas, scores, hyper);
  return sample_mvn_information(rng, post.linear, post.precision).sample;
}

namespace {

void regression_weights(const CountState& counts, const Hyperparams& hyper, std::size_t d,
                        std::size_t n, const double* eta, AuxCoefficients aux, double others,
                        detail::SweepScratch& s) {
  lda_token_conditional(counts, hyper, d, n, s.weights);
  std::fill(s.expo.begin(), s.expo.end(), 0.0);
  const double gamma = 1.0 / static_cast<double>(counts.doc_length(d));
  detail::add_regression_exponent(s.expo, eta, aux.rho, aux.psi, hyper.c, gamma, others);
  detail::apply_exponent(s.weights, s.expo);
}

void sweep_document_regression(CountState& counts, std::size_t d, const Eigen::VectorXd& eta,
                               AuxCoefficients aux, const Hyperparams& hyper, Rng& rng,
                               detail::SweepScratch& s) {
  const std::size_t len = counts.doc_length(d);
  double running = detail::dot_counts(eta.data(), counts.doc_row(d));
  for (std::size_t n = 0; n < len; ++n) {
    const Topic old = counts.topic(d, n);
    counts.remove_token(d, n);
    running -= eta[old];
    regression_weights(counts, hyper, d, n, eta.data(), aux,
                       detail::others_discriminant(running, len), s);
    const auto k = static_cast<Topic>(sample_categorical(rng, s.weights));
    counts.add_token(d, n, k);
    running += eta[k];
  }
}

}  // namespace

void token_conditional_reg(const CountState& counts, std::span<const double> eta,
                           double lambda_d, double omega_d, double y_d, const Hyperparams& hyper,
                           std::size_t d, std::size_t n, std::span<double> out) {
  if (counts.topic(d, n) != kUnassigned) {
    throw std::logic_error("token_conditional_reg: token must be excluded first");
  }
  const int K = counts.num_topics();
  if (eta.size() != static_cast<std::size_t>(K) || out.size() != eta.size()) {
    throw std::invalid_argument("token_conditional_reg: dimension mismatch");
  }
  detail::SweepScratch s(K, 1);
  const double others = detail::others_discriminant(
      detail::dot_counts(eta.data(), counts.doc_row(d)), counts.doc_length(d));
  regression_weights(counts, hyper, d, n, eta.data(),
                     aux_coefficients(lambda_d, omega_d, y_d, hyper.epsilon), others, s);
  std::copy(s.weights.begin(), s.weights.end(), out.begin());
}

std::vector<double> token_conditional_reg(const CountState& counts, std::span<const double> eta,
                                          double lambda_d, double omega_d, double y_d,
                                          const Hyperparams& hyper, std::size_t d, std::size_t n) {
  std::vector<double> out(eta.size());
  token_conditional_reg(counts, eta, lambda_d, omega_d, y_d, hyper, d, n, out);
  return out;
}

double draw_lambda_reg(Rng& rng, double delta_d, double c, double epsilon) {
  return sample_augmentation(rng, c, delta_d - epsilon);
}

double draw_omega_reg(Rng& rng, double delta_d, double c, double epsilon) {
  return sample_augmentation(rng, c, delta_d + epsilon);
}

RegressionTrainResult train_regression(const Rng& root, std::span<const std::vector<TermId>> docs,
                                       std::size_t num_terms, std::span<const double> scores,
                                       const TrainConfig& config) {
  const Hyperparams& hyper = config.hyper;
  hyper.validate();
  if (config.burn_in < 0) throw std::invalid_argument("burn-in must be >= 0");
  if (config.eta_samples < 1) throw std::invalid_argument("eta_samples must be >= 1");
  if (scores.size() != docs.size()) throw std::invalid_argument("one score per document required");
  for (double y : scores) {
    if (!std::isfinite(y)) throw std::invalid_argument("regression scores must be finite");
  }

  const int K = hyper.num_topics;
  const std::size_t D = docs.size();
  Rng tokens = root.child(kTokenStream);
  Rng task = root.child(task_stream(0));

  RegressionTrainResult result;
  auto& st = result.state;
  st.counts = init_assignments(tokens, {docs.begin(), docs.end()}, K, num_terms);
  st.lambda.assign(D, 1.0);
  st.omega.assign(D, 1.0);
  st.delta.assign(D, 0.0);
  st.eta = Eigen::VectorXd::Zero(K);

  detail::SweepScratch scratch(K, 1);
  using Clock = std::chrono::steady_clock;
  for (int it = 0; it < config.burn_in; ++it) {
    const auto t0 = Clock::now();
    st.eta = draw_eta_reg(task, st.counts, st.lambda, st.omega, scores, hyper);
    double sse = 0.0, sum = 0.0, sum2 = 0.0;
    std::size_t scored = 0;
    for (std::size_t d = 0; d < D; ++d) {
      if (st.counts.doc_length(d) == 0) continue;
      sweep_document_regression(st.counts, d, st.eta,
                                aux_coefficients(st.lambda[d], st.omega[d], scores[d],
                                                 hyper.epsilon),
                                hyper, tokens, scratch);
      const double pred = detail::doc_score(st.eta.data(), st.counts, d);
      st.delta[d] = scores[d] - pred;
      if (hyper.c > 0.0) {
        st.lambda[d] = draw_lambda_reg(task, st.delta[d], hyper.c, hyper.epsilon);
        st.omega[d] = draw_omega_reg(task, st.delta[d], hyper.c, hyper.epsilon);
      }
      sse += st.delta[d] * st.delta[d];
      sum += scores[d];
      sum2 += scores[d] * scores[d];
      ++scored;
    }
    double r2 = 0.0;
    if (scored > 0) {
      const double sst = sum2 - sum * sum / static_cast<double>(scored);
      r2 = sst > 0.0 ? 1.0 - sse / sst : 0.0;
    }
    const double secs = std::chrono::duration<double>(Clock::now() - t0).count();
    result.trace.push_back({it + 1, secs, r2});
    if (config.record_margins) result.margins.push_back(st.delta);
  }

  Eigen::VectorXd eta_hat = Eigen::VectorXd::Zero(K);
  for (int s = 0; s < config.eta_samples; ++s) {
    eta_hat += draw_eta_reg(task, st.counts, st.lambda, st.omega, scores, hyper);
  }
  eta_hat /= config.eta_samples;

  auto& snap = result.snapshot;
  snap.task = TaskKind::regression;
  snap.hyper = hyper;
  snap.phi_hat = estimate_phi_hat(st.counts, hyper.beta);
  snap.etas = eta_hat.transpose();
  snap.seed = config.seed;
  snap.burn_in = config.burn_in;
  return result;
}

RegressionTrainResult train_regression(const LabeledCorpus& corpus, const TrainConfig& config) {
  const auto words = token_lists(corpus);
  const auto scores = corpus.real_scores();
  return train_regression(Rng(config.seed), words, corpus.num_terms(), scores, config);
}

namespace {

// Per document: the two one-sided parts of the loss averaged over samples, and
// the same parts evaluated at the mean residual. Both use one summation order
// so that the first never falls below the second, even after rounding.
struct EpsLossPair {
  double mean_loss = 0.0;
  double loss_of_mean = 0.0;
};

EpsLossPair eps_loss_pair(std::span<const std::vector<double>> delta_samples, double epsilon) {
  if (delta_samples.empty()) throw std::invalid_argument("eps-insensitive loss needs samples");
  if (!(epsilon >= 0.0)) throw std::invalid_argument("epsilon must be >= 0");
  const std::size_t D = delta_samples.front().size();
  const auto m = static_cast<double>(delta_samples.size());
  EpsLossPair out;
  for (std::size_t d = 0; d < D; ++d) {
    double over = 0.0, under = 0.0, over_loss = 0.0, under_loss = 0.0;
    for (const auto& sample : delta_samples) {
      const double u = sample.at(d) - epsilon, v = -sample.at(d) - epsilon;
      over += u;
      under += v;
      over_loss += std::max(0.0, u);
      under_loss += std::max(0.0, v);
    }
    out.mean_loss += over_loss / m + under_loss / m;
    out.loss_of_mean += std::max(0.0, over / m) + std::max(0.0, under / m);
  }
  return out;
}

}  // namespace

double expected_eps_loss(std::span<const std::vector<double>> delta_samples, double epsilon) {
  return eps_loss_pair(delta_samples, epsilon).mean_loss;
}

double eps_loss_of_mean_residual(std::span<const std::vector<double>> delta_samples,
                                 double epsilon) {
  return eps_loss_pair(delta_samples, epsilon).loss_of_mean;
}

CrossValidationResult select_c_by_cv(const LabeledCorpus& corpus, const TrainConfig& config,
                                     std::span<const double> grid, int folds,
                                     const TestInferenceConfig& test_config) {
  if (grid.empty()) throw std::invalid_argument("cross-validation grid is empty");
  if (folds < 2 || static_cast<std::size_t>(folds) > corpus.num_docs()) {
    throw std::invalid_argument("fold count must be in [2, number of documents]");
  }
  const std::size_t D = corpus.num_docs();
  std::vector<std::size_t> order(D);
  std::iota(order.begin(), order.end(), 0);
  Rng shuffle_rng = Rng(config.seed).child(0xC5);
  std::shuffle(order.begin(), order.end(), shuffle_rng.engine());

  CrossValidationResult out;
  out.grid.assign(grid.begin(), grid.end());
  for (double c : grid) {
    TrainConfig cfg = config;
    cfg.hyper.c = c;
    double r2_total = 0.0;
    for (int f = 0; f < folds; ++f) {
      std::vector<std::size_t> train_idx, test_idx;
      for (std::size_t j = 0; j < D; ++j) {
        (static_cast<int>(j % static_cast<std::size_t>(folds)) == f ? test_idx : train_idx)
            .push_back(order[j]);
      }
      std::sort(train_idx.begin(), train_idx.end());
      std::sort(test_idx.begin(), test_idx.end());
      const auto train = corpus.subset(train_idx);
      const auto test = corpus.subset(test_idx);
      const auto fit = train_regression(train, cfg);
      const auto preds = predict_corpus(std::span(&fit.snapshot, 1), test, test_config,
                                        config.seed + static_cast<std::uint64_t>(f));
      const auto truth = test.real_scores();
      double mean = std::accumulate(truth.begin(), truth.end(), 0.0) / truth.size();
      double sse = 0.0, sst = 0.0;
      for (std::size_t j = 0; j < truth.size(); ++j) {
        const double p = std::get<RealScore>(preds[j]).value;
        sse += (truth[j] - p) * (truth[j] - p);
        sst += (truth[j] - mean) * (truth[j] - mean);
      }
      r2_total += sst > 0.0 ? 1.0 - sse / sst : 0.0;
    }
    out.mean_r2.push_back(r2_total / folds);
  }
  const auto best = std::max_element(out.mean_r2.begin(), out.mean_r2.end()) - out.mean_r2.begin();
  out.best_c = out.grid[static_cast<std::size_t>(best)];
  return out;
}

}  // namespace medlda

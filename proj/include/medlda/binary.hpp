#pragma once

#include <span>
#include <vector>

#include <Eigen/Dense>

#include "medlda/model.hpp"

namespace medlda {

// zeta_d = ell - y_d eta^T zbar_d.
double compute_zeta(std::span<const double> eta, std::span<const double> zbar, double y,
                    double ell);

// Information form of the Gaussian conditional of one classifier:
//   precision = I / nu2 + c^2 sum_d zbar_d zbar_d^T / lambda_d
//   linear    = c sum_d y_d (lambda_d + c ell) / lambda_d zbar_d
// so that the mean is precision^{-1} linear. Empty documents do not contribute.
struct EtaPosterior {
  Eigen::MatrixXd precision;
  Eigen::VectorXd linear;

  Eigen::VectorXd mean() const;
  Eigen::MatrixXd covariance() const;
};

EtaPosterior hinge_eta_posterior(const CountState& counts, std::span<const double> lambdas,
                                 std::span<const double> labels, const Hyperparams& hyper);

Eigen::VectorXd draw_eta(Rng& rng, const CountState& counts, std::span<const double> lambdas,
                         std::span<const double> labels, const Hyperparams& hyper);

// Unnormalized conditional of the excluded token (d, n): the collapsed LDA
// weight times the augmented hinge factor. Scaled so the largest exponent is 0.
void supervised_token_conditional(const CountState& counts, std::span<const double> eta,
                                  double lambda_d, double y_d, const Hyperparams& hyper,
                                  std::size_t d, std::size_t n, std::span<double> out);
std::vector<double> supervised_token_conditional(const CountState& counts,
                                                 std::span<const double> eta, double lambda_d,
                                                 double y_d, const Hyperparams& hyper,
                                                 std::size_t d, std::size_t n);

// lambda_d with lambda_d^{-1} ~ IG(1/(c |zeta_d|), 1), mean clamped as in
// clamped_ig_mean. Requires c > 0.
double draw_lambda(Rng& rng, double zeta_d, double c);

struct BinaryModelState {
  Eigen::VectorXd eta;
  std::vector<double> lambda;
  std::vector<double> zeta;  // zero for empty documents
  CountState counts;
};

struct BinaryTrainResult {
  BinaryModelState state;
  ModelSnapshot snapshot;
  std::vector<IterationStats> trace;
  std::vector<std::vector<double>> margins;  // filled when record_margins
};

// Augment-and-collapse Gibbs sampler for binary labels in {-1, +1}. Each of
// the burn_in iterations draws eta, sweeps every non-empty document's tokens
// and then redraws that document's lambda. The snapshot holds phi_hat of the
// final counts and the mean of config.eta_samples fresh eta draws.
BinaryTrainResult train_binary(const Rng& root, std::span<const std::vector<TermId>> docs,
                               std::size_t num_terms, std::span<const double> labels,
                               const TrainConfig& config);
BinaryTrainResult train_binary(const LabeledCorpus& corpus, const TrainConfig& config);

// Monte-Carlo expected hinge loss: mean over samples of sum_d max(0, zeta_d).
// Each row of `zeta_samples` holds one posterior sample's margins.
double expected_hinge(std::span<const std::vector<double>> zeta_samples);
// Same quantity from (eta, counts) samples; empty documents are skipped.
double expected_hinge(std::span<const Eigen::VectorXd> etas, std::span<const CountState> counts,
                      std::span<const double> labels, double ell);
// sum_d max(0, mean over samples of zeta_d); never exceeds expected_hinge.
double hinge_of_mean_margin(std::span<const std::vector<double>> zeta_samples);

}  // namespace medlda

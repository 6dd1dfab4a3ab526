#pragma once

#include <span>
#include <vector>

#include <Eigen/Dense>

#include "medlda/binary.hpp"
#include "medlda/model.hpp"
#include "medlda/predict.hpp"

namespace medlda {

// max(0, |delta| - epsilon).
double eps_insensitive_loss(double delta, double epsilon);

struct AuxCoefficients {
  double rho;  // 1/lambda + 1/omega
  double psi;  // (y - eps)/lambda + (y + eps)/omega
};
AuxCoefficients aux_coefficients(double lambda, double omega, double y, double epsilon);

// Gaussian conditional of the regression weights:
//   precision = I / nu2 + c^2 sum_d rho_d zbar_d zbar_d^T
//   linear    = c^2 sum_d psi_d zbar_d
// Expanding both augmented factors of the residual makes the c-linear cross
// terms cancel, which leaves c^2 on the linear part as well.
EtaPosterior regression_eta_posterior(const CountState& counts, std::span<const double> lambdas,
                                      std::span<const double> omegas,
                                      std::span<const double> scores, const Hyperparams& hyper);

Eigen::VectorXd draw_eta_reg(Rng& rng, const CountState& counts, std::span<const double> lambdas,
                             std::span<const double> omegas, std::span<const double> scores,
                             const Hyperparams& hyper);

// LDA weight times exp(c^2 g psi eta_k - c^2 (g^2 rho eta_k^2 / 2 + g (1-g) rho eta_k U))
// for the excluded token (d, n), U the discriminant of the other tokens.
void token_conditional_reg(const CountState& counts, std::span<const double> eta,
                           double lambda_d, double omega_d, double y_d, const Hyperparams& hyper,
                           std::size_t d, std::size_t n, std::span<double> out);
std::vector<double> token_conditional_reg(const CountState& counts, std::span<const double> eta,
                                          double lambda_d, double omega_d, double y_d,
                                          const Hyperparams& hyper, std::size_t d, std::size_t n);

// lambda^{-1} ~ IG(1/(c |delta - eps|), 1) and omega^{-1} ~ IG(1/(c |delta + eps|), 1),
// both with the clamped mean. Require c > 0.
double draw_lambda_reg(Rng& rng, double delta_d, double c, double epsilon);
double draw_omega_reg(Rng& rng, double delta_d, double c, double epsilon);

struct RegressionState {
  Eigen::VectorXd eta;
  std::vector<double> lambda;
  std::vector<double> omega;
  std::vector<double> delta;  // zero for empty documents
  CountState counts;
};

struct RegressionTrainResult {
  RegressionState state;
  ModelSnapshot snapshot;
  std::vector<IterationStats> trace;
  std::vector<std::vector<double>> margins;  // residuals per iteration when record_margins
};

// Each iteration draws eta, then for every non-empty document sweeps its
// tokens and redraws (lambda_d, omega_d).
RegressionTrainResult train_regression(const Rng& root, std::span<const std::vector<TermId>> docs,
                                       std::size_t num_terms, std::span<const double> scores,
                                       const TrainConfig& config);
RegressionTrainResult train_regression(const LabeledCorpus& corpus, const TrainConfig& config);

// Mean over samples of sum_d eps-loss, and sum_d eps-loss of the per-document
// mean residual. The first is never below the second.
double expected_eps_loss(std::span<const std::vector<double>> delta_samples, double epsilon);
double eps_loss_of_mean_residual(std::span<const std::vector<double>> delta_samples,
                                 double epsilon);

inline constexpr double kRegressionCGrid[] = {1.0 / 16, 1.0 / 4, 1.0, 4.0, 16.0};

struct CrossValidationResult {
  double best_c = 1.0;
  std::vector<double> grid;
  std::vector<double> mean_r2;  // per grid value
};

// k-fold cross-validation of c by held-out predictive R^2. Folds come from a
// seeded shuffle; each fit uses config with c replaced.
CrossValidationResult select_c_by_cv(const LabeledCorpus& corpus, const TrainConfig& config,
                                     std::span<const double> grid, int folds,
                                     const TestInferenceConfig& test_config);

}  // namespace medlda

#pragma once

// Brute-force references for the samplers, usable only on tiny problems.
// Nothing here shares arithmetic with the library: the joint is evaluated
// from scratch in log-gamma space and conditionals come from enumerating
// every topic for one token.

#include <cstdint>
#include <vector>

#include <Eigen/Dense>

#include "medlda/model.hpp"
#include "medlda/random.hpp"

namespace oracle {

enum class Likelihood { none, hinge, regression };

struct TinyInstance {
  Likelihood likelihood = Likelihood::hinge;
  std::vector<std::vector<medlda::TermId>> docs;
  std::size_t num_terms = 0;
  medlda::Hyperparams hyper;
  medlda::RowMatrix etas;     // L x K
  medlda::RowMatrix lambdas;  // L x D
  std::vector<double> omegas; // D, regression only
  medlda::RowMatrix labels;   // L x D: +-1, or scores in row 0 for regression

  int num_topics() const { return hyper.num_topics; }
  std::size_t num_docs() const { return docs.size(); }
  int num_tasks() const { return static_cast<int>(etas.rows()); }
  // Throws unless D <= 5, K <= 4, V <= 10, N_d <= 6, L <= 3 and shapes agree.
  void check() const;
};

using Assignment = std::vector<std::vector<medlda::Topic>>;

// Random instance: D in [1,4], K in [1,3], V in [2,8], N_d in [0,5], with at
// least one token overall. Labels, weights and augmentation variables drawn
// at moderate scale; `tasks` rows for the hinge likelihood.
TinyInstance random_instance(medlda::Rng& rng, Likelihood likelihood, int tasks = 1);
Assignment random_assignment(medlda::Rng& rng, const TinyInstance& inst);

// log of the unnormalized collapsed joint
//   p0(eta) prod_d delta(C_d + alpha)/delta(alpha) prod_k delta(C_k + beta)/delta(beta)
//   x prod over non-empty documents (and tasks) of the augmented likelihood,
// with the augmented factor (2 pi lambda)^{-1/2} exp(-(lambda + c zeta)^2 / (2 lambda)).
double joint_log_density(const TinyInstance& inst, const Assignment& z);

// Normalized distribution of z[d][n] with every other assignment fixed,
// by enumerating the K completions of the joint.
std::vector<double> brute_force_token_conditional(const TinyInstance& inst, Assignment z,
                                                  std::size_t d, std::size_t n);

// The eta_i-dependent part of the joint: log prior plus augmented likelihood
// terms of task i, at the given weights. Assignments fixed.
double eta_log_density(const TinyInstance& inst, const Assignment& z, int task,
                       const Eigen::VectorXd& eta);

// Quadratic form read off eta_log_density by exact finite differences:
// log f(eta) = -eta^T P eta / 2 + b^T eta + const.
struct QuadraticForm {
  Eigen::MatrixXd precision;
  Eigen::VectorXd linear;
};
QuadraticForm quadratic_form_from_joint(const TinyInstance& inst, const Assignment& z, int task);

// Integral over lambda in (0, inf) of (2 pi lambda)^{-1/2} exp(-(lambda + c zeta)^2 / (2 lambda)),
// by adaptive Gauss-Kronrod after the substitution lambda = s^2. `abs_error`
// receives the quadrature's own error estimate.
double quadrature_scale_mixture(double zeta, double c, double* abs_error = nullptr);
// Product of the two one-sided integrals for residual delta: zeta = delta - eps
// and zeta = -delta - eps.
double quadrature_dual_scale_mixture(double delta, double epsilon, double c,
                                     double* abs_error = nullptr);

// Gaussian conditional of task i's weights assembled by direct dense
// summation and an LU inverse.
struct DensePosterior {
  Eigen::MatrixXd precision;
  Eigen::VectorXd linear;
  Eigen::MatrixXd covariance;
  Eigen::VectorXd mean;
};
DensePosterior dense_eta_posterior_reference(const TinyInstance& inst, const Assignment& z,
                                             int task = 0);

// Collapsed-LDA conditional written out directly from the count ratio.
std::vector<double> analytic_lda_conditional(const TinyInstance& inst, const Assignment& z,
                                             std::size_t d, std::size_t n);

// Largest |a_i - b_i| / max(|a_i|, |b_i|), zero where both vanish.
double max_relative_difference(const std::vector<double>& a, const std::vector<double>& b);
std::vector<double> normalized(std::vector<double> w);

}  // namespace oracle

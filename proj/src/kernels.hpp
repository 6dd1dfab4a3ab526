#pragma once

// Token-level kernels shared by the binary, multi-task and regression
// samplers. The binary trainer is the one-task case of the multi-task sweep,
// so both go through exactly the same floating-point operations.

#include <algorithm>
#include <cmath>
#include <span>
#include <vector>

#include "medlda/model.hpp"
#include "medlda/sampling.hpp"
#include "medlda/topic_state.hpp"

namespace medlda::detail {

// Log of the augmented hinge likelihood as a function of the token's topic,
// dropping terms that do not depend on k:
//   c g y (c l + lambda) eta_k / lambda - c^2 (g^2 eta_k^2 + 2 g (1-g) eta_k others) / (2 lambda)
// with g = 1/N_d and `others` the discriminant of the remaining N_d - 1 tokens.
inline void add_hinge_exponent(std::span<double> expo, const double* eta, double y,
                               double lambda, double c, double ell, double gamma,
                               double others) {
  const double linear = c * gamma * y * (c * ell + lambda) / lambda;
  const double quad = c * c / (2.0 * lambda);
  const double cross = 2.0 * gamma * (1.0 - gamma) * others;
  for (std::size_t k = 0; k < expo.size(); ++k) {
    const double e = eta[k];
    expo[k] += linear * e - quad * (gamma * gamma * e * e + cross * e);
  }
}

// Regression counterpart with rho = 1/lambda + 1/omega and
// psi = (y - eps)/lambda + (y + eps)/omega:
//   c^2 g psi eta_k - c^2 (g^2 rho eta_k^2 / 2 + g (1-g) rho eta_k others)
inline void add_regression_exponent(std::span<double> expo, const double* eta, double rho,
                                    double psi, double c, double gamma, double others) {
  const double c2 = c * c;
  for (std::size_t k = 0; k < expo.size(); ++k) {
    const double e = eta[k];
    expo[k] += c2 * gamma * psi * e -
               c2 * (gamma * gamma * rho * e * e / 2.0 + gamma * (1.0 - gamma) * rho * e * others);
  }
}

// weights[k] *= exp(expo[k] - max expo).
inline void apply_exponent(std::span<double> weights, std::span<const double> expo) {
  const double top = *std::max_element(expo.begin(), expo.end());
  for (std::size_t k = 0; k < weights.size(); ++k) weights[k] *= std::exp(expo[k] - top);
}

inline double dot_counts(const double* eta, std::span<const std::int32_t> counts) {
  double s = 0.0;
  for (std::size_t k = 0; k < counts.size(); ++k) s += eta[k] * counts[k];
  return s;
}

// eta^T zbar_d from the current counts, in a fixed summation order.
inline double doc_score(const double* eta, const CountState& counts, std::size_t d) {
  const auto row = counts.doc_row(d);
  const auto len = static_cast<double>(counts.doc_length(d));
  double s = 0.0;
  for (std::size_t k = 0; k < row.size(); ++k) s += eta[k] * (row[k] / len);
  return s;
}

struct SweepScratch {
  std::vector<double> weights;
  std::vector<double> expo;
  std::vector<double> running;  // per task: sum_k eta_ik C_d^k of the assigned tokens
  std::vector<double> others;   // per task: discriminant of the other N_d - 1 tokens

  explicit SweepScratch(int K, int L = 1)
      : weights(static_cast<std::size_t>(K)), expo(static_cast<std::size_t>(K)),
        running(static_cast<std::size_t>(L)), others(static_cast<std::size_t>(L)) {}
};

// Hinge-supervised weights for the excluded token (d, n) given the per-task
// "other tokens" discriminants, written into scratch.weights.
inline void hinge_token_weights(const CountState& counts, const Hyperparams& hyper,
                                std::size_t d, std::size_t n, const RowMatrix& etas,
                                std::span<const double> lambdas, std::span<const double> labels,
                                std::span<const double> others, SweepScratch& s) {
  lda_token_conditional(counts, hyper, d, n, s.weights);
  std::fill(s.expo.begin(), s.expo.end(), 0.0);
  const double gamma = 1.0 / static_cast<double>(counts.doc_length(d));
  for (Eigen::Index i = 0; i < etas.rows(); ++i) {
    add_hinge_exponent(s.expo, etas.row(i).data(), labels[i], lambdas[i], hyper.c, hyper.ell,
                       gamma, others[i]);
  }
  apply_exponent(s.weights, s.expo);
}

inline double others_discriminant(double disc_without_token, std::size_t doc_length) {
  return doc_length > 1 ? disc_without_token / static_cast<double>(doc_length - 1) : 0.0;
}

// Resamples every token of document d under the hinge-augmented conditional
// of all tasks. lambdas/labels hold the document's value for each task.
inline void sweep_document_hinge(CountState& counts, std::size_t d, const RowMatrix& etas,
                                 std::span<const double> lambdas,
                                 std::span<const double> labels, const Hyperparams& hyper,
                                 Rng& rng, SweepScratch& s) {
  const std::size_t len = counts.doc_length(d);
  const auto L = static_cast<std::size_t>(etas.rows());
  auto& running = s.running;
  auto& others = s.others;
  for (std::size_t i = 0; i < L; ++i) running[i] = dot_counts(etas.row(i).data(), counts.doc_row(d));
  for (std::size_t n = 0; n < len; ++n) {
    const Topic old = counts.topic(d, n);
    counts.remove_token(d, n);
    for (std::size_t i = 0; i < L; ++i) {
      running[i] -= etas(static_cast<Eigen::Index>(i), old);
      others[i] = others_discriminant(running[i], len);
    }
    hinge_token_weights(counts, hyper, d, n, etas, lambdas, labels, others, s);
    const auto k = static_cast<Topic>(sample_categorical(rng, s.weights));
    counts.add_token(d, n, k);
    for (std::size_t i = 0; i < L; ++i) running[i] += etas(static_cast<Eigen::Index>(i), k);
  }
}

}  // namespace medlda::detail

#pragma once

#include <span>
#include <stdexcept>

#include <Eigen/Dense>

#include "medlda/random.hpp"

namespace medlda {

// Draws k with probability weights[k] / sum(weights).
std::size_t sample_categorical(Rng& rng, std::span<const double> weights);

// Inverse Gaussian IG(mean, shape) by the Michael-Schucany-Haas transformation
// with multiple roots. Density sqrt(b / (2 pi x^3)) exp(-b (x - a)^2 / (2 a^2 x)).
double sample_inverse_gaussian(Rng& rng, double mean, double shape);

// GIG(x; 1/2, 1, b): the reciprocal of an IG(1/sqrt(b), 1) draw.
double sample_gig_half(Rng& rng, double b);

// Mean parameter 1/(c |slack|) of the inverse-Gaussian conditional of an
// augmentation variable's reciprocal, with |slack| floored at 1e-8 and the
// result capped at 1e8.
double clamped_ig_mean(double c, double slack);

// Draws lambda with lambda^{-1} ~ IG(clamped_ig_mean(c, slack), 1).
double sample_augmentation(Rng& rng, double c, double slack);

class CholeskyError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct CholeskyFactor {
  Eigen::MatrixXd lower;  // A + jitter * I = lower * lower^T
  double jitter = 0.0;
};

inline constexpr double kJitterStart = 1e-10;
inline constexpr double kJitterCap = 1e-4;

// Tries jitter 0, then 1e-10, 1e-9, ..., 1e-4 on the diagonal until the
// factorization succeeds. Throws CholeskyError past the cap, or
// std::invalid_argument when `a` is not symmetric to 1e-10 relative.
CholeskyFactor cholesky_with_jitter(const Eigen::MatrixXd& a);

// mu + L g with Sigma = L L^T and g standard normal. An all-zero Sigma returns mu.
Eigen::VectorXd sample_mvn(Rng& rng, const Eigen::VectorXd& mu, const Eigen::MatrixXd& sigma);

// Gaussian given in information form: precision P and linear term b, so that
// mean = P^{-1} b and covariance = P^{-1}. Uses one factorization of P.
struct GaussianDraw {
  Eigen::VectorXd sample;
  Eigen::VectorXd mean;
  double jitter = 0.0;
};
GaussianDraw sample_mvn_information(Rng& rng, const Eigen::VectorXd& linear,
                                    const Eigen::MatrixXd& precision);

}  // namespace medlda

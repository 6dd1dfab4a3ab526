#include "medlda/sampling.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace medlda {

std::size_t sample_categorical(Rng& rng, std::span<const double> weights) {
  if (weights.empty()) throw std::invalid_argument("sample_categorical: no weights");
  double total = 0.0;
  for (double w : weights) {
    if (!std::isfinite(w) || w < 0.0) {
      throw std::invalid_argument("sample_categorical: weights must be finite and non-negative");
    }
    total += w;
  }
  if (!(total > 0.0)) throw std::invalid_argument("sample_categorical: all weights are zero");

  const double u = rng.uniform() * total;
  double acc = 0.0;
  std::size_t last_positive = 0;
  for (std::size_t k = 0; k < weights.size(); ++k) {
    if (weights[k] <= 0.0) continue;
    acc += weights[k];
    last_positive = k;
    if (u < acc) return k;
  }
  // u landed in the rounding gap between acc and total.
  return last_positive;
}

double sample_inverse_gaussian(Rng& rng, double mean, double shape) {
  if (!(std::isfinite(mean) && mean > 0.0 && std::isfinite(shape) && shape > 0.0)) {
    throw std::invalid_argument("sample_inverse_gaussian: mean and shape must be positive");
  }
  const double g = rng.normal();
  const double r = mean * g * g / (2.0 * shape);
  // Smaller root of the transformation, mu (1 + r - sqrt(r^2 + 2r)), written
  // without the cancellation.
  const double x = mean / (1.0 + r + std::sqrt(r * (r + 2.0)));
  if (rng.uniform() * (mean + x) <= mean) return x;
  return mean * mean / x;
}

double sample_gig_half(Rng& rng, double b) {
  if (!(std::isfinite(b) && b > 0.0)) {
    throw std::invalid_argument("sample_gig_half: b must be positive and finite");
  }
  return 1.0 / sample_inverse_gaussian(rng, 1.0 / std::sqrt(b), 1.0);
}

double clamped_ig_mean(double c, double slack) {
  return std::min(1.0 / (c * std::max(std::abs(slack), 1e-8)), 1e8);
}

double sample_augmentation(Rng& rng, double c, double slack) {
  if (!(c > 0.0)) throw std::invalid_argument("augmentation draws need c > 0");
  return 1.0 / sample_inverse_gaussian(rng, clamped_ig_mean(c, slack), 1.0);
}

CholeskyFactor cholesky_with_jitter(const Eigen::MatrixXd& a) {
  if (a.rows() != a.cols()) throw std::invalid_argument("cholesky_with_jitter: matrix not square");
  const double scale = std::max(a.cwiseAbs().maxCoeff(), 1e-300);
  if ((a - a.transpose()).cwiseAbs().maxCoeff() > 1e-10 * scale) {
    throw std::invalid_argument("cholesky_with_jitter: matrix not symmetric");
  }
  const auto n = a.rows();
  double jitter = 0.0;
  while (true) {
    Eigen::LLT<Eigen::MatrixXd> llt(a + jitter * Eigen::MatrixXd::Identity(n, n));
    if (llt.info() == Eigen::Success) {
      return {llt.matrixL(), jitter};
    }
    jitter = jitter == 0.0 ? kJitterStart : jitter * 10.0;
    // Tolerate the rounding in the repeated multiplication by 10.
    if (jitter > kJitterCap * (1.0 + 1e-9)) {
      throw CholeskyError("Cholesky factorization failed with jitter up to " +
                          std::to_string(kJitterCap));
    }
  }
}

Eigen::VectorXd sample_mvn(Rng& rng, const Eigen::VectorXd& mu, const Eigen::MatrixXd& sigma) {
  if (sigma.rows() != mu.size() || sigma.cols() != mu.size()) {
    throw std::invalid_argument("sample_mvn: dimension mismatch");
  }
  if (sigma.isZero(0.0)) return mu;
  const auto chol = cholesky_with_jitter(sigma);
  Eigen::VectorXd g(mu.size());
  for (Eigen::Index i = 0; i < g.size(); ++i) g[i] = rng.normal();
  return mu + chol.lower * g;
}

GaussianDraw sample_mvn_information(Rng& rng, const Eigen::VectorXd& linear,
                                    const Eigen::MatrixXd& precision) {
  const auto chol = cholesky_with_jitter(precision);
  const auto lower = chol.lower.triangularView<Eigen::Lower>();
  // P = L L^T: mean = L^{-T} L^{-1} b, and L^{-T} g has covariance P^{-1}.
  Eigen::VectorXd mean = lower.solve(linear);
  lower.transpose().solveInPlace(mean);
  Eigen::VectorXd g(linear.size());
  for (Eigen::Index i = 0; i < g.size(); ++i) g[i] = rng.normal();
  lower.transpose().solveInPlace(g);
  return {mean + g, std::move(mean), chol.jitter};
}

}  // namespace medlda

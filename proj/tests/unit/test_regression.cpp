#include <doctest.h>

#include <cmath>

#include "bridge.hpp"
#include "medlda/predict.hpp"
#include "medlda/sampling.hpp"
#include "medlda/regression.hpp"
#include "medlda/synthetic.hpp"
#include "oracle.hpp"
#include "stats.hpp"

using namespace medlda;

namespace {

std::vector<double> one(double v) { return {v}; }

LabeledCorpus regression_toy(std::uint64_t seed, std::size_t docs = 60) {
  SyntheticOptions o;
  o.num_topics = 2;
  o.vocab_size = 20;
  o.mean_length = 15;
  const std::vector<double> eta{-1.0, 2.0};
  return make_regression_benchmark(docs, 0, eta, 0.05, o, seed).train;
}

}  // namespace

TEST_SUITE("regression") {

TEST_CASE("epsilon-insensitive loss") {
  CHECK(eps_insensitive_loss(0.5, 1.0) == 0.0);
  CHECK(eps_insensitive_loss(2.0, 1.0) == 1.0);
  CHECK(eps_insensitive_loss(-3.0, 0.5) == 2.5);
  CHECK(eps_insensitive_loss(-3.0, 0.5) == std::max(0.0, -3.0 - 0.5) + std::max(0.0, 3.0 - 0.5));
  Rng rng(1);
  for (int i = 0; i < 1000; ++i) {
    const double x = 4 * rng.normal(), e = rng.uniform();
    CHECK(eps_insensitive_loss(x, e) == std::max(0.0, x - e) + std::max(0.0, -x - e));
  }
}

TEST_CASE("auxiliary coefficients") {
  const auto a = aux_coefficients(1.0, 1.0, 1.0, 0.0);
  CHECK(a.rho == 2.0);
  CHECK(a.psi == 2.0);
  const auto b = aux_coefficients(2.0, 0.5, 1.0, 0.25);
  CHECK(b.rho == doctest::Approx(2.5));
  CHECK(b.psi == doctest::Approx(0.75 / 2.0 + 1.25 / 0.5));
}

TEST_CASE("eta conditional with no documents is the prior") {
  Hyperparams h;
  h.num_topics = 3;
  h.nu2 = 0.5;
  const auto counts = CountState::from_assignments({{}}, 3, 2, {{}});
  const auto post = regression_eta_posterior(counts, one(1.0), one(1.0), one(3.0), h);
  CHECK((post.covariance() - 0.5 * Eigen::Matrix3d::Identity()).norm() <= 1e-15);
  CHECK(post.mean().norm() == 0.0);
}

TEST_CASE("scalar eta conditional") {
  Hyperparams h;
  h.num_topics = 1;
  h.epsilon = 0.0;
  const auto counts = CountState::from_assignments({{0}}, 1, 1, {{0}});
  const auto post = regression_eta_posterior(counts, one(1.0), one(1.0), one(1.0), h);
  CHECK(post.covariance()(0, 0) == doctest::Approx(1.0 / 3).epsilon(1e-14));
  CHECK(post.mean()[0] == doctest::Approx(2.0 / 3).epsilon(1e-14));
  Rng rng(2);
  const int n = 100000;
  double s = 0.0;
  for (int i = 0; i < n; ++i) s += draw_eta_reg(rng, counts, one(1.0), one(1.0), one(1.0), h)[0];
  CHECK(std::abs(s / n - 2.0 / 3) <= 3 * std::sqrt(1.0 / 3 / n));
}

TEST_CASE("eta conditional matches the dense reference and the joint") {
  Rng rng(3);
  for (int trial = 0; trial < 200; ++trial) {
    const auto inst = oracle::random_instance(rng, oracle::Likelihood::regression);
    const auto z = oracle::random_assignment(rng, inst);
    const auto lib = bridge::library_posterior(inst, z);
    const auto ref = oracle::dense_eta_posterior_reference(inst, z);
    CHECK(bridge::max_rel(lib.precision, ref.precision) <= 1e-10);
    CHECK(bridge::max_rel(lib.mean(), ref.mean) <= 1e-10);
    CHECK(Eigen::LLT<Eigen::MatrixXd>(lib.precision).info() == Eigen::Success);
    const auto q = oracle::quadratic_form_from_joint(inst, z, 0);
    CHECK(bridge::max_rel(lib.precision, q.precision) <= 1e-6);
    CHECK(bridge::max_rel(lib.linear, q.linear) <= 1e-6);
  }
}

TEST_CASE("token conditional matches brute force") {
  Rng rng(4);
  for (int trial = 0; trial < 100; ++trial) {
    const auto inst = oracle::random_instance(rng, oracle::Likelihood::regression);
    const auto z = oracle::random_assignment(rng, inst);
    for (std::size_t d = 0; d < inst.docs.size(); ++d) {
      for (std::size_t n = 0; n < inst.docs[d].size(); ++n) {
        const auto lib = bridge::library_conditional(inst, z, d, n);
        const auto ref = oracle::brute_force_token_conditional(inst, z, d, n);
        CHECK(oracle::max_relative_difference(lib, ref) <= 1e-10);
      }
    }
  }
}

TEST_CASE("zero weights or zero c leave the LDA conditional") {
  Rng rng(5);
  for (int trial = 0; trial < 50; ++trial) {
    const auto inst = oracle::random_instance(rng, oracle::Likelihood::regression);
    const auto z = oracle::random_assignment(rng, inst);
    for (int mode = 0; mode < 2; ++mode) {
      auto x = inst;
      if (mode == 0) x.etas.setZero();
      else x.hyper.c = 0.0;
      auto counts = bridge::counts_of(x, z);
      for (std::size_t d = 0; d < x.docs.size(); ++d) {
        for (std::size_t n = 0; n < x.docs[d].size(); ++n) {
          counts.remove_token(d, n);
          const auto lda = oracle::normalized(lda_token_conditional(counts, x.hyper, d, n));
          const auto reg = oracle::normalized(token_conditional_reg(
              counts, bridge::row(x.etas, 0), x.lambdas(0, 0), x.omegas[0], x.labels(0, 0),
              x.hyper, d, n));
          CHECK(oracle::max_relative_difference(lda, reg) <= 1e-14);
          counts.add_token(d, n, z[d][n]);
        }
      }
    }
  }
}

TEST_CASE("augmentation draws use both residual sides") {
  // c = 1, delta = 2, eps = 1: mean parameters 1 and 1/3
  Rng a(1), b(1);
  CHECK(draw_lambda_reg(a, 2.0, 1.0, 1.0) == 1.0 / sample_inverse_gaussian(b, 1.0, 1.0));
  CHECK(draw_omega_reg(a, 2.0, 1.0, 1.0) == 1.0 / sample_inverse_gaussian(b, 1.0 / 3, 1.0));

  Rng rng(2);
  for (int i = 0; i < 1000; ++i) {
    const double lam = draw_lambda_reg(rng, 0.3, 1.0, 0.3);
    CHECK(lam > 0.0);
    CHECK(std::isfinite(lam));
  }

  const int n = 1000000;
  std::vector<double> inv_l(n), inv_o(n);
  for (int i = 0; i < n; ++i) {
    inv_l[i] = 1.0 / draw_lambda_reg(rng, 0.5, 1.0, 0.1);
    inv_o[i] = 1.0 / draw_omega_reg(rng, 0.5, 1.0, 0.1);
  }
  const double ml = 1.0 / 0.4, mo = 1.0 / 0.6;
  CHECK(std::abs(stats::moments(inv_l).mean - ml) <= 4 * std::sqrt(ml * ml * ml / n));
  CHECK(std::abs(stats::moments(inv_o).mean - mo) <= 4 * std::sqrt(mo * mo * mo / n));
  CHECK_THROWS_AS(draw_omega_reg(rng, 0.5, 0.0, 0.1), std::invalid_argument);
}

TEST_CASE("training is deterministic and keeps its invariants") {
  const auto c = regression_toy(3);
  TrainConfig cfg;
  cfg.hyper.num_topics = 2;
  cfg.burn_in = 6;
  cfg.seed = 9;
  const auto a = train_regression(c, cfg);
  const auto b = train_regression(c, cfg);
  CHECK(identical(a.snapshot, b.snapshot));
  CHECK(a.snapshot.task == TaskKind::regression);
  CHECK(a.state.counts.consistent());
  const auto y = c.real_scores();
  for (std::size_t d = 0; d < c.num_docs(); ++d) {
    CHECK(a.state.lambda[d] > 0.0);
    CHECK(a.state.omega[d] > 0.0);
    const auto zb = zbar(a.state.counts, d);
    const double pred = a.state.eta[0] * zb[0] + a.state.eta[1] * zb[1];
    CHECK(a.state.delta[d] == doctest::Approx(y[d] - pred).epsilon(1e-12));
  }
  CHECK(a.trace.size() == 6);
}

TEST_CASE("default regression insensitivity") { CHECK(Hyperparams{}.epsilon == 1e-3); }

TEST_CASE("fits a planted linear response") {
  const auto c = regression_toy(4, 200);
  TrainConfig cfg;
  cfg.hyper.num_topics = 2;
  cfg.burn_in = 30;
  const auto r = train_regression(c, cfg);
  CHECK(r.trace.back().train_metric >= 0.8);
}

TEST_CASE("mean loss bounds the loss of the mean residual") {
  CHECK(expected_eps_loss(std::vector<std::vector<double>>{{0.5, -2.0}}, 1.0) == 1.0);
  const std::vector<std::vector<double>> s{{2.0, -1.0}, {-2.0, 3.0}};
  CHECK(expected_eps_loss(s, 0.5) == doctest::Approx(3.0));
  CHECK(eps_loss_of_mean_residual(s, 0.5) == doctest::Approx(0.5));

  const auto c = regression_toy(5);
  TrainConfig cfg;
  cfg.hyper.num_topics = 2;
  cfg.burn_in = 25;
  cfg.record_margins = true;
  const auto r = train_regression(c, cfg);
  for (double eps : {0.0, 1e-3, 0.1, 1.0}) {
    CHECK(expected_eps_loss(r.margins, eps) >= eps_loss_of_mean_residual(r.margins, eps));
  }
}

TEST_CASE("cross-validation picks a grid value") {
  const auto c = regression_toy(6, 40);
  TrainConfig cfg;
  cfg.hyper.num_topics = 2;
  cfg.burn_in = 3;
  const double grid[] = {0.25, 4.0};
  const auto cv = select_c_by_cv(c, cfg, grid, 2, TestInferenceConfig{});
  CHECK(cv.grid.size() == 2);
  CHECK(cv.mean_r2.size() == 2);
  CHECK((cv.best_c == 0.25 || cv.best_c == 4.0));
  const auto again = select_c_by_cv(c, cfg, grid, 2, TestInferenceConfig{});
  CHECK(again.mean_r2 == cv.mean_r2);
  CHECK_THROWS_AS(select_c_by_cv(c, cfg, grid, 1, TestInferenceConfig{}), std::invalid_argument);
  CHECK_THROWS_AS(select_c_by_cv(c, cfg, std::span<const double>{}, 2, TestInferenceConfig{}),
                  std::invalid_argument);
  CHECK(std::size(kRegressionCGrid) == 5);
}

TEST_CASE("the loss inequality holds exactly on random sample sets") {
  Rng rng(8);
  for (int trial = 0; trial < 2000; ++trial) {
    const std::size_t m = 1 + rng.index(6), D = 1 + rng.index(5);
    const double centre = rng.normal();
    std::vector<std::vector<double>> s(m, std::vector<double>(D));
    for (auto& row : s)
      for (auto& x : row) x = centre + 1e-9 * rng.normal();
    for (double eps : {0.0, 1e-3, std::abs(centre)}) {
      CHECK(expected_eps_loss(s, eps) >= eps_loss_of_mean_residual(s, eps));
    }
  }
}

}

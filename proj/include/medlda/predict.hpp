#pragma once

#include <span>
#include <vector>

#include <Eigen/Dense>

#include "medlda/corpus.hpp"
#include "medlda/model.hpp"

namespace medlda {

// phi_kt = (C_k^t + beta) / (C_k + V beta).
Eigen::MatrixXd estimate_phi_hat(const CountState& counts, double beta);

struct TestInferenceConfig {
  int max_iterations = 100;
  // Stop once |LL_new - LL_old| / |LL_old| drops below this, where LL is the
  // document log-likelihood under phi_hat and the smoothed topic proportions.
  double likelihood_rel_tol = 1e-4;
  // Number of consecutive-sweep zbar samples averaged after convergence.
  int samples = 1;

  void validate() const;
};

// Unnormalized p(z_n = k | rest) = phi_hat[k, w_n] (C_{-n}^k + alpha_k).
void test_token_conditional(const Eigen::MatrixXd& phi_hat, std::span<const std::int32_t> doc_counts,
                            double alpha_k, TermId word, std::span<double> out);

// Gibbs inference of a held-out document's topic proportions under fixed
// topics. An empty document gets the uniform vector.
std::vector<double> infer_test_topics(Rng& rng, const Eigen::MatrixXd& phi_hat,
                                      std::span<const TermId> doc, double alpha_k,
                                      const TestInferenceConfig& config);

double discriminant(std::span<const double> eta, std::span<const double> zbar);

// Sign rule; a zero discriminant predicts +1.
int predict_binary(const ModelSnapshot& snapshot, std::span<const double> zbar);
// Largest discriminant over tasks sharing one zbar; ties go to the lowest index.
int predict_multiclass(const ModelSnapshot& snapshot, std::span<const double> zbar);
// One-vs-all form: model i scored on its own zbar_i.
int predict_multiclass(std::span<const ModelSnapshot> models,
                       std::span<const std::vector<double>> zbars);
// {i : eta_i^T zbar > 0}.
std::vector<int> predict_multilabel(const ModelSnapshot& snapshot, std::span<const double> zbar);
double predict_regression(const ModelSnapshot& snapshot, std::span<const double> zbar);

// Predicts every document of `corpus`. A single snapshot is applied according
// to its task kind; several snapshots are treated as a one-vs-all multiclass
// ensemble. Document d uses the stream Rng(seed).child(d) (and .child(i) under
// it for ensemble member i), so results do not depend on `workers`.
std::vector<Response> predict_corpus(std::span<const ModelSnapshot> models,
                                     const LabeledCorpus& corpus,
                                     const TestInferenceConfig& config, std::uint64_t seed,
                                     int workers = 1);

// `<doc_id>\t<prediction>` lines; regression values carry 17 significant digits.
std::string format_predictions(const LabeledCorpus& corpus, std::span<const Response> predictions);

}  // namespace medlda

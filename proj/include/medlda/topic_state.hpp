#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "medlda/corpus.hpp"
#include "medlda/random.hpp"

namespace medlda {

// Model hyperparameters. `alpha` is the scalar of the symmetric document
// prior; each topic gets alpha / num_topics.
struct Hyperparams {
  int num_topics = 20;
  double alpha = 1.0;
  double beta = 0.01;
  double nu2 = 1.0;      // prior variance of each classifier weight
  double c = 1.0;        // regularization constant
  double ell = 164.0;    // margin cost, >= 1
  double epsilon = 1e-3; // regression insensitivity

  double alpha_k() const { return alpha / num_topics; }
  // Throws std::invalid_argument when a field is out of range.
  void validate() const;
};

using Topic = std::int32_t;
inline constexpr Topic kUnassigned = -1;

// Collapsed sufficient statistics for one corpus: topic assignments z plus the
// dense topic-term, topic-total and document-topic counts derived from them.
class CountState {
 public:
  CountState() = default;
  CountState(std::vector<std::vector<TermId>> words, int num_topics, std::size_t num_terms);

  // Builds counts from explicit assignments; every z[d][n] must be in [0, K).
  static CountState from_assignments(std::vector<std::vector<TermId>> words, int num_topics,
                                     std::size_t num_terms,
                                     const std::vector<std::vector<Topic>>& z);

  int num_topics() const { return num_topics_; }
  std::size_t num_terms() const { return num_terms_; }
  std::size_t num_docs() const { return words_.size(); }
  std::size_t doc_length(std::size_t d) const { return words_[d].size(); }
  std::size_t total_tokens() const { return total_tokens_; }

  TermId word(std::size_t d, std::size_t n) const { return words_[d][n]; }
  Topic topic(std::size_t d, std::size_t n) const { return z_[d][n]; }
  const std::vector<std::vector<Topic>>& assignments() const { return z_; }

  std::int32_t topic_term(int k, TermId t) const {
    return topic_term_[static_cast<std::size_t>(t) * num_topics_ + k];
  }
  // The K counts of term t, contiguous.
  std::span<const std::int32_t> term_row(TermId t) const {
    return {topic_term_.data() + static_cast<std::size_t>(t) * num_topics_,
            static_cast<std::size_t>(num_topics_)};
  }
  std::int64_t topic_total(int k) const { return topic_total_[k]; }
  std::int32_t doc_topic(std::size_t d, int k) const { return doc_topic_[d * num_topics_ + k]; }
  std::span<const std::int32_t> doc_row(std::size_t d) const {
    return {doc_topic_.data() + d * num_topics_, static_cast<std::size_t>(num_topics_)};
  }

  // Excludes token (d, n) from all counts and marks it unassigned.
  // Throws std::logic_error if the token is already unassigned or a count
  // would go negative.
  void remove_token(std::size_t d, std::size_t n);
  // Assigns token (d, n) to topic k. The token must be unassigned.
  void add_token(std::size_t d, std::size_t n, Topic k);

  // True when the incremental counts equal a from-scratch rebuild from z.
  bool consistent() const;

  friend bool operator==(const CountState&, const CountState&) = default;

 private:
  int num_topics_ = 0;
  std::size_t num_terms_ = 0;
  std::size_t total_tokens_ = 0;
  std::vector<std::vector<TermId>> words_;
  std::vector<std::vector<Topic>> z_;
  std::vector<std::int32_t> topic_term_;  // V x K, term-major
  std::vector<std::int64_t> topic_total_;
  std::vector<std::int32_t> doc_topic_;   // D x K
};

std::vector<std::vector<TermId>> token_lists(const LabeledCorpus& corpus);

// Uniform random topic for every token.
CountState init_assignments(Rng& rng, const LabeledCorpus& corpus, int num_topics);
CountState init_assignments(Rng& rng, std::vector<std::vector<TermId>> words, int num_topics,
                            std::size_t num_terms);

// Collapsed LDA weights for the excluded token (d, n), written into `out`
// (size K): (C_k^t + beta)(C_d^k + alpha_k) / (C_k + V beta).
void lda_token_conditional(const CountState& state, const Hyperparams& hyper, std::size_t d,
                           std::size_t n, std::span<double> out);
std::vector<double> lda_token_conditional(const CountState& state, const Hyperparams& hyper,
                                          std::size_t d, std::size_t n);

// Unsupervised collapsed Gibbs LDA: random initialization, then `iterations`
// full sweeps. Empty documents are skipped.
CountState run_lda_baseline(Rng& rng, const LabeledCorpus& corpus, const Hyperparams& hyper,
                            int iterations);

// Empirical topic proportions C_d^k / N_d. Throws std::invalid_argument for an
// empty document.
std::vector<double> zbar(const CountState& state, std::size_t d);

}  // namespace medlda

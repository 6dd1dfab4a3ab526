#include "medlda/topic_state.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "medlda/sampling.hpp"

namespace medlda {

void Hyperparams::validate() const {
  auto fail = [](const std::string& msg) { throw std::invalid_argument(msg); };
  if (num_topics < 1) fail("number of topics must be >= 1");
  if (!(alpha > 0.0) || !std::isfinite(alpha)) fail("alpha must be positive");
  if (!(beta > 0.0) || !std::isfinite(beta)) fail("beta must be positive");
  if (!(nu2 > 0.0) || !std::isfinite(nu2)) fail("nu2 must be positive");
  if (!(c >= 0.0) || !std::isfinite(c)) fail("c must be non-negative");
  if (!(ell >= 1.0) || !std::isfinite(ell)) fail("ell must be >= 1");
  if (!(epsilon >= 0.0) || !std::isfinite(epsilon)) fail("epsilon must be non-negative");
}

CountState::CountState(std::vector<std::vector<TermId>> words, int num_topics,
                       std::size_t num_terms)
    : num_topics_(num_topics), num_terms_(num_terms), words_(std::move(words)) {
  if (num_topics < 1) throw std::invalid_argument("CountState needs at least one topic");
  z_.reserve(words_.size());
  for (const auto& doc : words_) {
    for (TermId t : doc) {
      if (t < 0 || static_cast<std::size_t>(t) >= num_terms_) {
        throw std::invalid_argument("token index " + std::to_string(t) + " outside vocabulary");
      }
    }
    z_.emplace_back(doc.size(), kUnassigned);
    total_tokens_ += doc.size();
  }
  topic_term_.assign(num_terms_ * num_topics_, 0);
  topic_total_.assign(num_topics_, 0);
  doc_topic_.assign(words_.size() * num_topics_, 0);
}

CountState CountState::from_assignments(std::vector<std::vector<TermId>> words, int num_topics,
                                        std::size_t num_terms,
                                        const std::vector<std::vector<Topic>>& z) {
  CountState s(std::move(words), num_topics, num_terms);
  if (z.size() != s.num_docs()) throw std::invalid_argument("assignment/document count mismatch");
  for (std::size_t d = 0; d < z.size(); ++d) {
    if (z[d].size() != s.doc_length(d)) throw std::invalid_argument("assignment length mismatch");
    for (std::size_t n = 0; n < z[d].size(); ++n) s.add_token(d, n, z[d][n]);
  }
  return s;
}

void CountState::remove_token(std::size_t d, std::size_t n) {
  const Topic k = z_[d][n];
  if (k == kUnassigned) throw std::logic_error("remove_token: token already excluded");
  const TermId t = words_[d][n];
  auto& tt = topic_term_[static_cast<std::size_t>(t) * num_topics_ + k];
  auto& dt = doc_topic_[d * num_topics_ + k];
  if (tt <= 0 || dt <= 0 || topic_total_[k] <= 0) {
    throw std::logic_error("remove_token: count underflow, state is corrupted");
  }
  --tt;
  --dt;
  --topic_total_[k];
  z_[d][n] = kUnassigned;
}

void CountState::add_token(std::size_t d, std::size_t n, Topic k) {
  if (z_[d][n] != kUnassigned) throw std::logic_error("add_token: token already assigned");
  if (k < 0 || k >= num_topics_) throw std::out_of_range("add_token: topic out of range");
  const TermId t = words_[d][n];
  ++topic_term_[static_cast<std::size_t>(t) * num_topics_ + k];
  ++doc_topic_[d * num_topics_ + k];
  ++topic_total_[k];
  z_[d][n] = k;
}

bool CountState::consistent() const {
  std::vector<std::int32_t> tt(topic_term_.size(), 0);
  std::vector<std::int64_t> tot(topic_total_.size(), 0);
  std::vector<std::int32_t> dt(doc_topic_.size(), 0);
  for (std::size_t d = 0; d < words_.size(); ++d) {
    for (std::size_t n = 0; n < words_[d].size(); ++n) {
      const Topic k = z_[d][n];
      if (k == kUnassigned) continue;
      ++tt[static_cast<std::size_t>(words_[d][n]) * num_topics_ + k];
      ++tot[k];
      ++dt[d * num_topics_ + k];
    }
  }
  return tt == topic_term_ && tot == topic_total_ && dt == doc_topic_;
}

std::vector<std::vector<TermId>> token_lists(const LabeledCorpus& corpus) {
  std::vector<std::vector<TermId>> out;
  out.reserve(corpus.num_docs());
  for (const auto& doc : corpus.docs) out.push_back(doc.tokens);
  return out;
}

CountState init_assignments(Rng& rng, const LabeledCorpus& corpus, int num_topics) {
  return init_assignments(rng, token_lists(corpus), num_topics, corpus.num_terms());
}

CountState init_assignments(Rng& rng, std::vector<std::vector<TermId>> words, int num_topics,
                            std::size_t num_terms) {
  CountState state(std::move(words), num_topics, num_terms);
  const auto k = static_cast<std::size_t>(num_topics);
  for (std::size_t d = 0; d < state.num_docs(); ++d) {
    for (std::size_t n = 0; n < state.doc_length(d); ++n) {
      state.add_token(d, n, static_cast<Topic>(rng.index(k)));
    }
  }
  return state;
}

void lda_token_conditional(const CountState& state, const Hyperparams& hyper, std::size_t d,
                           std::size_t n, std::span<double> out) {
  const int K = state.num_topics();
  const double alpha_k = hyper.alpha_k();
  const double beta_sum = hyper.beta * static_cast<double>(state.num_terms());
  const auto term = state.term_row(state.word(d, n));
  const auto doc = state.doc_row(d);
  for (int k = 0; k < K; ++k) {
    out[k] = (term[k] + hyper.beta) * (doc[k] + alpha_k) /
             (static_cast<double>(state.topic_total(k)) + beta_sum);
  }
}

std::vector<double> lda_token_conditional(const CountState& state, const Hyperparams& hyper,
                                          std::size_t d, std::size_t n) {
  std::vector<double> out(static_cast<std::size_t>(state.num_topics()));
  lda_token_conditional(state, hyper, d, n, out);
  return out;
}

CountState run_lda_baseline(Rng& rng, const LabeledCorpus& corpus, const Hyperparams& hyper,
                            int iterations) {
  if (iterations < 1) throw std::invalid_argument("run_lda_baseline needs iterations >= 1");
  hyper.validate();
  CountState state = init_assignments(rng, corpus, hyper.num_topics);
  std::vector<double> weights(static_cast<std::size_t>(hyper.num_topics));
  for (int it = 0; it < iterations; ++it) {
    for (std::size_t d = 0; d < state.num_docs(); ++d) {
      for (std::size_t n = 0; n < state.doc_length(d); ++n) {
        state.remove_token(d, n);
        lda_token_conditional(state, hyper, d, n, weights);
        state.add_token(d, n, static_cast<Topic>(sample_categorical(rng, weights)));
      }
    }
  }
  return state;
}

std::vector<double> zbar(const CountState& state, std::size_t d) {
  const auto len = state.doc_length(d);
  if (len == 0) throw std::invalid_argument("zbar: document is empty");
  std::vector<double> out(static_cast<std::size_t>(state.num_topics()));
  const auto row = state.doc_row(d);
  for (std::size_t k = 0; k < out.size(); ++k) {
    out[k] = static_cast<double>(row[k]) / static_cast<double>(len);
  }
  return out;
}

}  // namespace medlda

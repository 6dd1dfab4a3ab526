#pragma once

#include <cstdint>
#include <utility>

#include "medlda/corpus.hpp"
#include "medlda/model.hpp"

namespace medlda {

// Planted-topic corpora. Topic k owns a block of V/K consecutive terms; a
// token drawn from topic k lands in its block with probability block_mass and
// anywhere in the vocabulary otherwise. Document lengths are Poisson.
// nuisance_share of the tokens bypass the topics entirely (see below).
struct SyntheticOptions {
  int num_topics = 4;
  std::size_t vocab_size = 200;
  double mean_length = 60.0;
  double block_mass = 0.9;
  // Dirichlet concentration of each document's proportions over the topics
  // its response is keyed to.
  double doc_alpha = 1.0;
  // Share of each document's proportions moved onto topics not keyed to its
  // response.
  double leak = 0.0;
  // Response-independent "style" words: each document picks one of
  // nuisance_styles styles and draws this share of its tokens uniformly from
  // that style's nuisance_terms terms, spaced evenly over the vocabulary so
  // they cut across the topic blocks.
  double nuisance_share = 0.0;
  int nuisance_styles = 4;
  std::size_t nuisance_terms = 10;
};

struct SplitCorpus {
  LabeledCorpus train;
  LabeledCorpus test;
};

// Two classes keyed to disjoint topic halves: +1 to the first K/2 topics,
// -1 to the rest. Classes alternate so both are balanced.
SplitCorpus make_binary_benchmark(std::size_t num_train, std::size_t num_test,
                                  const SyntheticOptions& options, std::uint64_t seed);

// num_classes classes, class i keyed to topics [i*K/L, (i+1)*K/L).
SplitCorpus make_multiclass_benchmark(std::size_t num_train, std::size_t num_test,
                                      int num_classes, const SyntheticOptions& options,
                                      std::uint64_t seed);

// Proportions ~ Dirichlet(doc_alpha) over all K topics; the response is
// eta_star^T zbar + N(0, noise_sd^2), zbar the planted assignment proportions.
SplitCorpus make_regression_benchmark(std::size_t num_train, std::size_t num_test,
                                      std::span<const double> eta_star, double noise_sd,
                                      const SyntheticOptions& options, std::uint64_t seed);

// Label set = topics whose planted share exceeds `threshold` (never empty:
// the largest share always qualifies). One category per topic.
SplitCorpus make_multilabel_benchmark(std::size_t num_train, std::size_t num_test,
                                      double threshold, const SyntheticOptions& options,
                                      std::uint64_t seed);

}  // namespace medlda

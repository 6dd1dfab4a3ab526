#include "medlda/synthetic.hpp"

#include <algorithm>
#include <numeric>
#include <random>
#include <stdexcept>
#include <string>

#include "medlda/sampling.hpp"

namespace medlda {

namespace {

void check(const SyntheticOptions& o) {
  if (o.num_topics < 1) throw std::invalid_argument("synthetic: num_topics must be >= 1");
  if (o.vocab_size < static_cast<std::size_t>(o.num_topics)) {
    throw std::invalid_argument("synthetic: vocabulary smaller than topic count");
  }
  if (!(o.mean_length > 0.0)) throw std::invalid_argument("synthetic: mean_length must be > 0");
  if (!(o.block_mass >= 0.0 && o.block_mass <= 1.0)) {
    throw std::invalid_argument("synthetic: block_mass must be in [0, 1]");
  }
  if (!(o.doc_alpha > 0.0)) throw std::invalid_argument("synthetic: doc_alpha must be > 0");
  if (!(o.leak >= 0.0 && o.leak < 1.0)) throw std::invalid_argument("synthetic: leak must be in [0, 1)");
  if (!(o.nuisance_share >= 0.0 && o.nuisance_share < 1.0)) {
    throw std::invalid_argument("synthetic: nuisance_share must be in [0, 1)");
  }
  if (o.nuisance_share > 0.0 &&
      (o.nuisance_styles < 1 || o.nuisance_terms < 1 ||
       static_cast<std::size_t>(o.nuisance_styles) * o.nuisance_terms > o.vocab_size)) {
    throw std::invalid_argument("synthetic: nuisance styles do not fit in the vocabulary");
  }
}

std::vector<double> dirichlet(Rng& rng, std::size_t n, double a) {
  std::gamma_distribution<double> g(a, 1.0);
  std::vector<double> x(n);
  double s = 0.0;
  for (auto& v : x) s += (v = g(rng.engine()));
  if (s <= 0.0) {
    x.assign(n, 1.0 / static_cast<double>(n));
    return x;
  }
  for (auto& v : x) v /= s;
  return x;
}

// Proportions concentrated on topics [lo, hi), with `leak` spread over the rest.
std::vector<double> keyed_proportions(Rng& rng, const SyntheticOptions& o, int lo, int hi) {
  const auto K = static_cast<std::size_t>(o.num_topics);
  std::vector<double> theta(K, 0.0);
  const auto own = dirichlet(rng, static_cast<std::size_t>(hi - lo), o.doc_alpha);
  const std::size_t rest = K - static_cast<std::size_t>(hi - lo);
  const double keep = rest > 0 ? 1.0 - o.leak : 1.0;
  for (int k = lo; k < hi; ++k) theta[static_cast<std::size_t>(k)] = keep * own[static_cast<std::size_t>(k - lo)];
  if (rest > 0 && o.leak > 0.0) {
    const auto other = dirichlet(rng, rest, o.doc_alpha);
    std::size_t j = 0;
    for (std::size_t k = 0; k < K; ++k) {
      if (static_cast<int>(k) >= lo && static_cast<int>(k) < hi) continue;
      theta[k] = o.leak * other[j++];
    }
  }
  return theta;
}

// Draws a document; `topic_counts` receives the planted assignment counts.
Document draw_document(Rng& rng, const SyntheticOptions& o, std::span<const double> theta,
                       std::string id, std::vector<int>& topic_counts) {
  const auto K = static_cast<std::size_t>(o.num_topics);
  const std::size_t block = o.vocab_size / K;
  std::poisson_distribution<int> len_dist(o.mean_length);
  int len = 0;
  while (len == 0) len = len_dist(rng.engine());
  topic_counts.assign(K, 0);
  Document doc{std::move(id), {}};
  doc.tokens.reserve(static_cast<std::size_t>(len));
  const std::size_t style =
      o.nuisance_share > 0.0 ? rng.index(static_cast<std::size_t>(o.nuisance_styles)) : 0;
  for (int n = 0; n < len; ++n) {
    if (o.nuisance_share > 0.0 && rng.uniform() < o.nuisance_share) {
      const auto styles = static_cast<std::size_t>(o.nuisance_styles);
      const std::size_t spread = o.vocab_size / (styles * o.nuisance_terms);
      const std::size_t j = rng.index(o.nuisance_terms);
      doc.tokens.push_back(static_cast<TermId>(style + styles * spread * j));
      continue;
    }
    const std::size_t k = sample_categorical(rng, theta);
    ++topic_counts[k];
    TermId t;
    if (rng.uniform() < o.block_mass) {
      t = static_cast<TermId>(k * block + rng.index(block));
    } else {
      t = static_cast<TermId>(rng.index(o.vocab_size));
    }
    doc.tokens.push_back(t);
  }
  std::sort(doc.tokens.begin(), doc.tokens.end());
  return doc;
}

LabeledCorpus empty_corpus(const SyntheticOptions& o, ResponseKind kind) {
  LabeledCorpus c;
  c.vocab = VocabMap::numbered(o.vocab_size);
  c.kind = kind;
  return c;
}

}  // namespace

SplitCorpus make_binary_benchmark(std::size_t num_train, std::size_t num_test,
                                  const SyntheticOptions& options, std::uint64_t seed) {
  check(options);
  if (options.num_topics < 2) throw std::invalid_argument("binary benchmark needs K >= 2");
  SplitCorpus out{empty_corpus(options, ResponseKind::binary),
                  empty_corpus(options, ResponseKind::binary)};
  Rng rng(seed);
  const int half = options.num_topics / 2;
  std::vector<int> zc;
  for (std::size_t d = 0; d < num_train + num_test; ++d) {
    auto& target = d < num_train ? out.train : out.test;
    const int y = d % 2 == 0 ? 1 : -1;
    const auto theta = y > 0 ? keyed_proportions(rng, options, 0, half)
                             : keyed_proportions(rng, options, half, options.num_topics);
    target.docs.push_back(draw_document(rng, options, theta, std::to_string(target.docs.size()), zc));
    target.responses.emplace_back(BinaryLabel{y});
  }
  return out;
}

SplitCorpus make_multiclass_benchmark(std::size_t num_train, std::size_t num_test,
                                      int num_classes, const SyntheticOptions& options,
                                      std::uint64_t seed) {
  check(options);
  if (num_classes < 2 || num_classes > options.num_topics) {
    throw std::invalid_argument("multiclass benchmark needs 2 <= classes <= K");
  }
  SplitCorpus out{empty_corpus(options, ResponseKind::multiclass),
                  empty_corpus(options, ResponseKind::multiclass)};
  Rng rng(seed);
  std::vector<int> zc;
  for (std::size_t d = 0; d < num_train + num_test; ++d) {
    auto& target = d < num_train ? out.train : out.test;
    const int y = static_cast<int>(d % static_cast<std::size_t>(num_classes));
    const int lo = y * options.num_topics / num_classes;
    const int hi = (y + 1) * options.num_topics / num_classes;
    const auto theta = keyed_proportions(rng, options, lo, hi);
    target.docs.push_back(draw_document(rng, options, theta, std::to_string(target.docs.size()), zc));
    target.responses.emplace_back(ClassLabel{y});
  }
  return out;
}

SplitCorpus make_regression_benchmark(std::size_t num_train, std::size_t num_test,
                                      std::span<const double> eta_star, double noise_sd,
                                      const SyntheticOptions& options, std::uint64_t seed) {
  check(options);
  if (eta_star.size() != static_cast<std::size_t>(options.num_topics)) {
    throw std::invalid_argument("regression benchmark: eta_star must have K entries");
  }
  if (!(noise_sd >= 0.0)) throw std::invalid_argument("regression benchmark: noise_sd must be >= 0");
  SplitCorpus out{empty_corpus(options, ResponseKind::real),
                  empty_corpus(options, ResponseKind::real)};
  Rng rng(seed);
  std::vector<int> zc;
  for (std::size_t d = 0; d < num_train + num_test; ++d) {
    auto& target = d < num_train ? out.train : out.test;
    const auto theta = dirichlet(rng, static_cast<std::size_t>(options.num_topics), options.doc_alpha);
    auto doc = draw_document(rng, options, theta, std::to_string(target.docs.size()), zc);
    const int topical = std::max(1, std::accumulate(zc.begin(), zc.end(), 0));
    double y = 0.0;
    for (std::size_t k = 0; k < zc.size(); ++k) {
      y += eta_star[k] * zc[k] / static_cast<double>(topical);
    }
    y += noise_sd * rng.normal();
    target.docs.push_back(std::move(doc));
    target.responses.emplace_back(RealScore{y});
  }
  return out;
}

SplitCorpus make_multilabel_benchmark(std::size_t num_train, std::size_t num_test,
                                      double threshold, const SyntheticOptions& options,
                                      std::uint64_t seed) {
  check(options);
  SplitCorpus out{empty_corpus(options, ResponseKind::multilabel),
                  empty_corpus(options, ResponseKind::multilabel)};
  Rng rng(seed);
  std::vector<int> zc;
  for (std::size_t d = 0; d < num_train + num_test; ++d) {
    auto& target = d < num_train ? out.train : out.test;
    const auto theta = dirichlet(rng, static_cast<std::size_t>(options.num_topics), options.doc_alpha);
    auto doc = draw_document(rng, options, theta, std::to_string(target.docs.size()), zc);
    LabelSet labels;
    const auto top = std::max_element(zc.begin(), zc.end()) - zc.begin();
    for (std::size_t k = 0; k < zc.size(); ++k) {
      const double share = zc[k] / static_cast<double>(std::max(1, std::accumulate(zc.begin(), zc.end(), 0)));
      if (share > threshold || static_cast<std::ptrdiff_t>(k) == top) {
        labels.indices.push_back(static_cast<int>(k));
      }
    }
    target.docs.push_back(std::move(doc));
    target.responses.emplace_back(std::move(labels));
  }
  return out;
}

}  // namespace medlda

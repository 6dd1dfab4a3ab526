#include <doctest.h>

#include <numeric>

#include "bridge.hpp"
#include "medlda/synthetic.hpp"
#include "medlda/topic_state.hpp"
#include "oracle.hpp"

using namespace medlda;

namespace {

// Sums that must hold for any valid state.
void check_conservation(const CountState& s) {
  std::int64_t all = 0;
  for (int k = 0; k < s.num_topics(); ++k) {
    std::int64_t col = 0;
    for (std::size_t t = 0; t < s.num_terms(); ++t) {
      const auto v = s.topic_term(k, static_cast<TermId>(t));
      CHECK(v >= 0);
      col += v;
    }
    CHECK(col == s.topic_total(k));
    all += s.topic_total(k);
  }
  CHECK(all == static_cast<std::int64_t>(s.total_tokens()));
  for (std::size_t d = 0; d < s.num_docs(); ++d) {
    const auto row = s.doc_row(d);
    CHECK(std::accumulate(row.begin(), row.end(), 0) == static_cast<int>(s.doc_length(d)));
  }
  CHECK(s.consistent());
}

std::vector<std::vector<TermId>> small_words() { return {{0, 1, 1, 2}, {}, {3}, {2, 2, 0}}; }

}  // namespace

TEST_SUITE("topic_state") {

TEST_CASE("hyperparameter validation") {
  Hyperparams h;
  CHECK_NOTHROW(h.validate());
  CHECK(h.alpha_k() == doctest::Approx(1.0 / 20));
  auto bad = [&](auto mutate) {
    Hyperparams x;
    mutate(x);
    CHECK_THROWS_AS(x.validate(), std::invalid_argument);
  };
  bad([](Hyperparams& x) { x.num_topics = 0; });
  bad([](Hyperparams& x) { x.alpha = 0; });
  bad([](Hyperparams& x) { x.beta = -1; });
  bad([](Hyperparams& x) { x.nu2 = 0; });
  bad([](Hyperparams& x) { x.c = -0.1; });
  bad([](Hyperparams& x) { x.ell = 0.5; });
  bad([](Hyperparams& x) { x.epsilon = -1e-3; });
  Hyperparams zero_c;
  zero_c.c = 0.0;
  CHECK_NOTHROW(zero_c.validate());
}

TEST_CASE("init_assignments conserves tokens and is deterministic") {
  Rng a(3), b(3);
  const auto s1 = init_assignments(a, small_words(), 3, 4);
  const auto s2 = init_assignments(b, small_words(), 3, 4);
  CHECK(s1 == s2);
  CHECK(s1.total_tokens() == 8);
  check_conservation(s1);

  Rng c(3);
  const auto one = init_assignments(c, small_words(), 1, 4);
  for (std::size_t d = 0; d < one.num_docs(); ++d) {
    CHECK(one.doc_topic(d, 0) == static_cast<int>(one.doc_length(d)));
    for (std::size_t n = 0; n < one.doc_length(d); ++n) CHECK(one.topic(d, n) == 0);
  }
}

TEST_CASE("remove then add restores the state bitwise") {
  Rng rng(5);
  auto s = init_assignments(rng, small_words(), 3, 4);
  const auto before = s;
  const Topic k = s.topic(0, 2);
  s.remove_token(0, 2);
  CHECK(s.topic(0, 2) == kUnassigned);
  CHECK_FALSE(s == before);
  s.add_token(0, 2, k);
  CHECK(s == before);
}

TEST_CASE("removing the last token of a topic leaves zero counts") {
  const auto s0 = CountState::from_assignments({{0, 1}}, 2, 2, {{0, 1}});
  auto s = s0;
  s.remove_token(0, 1);
  CHECK(s.doc_topic(0, 1) == 0);
  CHECK(s.topic_term(1, 1) == 0);
  CHECK(s.topic_total(1) == 0);
  CHECK_THROWS_AS(s.remove_token(0, 1), std::logic_error);
  CHECK_THROWS_AS(s.add_token(0, 0, 1), std::logic_error);
  CHECK_THROWS_AS(s.add_token(0, 1, 2), std::out_of_range);
}

TEST_CASE("random remove/add sequences keep every invariant") {
  Rng rng(8);
  auto s = init_assignments(rng, small_words(), 4, 4);
  for (int step = 0; step < 2000; ++step) {
    const std::size_t d = rng.index(s.num_docs());
    if (s.doc_length(d) == 0) continue;
    const std::size_t n = rng.index(s.doc_length(d));
    s.remove_token(d, n);
    s.add_token(d, n, static_cast<Topic>(rng.index(4)));
  }
  check_conservation(s);
}

TEST_CASE("from_assignments validates its input") {
  CHECK_THROWS(CountState::from_assignments({{0}}, 2, 1, {{2}}));
  CHECK_THROWS_AS(CountState::from_assignments({{0, 0}}, 2, 1, {{0}}), std::invalid_argument);
  CHECK_THROWS_AS(CountState(std::vector<std::vector<TermId>>{{5}}, 2, 3), std::invalid_argument);
}

TEST_CASE("LDA conditional on symmetric empty counts is uniform") {
  auto s = CountState::from_assignments({{0}}, 2, 3, {{1}});
  s.remove_token(0, 0);
  Hyperparams h;
  h.num_topics = 2;
  const auto p = oracle::normalized(lda_token_conditional(s, h, 0, 0));
  CHECK(p[0] == doctest::Approx(0.5));
  CHECK(p[1] == doctest::Approx(0.5));
}

TEST_CASE("LDA conditional follows the document counts") {
  // Document counts (3, 1) without the token; topic-term rows identical.
  auto s = CountState::from_assignments({{0, 1, 1, 1, 2}, {0, 0, 2, 2}}, 2, 3,
                                        {{0, 0, 1, 0, 0}, {0, 1, 1, 1}});
  s.remove_token(0, 0);
  CHECK(s.doc_topic(0, 0) == 3);
  CHECK(s.doc_topic(0, 1) == 1);
  CHECK(s.topic_term(0, 0) == s.topic_term(1, 0));
  CHECK(s.topic_total(0) == s.topic_total(1));
  Hyperparams h;
  h.num_topics = 2;
  h.alpha = 0.5;
  const auto w = lda_token_conditional(s, h, 0, 0);
  CHECK(w[0] / w[1] == doctest::Approx((3 + h.alpha_k()) / (1 + h.alpha_k())));
}

TEST_CASE("LDA conditional matches the collapsed joint ratio") {
  Rng rng(21);
  for (int trial = 0; trial < 200; ++trial) {
    const auto inst = oracle::random_instance(rng, oracle::Likelihood::none);
    const auto z = oracle::random_assignment(rng, inst);
    for (std::size_t d = 0; d < inst.docs.size(); ++d) {
      for (std::size_t n = 0; n < inst.docs[d].size(); ++n) {
        const auto lib = bridge::library_conditional(inst, z, d, n);
        const auto ref = oracle::brute_force_token_conditional(inst, z, d, n);
        CHECK(oracle::max_relative_difference(lib, ref) <= 1e-12);
      }
    }
  }
}

TEST_CASE("zbar") {
  const auto s = CountState::from_assignments({{0, 1, 2, 3}, {0, 0}, {}}, 3, 4, {{0, 1, 0, 1}, {0, 0}, {}});
  CHECK(zbar(s, 0) == std::vector<double>{0.5, 0.5, 0.0});
  CHECK(zbar(s, 1) == std::vector<double>{1.0, 0.0, 0.0});
  CHECK_THROWS_AS(zbar(s, 2), std::invalid_argument);
  Rng rng(2);
  const auto r = init_assignments(rng, {{0, 1, 2, 0, 1, 3, 3}}, 4, 4);
  const auto zb = zbar(r, 0);
  for (int k = 0; k < 4; ++k) CHECK(zb[static_cast<std::size_t>(k)] == r.doc_topic(0, k) / 7.0);
}

TEST_CASE("LDA baseline on a one-token corpus") {
  LabeledCorpus c;
  c.vocab = VocabMap::numbered(2);
  c.docs.push_back({"0", {1}});
  Hyperparams h;
  h.num_topics = 3;
  Rng rng(1);
  const auto s = run_lda_baseline(rng, c, h, 1);
  CHECK(s.total_tokens() == 1);
  CHECK(s.topic(0, 0) >= 0);
  CHECK(s.topic(0, 0) < 3);
  CHECK(s.consistent());
  CHECK_THROWS_AS(run_lda_baseline(rng, c, h, 0), std::invalid_argument);
}

TEST_CASE("LDA baseline recovers two disjoint vocabularies") {
  SyntheticOptions o;
  o.num_topics = 2;
  o.vocab_size = 40;
  o.block_mass = 1.0;
  o.doc_alpha = 0.1;
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    const auto data = make_binary_benchmark(100, 0, o, seed);
    Hyperparams h;
    h.num_topics = 2;
    Rng rng(seed);
    const auto s = run_lda_baseline(rng, data.train, h, 50);
    CHECK(s.consistent());
    for (int half = 0; half < 2; ++half) {
      std::int64_t per_topic[2] = {0, 0};
      for (int t = half * 20; t < (half + 1) * 20; ++t) {
        for (int k = 0; k < 2; ++k) per_topic[k] += s.topic_term(k, t);
      }
      const double purity = static_cast<double>(std::max(per_topic[0], per_topic[1])) /
                            static_cast<double>(per_topic[0] + per_topic[1]);
      CHECK(purity >= 0.9);
    }
  }
}

TEST_CASE("token lists mirror the corpus") {
  LabeledCorpus c;
  c.vocab = VocabMap::numbered(3);
  c.docs = {{"a", {0, 2}}, {"b", {}}};
  CHECK(token_lists(c) == std::vector<std::vector<TermId>>{{0, 2}, {}});
}

}

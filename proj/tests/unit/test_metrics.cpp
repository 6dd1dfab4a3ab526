#include <doctest.h>

#include <algorithm>

#include <json.hpp>

#include "medlda/metrics.hpp"
#include "medlda/random.hpp"

using namespace medlda;

TEST_SUITE("metrics") {

TEST_CASE("accuracy") {
  const std::vector<int> p{1, -1, 1, 1}, t{1, 1, 1, -1};
  CHECK(accuracy(p, t) == 0.5);
  CHECK(accuracy(t, t) == 1.0);
  CHECK_THROWS_AS(accuracy(p, std::vector<int>{1}), std::invalid_argument);
  CHECK_THROWS_AS(accuracy(std::vector<int>{}, std::vector<int>{}), std::invalid_argument);
}

TEST_CASE("predictive R2") {
  const std::vector<double> truth{0.0, 2.0};
  CHECK(predictive_r2(std::vector<double>{1.0, 1.0}, truth) == 0.0);
  CHECK(predictive_r2(truth, truth) == 1.0);
  CHECK(predictive_r2(std::vector<double>{2.0, 0.0}, truth) == -3.0);
  CHECK_THROWS_AS(predictive_r2(truth, std::vector<double>{3.0, 3.0}), std::invalid_argument);
  CHECK_THROWS_AS(predictive_r2(truth, std::vector<double>{3.0}), std::invalid_argument);
}

TEST_CASE("multilabel precision, recall and F1") {
  const std::vector<std::vector<int>> pred{{0, 1}, {2}}, truth{{0}, {1, 2}};
  const auto r = prf1_multilabel(pred, truth);
  CHECK(r.tp == 2);
  CHECK(r.fp == 1);
  CHECK(r.fn == 1);
  CHECK(r.precision == doctest::Approx(2.0 / 3));
  CHECK(r.recall == doctest::Approx(2.0 / 3));
  CHECK(r.f1 == doctest::Approx(2.0 / 3));

  const std::vector<std::vector<int>> none{{}, {}};
  const auto z = prf1_multilabel(none, none);
  CHECK(z.precision == 0.0);
  CHECK(z.recall == 0.0);
  CHECK(z.f1 == 0.0);

  // F1 is the harmonic mean, and document order does not matter
  Rng rng(4);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<std::vector<int>> p(6), t(6);
    for (std::size_t d = 0; d < 6; ++d) {
      for (int l = 0; l < 4; ++l) {
        if (rng.uniform() < 0.5) p[d].push_back(l);
        if (rng.uniform() < 0.5) t[d].push_back(l);
      }
    }
    const auto a = prf1_multilabel(p, t);
    if (a.precision + a.recall > 0) {
      CHECK(a.f1 == doctest::Approx(2 * a.precision * a.recall / (a.precision + a.recall)));
    }
    std::reverse(p.begin(), p.end());
    std::reverse(t.begin(), t.end());
    const auto b = prf1_multilabel(p, t);
    CHECK(a.tp == b.tp);
    CHECK(a.f1 == b.f1);
  }
}

TEST_CASE("evaluation reports") {
  const std::vector<Response> truth{ClassLabel{0}, ClassLabel{1}, ClassLabel{1}, ClassLabel{2}};
  const std::vector<Response> pred{ClassLabel{0}, ClassLabel{1}, ClassLabel{0}, ClassLabel{2}};
  const auto rep = evaluate(pred, truth, TaskKind::multiclass);
  CHECK(rep.values.at(0).first == "accuracy");
  CHECK(rep.values.at(0).second == 0.75);
  CHECK(rep.per_class_accuracy == std::vector<double>{1.0, 0.5, 1.0});
  CHECK(rep.per_class_support == std::vector<long>{1, 2, 1});
  CHECK(rep.to_text().find("accuracy\t0.75\n") == 0);
  CHECK(rep.to_text().find("class_1_recall\t0.5\n") != std::string::npos);
  const auto j = nlohmann::json::parse(rep.to_json());
  CHECK(j["task"] == "multiclass");
  CHECK(j["metrics"]["accuracy"] == 0.75);
  CHECK(j["per_class_support"][1] == 2);

  const std::vector<Response> rt{RealScore{0.0}, RealScore{2.0}}, rp{RealScore{1.0}, RealScore{1.0}};
  const auto r = evaluate(rp, rt, TaskKind::regression);
  CHECK(r.values.at(0).first == "predictive_r2");
  CHECK(r.values.at(0).second == 0.0);
  CHECK(r.values.at(1).second == 1.0);

  const std::vector<Response> bt{BinaryLabel{1}, BinaryLabel{-1}};
  CHECK(evaluate(bt, bt, TaskKind::binary).values.at(0).second == 1.0);
  CHECK_THROWS_AS(evaluate(bt, rt, TaskKind::binary), std::invalid_argument);
  CHECK_THROWS_AS(evaluate(bt, std::span(bt.data(), 1), TaskKind::binary), std::invalid_argument);

  const std::vector<Response> mt{LabelSet{{0}}, LabelSet{{1, 2}}}, mp{LabelSet{{0, 1}}, LabelSet{{2}}};
  const auto m = evaluate(mp, mt, TaskKind::multilabel);
  CHECK(m.values.at(2).first == "f1");
  CHECK(m.values.at(2).second == doctest::Approx(2.0 / 3));
}

TEST_CASE("mean and standard deviation") {
  const auto a = mean_std(std::vector<double>{1.0, 2.0, 3.0});
  CHECK(a.mean == 2.0);
  CHECK(a.std == 1.0);
  CHECK(mean_std(std::vector<double>{4.0}).std == 0.0);
  CHECK_THROWS_AS(mean_std(std::vector<double>{}), std::invalid_argument);
}

}

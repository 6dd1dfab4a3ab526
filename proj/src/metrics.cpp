#include "medlda/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <stdexcept>

#include <json.hpp>

namespace medlda {

double accuracy(std::span<const int> pred, std::span<const int> truth) {
  if (pred.size() != truth.size()) throw std::invalid_argument("accuracy: length mismatch");
  if (pred.empty()) throw std::invalid_argument("accuracy: no predictions");
  std::size_t hits = 0;
  for (std::size_t i = 0; i < pred.size(); ++i) hits += pred[i] == truth[i];
  return static_cast<double>(hits) / static_cast<double>(pred.size());
}

double predictive_r2(std::span<const double> pred, std::span<const double> truth) {
  if (pred.size() != truth.size()) throw std::invalid_argument("predictive_r2: length mismatch");
  if (truth.empty()) throw std::invalid_argument("predictive_r2: no predictions");
  const double mean = std::accumulate(truth.begin(), truth.end(), 0.0) / truth.size();
  double sse = 0.0, sst = 0.0;
  for (std::size_t i = 0; i < truth.size(); ++i) {
    sse += (truth[i] - pred[i]) * (truth[i] - pred[i]);
    sst += (truth[i] - mean) * (truth[i] - mean);
  }
  if (sst == 0.0) throw std::invalid_argument("predictive_r2: truth has zero variance");
  return 1.0 - sse / sst;
}

PRF1 prf1_multilabel(std::span<const std::vector<int>> pred,
                     std::span<const std::vector<int>> truth) {
  if (pred.size() != truth.size()) throw std::invalid_argument("prf1_multilabel: length mismatch");
  PRF1 r;
  for (std::size_t d = 0; d < pred.size(); ++d) {
    std::vector<int> p = pred[d], t = truth[d];
    std::sort(p.begin(), p.end());
    p.erase(std::unique(p.begin(), p.end()), p.end());
    std::sort(t.begin(), t.end());
    t.erase(std::unique(t.begin(), t.end()), t.end());
    std::vector<int> both;
    std::set_intersection(p.begin(), p.end(), t.begin(), t.end(), std::back_inserter(both));
    r.tp += static_cast<long>(both.size());
    r.fp += static_cast<long>(p.size() - both.size());
    r.fn += static_cast<long>(t.size() - both.size());
  }
  r.precision = r.tp + r.fp > 0 ? double(r.tp) / double(r.tp + r.fp) : 0.0;
  r.recall = r.tp + r.fn > 0 ? double(r.tp) / double(r.tp + r.fn) : 0.0;
  r.f1 = r.precision + r.recall > 0.0
             ? 2.0 * r.precision * r.recall / (r.precision + r.recall)
             : 0.0;
  return r;
}

std::string EvalReport::to_text() const {
  std::string out;
  char buf[64];
  for (const auto& [name, value] : values) {
    std::snprintf(buf, sizeof buf, "%.10g", value);
    out += name + '\t' + buf + '\n';
  }
  for (std::size_t i = 0; i < per_class_accuracy.size(); ++i) {
    std::snprintf(buf, sizeof buf, "%.10g", per_class_accuracy[i]);
    out += "class_" + std::to_string(i) + "_recall\t" + buf + '\n';
  }
  return out;
}

std::string EvalReport::to_json() const {
  nlohmann::json j;
  j["task"] = to_string(task);
  for (const auto& [name, value] : values) j["metrics"][name] = value;
  if (!per_class_accuracy.empty()) {
    j["per_class_recall"] = per_class_accuracy;
    j["per_class_support"] = per_class_support;
  }
  return j.dump();
}

namespace {

template <typename T>
std::vector<T> extract(std::span<const Response> rs, const char* what) {
  std::vector<T> out;
  out.reserve(rs.size());
  for (const auto& r : rs) {
    const auto* v = std::get_if<T>(&r);
    if (!v) throw std::invalid_argument(std::string("expected ") + what + " responses");
    out.push_back(*v);
  }
  return out;
}

void per_class(EvalReport& rep, std::span<const int> pred, std::span<const int> truth) {
  const int top = truth.empty() ? 0 : *std::max_element(truth.begin(), truth.end());
  rep.per_class_accuracy.assign(static_cast<std::size_t>(top) + 1, 0.0);
  rep.per_class_support.assign(static_cast<std::size_t>(top) + 1, 0);
  for (std::size_t i = 0; i < truth.size(); ++i) {
    const auto c = static_cast<std::size_t>(truth[i]);
    ++rep.per_class_support[c];
    rep.per_class_accuracy[c] += pred[i] == truth[i];
  }
  for (std::size_t c = 0; c < rep.per_class_accuracy.size(); ++c) {
    if (rep.per_class_support[c] > 0) rep.per_class_accuracy[c] /= rep.per_class_support[c];
  }
}

}  // namespace

EvalReport evaluate(std::span<const Response> pred, std::span<const Response> truth,
                    TaskKind task) {
  if (pred.size() != truth.size()) {
    throw std::invalid_argument("prediction and truth counts differ (" +
                                std::to_string(pred.size()) + " vs " +
                                std::to_string(truth.size()) + ")");
  }
  EvalReport rep;
  rep.task = task;
  switch (task) {
    case TaskKind::binary: {
      std::vector<int> p, t;
      for (const auto& x : extract<BinaryLabel>(pred, "binary")) p.push_back(x.sign);
      for (const auto& x : extract<BinaryLabel>(truth, "binary")) t.push_back(x.sign);
      rep.values.emplace_back("accuracy", accuracy(p, t));
      break;
    }
    case TaskKind::multiclass: {
      std::vector<int> p, t;
      for (const auto& x : extract<ClassLabel>(pred, "multiclass")) p.push_back(x.index);
      for (const auto& x : extract<ClassLabel>(truth, "multiclass")) t.push_back(x.index);
      rep.values.emplace_back("accuracy", accuracy(p, t));
      per_class(rep, p, t);
      break;
    }
    case TaskKind::regression: {
      std::vector<double> p, t;
      for (const auto& x : extract<RealScore>(pred, "real")) p.push_back(x.value);
      for (const auto& x : extract<RealScore>(truth, "real")) t.push_back(x.value);
      rep.values.emplace_back("predictive_r2", predictive_r2(p, t));
      double sse = 0.0;
      for (std::size_t i = 0; i < p.size(); ++i) sse += (p[i] - t[i]) * (p[i] - t[i]);
      rep.values.emplace_back("mse", sse / static_cast<double>(p.size()));
      break;
    }
    case TaskKind::multilabel: {
      std::vector<std::vector<int>> p, t;
      for (const auto& x : extract<LabelSet>(pred, "multilabel")) p.push_back(x.indices);
      for (const auto& x : extract<LabelSet>(truth, "multilabel")) t.push_back(x.indices);
      const auto r = prf1_multilabel(p, t);
      rep.values.emplace_back("precision", r.precision);
      rep.values.emplace_back("recall", r.recall);
      rep.values.emplace_back("f1", r.f1);
      rep.values.emplace_back("tp", static_cast<double>(r.tp));
      rep.values.emplace_back("fp", static_cast<double>(r.fp));
      rep.values.emplace_back("fn", static_cast<double>(r.fn));
      break;
    }
  }
  return rep;
}

MeanStd mean_std(std::span<const double> values) {
  if (values.empty()) throw std::invalid_argument("mean_std: no values");
  MeanStd r;
  r.mean = std::accumulate(values.begin(), values.end(), 0.0) / values.size();
  if (values.size() > 1) {
    double ss = 0.0;
    for (double v : values) ss += (v - r.mean) * (v - r.mean);
    r.std = std::sqrt(ss / static_cast<double>(values.size() - 1));
  }
  return r;
}

}  // namespace medlda

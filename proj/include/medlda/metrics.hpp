#pragma once

#include <span>
#include <string>
#include <vector>

#include "medlda/corpus.hpp"
#include "medlda/model.hpp"

namespace medlda {

// Fraction of positions where pred == truth. Throws on length mismatch or
// empty input.
double accuracy(std::span<const int> pred, std::span<const int> truth);

// 1 - sum (y - yhat)^2 / sum (y - ybar)^2. Throws when the truth is constant.
double predictive_r2(std::span<const double> pred, std::span<const double> truth);

struct PRF1 {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  long tp = 0, fp = 0, fn = 0;
};
// Micro-averaged over all (document, label) decisions; 0/0 counts as 0.
PRF1 prf1_multilabel(std::span<const std::vector<int>> pred,
                     std::span<const std::vector<int>> truth);

struct EvalReport {
  TaskKind task = TaskKind::binary;
  std::vector<std::pair<std::string, double>> values;  // metric name, value
  std::vector<double> per_class_accuracy;               // classification only: recall per class
  std::vector<long> per_class_support;

  // `metric\tvalue` lines.
  std::string to_text() const;
  std::string to_json() const;
};

// Compares predictions to the truth responses of the same task.
EvalReport evaluate(std::span<const Response> pred, std::span<const Response> truth,
                    TaskKind task);

struct MeanStd {
  double mean = 0.0;
  double std = 0.0;  // sample standard deviation; 0 for a single value
};
MeanStd mean_std(std::span<const double> values);

}  // namespace medlda

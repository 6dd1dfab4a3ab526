#include "medlda/model.hpp"

#include <cstring>
#include <stdexcept>

namespace medlda {

std::string to_string(TaskKind kind) {
  switch (kind) {
    case TaskKind::binary: return "binary";
    case TaskKind::regression: return "regression";
    case TaskKind::multiclass: return "multiclass";
    case TaskKind::multilabel: return "multilabel";
  }
  throw std::invalid_argument("unknown task kind");
}

TaskKind parse_task_kind(const std::string& name) {
  if (name == "binary") return TaskKind::binary;
  if (name == "regression") return TaskKind::regression;
  if (name == "multiclass") return TaskKind::multiclass;
  if (name == "multilabel") return TaskKind::multilabel;
  throw std::invalid_argument("unknown task '" + name +
                              "' (expected binary, regression, multiclass or multilabel)");
}

namespace {

bool same_bits(double a, double b) { return std::memcmp(&a, &b, sizeof(double)) == 0; }

template <typename M>
bool same_matrix(const M& a, const M& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) return false;
  return a.size() == 0 ||
         std::memcmp(a.data(), b.data(), static_cast<std::size_t>(a.size()) * sizeof(double)) == 0;
}

}  // namespace

bool identical(const ModelSnapshot& a, const ModelSnapshot& b) {
  const auto& x = a.hyper;
  const auto& y = b.hyper;
  return a.task == b.task && a.seed == b.seed && a.burn_in == b.burn_in &&
         x.num_topics == y.num_topics && same_bits(x.alpha, y.alpha) &&
         same_bits(x.beta, y.beta) && same_bits(x.nu2, y.nu2) && same_bits(x.c, y.c) &&
         same_bits(x.ell, y.ell) && same_bits(x.epsilon, y.epsilon) &&
         same_matrix(a.phi_hat, b.phi_hat) && same_matrix(a.etas, b.etas);
}

}  // namespace medlda

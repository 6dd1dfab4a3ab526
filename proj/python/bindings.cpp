#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "medlda/binary.hpp"
#include "medlda/corpus.hpp"
#include "medlda/metrics.hpp"
#include "medlda/multitask.hpp"
#include "medlda/persistence.hpp"
#include "medlda/predict.hpp"
#include "medlda/regression.hpp"
#include "medlda/synthetic.hpp"

namespace py = pybind11;
using namespace medlda;

namespace {

py::object to_python(const Response& r) {
  return std::visit(
      [](const auto& v) -> py::object {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, BinaryLabel>) return py::int_(v.sign);
        else if constexpr (std::is_same_v<T, RealScore>) return py::float_(v.value);
        else if constexpr (std::is_same_v<T, ClassLabel>) return py::int_(v.index);
        else return py::cast(v.indices);
      },
      r);
}

Response from_python(const py::handle& h, TaskKind task) {
  switch (task) {
    case TaskKind::binary: return BinaryLabel{h.cast<int>()};
    case TaskKind::regression: return RealScore{h.cast<double>()};
    case TaskKind::multiclass: return ClassLabel{h.cast<int>()};
    case TaskKind::multilabel: {
      auto v = h.cast<std::vector<int>>();
      std::sort(v.begin(), v.end());
      return LabelSet{v};
    }
  }
  throw std::invalid_argument("unknown task kind");
}

TrainConfig make_config(int topics, double alpha, double beta, double nu2, double c, double ell,
                        double epsilon, int burnin, std::uint64_t seed, int eta_samples) {
  TrainConfig cfg;
  cfg.hyper.num_topics = topics;
  cfg.hyper.alpha = alpha;
  cfg.hyper.beta = beta;
  cfg.hyper.nu2 = nu2;
  cfg.hyper.c = c;
  cfg.hyper.ell = ell;
  cfg.hyper.epsilon = epsilon;
  cfg.burn_in = burnin;
  cfg.seed = seed;
  cfg.eta_samples = eta_samples;
  return cfg;
}

// One or more snapshots; several form a one-vs-all ensemble.
struct Model {
  std::vector<ModelSnapshot> snapshots;
  std::vector<double> trace;  // training metric per iteration (first chain)
};

Model train(const LabeledCorpus& corpus, const std::string& task, const std::string& strategy,
            int num_classes, int workers, const TrainConfig& cfg) {
  const TaskKind kind = parse_task_kind(task);
  Model m;
  auto keep_trace = [&](const std::vector<IterationStats>& t) {
    for (const auto& s : t) m.trace.push_back(s.train_metric);
  };
  const int L = num_classes > 0 ? num_classes : (kind == TaskKind::binary || kind == TaskKind::regression)
                                                    ? 1
                                                    : corpus.num_categories();
  py::gil_scoped_release release;
  switch (kind) {
    case TaskKind::binary: {
      auto r = train_binary(corpus, cfg);
      keep_trace(r.trace);
      m.snapshots.push_back(std::move(r.snapshot));
      break;
    }
    case TaskKind::regression: {
      auto r = train_regression(corpus, cfg);
      keep_trace(r.trace);
      m.snapshots.push_back(std::move(r.snapshot));
      break;
    }
    case TaskKind::multiclass:
    case TaskKind::multilabel:
      if (strategy == "ova") {
        if (kind != TaskKind::multiclass) throw std::invalid_argument("one-vs-all is for multiclass data");
        auto rs = train_one_vs_all(corpus, L, cfg, workers);
        keep_trace(rs.front().trace);
        for (auto& r : rs) m.snapshots.push_back(std::move(r.snapshot));
      } else if (strategy == "multitask") {
        auto r = train_multitask(corpus, L, cfg);
        keep_trace(r.trace);
        m.snapshots.push_back(std::move(r.snapshot));
      } else {
        throw std::invalid_argument("strategy must be 'multitask' or 'ova'");
      }
      break;
  }
  return m;
}

TaskKind model_task(const Model& m) {
  return m.snapshots.size() > 1 ? TaskKind::multiclass : m.snapshots.front().task;
}

SyntheticOptions synthetic_options(const py::kwargs& kw) {
  SyntheticOptions o;
  for (const auto& [key, value] : kw) {
    const auto k = key.cast<std::string>();
    if (k == "num_topics") o.num_topics = value.cast<int>();
    else if (k == "vocab_size") o.vocab_size = value.cast<std::size_t>();
    else if (k == "mean_length") o.mean_length = value.cast<double>();
    else if (k == "block_mass") o.block_mass = value.cast<double>();
    else if (k == "doc_alpha") o.doc_alpha = value.cast<double>();
    else if (k == "leak") o.leak = value.cast<double>();
    else if (k == "nuisance_share") o.nuisance_share = value.cast<double>();
    else if (k == "nuisance_styles") o.nuisance_styles = value.cast<int>();
    else if (k == "nuisance_terms") o.nuisance_terms = value.cast<std::size_t>();
    else throw py::key_error("unknown generator option '" + k + "'");
  }
  return o;
}

py::tuple split(SplitCorpus s) { return py::make_tuple(std::move(s.train), std::move(s.test)); }

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Gibbs max-margin supervised topic models";

  py::register_exception<CorpusError>(m, "CorpusError", PyExc_ValueError);
  py::register_exception<SnapshotError>(m, "SnapshotError", PyExc_ValueError);

  py::class_<LabeledCorpus>(m, "Corpus")
      .def_property_readonly("num_docs", &LabeledCorpus::num_docs)
      .def_property_readonly("num_terms", &LabeledCorpus::num_terms)
      .def_property_readonly("total_tokens", &LabeledCorpus::total_tokens)
      .def_property_readonly("kind", [](const LabeledCorpus& c) { return to_string(c.kind); })
      .def_property_readonly("ids", [](const LabeledCorpus& c) {
        std::vector<std::string> ids;
        for (const auto& d : c.docs) ids.push_back(d.id);
        return ids;
      })
      .def_property_readonly("tokens", [](const LabeledCorpus& c) {
        std::vector<std::vector<TermId>> out;
        for (const auto& d : c.docs) out.push_back(d.tokens);
        return out;
      })
      .def_property_readonly("responses", [](const LabeledCorpus& c) {
        py::list out;
        for (const auto& r : c.responses) out.append(to_python(r));
        return out;
      })
      .def("subset", &LabeledCorpus::subset, py::arg("indices"))
      .def("to_svmlight", &format_svmlight)
      .def("__len__", &LabeledCorpus::num_docs)
      .def("__repr__", [](const LabeledCorpus& c) {
        return "<Corpus docs=" + std::to_string(c.num_docs()) + " terms=" + std::to_string(c.num_terms()) +
               " labels=" + to_string(c.kind) + ">";
      });

  m.def(
      "load_corpus",
      [](const std::filesystem::path& path, const std::string& format, const std::string& labels,
         std::optional<std::size_t> num_terms, std::optional<std::filesystem::path> labels_path) {
        LoadOptions o;
        o.labels = labels.empty() ? ResponseKind::none : parse_response_kind(labels);
        o.num_terms = num_terms;
        o.labels_path = labels_path;
        return load_bow(path, parse_bow_format(format), o);
      },
      py::arg("path"), py::arg("format") = "svmlight", py::arg("labels") = "",
      py::arg("num_terms") = py::none(), py::arg("labels_path") = py::none());
  m.def(
      "parse_svmlight",
      [](const std::string& text, const std::string& labels) {
        LoadOptions o;
        o.labels = labels.empty() ? ResponseKind::none : parse_response_kind(labels);
        return parse_svmlight(text, o);
      },
      py::arg("text"), py::arg("labels") = "");
  m.def("train_test_split", [](const LabeledCorpus& c, double f, std::uint64_t seed) {
    auto [a, b] = train_test_split(c, f, seed);
    return py::make_tuple(std::move(a), std::move(b));
  }, py::arg("corpus"), py::arg("test_fraction"), py::arg("seed"));

  m.def("make_binary_benchmark", [](std::size_t tr, std::size_t te, std::uint64_t seed, const py::kwargs& kw) {
    return split(make_binary_benchmark(tr, te, synthetic_options(kw), seed));
  }, py::arg("num_train"), py::arg("num_test"), py::arg("seed") = 1);
  m.def("make_multiclass_benchmark",
        [](std::size_t tr, std::size_t te, int classes, std::uint64_t seed, const py::kwargs& kw) {
          return split(make_multiclass_benchmark(tr, te, classes, synthetic_options(kw), seed));
        },
        py::arg("num_train"), py::arg("num_test"), py::arg("num_classes"), py::arg("seed") = 1);
  m.def("make_regression_benchmark",
        [](std::size_t tr, std::size_t te, std::vector<double> eta, double noise, std::uint64_t seed,
           const py::kwargs& kw) {
          auto o = synthetic_options(kw);
          if (!kw.contains("num_topics")) o.num_topics = static_cast<int>(eta.size());
          return split(make_regression_benchmark(tr, te, eta, noise, o, seed));
        },
        py::arg("num_train"), py::arg("num_test"), py::arg("eta"), py::arg("noise_sd"), py::arg("seed") = 1);
  m.def("make_multilabel_benchmark",
        [](std::size_t tr, std::size_t te, double threshold, std::uint64_t seed, const py::kwargs& kw) {
          return split(make_multilabel_benchmark(tr, te, threshold, synthetic_options(kw), seed));
        },
        py::arg("num_train"), py::arg("num_test"), py::arg("threshold") = 0.3, py::arg("seed") = 1);

  py::class_<Model>(m, "Model")
      .def_property_readonly("task", [](const Model& x) { return to_string(model_task(x)); })
      .def_property_readonly("num_models", [](const Model& x) { return x.snapshots.size(); })
      .def_property_readonly("num_topics", [](const Model& x) { return x.snapshots.front().num_topics(); })
      .def_property_readonly("num_terms", [](const Model& x) { return x.snapshots.front().num_terms(); })
      .def("phi_hat", [](const Model& x, std::size_t i) { return x.snapshots.at(i).phi_hat; }, py::arg("index") = 0)
      .def("etas", [](const Model& x, std::size_t i) { return Eigen::MatrixXd(x.snapshots.at(i).etas); },
           py::arg("index") = 0)
      .def_readonly("trace", &Model::trace)
      .def("save", [](const Model& x, const std::filesystem::path& p) { save_snapshots(x.snapshots, p); })
      .def("checksum", [](const Model& x) { return fnv1a64(serialize_snapshots(x.snapshots)); })
      .def("__repr__", [](const Model& x) {
        return "<Model task=" + to_string(model_task(x)) + " K=" + std::to_string(x.snapshots.front().num_topics()) +
               " chains=" + std::to_string(x.snapshots.size()) + ">";
      });

  m.def("load_model", [](const std::filesystem::path& p) { return Model{load_snapshots(p), {}}; });

  m.def(
      "train",
      [](const LabeledCorpus& corpus, const std::string& task, int topics, double alpha, double beta,
         double nu2, double c, std::optional<double> ell, double epsilon, std::optional<int> burnin,
         std::uint64_t seed, int eta_samples, const std::string& strategy, int num_classes, int workers) {
        const auto kind = parse_task_kind(task);
        const double e = ell.value_or(kind == TaskKind::multiclass ? 64.0 : 164.0);
        const int b = burnin.value_or(kind == TaskKind::multiclass   ? 20
                                      : kind == TaskKind::multilabel ? 40
                                                                     : 10);
        return train(corpus, task, strategy, num_classes, workers,
                     make_config(topics, alpha, beta, nu2, c, e, epsilon, b, seed, eta_samples));
      },
      py::arg("corpus"), py::arg("task") = "binary", py::arg("topics") = 20, py::arg("alpha") = 1.0,
      py::arg("beta") = 0.01, py::arg("nu2") = 1.0, py::arg("c") = 1.0, py::arg("ell") = py::none(),
      py::arg("epsilon") = 1e-3, py::arg("burnin") = py::none(), py::arg("seed") = 1, py::arg("eta_samples") = 1,
      py::arg("strategy") = "multitask", py::arg("num_classes") = 0, py::arg("workers") = 1);

  m.def(
      "predict",
      [](const Model& model, const LabeledCorpus& corpus, std::uint64_t seed, int workers, int samples,
         int max_iterations, double tol) {
        TestInferenceConfig cfg;
        cfg.samples = samples;
        cfg.max_iterations = max_iterations;
        cfg.likelihood_rel_tol = tol;
        std::vector<Response> out;
        {
          py::gil_scoped_release release;
          out = predict_corpus(model.snapshots, corpus, cfg, seed, workers);
        }
        py::list result;
        for (const auto& r : out) result.append(to_python(r));
        return result;
      },
      py::arg("model"), py::arg("corpus"), py::arg("seed") = 1, py::arg("workers") = 1, py::arg("samples") = 1,
      py::arg("max_iterations") = 100, py::arg("tol") = 1e-4);

  m.def(
      "evaluate",
      [](const py::sequence& predictions, const LabeledCorpus& truth, const std::string& task) {
        const auto kind = parse_task_kind(task);
        std::vector<Response> pred;
        for (const auto& p : predictions) pred.push_back(from_python(p, kind));
        const auto rep = evaluate(pred, truth.responses, kind);
        py::dict out;
        for (const auto& [name, value] : rep.values) out[py::str(name)] = value;
        return out;
      },
      py::arg("predictions"), py::arg("truth"), py::arg("task"));
}

#include "cli.hpp"

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <optional>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include <CLI11.hpp>

#include "medlda/binary.hpp"
#include "medlda/corpus.hpp"
#include "medlda/metrics.hpp"
#include "medlda/multitask.hpp"
#include "medlda/persistence.hpp"
#include "medlda/predict.hpp"
#include "medlda/regression.hpp"
#include "medlda/sampling.hpp"
#include "medlda/synthetic.hpp"

namespace medlda::cli {

namespace {

// Exit status 2.
class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  for (std::string item; std::getline(ss, item, ',');) {
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

template <typename T>
std::vector<T> parse_list(const std::string& s, const char* what) {
  std::vector<T> out;
  for (const auto& item : split_list(s)) {
    try {
      std::size_t used = 0;
      const long long v = std::stoll(item, &used);
      if (used != item.size() || v < 1) throw std::invalid_argument(item);
      out.push_back(static_cast<T>(v));
    } catch (const std::exception&) {
      throw UsageError(std::string("invalid ") + what + " list entry '" + item + "'");
    }
  }
  if (out.empty()) throw UsageError(std::string("empty ") + what + " list");
  return out;
}

std::string hex64(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

// Reads `key = value` lines (`#` comments) into flag arguments for `sub`.
std::vector<std::string> config_args(const std::string& path, CLI::App& sub) {
  std::ifstream in(path);
  if (!in) throw UsageError("cannot open config file '" + path + "'");
  std::vector<std::string> out;
  std::size_t lineno = 0;
  for (std::string line; std::getline(in, line);) {
    ++lineno;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.resize(hash);
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw UsageError(path + ":" + std::to_string(lineno) + ": expected key=value");
    }
    auto trim = [](std::string s) {
      const auto a = s.find_first_not_of(" \t\r");
      const auto b = s.find_last_not_of(" \t\r");
      return a == std::string::npos ? std::string() : s.substr(a, b - a + 1);
    };
    std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.rfind("--", 0) == 0) key = key.substr(2);
    if (key == "config") throw UsageError(path + ": nested config files are not supported");
    const CLI::Option* opt = sub.get_option_no_throw("--" + key);
    if (!opt) {
      throw UsageError(path + ":" + std::to_string(lineno) + ": unknown key '" + key +
                       "' for command " + sub.get_name());
    }
    if (opt->get_expected_max() == 0) {
      if (value == "true" || value == "1" || value == "yes" || value == "on") out.push_back("--" + key);
    } else {
      out.push_back("--" + key);
      out.push_back(value);
    }
  }
  return out;
}

struct ModelOptions {
  std::string task = "binary";
  std::string data;
  std::string format = "svmlight";
  std::string labels;
  std::string vocab;
  int topics = 20;
  double alpha = 1.0;
  double beta = 0.01;
  double nu2 = 1.0;
  double c = 1.0;
  double ell = 164.0;
  double epsilon = 1e-3;
  int burnin = 10;
  std::uint64_t seed = 1;
  int eta_samples = 1;
  std::string strategy = "multitask";
  int classes = 0;
  int workers = 1;
  int runs = 1;
  std::string out;
  std::string log;
  std::string test;
  std::string test_labels;
  int samples = 1;
  int max_iter = 100;
  double tol = 1e-4;
  bool cv_c = false;
  int folds = 5;
  std::string config;
};

void add_data_options(CLI::App& sub, std::string& data, std::string& format, std::string& labels) {
  sub.add_option("--data", data, "Corpus file");
  sub.add_option("--format", format, "svmlight (svmlight-counts) or uci (uci-bow)");
  sub.add_option("--labels", labels, "Label file for uci-bow corpora");
}

void add_inference_options(CLI::App& sub, ModelOptions& o) {
  sub.add_option("--samples", o.samples, "Test z samples averaged per document");
  sub.add_option("--max-iter", o.max_iter, "Max Gibbs sweeps per test document");
  sub.add_option("--tol", o.tol, "Relative likelihood change that stops test sweeps");
}

ResponseKind response_kind_of(TaskKind task) {
  switch (task) {
    case TaskKind::binary: return ResponseKind::binary;
    case TaskKind::regression: return ResponseKind::real;
    case TaskKind::multiclass: return ResponseKind::multiclass;
    case TaskKind::multilabel: return ResponseKind::multilabel;
  }
  return ResponseKind::none;
}

LabeledCorpus load(const std::string& path, const std::string& format, const std::string& labels,
                   ResponseKind kind, std::optional<std::size_t> num_terms, bool allow_empty,
                   const std::string& vocab = {}) {
  if (path.empty()) throw UsageError("no corpus given (use --data/--test)");
  if (!std::filesystem::exists(path)) throw UsageError("file not found: " + path);
  LoadOptions opts;
  opts.labels = kind;
  opts.num_terms = num_terms;
  opts.allow_empty = allow_empty;
  if (!labels.empty()) opts.labels_path = labels;
  if (!vocab.empty()) opts.vocab_path = vocab;
  return load_bow(path, parse_bow_format(format), opts);
}

TestInferenceConfig inference_config(const ModelOptions& o) {
  TestInferenceConfig t;
  t.samples = o.samples;
  t.max_iterations = o.max_iter;
  t.likelihood_rel_tol = o.tol;
  t.validate();
  return t;
}

std::filesystem::path run_path(const std::string& out, int run, int runs) {
  if (runs == 1) return out;
  std::filesystem::path p(out);
  return p.parent_path() / (p.stem().string() + ".run" + std::to_string(run) + p.extension().string());
}

struct TrainedRun {
  std::vector<ModelSnapshot> snapshots;
  // (task label, trace)
  std::vector<std::pair<std::string, std::vector<IterationStats>>> traces;
};

TrainedRun train_once(const LabeledCorpus& corpus, TaskKind task, const ModelOptions& o,
                      const TrainConfig& cfg) {
  TrainedRun r;
  switch (task) {
    case TaskKind::binary: {
      auto res = train_binary(corpus, cfg);
      r.snapshots.push_back(std::move(res.snapshot));
      r.traces.emplace_back("all", std::move(res.trace));
      break;
    }
    case TaskKind::regression: {
      auto res = train_regression(corpus, cfg);
      r.snapshots.push_back(std::move(res.snapshot));
      r.traces.emplace_back("all", std::move(res.trace));
      break;
    }
    case TaskKind::multiclass:
    case TaskKind::multilabel: {
      const int L = o.classes > 0 ? o.classes : corpus.num_categories();
      if (o.strategy == "ova") {
        if (task != TaskKind::multiclass) throw UsageError("--strategy ova applies to multiclass only");
        auto res = train_one_vs_all(corpus, L, cfg, o.workers);
        for (std::size_t i = 0; i < res.size(); ++i) {
          r.snapshots.push_back(std::move(res[i].snapshot));
          r.traces.emplace_back(std::to_string(i), std::move(res[i].trace));
        }
      } else {
        auto res = train_multitask(corpus, L, cfg);
        r.snapshots.push_back(std::move(res.snapshot));
        r.traces.emplace_back("all", std::move(res.trace));
      }
      break;
    }
  }
  return r;
}

double primary_metric(const EvalReport& rep) {
  for (const auto& [name, value] : rep.values) {
    if (name == "accuracy" || name == "predictive_r2" || name == "f1") return value;
  }
  return rep.values.front().second;
}

int cmd_train(CLI::App& sub, ModelOptions& o, std::ostream& out) {
  const TaskKind task = parse_task_kind(o.task);
  if (sub.count("--ell") == 0 && task == TaskKind::multiclass) o.ell = 64.0;
  if (sub.count("--burnin") == 0) {
    if (task == TaskKind::multiclass) o.burnin = 20;
    if (task == TaskKind::multilabel) o.burnin = 40;
  }
  if (o.out.empty()) throw UsageError("--out is required");
  if (o.runs < 1) throw UsageError("--runs must be >= 1");
  if (o.workers < 1) throw UsageError("--workers must be >= 1");
  if (o.strategy != "multitask" && o.strategy != "ova") {
    throw UsageError("--strategy must be multitask or ova");
  }

  const auto corpus = load(o.data, o.format, o.labels, response_kind_of(task), std::nullopt,
                           false, o.vocab);
  if (corpus.kind == ResponseKind::none) throw UsageError("training corpus has no labels");

  TrainConfig cfg;
  cfg.hyper.num_topics = o.topics;
  cfg.hyper.alpha = o.alpha;
  cfg.hyper.beta = o.beta;
  cfg.hyper.nu2 = o.nu2;
  cfg.hyper.c = o.c;
  cfg.hyper.ell = o.ell;
  cfg.hyper.epsilon = o.epsilon;
  cfg.burn_in = o.burnin;
  cfg.eta_samples = o.eta_samples;
  cfg.hyper.validate();
  if (o.burnin < 0) throw UsageError("--burnin must be >= 0");
  const auto test_cfg = inference_config(o);

  if (o.cv_c) {
    if (task != TaskKind::regression) throw UsageError("--cv-c applies to regression only");
    cfg.seed = o.seed;
    const auto cv = select_c_by_cv(corpus, cfg, kRegressionCGrid, o.folds, test_cfg);
    for (std::size_t i = 0; i < cv.grid.size(); ++i) {
      out << "cv\tc=" << fmt(cv.grid[i]) << "\tmean_r2\t" << fmt(cv.mean_r2[i]) << '\n';
    }
    out << "cv\tselected_c\t" << fmt(cv.best_c) << '\n';
    cfg.hyper.c = cv.best_c;
  }

  std::optional<LabeledCorpus> test;
  if (!o.test.empty()) {
    test = load(o.test, o.format, o.test_labels, response_kind_of(task), corpus.num_terms(), false,
                o.vocab);
  }

  std::ofstream log;
  if (!o.log.empty()) {
    log.open(o.log);
    if (!log) throw UsageError("cannot write log '" + o.log + "'");
    log << "run\tseed\ttask\titeration\tseconds\ttrain_metric\n";
  }

  std::vector<double> metrics;
  std::string metric_name;
  for (int r = 0; r < o.runs; ++r) {
    cfg.seed = o.seed + static_cast<std::uint64_t>(r);
    auto trained = train_once(corpus, task, o, cfg);
    const auto path = run_path(o.out, r, o.runs);
    save_snapshots(trained.snapshots, path);
    out << "snapshot\t" << path.string() << "\tfnv1a64\t"
        << hex64(fnv1a64(serialize_snapshots(trained.snapshots))) << '\n';
    for (const auto& [label, trace] : trained.traces) {
      for (const auto& s : trace) {
        if (log) {
          log << r << '\t' << cfg.seed << '\t' << label << '\t' << s.iteration << '\t'
              << fmt(s.seconds) << '\t' << fmt(s.train_metric) << '\n';
        }
      }
      if (!trace.empty()) {
        out << "run\t" << r << "\ttask\t" << label << "\ttrain_metric\t"
            << fmt(trace.back().train_metric) << '\n';
      }
    }
    if (test) {
      const auto preds = predict_corpus(trained.snapshots, *test, test_cfg, cfg.seed, o.workers);
      const TaskKind eval_task = trained.snapshots.size() > 1 ? TaskKind::multiclass : task;
      const auto rep = evaluate(preds, test->responses, eval_task);
      metric_name = rep.values.front().first;
      metrics.push_back(primary_metric(rep));
      out << "run\t" << r << "\tseed\t" << cfg.seed << "\ttest_" << metric_name << '\t'
          << fmt(metrics.back()) << '\n';
    }
  }
  if (metrics.size() > 1) {
    const auto ms = mean_std(metrics);
    out << "summary\ttest_" << metric_name << "\tmean\t" << fmt(ms.mean) << "\tstd\t"
        << fmt(ms.std) << '\n';
  }
  return 0;
}

int cmd_predict(ModelOptions& o, const std::string& model, std::ostream& out) {
  if (model.empty()) throw UsageError("--model is required");
  if (!std::filesystem::exists(model)) throw UsageError("file not found: " + model);
  const auto models = load_snapshots(model);
  const auto& data = o.test.empty() ? o.data : o.test;
  const auto corpus = load(data, o.format, o.labels, ResponseKind::none, models.front().num_terms(),
                           true, o.vocab);
  if (o.workers < 1) throw UsageError("--workers must be >= 1");
  const auto preds = predict_corpus(models, corpus, inference_config(o), o.seed, o.workers);
  const auto text = format_predictions(corpus, preds);
  if (o.out.empty()) {
    out << text;
  } else {
    std::ofstream f(o.out, std::ios::binary);
    if (!f) throw UsageError("cannot write '" + o.out + "'");
    f << text;
    out << "predictions\t" << o.out << "\tdocuments\t" << preds.size() << '\n';
  }
  return 0;
}

std::vector<Response> read_predictions(const std::string& path, ResponseKind kind) {
  if (!std::filesystem::exists(path)) throw UsageError("file not found: " + path);
  std::ifstream in(path);
  std::vector<Response> out;
  std::size_t lineno = 0;
  for (std::string line; std::getline(in, line);) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto tab = line.find('\t');
    if (tab == std::string::npos) {
      throw UsageError(path + ":" + std::to_string(lineno) + ": expected <doc_id>\\t<prediction>");
    }
    try {
      out.push_back(parse_response(line.substr(tab + 1), kind));
    } catch (const std::exception& e) {
      throw UsageError(path + ":" + std::to_string(lineno) + ": " + e.what());
    }
  }
  return out;
}

int cmd_eval(const ModelOptions& o, const std::string& pred, const std::string& truth_path,
             bool json, std::ostream& out) {
  const TaskKind task = parse_task_kind(o.task);
  const auto kind = response_kind_of(task);
  if (pred.empty() || truth_path.empty()) throw UsageError("--pred and --truth are required");
  const auto predictions = read_predictions(pred, kind);
  const auto truth = load(truth_path, o.format, o.labels, kind, std::nullopt, true);
  if (truth.responses.size() != truth.num_docs()) throw UsageError("truth corpus has no labels");
  if (predictions.size() != truth.responses.size()) {
    throw UsageError("prediction count " + std::to_string(predictions.size()) +
                     " does not match truth count " + std::to_string(truth.responses.size()));
  }
  const auto rep = evaluate(predictions, truth.responses, task);
  out << (json ? rep.to_json() + "\n" : rep.to_text());
  return 0;
}

}  // namespace

std::vector<BenchRow> run_bench(const BenchOptions& options) {
  using Clock = std::chrono::steady_clock;
  std::vector<BenchRow> rows;
  SyntheticOptions gen;
  for (std::size_t D : options.sizes) {
    const auto data = make_binary_benchmark(D, 0, gen, options.seed);
    TrainConfig cfg;
    cfg.hyper.num_topics = options.topics;
    cfg.burn_in = options.iterations;
    cfg.seed = options.seed;
    const auto res = train_binary(data.train, cfg);
    std::vector<double> secs;
    for (const auto& s : res.trace) secs.push_back(s.seconds);
    std::sort(secs.begin(), secs.end());
    rows.push_back({"scaling", D, data.train.total_tokens(), options.topics, 1, 1,
                    secs.empty() ? 0.0 : secs[secs.size() / 2]});
  }
  if (options.tasks >= 2) {
    SyntheticOptions mc;
    mc.num_topics = options.tasks;
    mc.vocab_size = 50 * static_cast<std::size_t>(options.tasks);
    const auto data = make_multiclass_benchmark(options.ova_docs, 0, options.tasks, mc, options.seed);
    TrainConfig cfg;
    cfg.hyper.num_topics = options.topics;
    cfg.burn_in = options.iterations;
    cfg.seed = options.seed;
    for (int w : options.workers) {
      const auto t0 = Clock::now();
      train_one_vs_all(data.train, options.tasks, cfg, w);
      const double wall = std::chrono::duration<double>(Clock::now() - t0).count();
      rows.push_back({"ova", options.ova_docs, data.train.total_tokens(), options.topics,
                      options.tasks, w, wall});
    }
  }
  return rows;
}

std::string format_bench(const std::vector<BenchRow>& rows) {
  std::string out = "section\tdocs\ttokens\ttopics\ttasks\tworkers\tseconds\n";
  for (const auto& r : rows) {
    out += r.section + '\t' + std::to_string(r.docs) + '\t' + std::to_string(r.tokens) + '\t' +
           std::to_string(r.topics) + '\t' + std::to_string(r.tasks) + '\t' +
           std::to_string(r.workers) + '\t' + fmt(r.seconds) + '\n';
  }
  return out;
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app("Gibbs max-margin supervised topic models", "medlda");
  app.option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
  app.require_subcommand(1);
  app.set_help_all_flag("--help-all");

  ModelOptions o;
  std::string model, pred, truth, sizes = "500,1000,2000", workers_list = "1,8";
  bool json = false;
  BenchOptions bench;

  auto* train = app.add_subcommand("train", "Train a model and write a snapshot");
  add_data_options(*train, o.data, o.format, o.labels);
  train->add_option("--task", o.task, "binary, regression, multiclass or multilabel");
  train->add_option("--vocab", o.vocab, "Vocabulary file, one term per line");
  train->add_option("--topics", o.topics, "Number of topics K");
  train->add_option("--alpha", o.alpha, "Document Dirichlet scalar (alpha/K per topic)");
  train->add_option("--beta", o.beta, "Topic Dirichlet weight per term");
  train->add_option("--nu2", o.nu2, "Prior variance of classifier weights");
  train->add_option("--c", o.c, "Regularization constant");
  train->add_option("--ell", o.ell, "Margin cost (default 164, multiclass 64)");
  train->add_option("--epsilon", o.epsilon, "Regression insensitivity");
  train->add_option("--burnin", o.burnin, "Burn-in iterations (default 10, multiclass 20, multilabel 40)");
  train->add_option("--seed", o.seed, "Random seed");
  train->add_option("--eta-samples", o.eta_samples, "Classifier draws averaged into the snapshot");
  train->add_option("--strategy", o.strategy, "multitask or ova (multiclass)");
  train->add_option("--classes", o.classes, "Number of categories (default: from the data)");
  train->add_option("--workers", o.workers, "Worker threads for one-vs-all and prediction");
  train->add_option("--runs", o.runs, "Repeat with seeds seed..seed+runs-1");
  train->add_option("--out", o.out, "Snapshot path");
  train->add_option("--log", o.log, "Per-iteration log (TSV)");
  train->add_option("--test", o.test, "Held-out corpus evaluated after each run");
  train->add_option("--test-labels", o.test_labels, "Label file for a uci-bow test corpus");
  train->add_flag("--cv-c", o.cv_c, "Choose c by cross-validation (regression)");
  train->add_option("--folds", o.folds, "Cross-validation folds");
  add_inference_options(*train, o);
  train->add_option("--config", o.config, "key=value file; flags on the command line win");

  auto* predict = app.add_subcommand("predict", "Predict a corpus with a trained snapshot");
  predict->add_option("--model", model, "Snapshot file");
  add_data_options(*predict, o.data, o.format, o.labels);
  predict->add_option("--test", o.test, "Corpus to predict (same as --data)");
  predict->add_option("--vocab", o.vocab, "Vocabulary file");
  predict->add_option("--seed", o.seed, "Random seed");
  predict->add_option("--workers", o.workers, "Worker threads");
  predict->add_option("--out", o.out, "Predictions file (default: standard output)");
  add_inference_options(*predict, o);
  predict->add_option("--config", o.config, "key=value file; flags on the command line win");

  auto* eval = app.add_subcommand("eval", "Score predictions against a labeled corpus");
  eval->add_option("--pred", pred, "Predictions file");
  eval->add_option("--truth", truth, "Labeled corpus");
  eval->add_option("--task", o.task, "binary, regression, multiclass or multilabel");
  eval->add_option("--format", o.format, "svmlight (svmlight-counts) or uci (uci-bow)");
  eval->add_option("--labels", o.labels, "Label file for a uci-bow truth corpus");
  eval->add_flag("--json", json, "Print a JSON object instead of metric/value lines");
  eval->add_option("--config", o.config, "key=value file; flags on the command line win");

  auto* bn = app.add_subcommand("bench", "Time training across corpus sizes and worker counts");
  bn->add_option("--sizes", sizes, "Comma-separated document counts");
  bn->add_option("--topics", bench.topics, "Number of topics");
  bn->add_option("--burnin", bench.iterations, "Timed iterations per row");
  bn->add_option("--tasks", bench.tasks, "One-vs-all categories (0 skips)");
  bn->add_option("--docs", bench.ova_docs, "Documents for the one-vs-all rows");
  bn->add_option("--workers", workers_list, "Comma-separated worker counts");
  bn->add_option("--seed", bench.seed, "Random seed");
  bn->add_option("--config", o.config, "key=value file; flags on the command line win");

  std::vector<std::string> argv = args;
  // Splice config-file values in right after the subcommand so later
  // command-line occurrences take precedence.
  for (std::size_t i = 0; i < argv.size(); ++i) {
    CLI::App* sub = app.get_subcommand_no_throw(argv[i]);
    if (!sub) continue;
    std::string cfg_path;
    for (std::size_t j = i + 1; j < argv.size(); ++j) {
      if (argv[j] == "--config" && j + 1 < argv.size()) cfg_path = argv[j + 1];
      if (argv[j].rfind("--config=", 0) == 0) cfg_path = argv[j].substr(9);
    }
    if (!cfg_path.empty()) {
      try {
        const auto extra = config_args(cfg_path, *sub);
        argv.insert(argv.begin() + static_cast<std::ptrdiff_t>(i) + 1, extra.begin(), extra.end());
      } catch (const UsageError& e) {
        err << "medlda: " << e.what() << '\n';
        return 2;
      }
    }
    break;
  }

  try {
    std::vector<std::string> reversed(argv.rbegin(), argv.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return 0;
  } catch (const CLI::CallForAllHelp& e) {
    out << app.help("", CLI::AppFormatMode::All);
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "medlda: " << e.what() << '\n';
    return 2;
  }

  try {
    if (*train) return cmd_train(*train, o, out);
    if (*predict) return cmd_predict(o, model, out);
    if (*eval) return cmd_eval(o, pred, truth, json, out);
    if (*bn) {
      bench.sizes = parse_list<std::size_t>(sizes, "size");
      bench.workers = parse_list<int>(workers_list, "worker");
      out << format_bench(run_bench(bench));
      return 0;
    }
  } catch (const UsageError& e) {
    err << "medlda: " << e.what() << '\n';
    return 2;
  } catch (const CorpusError& e) {
    err << "medlda: data error: " << e.what() << '\n';
    return 2;
  } catch (const SnapshotError& e) {
    err << "medlda: model error: " << e.what() << '\n';
    return 2;
  } catch (const std::invalid_argument& e) {
    err << "medlda: invalid configuration: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    err << "medlda: " << e.what() << '\n';
    return 1;
  }
  return 2;
}

}  // namespace medlda::cli

#include "medlda/corpus.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <numeric>
#include <sstream>

#include "medlda/random.hpp"

namespace medlda {

CorpusError::CorpusError(const std::string& what, std::size_t line)
    : std::runtime_error(line ? "line " + std::to_string(line) + ": " + what : what),
      line_(line) {}

VocabMap VocabMap::numbered(std::size_t size) {
  VocabMap v;
  v.terms.reserve(size);
  for (std::size_t i = 0; i < size; ++i) v.terms.push_back(std::to_string(i));
  return v;
}

ResponseKind kind_of(const Response& r) {
  switch (r.index()) {
    case 0: return ResponseKind::binary;
    case 1: return ResponseKind::real;
    case 2: return ResponseKind::multiclass;
    default: return ResponseKind::multilabel;
  }
}

std::string to_string(ResponseKind kind) {
  switch (kind) {
    case ResponseKind::none: return "none";
    case ResponseKind::binary: return "binary";
    case ResponseKind::real: return "real";
    case ResponseKind::multiclass: return "multiclass";
    case ResponseKind::multilabel: return "multilabel";
  }
  return "none";
}

ResponseKind parse_response_kind(const std::string& name) {
  if (name == "none" || name == "auto") return ResponseKind::none;
  if (name == "binary") return ResponseKind::binary;
  if (name == "real" || name == "regression") return ResponseKind::real;
  if (name == "multiclass") return ResponseKind::multiclass;
  if (name == "multilabel") return ResponseKind::multilabel;
  throw std::invalid_argument("unknown response kind '" + name + "'");
}

BowFormat parse_bow_format(const std::string& name) {
  if (name == "svmlight" || name == "svmlight-counts") return BowFormat::svmlight_counts;
  if (name == "uci" || name == "uci-bow") return BowFormat::uci_bow;
  throw std::invalid_argument("unknown corpus format '" + name + "'");
}

std::size_t LabeledCorpus::total_tokens() const {
  std::size_t n = 0;
  for (const auto& d : docs) n += d.length();
  return n;
}

namespace {

void require_kind(const LabeledCorpus& c, ResponseKind want) {
  if (c.kind != want) {
    throw std::logic_error("corpus responses are " + to_string(c.kind) + ", expected " +
                           to_string(want));
  }
}

}  // namespace

std::vector<double> LabeledCorpus::binary_labels() const {
  require_kind(*this, ResponseKind::binary);
  std::vector<double> out;
  out.reserve(responses.size());
  for (const auto& r : responses) out.push_back(std::get<BinaryLabel>(r).sign);
  return out;
}

std::vector<double> LabeledCorpus::real_scores() const {
  require_kind(*this, ResponseKind::real);
  std::vector<double> out;
  out.reserve(responses.size());
  for (const auto& r : responses) out.push_back(std::get<RealScore>(r).value);
  return out;
}

std::vector<int> LabeledCorpus::class_labels() const {
  require_kind(*this, ResponseKind::multiclass);
  std::vector<int> out;
  out.reserve(responses.size());
  for (const auto& r : responses) out.push_back(std::get<ClassLabel>(r).index);
  return out;
}

std::vector<std::vector<int>> LabeledCorpus::label_sets() const {
  require_kind(*this, ResponseKind::multilabel);
  std::vector<std::vector<int>> out;
  out.reserve(responses.size());
  for (const auto& r : responses) out.push_back(std::get<LabelSet>(r).indices);
  return out;
}

int LabeledCorpus::num_categories() const {
  int top = -1;
  for (const auto& r : responses) {
    if (const auto* c = std::get_if<ClassLabel>(&r)) {
      top = std::max(top, c->index);
    } else if (const auto* s = std::get_if<LabelSet>(&r)) {
      if (!s->indices.empty()) top = std::max(top, s->indices.back());
    } else {
      throw std::logic_error("num_categories needs multiclass or multilabel responses");
    }
  }
  return top + 1;
}

LabeledCorpus LabeledCorpus::subset(const std::vector<std::size_t>& doc_indices) const {
  LabeledCorpus out;
  out.vocab = vocab;
  out.kind = kind;
  out.docs.reserve(doc_indices.size());
  for (std::size_t i : doc_indices) {
    out.docs.push_back(docs.at(i));
    if (!responses.empty()) out.responses.push_back(responses.at(i));
  }
  return out;
}

namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return s.substr(first, last - first + 1);
}

std::vector<std::string_view> split_ws(std::string_view s) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < s.size()) {
    while (i < s.size() && (s[i] == ' ' || s[i] == '\t')) ++i;
    std::size_t j = i;
    while (j < s.size() && s[j] != ' ' && s[j] != '\t') ++j;
    if (j > i) out.push_back(s.substr(i, j - i));
    i = j;
  }
  return out;
}

template <class Int>
bool parse_int(std::string_view s, Int& out) {
  if (!s.empty() && s.front() == '+') s.remove_prefix(1);
  const auto* end = s.data() + s.size();
  auto [ptr, ec] = std::from_chars(s.data(), end, out);
  return ec == std::errc() && ptr == end && !s.empty();
}

bool parse_double(std::string_view s, double& out) {
  if (!s.empty() && s.front() == '+') s.remove_prefix(1);
  const auto* end = s.data() + s.size();
  auto [ptr, ec] = std::from_chars(s.data(), end, out);
  return ec == std::errc() && ptr == end && !s.empty() && std::isfinite(out);
}

bool is_nonneg_int(std::string_view s) {
  long long v = 0;
  return !s.empty() && s.front() != '-' && s.front() != '+' && parse_int(s, v) && v >= 0;
}

ResponseKind infer_kind(const std::vector<std::string>& tokens) {
  const bool all_signs = std::all_of(tokens.begin(), tokens.end(),
                                     [](const std::string& t) { return t == "+1" || t == "-1"; });
  if (all_signs) return ResponseKind::binary;
  const bool any_comma = std::any_of(tokens.begin(), tokens.end(), [](const std::string& t) {
    return t.find(',') != std::string::npos;
  });
  if (any_comma) return ResponseKind::multilabel;
  const bool all_ints = std::all_of(tokens.begin(), tokens.end(),
                                    [](const std::string& t) { return is_nonneg_int(t); });
  if (all_ints) return ResponseKind::multiclass;
  return ResponseKind::real;
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw CorpusError("cannot open '" + path.string() + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::vector<std::string> read_lines(const std::filesystem::path& path) {
  std::istringstream in(read_file(path));
  std::vector<std::string> lines;
  for (std::string line; std::getline(in, line);) {
    auto t = trim(line);
    if (!t.empty()) lines.emplace_back(t);
  }
  return lines;
}

// Expands summed per-document term counts into token lists, terms ascending.
std::vector<TermId> expand(const std::map<TermId, std::int64_t>& counts) {
  std::vector<TermId> tokens;
  for (const auto& [term, n] : counts) tokens.insert(tokens.end(), static_cast<std::size_t>(n), term);
  return tokens;
}

void attach_labels(LabeledCorpus& corpus, const std::vector<std::string>& tokens,
                   const std::vector<std::size_t>& lines, ResponseKind requested) {
  if (tokens.empty()) return;
  const ResponseKind kind = requested == ResponseKind::none ? infer_kind(tokens) : requested;
  corpus.kind = kind;
  corpus.responses.reserve(tokens.size());
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    try {
      corpus.responses.push_back(parse_response(tokens[i], kind));
    } catch (const std::invalid_argument& e) {
      throw CorpusError(e.what(), lines.empty() ? 0 : lines[i]);
    }
  }
}

VocabMap make_vocab(const LoadOptions& options, std::size_t inferred) {
  if (options.vocab_path) {
    VocabMap v;
    v.terms = read_lines(*options.vocab_path);
    return v;
  }
  return VocabMap::numbered(options.num_terms.value_or(inferred));
}

std::optional<std::size_t> declared_terms(const LoadOptions& options) {
  if (options.vocab_path) return read_lines(*options.vocab_path).size();
  return options.num_terms;
}

LabeledCorpus load_uci(const std::filesystem::path& path, const LoadOptions& options) {
  std::istringstream in(read_file(path));
  std::vector<std::pair<std::size_t, std::string>> lines;
  std::size_t lineno = 0;
  for (std::string line; std::getline(in, line);) {
    ++lineno;
    auto t = trim(line);
    if (const auto hash = t.find('#'); hash != std::string_view::npos) t = trim(t.substr(0, hash));
    if (!t.empty()) lines.emplace_back(lineno, std::string(t));
  }
  if (lines.size() < 3) throw CorpusError("uci-bow header needs D, V and NNZ lines");

  std::size_t header[3];
  for (int i = 0; i < 3; ++i) {
    if (!parse_int(std::string_view(lines[i].second), header[i])) {
      throw CorpusError("malformed header value '" + lines[i].second + "'", lines[i].first);
    }
  }
  const auto [num_docs, header_terms, nnz] = std::tuple{header[0], header[1], header[2]};
  if (num_docs == 0 && !options.allow_empty) throw CorpusError("no documents");
  if (lines.size() - 3 != nnz) {
    throw CorpusError("expected " + std::to_string(nnz) + " triples, found " +
                      std::to_string(lines.size() - 3));
  }
  const std::size_t vocab_size = declared_terms(options).value_or(header_terms);

  std::vector<std::map<TermId, std::int64_t>> counts(num_docs);
  for (std::size_t i = 3; i < lines.size(); ++i) {
    const auto& [ln, text] = lines[i];
    const auto fields = split_ws(text);
    std::size_t doc = 0, term = 0;
    std::int64_t count = 0;
    if (fields.size() != 3 || !parse_int(fields[0], doc) || !parse_int(fields[1], term) ||
        !parse_int(fields[2], count) || count < 0) {
      throw CorpusError("malformed triple '" + text + "'", ln);
    }
    if (doc < 1 || doc > num_docs) throw CorpusError("document id out of range", ln);
    if (term < 1 || term > vocab_size) {
      throw CorpusError("term index " + std::to_string(term) + " exceeds V=" +
                            std::to_string(vocab_size),
                        ln);
    }
    if (count > 0) counts[doc - 1][static_cast<TermId>(term - 1)] += count;
  }

  LabeledCorpus corpus;
  corpus.vocab = make_vocab(options, vocab_size);
  corpus.docs.reserve(num_docs);
  for (std::size_t d = 0; d < num_docs; ++d) {
    corpus.docs.push_back({std::to_string(d + 1), expand(counts[d])});
  }

  if (options.labels_path) {
    const auto label_tokens = read_lines(*options.labels_path);
    if (label_tokens.size() != num_docs) {
      throw CorpusError("label file has " + std::to_string(label_tokens.size()) +
                        " entries for " + std::to_string(num_docs) + " documents");
    }
    std::vector<std::size_t> label_lines(label_tokens.size());
    std::iota(label_lines.begin(), label_lines.end(), 1);
    attach_labels(corpus, label_tokens, label_lines, options.labels);
  }
  return corpus;
}

}  // namespace

std::string format_response(const Response& r) {
  return std::visit(
      [](const auto& v) -> std::string {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, BinaryLabel>) {
          return v.sign > 0 ? "+1" : "-1";
        } else if constexpr (std::is_same_v<T, RealScore>) {
          char buf[64];
          auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v.value);
          return std::string(buf, ptr);
        } else if constexpr (std::is_same_v<T, ClassLabel>) {
          return std::to_string(v.index);
        } else {
          std::string s;
          for (std::size_t i = 0; i < v.indices.size(); ++i) {
            if (i) s += ',';
            s += std::to_string(v.indices[i]);
          }
          return s;
        }
      },
      r);
}

Response parse_response(const std::string& token, ResponseKind kind) {
  const std::string_view t(token);
  switch (kind) {
    case ResponseKind::binary:
      if (t == "+1" || t == "1") return BinaryLabel{+1};
      if (t == "-1") return BinaryLabel{-1};
      break;
    case ResponseKind::real: {
      double v = 0;
      if (parse_double(t, v)) return RealScore{v};
      break;
    }
    case ResponseKind::multiclass: {
      int v = 0;
      if (is_nonneg_int(t) && parse_int(t, v)) return ClassLabel{v};
      break;
    }
    case ResponseKind::multilabel: {
      LabelSet set;
      std::size_t start = 0;
      bool ok = !t.empty();
      while (ok && start <= t.size()) {
        const auto comma = t.find(',', start);
        const auto part = t.substr(start, comma == std::string_view::npos ? t.npos : comma - start);
        int v = 0;
        ok = is_nonneg_int(part) && parse_int(part, v);
        if (ok) set.indices.push_back(v);
        if (comma == std::string_view::npos) break;
        start = comma + 1;
      }
      if (ok) {
        std::sort(set.indices.begin(), set.indices.end());
        set.indices.erase(std::unique(set.indices.begin(), set.indices.end()), set.indices.end());
        return set;
      }
      break;
    }
    case ResponseKind::none:
      break;
  }
  throw std::invalid_argument("unknown " + to_string(kind) + " label token '" + token + "'");
}

LabeledCorpus parse_svmlight(std::string_view text, const LoadOptions& options) {
  const auto declared = declared_terms(options);
  std::vector<std::string> label_tokens;
  std::vector<std::size_t> label_lines;
  std::vector<std::map<TermId, std::int64_t>> counts;
  std::size_t max_term = 0;
  bool any_term = false;

  std::size_t lineno = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const auto nl = text.find('\n', pos);
    auto line = text.substr(pos, nl == std::string_view::npos ? text.npos : nl - pos);
    pos = nl == std::string_view::npos ? text.size() + 1 : nl + 1;
    ++lineno;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    const auto fields = split_ws(trim(line));
    if (fields.empty()) continue;

    label_tokens.emplace_back(fields[0]);
    label_lines.push_back(lineno);
    auto& doc = counts.emplace_back();
    for (std::size_t i = 1; i < fields.size(); ++i) {
      const auto f = fields[i];
      const auto colon = f.find(':');
      std::size_t term = 0;
      std::int64_t count = 0;
      if (colon == std::string_view::npos || !parse_int(f.substr(0, colon), term) ||
          !parse_int(f.substr(colon + 1), count) || count < 0 || f.front() == '-') {
        throw CorpusError("malformed feature '" + std::string(f) + "'", lineno);
      }
      if (declared && term >= *declared) {
        throw CorpusError("term index " + std::to_string(term) + " exceeds V=" +
                              std::to_string(*declared),
                          lineno);
      }
      if (count > 0) doc[static_cast<TermId>(term)] += count;
      max_term = std::max(max_term, term);
      any_term = true;
    }
  }
  if (counts.empty() && !options.allow_empty) throw CorpusError("no documents");

  LabeledCorpus corpus;
  corpus.vocab = make_vocab(options, any_term ? max_term + 1 : 0);
  corpus.docs.reserve(counts.size());
  for (std::size_t d = 0; d < counts.size(); ++d) {
    corpus.docs.push_back({std::to_string(d), expand(counts[d])});
  }
  attach_labels(corpus, label_tokens, label_lines, options.labels);
  return corpus;
}

LabeledCorpus load_bow(const std::filesystem::path& path, BowFormat format,
                       const LoadOptions& options) {
  if (format == BowFormat::uci_bow) return load_uci(path, options);
  if (options.labels_path) throw CorpusError("labels_path applies to uci-bow only");
  return parse_svmlight(read_file(path), options);
}

std::string format_svmlight(const LabeledCorpus& corpus) {
  std::string out;
  for (std::size_t d = 0; d < corpus.num_docs(); ++d) {
    out += corpus.responses.empty() ? "0" : format_response(corpus.responses[d]);
    std::map<TermId, std::int64_t> counts;
    for (TermId t : corpus.docs[d].tokens) ++counts[t];
    for (const auto& [t, n] : counts) {
      out += ' ';
      out += std::to_string(t);
      out += ':';
      out += std::to_string(n);
    }
    out += '\n';
  }
  return out;
}

void save_svmlight(const LabeledCorpus& corpus, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw CorpusError("cannot write '" + path.string() + "'");
  out << format_svmlight(corpus);
  if (!out) throw CorpusError("write failed for '" + path.string() + "'");
}

std::pair<LabeledCorpus, LabeledCorpus> train_test_split(const LabeledCorpus& corpus,
                                                         double test_fraction,
                                                         std::uint64_t seed) {
  if (!(test_fraction > 0.0 && test_fraction < 1.0)) {
    throw std::invalid_argument("test_fraction must lie in (0, 1)");
  }
  const std::size_t n = corpus.num_docs();
  if (n < 2) throw std::invalid_argument("train_test_split needs at least 2 documents");

  auto n_test = static_cast<std::size_t>(std::ceil(test_fraction * static_cast<double>(n)));
  n_test = std::clamp<std::size_t>(n_test, 1, n - 1);

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  Rng rng(seed);
  std::shuffle(order.begin(), order.end(), rng.engine());

  std::vector<std::size_t> test(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(n_test));
  std::vector<std::size_t> train(order.begin() + static_cast<std::ptrdiff_t>(n_test), order.end());
  std::sort(test.begin(), test.end());
  std::sort(train.begin(), train.end());
  return {corpus.subset(train), corpus.subset(test)};
}

ValidationReport validate(const LabeledCorpus& corpus) {
  ValidationReport report;
  const auto vocab = static_cast<std::int64_t>(corpus.num_terms());
  for (const auto& doc : corpus.docs) {
    if (doc.empty()) report.empty_docs.push_back(doc.id);
    for (std::size_t n = 0; n < doc.tokens.size(); ++n) {
      const TermId t = doc.tokens[n];
      if (t < 0 || t >= vocab) report.out_of_range.push_back({doc.id, n, t});
    }
  }
  if (!corpus.responses.empty() && corpus.responses.size() != corpus.docs.size()) {
    report.label_issues.push_back("corpus has " + std::to_string(corpus.responses.size()) +
                                  " responses for " + std::to_string(corpus.docs.size()) +
                                  " documents");
  }
  for (std::size_t d = 0; d < corpus.responses.size(); ++d) {
    const auto k = kind_of(corpus.responses[d]);
    const std::string id = d < corpus.docs.size() ? corpus.docs[d].id : std::to_string(d);
    if (k != corpus.kind) {
      report.label_issues.push_back("document " + id + " has a " + to_string(k) +
                                    " response in a " + to_string(corpus.kind) + " corpus");
    } else if (const auto* b = std::get_if<BinaryLabel>(&corpus.responses[d]);
               b && b->sign != 1 && b->sign != -1) {
      report.label_issues.push_back("document " + id + " has binary label " +
                                    std::to_string(b->sign));
    }
  }
  return report;
}

}  // namespace medlda

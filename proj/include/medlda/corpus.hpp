#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

namespace medlda {

using TermId = std::int32_t;

// Thrown for unreadable or malformed corpus files. line() is 1-based, 0 when
// the problem is not tied to a particular line.
class CorpusError : public std::runtime_error {
 public:
  CorpusError(const std::string& what, std::size_t line = 0);
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

struct VocabMap {
  std::vector<std::string> terms;

  std::size_t size() const { return terms.size(); }

  // Terms named by their decimal index; used when no vocabulary file exists.
  static VocabMap numbered(std::size_t size);
};

struct Document {
  std::string id;
  std::vector<TermId> tokens;

  std::size_t length() const { return tokens.size(); }
  bool empty() const { return tokens.empty(); }
};

struct BinaryLabel {
  int sign = 1;  // -1 or +1
  friend bool operator==(const BinaryLabel&, const BinaryLabel&) = default;
};
struct RealScore {
  double value = 0.0;
  friend bool operator==(const RealScore&, const RealScore&) = default;
};
struct ClassLabel {
  int index = 0;
  friend bool operator==(const ClassLabel&, const ClassLabel&) = default;
};
struct LabelSet {
  std::vector<int> indices;  // sorted, unique
  friend bool operator==(const LabelSet&, const LabelSet&) = default;
};

using Response = std::variant<BinaryLabel, RealScore, ClassLabel, LabelSet>;

enum class ResponseKind { none, binary, real, multiclass, multilabel };

ResponseKind kind_of(const Response& r);
std::string to_string(ResponseKind kind);
ResponseKind parse_response_kind(const std::string& name);

struct LabeledCorpus {
  VocabMap vocab;
  std::vector<Document> docs;
  // Either empty (unlabeled corpus, kind == none) or one entry per document.
  std::vector<Response> responses;
  ResponseKind kind = ResponseKind::none;

  std::size_t num_docs() const { return docs.size(); }
  std::size_t num_terms() const { return vocab.size(); }
  std::size_t total_tokens() const;

  // Response accessors; throw std::logic_error on a kind mismatch.
  std::vector<double> binary_labels() const;
  std::vector<double> real_scores() const;
  std::vector<int> class_labels() const;
  std::vector<std::vector<int>> label_sets() const;
  // Largest category index + 1 over multiclass or multilabel responses.
  int num_categories() const;

  LabeledCorpus subset(const std::vector<std::size_t>& doc_indices) const;
};

enum class BowFormat { svmlight_counts, uci_bow };

BowFormat parse_bow_format(const std::string& name);

struct LoadOptions {
  // Expected label type. `none` means infer: "+1"/"-1" only -> binary, any
  // comma -> multilabel, non-negative integers -> multiclass, else real.
  ResponseKind labels = ResponseKind::none;
  // Declared vocabulary size; indices at or beyond it are rejected. When
  // absent, svmlight uses max index + 1 and uci-bow uses its V header.
  std::optional<std::size_t> num_terms;
  // uci-bow only: optional side file with one label token per document.
  std::optional<std::filesystem::path> labels_path;
  // Optional vocabulary file, one term per line.
  std::optional<std::filesystem::path> vocab_path;
  // Return an empty corpus instead of failing with "no documents".
  bool allow_empty = false;
};

// Loads a sparse bag-of-words corpus. Duplicate (doc, term) entries are summed.
LabeledCorpus load_bow(const std::filesystem::path& path, BowFormat format,
                       const LoadOptions& options = {});

// Parses svmlight-counts text directly (the `path` overload reads the file).
LabeledCorpus parse_svmlight(std::string_view text, const LoadOptions& options = {});

// Writes `<label> <term>:<count> ...` lines, terms ascending.
void save_svmlight(const LabeledCorpus& corpus, const std::filesystem::path& path);
std::string format_svmlight(const LabeledCorpus& corpus);

std::string format_response(const Response& r);
Response parse_response(const std::string& token, ResponseKind kind);

// Random disjoint partition. The test part holds ceil(test_fraction * D)
// documents, clamped to [1, D-1]; both parts keep the original document order.
std::pair<LabeledCorpus, LabeledCorpus> train_test_split(const LabeledCorpus& corpus,
                                                         double test_fraction,
                                                         std::uint64_t seed);

struct ValidationReport {
  struct OutOfRange {
    std::string doc_id;
    std::size_t position;
    TermId term;
  };
  std::vector<std::string> empty_docs;
  std::vector<OutOfRange> out_of_range;
  std::vector<std::string> label_issues;

  bool clean() const {
    return empty_docs.empty() && out_of_range.empty() && label_issues.empty();
  }
};

ValidationReport validate(const LabeledCorpus& corpus);

}  // namespace medlda

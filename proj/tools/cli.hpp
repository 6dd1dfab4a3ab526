#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace medlda::cli {

// Runs the medlda command line with `args` (excluding the program name).
// Returns the process exit status: 0 success, 1 runtime failure, 2 usage,
// configuration or input-data error.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

struct BenchOptions {
  std::vector<std::size_t> sizes{500, 1000, 2000};  // documents per scaling row
  int topics = 20;
  int iterations = 5;  // timed Gibbs iterations per row
  int tasks = 8;       // one-vs-all categories
  std::size_t ova_docs = 400;
  std::vector<int> workers{1, 8};
  std::uint64_t seed = 1;
};

struct BenchRow {
  std::string section;  // "scaling" or "ova"
  std::size_t docs = 0;
  std::size_t tokens = 0;
  int topics = 0;
  int tasks = 0;
  int workers = 0;
  double seconds = 0.0;  // per iteration (scaling) or wall time (ova)
};

// Scaling rows time the binary trainer's per-iteration cost (median over the
// timed iterations); ova rows time one-vs-all training end to end.
std::vector<BenchRow> run_bench(const BenchOptions& options);
std::string format_bench(const std::vector<BenchRow>& rows);

}  // namespace medlda::cli

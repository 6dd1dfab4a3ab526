#pragma once

#include <cstdint>
#include <random>

namespace medlda {

// Seeded generator with derivable child streams.
//
// Each Rng carries a 64-bit key. The root key is splitmix64(seed); a child
// stream's key is splitmix64(parent_key ^ splitmix64(stream + 0x9e3779b97f4a7c15)).
// The key seeds a std::mt19937_64 through std::seed_seq, so the sequence for a
// given (seed, stream path) is fixed on a given standard library. Children
// never share state with the parent, which is what lets parallel tasks reuse
// the same seed without coordination.
class Rng {
 public:
  explicit Rng(std::uint64_t seed);

  Rng child(std::uint64_t stream) const;

  std::uint64_t key() const { return key_; }

  // Uniform on [0, 1).
  double uniform();
  // Uniform on (0, 1).
  double uniform_open();
  double normal();
  // Uniform integer on [0, n).
  std::size_t index(std::size_t n);

  std::mt19937_64& engine() { return engine_; }

 private:
  struct FromKey {};
  Rng(FromKey, std::uint64_t key);

  std::uint64_t key_;
  std::mt19937_64 engine_;
  std::uniform_real_distribution<double> uniform_{0.0, 1.0};
  std::normal_distribution<double> normal_{0.0, 1.0};
};

std::uint64_t splitmix64(std::uint64_t x);

}  // namespace medlda

#include "medlda/random.hpp"

namespace medlda {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

namespace {

std::mt19937_64 engine_from_key(std::uint64_t key) {
  std::seed_seq seq{static_cast<std::uint32_t>(key), static_cast<std::uint32_t>(key >> 32)};
  return std::mt19937_64(seq);
}

}  // namespace

Rng::Rng(std::uint64_t seed) : Rng(FromKey{}, splitmix64(seed)) {}

Rng::Rng(FromKey, std::uint64_t key) : key_(key), engine_(engine_from_key(key)) {}

Rng Rng::child(std::uint64_t stream) const {
  return Rng(FromKey{}, splitmix64(key_ ^ splitmix64(stream + 0x9e3779b97f4a7c15ULL)));
}

double Rng::uniform() { return uniform_(engine_); }

double Rng::uniform_open() {
  double u = 0.0;
  while (u == 0.0) u = uniform_(engine_);
  return u;
}

double Rng::normal() { return normal_(engine_); }

std::size_t Rng::index(std::size_t n) {
  std::uniform_int_distribution<std::size_t> dist(0, n - 1);
  return dist(engine_);
}

}  // namespace medlda

#pragma once

#include <cstdint>
#include <random>

namespace partgan {

// splitmix64 step; also the mixing primitive behind derive_seed.
inline std::uint64_t splitmix64(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

// Derives a per-stream seed from a base seed. Distinct stream ids give
// distinct streams; collision-free for stream_id < 2^32.
inline std::uint64_t derive_seed(std::uint64_t base_seed, std::uint64_t stream_id) {
  std::uint64_t s = base_seed;
  std::uint64_t a = splitmix64(s);
  s = a ^ (stream_id * 0x9e3779b97f4a7c15ULL + 0x2545f4914f6cdd1dULL);
  return splitmix64(s);
}

// Owned random stream. Every consumer (worker, sampler, initializer) holds
// its own Rng; nothing is ever shared across threads.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  double normal() { return normal_(engine_); }
  double uniform() { return uniform_(engine_); }  // [0, 1)

  // uniform integer in [0, n), n >= 1
  std::size_t index(std::size_t n) {
    std::uniform_int_distribution<std::size_t> d(0, n - 1);
    return d(engine_);
  }

  std::mt19937_64& engine() { return engine_; }

 private:
  std::mt19937_64 engine_;
  std::normal_distribution<double> normal_{0.0, 1.0};
  std::uniform_real_distribution<double> uniform_{0.0, 1.0};
};

}  // namespace partgan

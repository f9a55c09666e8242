#pragma once

#include <cstdint>
#include <random>

namespace gigmatch {

// Per-replication random stream: std::mt19937_64 seeded through std::seed_seq
// with the 32-bit halves of (master seed, stream index). Streams are pure
// functions of that pair, so replications can run in any order or thread.
class Stream {
 public:
  Stream(std::uint64_t master_seed, std::uint64_t index) {
    std::seed_seq seq{static_cast<std::uint32_t>(master_seed), static_cast<std::uint32_t>(master_seed >> 32),
                      static_cast<std::uint32_t>(index), static_cast<std::uint32_t>(index >> 32)};
    engine_.seed(seq);
  }

  // Uniform in [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  std::mt19937_64& engine() { return engine_; }

 private:
  std::mt19937_64 engine_;
};

}  // namespace gigmatch

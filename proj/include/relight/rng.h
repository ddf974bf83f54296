// Counter-based random stream: value i of stream (seed, key) is a pure hash
// of (seed, key, i), so streams never share state.
#pragma once

#include <cstdint>

namespace relight {

constexpr uint64_t mix64(uint64_t x) {
  x += 0x9e3779b97f4a7c15ull;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
  return x ^ (x >> 31);
}

class CounterRng {
 public:
  constexpr CounterRng(uint64_t seed, uint64_t key = 0)
      : base_(mix64(seed ^ mix64(key + 0x632be59bd9b4e019ull))) {}

  constexpr uint64_t next_u64() { return mix64(base_ + mix64(counter_++)); }

  // Uniform in [0, 1).
  constexpr double uniform() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }
  constexpr double uniform(double lo, double hi) {
    return lo + (hi - lo) * uniform();
  }
  // Uniform integer in [lo, hi].
  constexpr int uniform_int(int lo, int hi) {
    const uint64_t span = static_cast<uint64_t>(hi - lo) + 1;
    return lo + static_cast<int>(next_u64() % span);
  }

 private:
  uint64_t base_;
  uint64_t counter_ = 0;
};

}  // namespace relight

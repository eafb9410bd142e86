#pragma once
#include <cstdint>
#include <random>

namespace newsgame {

// splitmix64; used only to derive task seeds.
inline uint64_t splitmix64(uint64_t& state) {
  uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

// Deterministic seed derivation: task i of a run with master seed s always
// receives mix_seed(s, i), no matter how tasks are scheduled across workers.
inline uint64_t mix_seed(uint64_t master, uint64_t index) {
  uint64_t s = master;
  uint64_t h = splitmix64(s);
  s = h ^ (index + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2));
  return splitmix64(s);
}

// mt19937_64 wrapped with explicit uint->double conversion so draws do not
// depend on the standard library's distribution internals (those are
// implementation-defined; this keeps output reproducible across toolchains).
class Rng {
 public:
  explicit Rng(uint64_t seed) : eng_(seed) {}

  uint64_t next_u64() { return eng_(); }

  // uniform in [0, 1), 53-bit resolution
  double uniform() { return (eng_() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  bool bernoulli(double p) { return uniform() < p; }

  // unbiased integer in [0, n), n >= 1
  uint64_t below(uint64_t n) {
    uint64_t x, r;
    do {
      x = eng_();
      r = x % n;
    } while (x - r > uint64_t(0) - n);
    return r;
  }

 private:
  std::mt19937_64 eng_;
};

}  // namespace newsgame

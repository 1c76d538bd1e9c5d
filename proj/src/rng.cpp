#include "hybridavg/rng.hpp"

#include <cmath>

namespace hybridavg {

namespace {

constexpr std::uint64_t kGolden = 0x9e3779b97f4a7c15ULL;

constexpr std::uint64_t rotl(std::uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }

}  // namespace

std::uint64_t mix64(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

std::uint64_t stream_seed(std::uint64_t master, std::initializer_list<std::uint64_t> path) {
  std::uint64_t h = mix64(master + kGolden);
  for (std::uint64_t p : path) h = mix64(h ^ mix64(p + kGolden));
  return h;
}

Rng::Rng(std::uint64_t seed) {
  std::uint64_t z = seed;
  for (auto& w : s_) {
    z += kGolden;
    w = mix64(z);
  }
}

Rng::result_type Rng::operator()() {
  const std::uint64_t result = rotl(s_[1] * 5, 7) * 9;
  const std::uint64_t t = s_[1] << 17;
  s_[2] ^= s_[0];
  s_[3] ^= s_[1];
  s_[1] ^= s_[2];
  s_[0] ^= s_[3];
  s_[2] ^= t;
  s_[3] = rotl(s_[3], 45);
  return result;
}

double Rng::uniform() { return static_cast<double>((*this)() >> 11) * 0x1.0p-53; }

double Rng::exponential() {
  // 1 - u lies in (0, 1], so the log is finite; reject the exact zero draw.
  double e = 0.0;
  while (e == 0.0) e = -std::log1p(-uniform());
  return e;
}

}  // namespace hybridavg

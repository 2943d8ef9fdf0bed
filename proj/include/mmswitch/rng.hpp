#pragma once

#include <array>
#include <cmath>
#include <cstdint>

namespace mmswitch {

// Philox4x32-10 counter-based generator. Streams are cheap: a (seed, stream)
// pair addresses an independent sequence, which is what the simulator uses to
// give every sample path its own substream.
class Philox {
 public:
  explicit Philox(uint64_t seed, uint64_t stream = 0)
      : key_(seed), stream_(stream), block_(0), sub_(4) {}

  static std::array<uint32_t, 4> block(uint64_t key, uint64_t ctr_lo, uint64_t ctr_hi) {
    uint32_t c0 = static_cast<uint32_t>(ctr_lo);
    uint32_t c1 = static_cast<uint32_t>(ctr_lo >> 32);
    uint32_t c2 = static_cast<uint32_t>(ctr_hi);
    uint32_t c3 = static_cast<uint32_t>(ctr_hi >> 32);
    uint32_t k0 = static_cast<uint32_t>(key);
    uint32_t k1 = static_cast<uint32_t>(key >> 32);
    for (int r = 0; r < 10; ++r) {
      if (r > 0) {
        k0 += 0x9E3779B9u;
        k1 += 0xBB67AE85u;
      }
      const uint64_t p0 = static_cast<uint64_t>(0xD2511F53u) * c0;
      const uint64_t p1 = static_cast<uint64_t>(0xCD9E8D57u) * c2;
      const uint32_t hi0 = static_cast<uint32_t>(p0 >> 32), lo0 = static_cast<uint32_t>(p0);
      const uint32_t hi1 = static_cast<uint32_t>(p1 >> 32), lo1 = static_cast<uint32_t>(p1);
      const uint32_t n0 = hi1 ^ c1 ^ k0;
      const uint32_t n1 = lo1;
      const uint32_t n2 = hi0 ^ c3 ^ k1;
      const uint32_t n3 = lo0;
      c0 = n0;
      c1 = n1;
      c2 = n2;
      c3 = n3;
    }
    return {c0, c1, c2, c3};
  }

  uint32_t next_u32() {
    if (sub_ == 4) {
      out_ = block(key_, block_++, stream_);
      sub_ = 0;
    }
    return out_[sub_++];
  }

  uint64_t next_u64() {
    const uint64_t lo = next_u32();
    const uint64_t hi = next_u32();
    return lo | (hi << 32);
  }

  // Uniform on [0, 1).
  double next_double() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  // Uniform on (0, 1): 52 random bits centered in the cell, never 0 or 1.
  double next_double_open() {
    return (static_cast<double>(next_u64() >> 12) + 0.5) * 0x1.0p-52;
  }

  double next_exponential(double rate) { return -std::log(next_double_open()) / rate; }

  // Index in [0, n) with probabilities p (assumed to sum to ~1).
  int next_categorical(const double* p, int n) {
    const double u = next_double();
    double cum = 0.0;
    for (int i = 0; i < n; ++i) {
      cum += p[i];
      if (u < cum) return i;
    }
    return n - 1;
  }

 private:
  uint64_t key_;
  uint64_t stream_;
  uint64_t block_;
  int sub_;
  std::array<uint32_t, 4> out_{};
};

}  // namespace mmswitch

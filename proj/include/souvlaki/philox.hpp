#pragma once

#include <array>
#include <cstdint>

namespace souvlaki {

/// Philox4x64-10 counter-based generator (Salmon et al. 2011). Output for a
/// given key matches numpy.random.Philox: the counter is bumped before each
/// block, so the first block uses counter 1.
class Philox4x64 {
 public:
  using result_type = std::uint64_t;
  using Block = std::array<std::uint64_t, 4>;

  explicit Philox4x64(std::uint64_t k0 = 0, std::uint64_t k1 = 0) : key_{k0, k1} {}

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return ~std::uint64_t{0}; }

  static Block block(Block ctr, std::array<std::uint64_t, 2> key) {
    for (int round = 0; round < 10; ++round) {
      std::uint64_t hi0, lo0, hi1, lo1;
      mul(kM0, ctr[0], hi0, lo0);
      mul(kM1, ctr[2], hi1, lo1);
      ctr = {hi1 ^ ctr[1] ^ key[0], lo1, hi0 ^ ctr[3] ^ key[1], lo0};
      key[0] += kW0;
      key[1] += kW1;
    }
    return ctr;
  }

  result_type operator()() {
    if (used_ == 4) {
      for (auto& c : ctr_)
        if (++c != 0) break;
      buf_ = block(ctr_, key_);
      used_ = 0;
    }
    return buf_[used_++];
  }

  /// Uniform double in [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>((*this)() >> 11) * 0x1.0p-53; }

 private:
  static constexpr std::uint64_t kM0 = 0xD2E7470EE14C6C93ULL, kM1 = 0xCA5A826395121157ULL;
  static constexpr std::uint64_t kW0 = 0x9E3779B97F4A7C15ULL, kW1 = 0xBB67AE8584CAA73BULL;

  static void mul(std::uint64_t a, std::uint64_t b, std::uint64_t& hi, std::uint64_t& lo) {
    unsigned __int128 p = static_cast<unsigned __int128>(a) * b;
    hi = static_cast<std::uint64_t>(p >> 64);
    lo = static_cast<std::uint64_t>(p);
  }

  std::array<std::uint64_t, 2> key_;
  Block ctr_{0, 0, 0, 0};
  Block buf_{};
  int used_ = 4;
};

/// Independent stream of one Monte-Carlo trial.
inline Philox4x64 trial_stream(std::uint64_t seed, std::uint64_t trial) { return Philox4x64(seed, trial); }

}  // namespace souvlaki

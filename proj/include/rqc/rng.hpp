#pragma once
// Counter-based random number generation: Philox4x32-10 keyed by seed with
// a (block, trial, matrix) counter layout, so every trial and every matrix
// draw is an independent stream regardless of thread scheduling.

#include <array>
#include <cmath>
#include <complex>
#include <cstdint>

namespace rqc {

namespace detail {

inline void philox_round(std::array<std::uint32_t, 4>& c, std::uint32_t k0,
                         std::uint32_t k1) {
  constexpr std::uint64_t M0 = 0xD2511F53ULL;
  constexpr std::uint64_t M1 = 0xCD9E8D57ULL;
  std::uint64_t p0 = M0 * c[0];
  std::uint64_t p1 = M1 * c[2];
  std::uint32_t hi0 = static_cast<std::uint32_t>(p0 >> 32);
  std::uint32_t lo0 = static_cast<std::uint32_t>(p0);
  std::uint32_t hi1 = static_cast<std::uint32_t>(p1 >> 32);
  std::uint32_t lo1 = static_cast<std::uint32_t>(p1);
  c = {hi1 ^ c[1] ^ k0, lo1, hi0 ^ c[3] ^ k1, lo0};
}

}  // namespace detail

// ten-round Philox block cipher applied to one 128-bit counter
inline std::array<std::uint32_t, 4> philox4x32_10(
    std::array<std::uint32_t, 4> counter, std::uint32_t key0,
    std::uint32_t key1) {
  constexpr std::uint32_t W0 = 0x9E3779B9u;
  constexpr std::uint32_t W1 = 0xBB67AE85u;
  for (int r = 0; r < 10; ++r) {
    detail::philox_round(counter, key0, key1);
    key0 += W0;
    key1 += W1;
  }
  return counter;
}

// one stream of uniforms/normals, addressed by (seed, trial, matrix)
class rng_stream {
 public:
  rng_stream(std::uint64_t seed, std::uint32_t trial = 0,
             std::uint32_t matrix = 0)
      : key0_(static_cast<std::uint32_t>(seed)),
        key1_(static_cast<std::uint32_t>(seed >> 32)),
        trial_(trial),
        matrix_(matrix) {}

  std::uint32_t next_u32() {
    if (pos_ == 4) {
      buf_ = philox4x32_10({static_cast<std::uint32_t>(block_),
                            static_cast<std::uint32_t>(block_ >> 32), trial_,
                            matrix_},
                           key0_, key1_);
      ++block_;
      pos_ = 0;
    }
    return buf_[pos_++];
  }

  std::uint64_t next_u64() {
    std::uint64_t hi = next_u32();
    return (hi << 32) | next_u32();
  }

  // uniform on (0, 1]: 53-bit mantissa, never exactly zero
  double uniform() {
    std::uint64_t v = next_u64() >> 11;
    return (static_cast<double>(v) + 1.0) * 0x1p-53;
  }

  // standard real normal via Box-Muller, pairs cached
  double normal() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    double u1 = uniform();
    double u2 = uniform();
    double r = std::sqrt(-2.0 * std::log(u1));
    double a = 2.0 * M_PI * u2;
    spare_ = r * std::sin(a);
    have_spare_ = true;
    return r * std::cos(a);
  }

  // standard complex normal with E|z|^2 = 1
  std::complex<double> complex_normal() {
    double u1 = uniform();
    double u2 = uniform();
    double r = std::sqrt(-std::log(u1));  // includes the 1/sqrt(2) scale
    double a = 2.0 * M_PI * u2;
    return {r * std::cos(a), r * std::sin(a)};
  }

 private:
  std::uint32_t key0_, key1_, trial_, matrix_;
  std::uint64_t block_ = 0;
  std::array<std::uint32_t, 4> buf_{};
  int pos_ = 4;
  double spare_ = 0;
  bool have_spare_ = false;
};

}  // namespace rqc

#pragma once

#include <array>
#include <cstdint>

namespace rwre {

// Philox4x32-10 counter-based block cipher, used as the keyed pseudo-random
// function behind environment generation and walk decision streams.
struct Block {
  std::array<std::uint32_t, 4> w{};

  friend bool operator==(const Block& a, const Block& b) { return a.w == b.w; }
};

namespace detail {

inline constexpr std::uint32_t kPhiloxM0 = 0xD2511F53u;
inline constexpr std::uint32_t kPhiloxM1 = 0xCD9E8D57u;
inline constexpr std::uint32_t kWeyl0 = 0x9E3779B9u;
inline constexpr std::uint32_t kWeyl1 = 0xBB67AE85u;

inline void mulhilo(std::uint32_t a, std::uint32_t b, std::uint32_t& hi, std::uint32_t& lo) {
  const std::uint64_t p = static_cast<std::uint64_t>(a) * b;
  hi = static_cast<std::uint32_t>(p >> 32);
  lo = static_cast<std::uint32_t>(p);
}

inline Block philox_round(const Block& c, std::uint32_t k0, std::uint32_t k1) {
  std::uint32_t hi0, lo0, hi1, lo1;
  mulhilo(kPhiloxM0, c.w[0], hi0, lo0);
  mulhilo(kPhiloxM1, c.w[2], hi1, lo1);
  return Block{{hi1 ^ c.w[1] ^ k0, lo1, hi0 ^ c.w[3] ^ k1, lo0}};
}

}  // namespace detail

inline Block philox4x32(Block counter, std::uint64_t key) {
  std::uint32_t k0 = static_cast<std::uint32_t>(key);
  std::uint32_t k1 = static_cast<std::uint32_t>(key >> 32);
  for (int round = 0; round < 10; ++round) {
    counter = detail::philox_round(counter, k0, k1);
    k0 += detail::kWeyl0;
    k1 += detail::kWeyl1;
  }
  return counter;
}

// Keyed PRF over fixed-width word messages: the message is split into 128-bit
// blocks which are chained through the cipher (encrypt(state XOR block)),
// starting from a fixed IV. The master seed is the cipher key, so the entire
// family of values is a pure function of (seed, message words).
class KeyedPrf {
 public:
  explicit KeyedPrf(std::uint64_t seed) : seed_(seed) {}

  static Block iv() { return Block{{0x243F6A88u, 0x85A308D3u, 0x13198A2Eu, 0x03707344u}}; }

  static Block pack(std::uint64_t a, std::uint64_t b) {
    return Block{{static_cast<std::uint32_t>(a), static_cast<std::uint32_t>(a >> 32),
                  static_cast<std::uint32_t>(b), static_cast<std::uint32_t>(b >> 32)}};
  }

  Block absorb(const Block& state, const Block& block) const {
    Block x{{state.w[0] ^ block.w[0], state.w[1] ^ block.w[1], state.w[2] ^ block.w[2],
             state.w[3] ^ block.w[3]}};
    return philox4x32(x, seed_);
  }

  std::uint64_t seed() const { return seed_; }

 private:
  std::uint64_t seed_;
};

inline std::uint64_t low64(const Block& b) {
  return static_cast<std::uint64_t>(b.w[0]) | (static_cast<std::uint64_t>(b.w[1]) << 32);
}

inline std::uint64_t high64(const Block& b) {
  return static_cast<std::uint64_t>(b.w[2]) | (static_cast<std::uint64_t>(b.w[3]) << 32);
}

// Uniform double in [0, 1) from the top 53 bits.
inline double to_unit_interval(std::uint64_t r) {
  return static_cast<double>(r >> 11) * 0x1.0p-53;
}

}  // namespace rwre

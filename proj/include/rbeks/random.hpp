#pragma once

#include <array>
#include <cstdint>
#include <span>

namespace rbeks {

// Entropy is always injected. Protocol code never reaches for a global RNG so
// that seeded runs are reproducible end to end.
class RandomSource {
 public:
  virtual ~RandomSource() = default;
  virtual void fill(std::span<std::uint8_t> out) = 0;

  std::uint64_t next_u64();
  // Uniform in [0, bound). bound must be nonzero.
  std::uint64_t uniform(std::uint64_t bound);
};

// Operating-system entropy (libsodium randombytes).
class SystemRandom final : public RandomSource {
 public:
  void fill(std::span<std::uint8_t> out) override;
};

// ChaCha20 keystream keyed by a 32-byte seed. Deterministic and cheap to fork.
class SeededRandom final : public RandomSource {
 public:
  explicit SeededRandom(std::uint64_t seed);
  explicit SeededRandom(const std::array<std::uint8_t, 32>& key);

  void fill(std::span<std::uint8_t> out) override;

  // Independent child stream; does not advance this stream.
  SeededRandom fork(std::uint64_t label) const;

 private:
  std::array<std::uint8_t, 32> key_{};
  std::uint64_t block_ = 0;
  std::array<std::uint8_t, 64> buffer_{};
  std::size_t buffered_ = 0;
};

}  // namespace rbeks

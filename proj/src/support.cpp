#include <sodium.h>

#include <stdexcept>

#include "rbeks/bytes.hpp"
#include "rbeks/error.hpp"
#include "rbeks/op_counter.hpp"
#include "rbeks/random.hpp"

namespace rbeks {

std::string_view errc_name(Errc code) {
  switch (code) {
    case Errc::kUnsupportedSecurityLevel: return "UnsupportedSecurityLevel";
    case Errc::kInvalidEncoding: return "InvalidEncoding";
    case Errc::kContextMismatch: return "ContextMismatch";
    case Errc::kCycleDetected: return "CycleDetected";
    case Errc::kMultipleRoots: return "MultipleRoots";
    case Errc::kUnreachableRole: return "UnreachableRole";
    case Errc::kUnknownRole: return "UnknownRole";
    case Errc::kUnknownUser: return "UnknownUser";
    case Errc::kRootRoleNotRevocable: return "RootRoleNotRevocable";
    case Errc::kMismatchedRoundData: return "MismatchedRoundData";
    case Errc::kEmptyPolicy: return "EmptyPolicy";
    case Errc::kMissingRolePK: return "MissingRolePK";
    case Errc::kMissingCloudKey: return "MissingCloudKey";
    case Errc::kEmptyRoleSet: return "EmptyRoleSet";
    case Errc::kEmptyKeywords: return "EmptyKeywords";
    case Errc::kAuthenticationFailure: return "AuthenticationFailure";
    case Errc::kInvalidArgument: return "InvalidArgument";
    case Errc::kScenarioInvalid: return "ScenarioInvalid";
    case Errc::kExpectationFailed: return "ExpectationFailed";
    case Errc::kIo: return "Io";
  }
  return "Unknown";
}

namespace detail {
OpCounts& thread_op_counts() {
  static thread_local OpCounts counts;
  return counts;
}
}  // namespace detail

// ---------------------------------------------------------------- bytes

std::string to_hex(ByteView data) {
  static constexpr char kDigits[] = "0123456789abcdef";
  std::string out;
  out.reserve(data.size() * 2);
  for (std::uint8_t b : data) {
    out.push_back(kDigits[b >> 4]);
    out.push_back(kDigits[b & 0xf]);
  }
  return out;
}

Bytes from_hex(std::string_view hex) {
  if (hex.size() % 2 != 0) {
    throw Error(Errc::kInvalidEncoding, "hex string has odd length");
  }
  auto nibble = [](char c) -> int {
    if (c >= '0' && c <= '9') return c - '0';
    if (c >= 'a' && c <= 'f') return c - 'a' + 10;
    if (c >= 'A' && c <= 'F') return c - 'A' + 10;
    throw Error(Errc::kInvalidEncoding, "invalid hex digit");
  };
  Bytes out(hex.size() / 2);
  for (std::size_t i = 0; i < out.size(); ++i) {
    out[i] = static_cast<std::uint8_t>(nibble(hex[2 * i]) << 4 |
                                       nibble(hex[2 * i + 1]));
  }
  return out;
}

void ByteWriter::u16(std::uint16_t v) {
  u8(static_cast<std::uint8_t>(v >> 8));
  u8(static_cast<std::uint8_t>(v));
}

void ByteWriter::u32(std::uint32_t v) {
  u16(static_cast<std::uint16_t>(v >> 16));
  u16(static_cast<std::uint16_t>(v));
}

void ByteWriter::u64(std::uint64_t v) {
  u32(static_cast<std::uint32_t>(v >> 32));
  u32(static_cast<std::uint32_t>(v));
}

void ByteWriter::blob(ByteView data) {
  u32(static_cast<std::uint32_t>(data.size()));
  raw(data);
}

ByteView ByteReader::raw(std::size_t n) {
  if (n > remaining()) {
    throw Error(Errc::kInvalidEncoding, "truncated input");
  }
  ByteView out = data_.subspan(pos_, n);
  pos_ += n;
  return out;
}

std::uint8_t ByteReader::u8() { return raw(1)[0]; }

std::uint16_t ByteReader::u16() {
  auto b = raw(2);
  return static_cast<std::uint16_t>(b[0] << 8 | b[1]);
}

std::uint32_t ByteReader::u32() {
  std::uint32_t hi = u16();
  return hi << 16 | u16();
}

std::uint64_t ByteReader::u64() {
  std::uint64_t hi = u32();
  return hi << 32 | u32();
}

ByteView ByteReader::blob() { return raw(u32()); }

std::string ByteReader::str() {
  auto b = blob();
  return {reinterpret_cast<const char*>(b.data()), b.size()};
}

void ByteReader::expect_done() const {
  if (!done()) throw Error(Errc::kInvalidEncoding, "trailing bytes");
}

// --------------------------------------------------------------- random

std::uint64_t RandomSource::next_u64() {
  std::array<std::uint8_t, 8> b{};
  fill(b);
  std::uint64_t v = 0;
  for (auto x : b) v = v << 8 | x;
  return v;
}

std::uint64_t RandomSource::uniform(std::uint64_t bound) {
  if (bound == 0) throw Error(Errc::kInvalidArgument, "uniform(0)");
  const std::uint64_t limit = UINT64_MAX - UINT64_MAX % bound;
  for (;;) {
    std::uint64_t v = next_u64();
    if (v < limit) return v % bound;
  }
}

namespace {
void ensure_sodium() {
  static const bool ok = sodium_init() >= 0;
  if (!ok) throw std::runtime_error("libsodium initialisation failed");
}
}  // namespace

void SystemRandom::fill(std::span<std::uint8_t> out) {
  ensure_sodium();
  randombytes_buf(out.data(), out.size());
}

SeededRandom::SeededRandom(std::uint64_t seed) {
  std::array<std::uint8_t, 8> s{};
  for (int i = 0; i < 8; ++i) s[i] = static_cast<std::uint8_t>(seed >> (56 - 8 * i));
  crypto_generichash(key_.data(), key_.size(), s.data(), s.size(),
                     reinterpret_cast<const unsigned char*>("rbeks-seed"), 10);
}

SeededRandom::SeededRandom(const std::array<std::uint8_t, 32>& key)
    : key_(key) {}

void SeededRandom::fill(std::span<std::uint8_t> out) {
  static constexpr std::array<unsigned char, crypto_stream_chacha20_NONCEBYTES>
      kNonce{};
  std::size_t pos = 0;
  while (pos < out.size()) {
    if (buffered_ == 0) {
      buffer_.fill(0);
      crypto_stream_chacha20_xor_ic(buffer_.data(), buffer_.data(),
                                    buffer_.size(), kNonce.data(), block_++,
                                    key_.data());
      buffered_ = buffer_.size();
    }
    const std::size_t take = std::min(buffered_, out.size() - pos);
    const std::size_t offset = buffer_.size() - buffered_;
    std::copy_n(buffer_.begin() + offset, take, out.begin() + pos);
    buffered_ -= take;
    pos += take;
  }
}

SeededRandom SeededRandom::fork(std::uint64_t label) const {
  std::array<std::uint8_t, 40> material{};
  std::copy(key_.begin(), key_.end(), material.begin());
  for (int i = 0; i < 8; ++i) {
    material[32 + i] = static_cast<std::uint8_t>(label >> (56 - 8 * i));
  }
  std::array<std::uint8_t, 32> child{};
  crypto_generichash(child.data(), child.size(), material.data(),
                     material.size(),
                     reinterpret_cast<const unsigned char*>("rbeks-fork"), 10);
  return SeededRandom(child);
}

}  // namespace rbeks

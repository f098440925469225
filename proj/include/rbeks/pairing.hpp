#pragma once

// Symmetric bilinear group e: G1 x G1 -> GT of prime order q.
//
// The backend is the supersingular curve y^2 = x^3 + x over F_p with
// p = 3 (mod 4) and embedding degree 2. G1 is the order-q subgroup of E(F_p),
// GT the order-q subgroup of F_p2^*, and the pairing is the reduced Tate
// pairing composed with the distortion map (x, y) -> (-x, i*y), which makes it
// symmetric. All group operations are written multiplicatively to match the
// protocol algebra: G1Element::operator* is point addition and pow() is scalar
// multiplication.

#include <cstdint>
#include <gmpxx.h>
#include <string>
#include <string_view>

#include "rbeks/bytes.hpp"
#include "rbeks/random.hpp"

namespace rbeks {

// Identified by the bit length of the group order q.
enum class SecurityLevel : int {
  kOrder160 = 160,  // |p| = 512
  kOrder224 = 224,  // |p| = 1024
  kOrder256 = 256,  // |p| = 1536
};

inline constexpr SecurityLevel kDefaultSecurityLevel = SecurityLevel::kOrder224;

// Throws kUnsupportedSecurityLevel for anything outside the enum.
SecurityLevel security_level_from_bits(int bits);

// Version prefix carried by every canonical encoding.
inline constexpr std::uint16_t kEncodingVersion = 1;

namespace detail {
struct Group;
}

class Scalar;
class G1Element;
class GTElement;

// Element of Z_q.
class Scalar {
 public:
  Scalar() = default;

  const mpz_class& value() const { return value_; }
  bool is_zero() const { return value_ == 0; }

  Scalar operator+(const Scalar& o) const;
  Scalar operator-(const Scalar& o) const;
  Scalar operator*(const Scalar& o) const;
  Scalar operator-() const;
  Scalar& operator+=(const Scalar& o) { return *this = *this + o; }
  Scalar& operator*=(const Scalar& o) { return *this = *this * o; }
  // Throws kInvalidArgument when zero.
  Scalar inverse() const;
  Scalar operator/(const Scalar& o) const { return *this * o.inverse(); }

  bool operator==(const Scalar& o) const;

  // tag 0x01 | version | |q|-byte big-endian value
  Bytes serialize() const;

 private:
  friend class BilinearContext;
  friend class G1Element;
  friend class GTElement;
  Scalar(const detail::Group* group, mpz_class v);

  const detail::Group* group_ = nullptr;
  mpz_class value_;
};

// Element of G1 (written multiplicatively).
class G1Element {
 public:
  G1Element() = default;

  bool is_identity() const { return infinity_; }

  G1Element operator*(const G1Element& o) const;
  G1Element operator/(const G1Element& o) const { return *this * o.inverse(); }
  G1Element inverse() const;
  // Counted as one G1 exponentiation.
  G1Element pow(const Scalar& e) const;

  bool operator==(const G1Element& o) const;

  // tag 0x02 | version | flags (bit0 infinity, bit1 y parity) | x (|p| bytes)
  Bytes serialize() const;

  const mpz_class& x() const { return x_; }
  const mpz_class& y() const { return y_; }

 private:
  friend class BilinearContext;
  friend class GTElement;
  G1Element(const detail::Group* group, mpz_class x, mpz_class y, bool inf);

  const detail::Group* group_ = nullptr;
  mpz_class x_;
  mpz_class y_;
  bool infinity_ = true;
};

// Element of GT, the order-q subgroup of F_p2^* (value a + b*i).
class GTElement {
 public:
  GTElement() = default;

  bool is_identity() const;

  GTElement operator*(const GTElement& o) const;
  GTElement operator/(const GTElement& o) const { return *this * o.inverse(); }
  GTElement inverse() const;
  // Counted as one GT exponentiation.
  GTElement pow(const Scalar& e) const;

  bool operator==(const GTElement& o) const;

  // tag 0x03 | version | a (|p| bytes) | b (|p| bytes)
  Bytes serialize() const;

 private:
  friend class BilinearContext;
  GTElement(const detail::Group* group, mpz_class a, mpz_class b);

  const detail::Group* group_ = nullptr;
  mpz_class a_;
  mpz_class b_;
};

// Shared group stage. Cheap to copy; the underlying parameters are immutable
// and live for the whole process.
class BilinearContext {
 public:
  // Throws kUnsupportedSecurityLevel.
  static BilinearContext setup(SecurityLevel level);
  static BilinearContext setup(int order_bits) {
    return setup(security_level_from_bits(order_bits));
  }

  SecurityLevel level() const;
  const mpz_class& order() const;
  const mpz_class& field_modulus() const;
  std::size_t scalar_size() const;
  std::size_t g1_size() const;
  std::size_t gt_size() const;

  const G1Element& generator() const;
  G1Element g1_identity() const;
  GTElement gt_identity() const;

  // e(a, b); counted as one pairing.
  GTElement pair(const G1Element& a, const G1Element& b) const;

  // H1: {0,1}* -> Z_q^*.
  Scalar hash_h1(ByteView input) const;
  Scalar hash_h1(std::string_view input) const { return hash_h1(as_bytes(input)); }
  // H2: G1 -> Z_q^*, over the canonical encoding.
  Scalar hash_h2(const G1Element& element) const;

  Scalar scalar(std::uint64_t v) const;
  Scalar scalar(const mpz_class& v) const;  // reduced mod q
  Scalar random_scalar(RandomSource& rng) const;  // nonzero
  G1Element random_g1(RandomSource& rng) const;   // g^r; counted
  // Uniform non-identity element of GT, sampled without a GT exponentiation.
  GTElement random_gt(RandomSource& rng) const;

  Scalar decode_scalar(ByteView bytes) const;
  G1Element decode_g1(ByteView bytes) const;
  GTElement decode_gt(ByteView bytes) const;

  bool operator==(const BilinearContext& o) const { return group_ == o.group_; }

 private:
  explicit BilinearContext(const detail::Group* group) : group_(group) {}
  const detail::Group* group_;
};

}  // namespace rbeks

#include "rbeks/pairing.hpp"

#include <sodium.h>

#include <array>
#include <map>
#include <memory>
#include <mutex>
#include <string>

#include "rbeks/error.hpp"
#include "rbeks/op_counter.hpp"
#include "type_a_group.hpp"

namespace rbeks {

namespace {

constexpr std::uint8_t kTagScalar = 0x01;
constexpr std::uint8_t kTagG1 = 0x02;
constexpr std::uint8_t kTagGT = 0x03;

constexpr std::uint8_t kFlagInfinity = 0x01;
constexpr std::uint8_t kFlagOddY = 0x02;

const detail::Group& require(const detail::Group* g) {
  if (g == nullptr) {
    throw Error(Errc::kContextMismatch, "element has no bilinear context");
  }
  return *g;
}

const detail::Group& require_same(const detail::Group* a,
                                  const detail::Group* b) {
  if (a == nullptr || a != b) {
    throw Error(Errc::kContextMismatch, "elements from different contexts");
  }
  return *a;
}

void put_fixed(Bytes& out, const mpz_class& v, std::size_t width) {
  const std::size_t len = (mpz_sizeinbase(v.get_mpz_t(), 2) + 7) / 8;
  const std::size_t start = out.size();
  out.resize(start + width, 0);
  if (v != 0) {
    std::size_t written = 0;
    mpz_export(out.data() + start + (width - len), &written, 1, 1, 1, 0,
               v.get_mpz_t());
  }
}

mpz_class get_fixed(ByteView in) {
  mpz_class v;
  if (!in.empty()) mpz_import(v.get_mpz_t(), in.size(), 1, 1, 1, 0, in.data());
  return v;
}

void put_header(Bytes& out, std::uint8_t tag) {
  out.push_back(tag);
  out.push_back(static_cast<std::uint8_t>(kEncodingVersion >> 8));
  out.push_back(static_cast<std::uint8_t>(kEncodingVersion & 0xff));
}

void check_header(ByteView in, std::uint8_t tag, std::size_t expected_size,
                  const char* what) {
  if (in.size() != expected_size) {
    throw Error(Errc::kInvalidEncoding,
                std::string(what) + ": wrong length " + std::to_string(in.size()));
  }
  if (in[0] != tag) {
    throw Error(Errc::kInvalidEncoding, std::string(what) + ": wrong type tag");
  }
  const std::uint16_t version = static_cast<std::uint16_t>(in[1] << 8 | in[2]);
  if (version != kEncodingVersion) {
    throw Error(Errc::kInvalidEncoding,
                std::string(what) + ": unsupported version " +
                    std::to_string(version));
  }
}

// Domain-separated hash to Z_q^*: SHA-512(domain || counter || input) mod q,
// retrying with the next counter while the result is zero.
mpz_class hash_to_nonzero(const detail::Group& g, std::string_view domain,
                          ByteView input) {
  for (std::uint32_t counter = 0;; ++counter) {
    crypto_hash_sha512_state st;
    crypto_hash_sha512_init(&st);
    crypto_hash_sha512_update(
        &st, reinterpret_cast<const unsigned char*>(domain.data()),
        domain.size());
    const std::array<unsigned char, 4> ctr = {
        static_cast<unsigned char>(counter >> 24),
        static_cast<unsigned char>(counter >> 16),
        static_cast<unsigned char>(counter >> 8),
        static_cast<unsigned char>(counter)};
    crypto_hash_sha512_update(&st, ctr.data(), ctr.size());
    crypto_hash_sha512_update(&st, input.data(), input.size());
    std::array<unsigned char, crypto_hash_sha512_BYTES> digest{};
    crypto_hash_sha512_final(&st, digest.data());
    mpz_class v = get_fixed(ByteView(digest.data(), digest.size())) % g.q;
    if (v != 0) return v;
  }
}

}  // namespace

SecurityLevel security_level_from_bits(int bits) {
  switch (bits) {
    case 160:
      return SecurityLevel::kOrder160;
    case 224:
      return SecurityLevel::kOrder224;
    case 256:
      return SecurityLevel::kOrder256;
    default:
      throw Error(Errc::kUnsupportedSecurityLevel,
                  "no parameters for a " + std::to_string(bits) +
                      "-bit group order (supported: 160, 224, 256)");
  }
}

// ---------------------------------------------------------------- Scalar

Scalar::Scalar(const detail::Group* group, mpz_class v)
    : group_(group), value_(std::move(v)) {}

Scalar Scalar::operator+(const Scalar& o) const {
  const auto& g = require_same(group_, o.group_);
  mpz_class r = value_ + o.value_;
  if (r >= g.q) r -= g.q;
  return {group_, r};
}

Scalar Scalar::operator-(const Scalar& o) const {
  const auto& g = require_same(group_, o.group_);
  mpz_class r = value_ - o.value_;
  if (r < 0) r += g.q;
  return {group_, r};
}

Scalar Scalar::operator*(const Scalar& o) const {
  const auto& g = require_same(group_, o.group_);
  return {group_, value_ * o.value_ % g.q};
}

Scalar Scalar::operator-() const {
  const auto& g = require(group_);
  return {group_, value_ == 0 ? mpz_class(0) : mpz_class(g.q - value_)};
}

Scalar Scalar::inverse() const {
  const auto& g = require(group_);
  if (value_ == 0) throw Error(Errc::kInvalidArgument, "inverse of zero scalar");
  mpz_class r;
  mpz_invert(r.get_mpz_t(), value_.get_mpz_t(), g.q.get_mpz_t());
  return {group_, r};
}

bool Scalar::operator==(const Scalar& o) const {
  return group_ == o.group_ && value_ == o.value_;
}

Bytes Scalar::serialize() const {
  const auto& g = require(group_);
  Bytes out;
  out.reserve(3 + g.q_bytes);
  put_header(out, kTagScalar);
  put_fixed(out, value_, g.q_bytes);
  return out;
}

// ------------------------------------------------------------- G1Element

G1Element::G1Element(const detail::Group* group, mpz_class x, mpz_class y,
                     bool inf)
    : group_(group), x_(std::move(x)), y_(std::move(y)), infinity_(inf) {
  if (infinity_) {
    x_ = 0;
    y_ = 0;
  }
}

G1Element G1Element::operator*(const G1Element& o) const {
  const auto& g = require_same(group_, o.group_);
  auto r = detail::point_add(g, {x_, y_, infinity_}, {o.x_, o.y_, o.infinity_});
  return {group_, r.x, r.y, r.infinity};
}

G1Element G1Element::inverse() const {
  const auto& g = require(group_);
  auto r = detail::point_negate(g, {x_, y_, infinity_});
  return {group_, r.x, r.y, r.infinity};
}

G1Element G1Element::pow(const Scalar& e) const {
  const auto& g = require_same(group_, e.group_);
  detail::count_g1_exp();
  const auto& gen = g.generator;
  detail::AffinePoint r;
  if (!infinity_ && x_ == gen.x && y_ == gen.y) {
    r = detail::generator_mul(g, e.value_);
  } else {
    r = detail::point_mul(g, {x_, y_, infinity_}, e.value_);
  }
  return {group_, r.x, r.y, r.infinity};
}

bool G1Element::operator==(const G1Element& o) const {
  if (group_ != o.group_) return false;
  if (infinity_ || o.infinity_) return infinity_ == o.infinity_;
  return x_ == o.x_ && y_ == o.y_;
}

Bytes G1Element::serialize() const {
  const auto& g = require(group_);
  Bytes out;
  out.reserve(4 + g.p_bytes);
  put_header(out, kTagG1);
  std::uint8_t flags = 0;
  if (infinity_) flags |= kFlagInfinity;
  if (!infinity_ && mpz_odd_p(y_.get_mpz_t())) flags |= kFlagOddY;
  out.push_back(flags);
  put_fixed(out, infinity_ ? mpz_class(0) : x_, g.p_bytes);
  return out;
}

// ------------------------------------------------------------- GTElement

GTElement::GTElement(const detail::Group* group, mpz_class a, mpz_class b)
    : group_(group), a_(std::move(a)), b_(std::move(b)) {}

bool GTElement::is_identity() const { return a_ == 1 && b_ == 0; }

GTElement GTElement::operator*(const GTElement& o) const {
  const auto& g = require_same(group_, o.group_);
  auto r = detail::fp2_mul(g, {a_, b_}, {o.a_, o.b_});
  return {group_, r.a, r.b};
}

GTElement GTElement::inverse() const {
  const auto& g = require(group_);
  auto r = detail::fp2_conj(g, {a_, b_});
  return {group_, r.a, r.b};
}

GTElement GTElement::pow(const Scalar& e) const {
  const auto& g = require_same(group_, e.group_);
  detail::count_gt_exp();
  auto r = detail::unitary_pow(g, {a_, b_}, e.value_);
  return {group_, r.a, r.b};
}

bool GTElement::operator==(const GTElement& o) const {
  return group_ == o.group_ && a_ == o.a_ && b_ == o.b_;
}

Bytes GTElement::serialize() const {
  const auto& g = require(group_);
  Bytes out;
  out.reserve(3 + 2 * g.p_bytes);
  put_header(out, kTagGT);
  put_fixed(out, a_, g.p_bytes);
  put_fixed(out, b_, g.p_bytes);
  return out;
}

// ------------------------------------------------------- BilinearContext

BilinearContext BilinearContext::setup(SecurityLevel level) {
  return BilinearContext(&detail::type_a_group(level));
}

SecurityLevel BilinearContext::level() const { return group_->level; }
const mpz_class& BilinearContext::order() const { return group_->q; }
const mpz_class& BilinearContext::field_modulus() const { return group_->p; }
std::size_t BilinearContext::scalar_size() const { return 3 + group_->q_bytes; }
std::size_t BilinearContext::g1_size() const { return 4 + group_->p_bytes; }
std::size_t BilinearContext::gt_size() const { return 3 + 2 * group_->p_bytes; }

const G1Element& BilinearContext::generator() const {
  static std::mutex mu;
  static std::map<const detail::Group*, std::unique_ptr<G1Element>> cache;
  std::lock_guard<std::mutex> lock(mu);
  auto& slot = cache[group_];
  if (!slot) {
    const auto& gen = group_->generator;
    slot.reset(new G1Element(group_, gen.x, gen.y, false));
  }
  return *slot;
}

G1Element BilinearContext::g1_identity() const {
  return {group_, 0, 0, true};
}

GTElement BilinearContext::gt_identity() const { return {group_, 1, 0}; }

GTElement BilinearContext::pair(const G1Element& a, const G1Element& b) const {
  require_same(a.group_, group_);
  require_same(b.group_, group_);
  detail::count_pairing();
  auto r = detail::tate_pairing(*group_, {a.x_, a.y_, a.infinity_},
                                {b.x_, b.y_, b.infinity_});
  return {group_, r.a, r.b};
}

Scalar BilinearContext::hash_h1(ByteView input) const {
  detail::count_hash();
  return {group_, hash_to_nonzero(*group_, "rbeks/H1", input)};
}

Scalar BilinearContext::hash_h2(const G1Element& element) const {
  require_same(element.group_, group_);
  detail::count_hash();
  Bytes enc = element.serialize();
  return {group_, hash_to_nonzero(*group_, "rbeks/H2", enc)};
}

Scalar BilinearContext::scalar(std::uint64_t v) const {
  mpz_class m;
  mpz_import(m.get_mpz_t(), 1, 1, sizeof(v), 0, 0, &v);
  return {group_, m % group_->q};
}

Scalar BilinearContext::scalar(const mpz_class& v) const {
  mpz_class r = v % group_->q;
  if (r < 0) r += group_->q;
  return {group_, r};
}

Scalar BilinearContext::random_scalar(RandomSource& rng) const {
  // 64 extra bits make the modular bias negligible.
  Bytes buf(group_->q_bytes + 8);
  for (;;) {
    rng.fill(buf);
    mpz_class v = get_fixed(buf) % group_->q;
    if (v != 0) return {group_, v};
  }
}

G1Element BilinearContext::random_g1(RandomSource& rng) const {
  return generator().pow(random_scalar(rng));
}

GTElement BilinearContext::random_gt(RandomSource& rng) const {
  Bytes buf(group_->p_bytes + 8);
  for (;;) {
    rng.fill(buf);
    mpz_class a = get_fixed(buf) % group_->p;
    rng.fill(buf);
    mpz_class b = get_fixed(buf) % group_->p;
    if (a == 0 && b == 0) continue;
    auto r = detail::final_exponentiation(*group_, {a, b});
    if (r.a == 1 && r.b == 0) continue;
    return {group_, r.a, r.b};
  }
}

Scalar BilinearContext::decode_scalar(ByteView bytes) const {
  check_header(bytes, kTagScalar, scalar_size(), "scalar");
  mpz_class v = get_fixed(bytes.subspan(3));
  if (v >= group_->q) {
    throw Error(Errc::kInvalidEncoding, "scalar: value not reduced mod q");
  }
  return {group_, v};
}

G1Element BilinearContext::decode_g1(ByteView bytes) const {
  check_header(bytes, kTagG1, g1_size(), "G1 element");
  const std::uint8_t flags = bytes[3];
  if ((flags & ~(kFlagInfinity | kFlagOddY)) != 0) {
    throw Error(Errc::kInvalidEncoding, "G1 element: unknown flags");
  }
  mpz_class x = get_fixed(bytes.subspan(4));
  if (flags & kFlagInfinity) {
    if (x != 0 || (flags & kFlagOddY)) {
      throw Error(Errc::kInvalidEncoding, "G1 element: malformed identity");
    }
    return g1_identity();
  }
  if (x >= group_->p) {
    throw Error(Errc::kInvalidEncoding, "G1 element: x not reduced mod p");
  }
  mpz_class rhs = (x * x % group_->p * x + x) % group_->p;
  mpz_class y;
  if (!detail::field_sqrt(*group_, rhs, y)) {
    throw Error(Errc::kInvalidEncoding, "G1 element: point not on curve");
  }
  const bool want_odd = (flags & kFlagOddY) != 0;
  if (static_cast<bool>(mpz_odd_p(y.get_mpz_t())) != want_odd) {
    if (y == 0) throw Error(Errc::kInvalidEncoding, "G1 element: bad parity");
    y = group_->p - y;
  }
  auto check = detail::point_mul(*group_, {x, y, false}, group_->q);
  if (!check.infinity) {
    throw Error(Errc::kInvalidEncoding,
                "G1 element: not in the prime-order subgroup");
  }
  return {group_, x, y, false};
}

GTElement BilinearContext::decode_gt(ByteView bytes) const {
  check_header(bytes, kTagGT, gt_size(), "GT element");
  const std::size_t w = group_->p_bytes;
  mpz_class a = get_fixed(bytes.subspan(3, w));
  mpz_class b = get_fixed(bytes.subspan(3 + w, w));
  if (a >= group_->p || b >= group_->p) {
    throw Error(Errc::kInvalidEncoding, "GT element: coordinate not reduced");
  }
  if ((a * a + b * b) % group_->p != 1) {
    throw Error(Errc::kInvalidEncoding, "GT element: norm is not one");
  }
  auto check = detail::unitary_pow(*group_, {a, b}, group_->q);
  if (!(check.a == 1 && check.b == 0)) {
    throw Error(Errc::kInvalidEncoding,
                "GT element: not in the prime-order subgroup");
  }
  return {group_, a, b};
}

}  // namespace rbeks

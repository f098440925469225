#include "rbeks/user.hpp"

#include <sodium.h>

#include <algorithm>
#include <array>

#include "rbeks/error.hpp"
#include "rbeks/owner.hpp"

namespace rbeks {

namespace {

constexpr std::array<std::uint8_t, 4> kTrapdoorMagic = {'R', 'B', 'E', 'T'};
constexpr std::array<std::uint8_t, 4> kPartialMagic = {'R', 'B', 'E', 'P'};

void expect_header(ByteReader& r, const std::array<std::uint8_t, 4>& magic,
                   const char* what) {
  auto m = r.raw(magic.size());
  if (!std::equal(m.begin(), m.end(), magic.begin())) {
    throw Error(Errc::kInvalidEncoding, std::string("not a ") + what);
  }
  if (r.u16() != kEncodingVersion) {
    throw Error(Errc::kInvalidEncoding, std::string("unsupported ") + what + " version");
  }
}

}  // namespace

RoleSet Trapdoor::role_set() const {
  RoleSet out;
  for (const auto& [r, _] : roles) out.insert(r);
  return out;
}

Bytes Trapdoor::serialize() const {
  ByteWriter w;
  w.raw(kTrapdoorMagic);
  w.u16(kEncodingVersion);
  w.str(user_id);
  w.str(org);
  w.u64(static_cast<std::uint64_t>(ts));
  w.raw(tr1.serialize());
  w.raw(tr2.serialize());
  w.raw(tr3.serialize());
  w.raw(tr4.serialize());
  w.u32(static_cast<std::uint32_t>(roles.size()));
  for (const auto& [role, keys] : roles) {
    w.str(role.org);
    w.str(role.name);
    w.raw(keys.tr1.serialize());
    w.raw(keys.tr2.serialize());
  }
  return std::move(w).take();
}

Trapdoor Trapdoor::deserialize(const BilinearContext& ctx, ByteView bytes) {
  ByteReader r(bytes);
  expect_header(r, kTrapdoorMagic, "trapdoor");
  Trapdoor t;
  t.user_id = r.str();
  t.org = r.str();
  t.ts = static_cast<std::int64_t>(r.u64());
  t.tr1 = ctx.decode_scalar(r.raw(ctx.scalar_size()));
  t.tr2 = ctx.decode_g1(r.raw(ctx.g1_size()));
  t.tr3 = ctx.decode_g1(r.raw(ctx.g1_size()));
  t.tr4 = ctx.decode_g1(r.raw(ctx.g1_size()));
  const auto n = r.u32();
  if (n > r.remaining()) throw Error(Errc::kInvalidEncoding, "role count");
  for (std::uint32_t i = 0; i < n; ++i) {
    RoleId role;
    role.org = r.str();
    role.name = r.str();
    TrapdoorRoleKeys keys{ctx.decode_g1(r.raw(ctx.g1_size())),
                          ctx.decode_g1(r.raw(ctx.g1_size()))};
    if (!t.roles.emplace(std::move(role), std::move(keys)).second) {
      throw Error(Errc::kInvalidEncoding, "duplicate role in trapdoor");
    }
  }
  r.expect_done();
  if (t.roles.empty()) throw Error(Errc::kInvalidEncoding, "trapdoor has no roles");
  return t;
}

Bytes Trapdoor::digest() const {
  const Bytes enc = serialize();
  Bytes out(crypto_hash_sha256_BYTES);
  crypto_hash_sha256(out.data(), enc.data(), enc.size());
  return out;
}

Bytes PartialCiphertext::serialize() const {
  ByteWriter w;
  w.raw(kPartialMagic);
  w.u16(kEncodingVersion);
  w.raw(c1.serialize());
  w.raw(v10.serialize());
  w.blob(payload);
  return std::move(w).take();
}

PartialCiphertext PartialCiphertext::deserialize(const BilinearContext& ctx,
                                                 ByteView bytes) {
  ByteReader r(bytes);
  expect_header(r, kPartialMagic, "partial ciphertext");
  PartialCiphertext pc;
  pc.c1 = ctx.decode_gt(r.raw(ctx.gt_size()));
  pc.v10 = ctx.decode_gt(r.raw(ctx.gt_size()));
  auto payload = r.blob();
  pc.payload.assign(payload.begin(), payload.end());
  r.expect_done();
  return pc;
}

TrapdoorResult trap_gen(const BilinearContext& ctx, const UserKeys& keys,
                        const RoleKeyRing& role_keys, const RoleSet& present,
                        const std::vector<std::string>& keywords,
                        std::int64_t now, RandomSource& rng) {
  if (present.empty()) throw Error(Errc::kEmptyRoleSet, "no roles presented");
  if (keywords.empty()) throw Error(Errc::kEmptyKeywords, "no keywords");
  if (now <= 0) throw Error(Errc::kInvalidArgument, "timestamp must be positive");
  for (const auto& r : present) {
    if (!role_keys.count(r)) {
      throw Error(Errc::kInvalidArgument, "no role key held for " + r.str());
    }
  }

  const Scalar v = ctx.random_scalar(rng);
  const Scalar w = keyword_product(ctx, keywords);
  const Scalar ts = ctx.scalar(static_cast<std::uint64_t>(now));
  const auto& priv = keys.priv_global;

  Trapdoor t;
  t.user_id = keys.user_id;
  t.org = keys.org;
  t.ts = now;
  t.tr1 = (priv + ts) * v / ctx.hash_h2(keys.priv_org);
  t.tr2 = keys.priv_org.pow(v);
  t.tr3 = ctx.generator().pow(v / priv);
  t.tr4 = ctx.generator().pow(v);
  const Scalar blind = v / w;
  for (const auto& r : present) {
    const auto& pair = role_keys.at(r);
    t.roles.emplace(r, TrapdoorRoleKeys{pair.rk1.pow(blind), pair.rk2.pow(blind)});
  }
  SearchSession session{v, t.digest()};
  return {std::move(t), std::move(session)};
}

GTElement recover_payload_key(const PartialCiphertext& pc,
                              const Scalar& priv_global,
                              const SearchSession& session) {
  return pc.c1 / pc.v10.pow((priv_global * session.v).inverse());
}

Bytes full_dec(const PartialCiphertext& pc, const Scalar& priv_global,
               const SearchSession& session) {
  return unwrap_payload(recover_payload_key(pc, priv_global, session), pc.payload);
}

}  // namespace rbeks

#include "rbeks/owner.hpp"

#include <sodium.h>

#include <algorithm>
#include <array>

#include "rbeks/error.hpp"

namespace rbeks {

namespace {

constexpr std::array<std::uint8_t, 4> kArchiveMagic = {'R', 'B', 'E', 'A'};
constexpr std::string_view kPayloadKeyDomain = "rbeks/payload-key";

std::array<std::uint8_t, crypto_aead_xchacha20poly1305_ietf_KEYBYTES>
payload_key(const GTElement& k) {
  std::array<std::uint8_t, crypto_aead_xchacha20poly1305_ietf_KEYBYTES> key{};
  const Bytes enc = k.serialize();
  crypto_generichash(key.data(), key.size(), enc.data(), enc.size(),
                     reinterpret_cast<const unsigned char*>(kPayloadKeyDomain.data()),
                     kPayloadKeyDomain.size());
  return key;
}

void write_roles(ByteWriter& w, const std::map<RoleId, G1Element>& m) {
  for (const auto& [role, e] : m) w.raw(e.serialize());
}

}  // namespace

std::set<std::string> AccessPolicy::orgs() const {
  std::set<std::string> out;
  for (const auto& r : roles) out.insert(r.org);
  return out;
}

void AccessPolicy::validate() const {
  if (roles.empty()) throw Error(Errc::kEmptyPolicy, "policy has no roles");
  if (!orgs().count(owner_org)) {
    throw Error(Errc::kInvalidArgument,
                "owner org " + owner_org + " has no role in the policy");
  }
}

Scalar keyword_product(const BilinearContext& ctx,
                       const std::vector<std::string>& keywords) {
  if (keywords.empty()) throw Error(Errc::kEmptyKeywords, "no keywords");
  Scalar w = ctx.scalar(1);
  for (const auto& kw : keywords) w *= ctx.hash_h1(kw);
  return w;
}

Ciphertext encrypt(const PublicParams& pp,
                   const std::map<std::string, CloudPublicKeys>& cloud_pubs,
                   ByteView message, const std::vector<std::string>& keywords,
                   const AccessPolicy& policy,
                   const std::map<RoleId, G1Element>& role_pks,
                   RandomSource& rng, EncryptionRandomness* trace) {
  const auto& ctx = pp.ctx;
  policy.validate();
  if (keywords.empty()) throw Error(Errc::kEmptyKeywords, "no keywords");
  for (const auto& r : policy.roles) {
    if (!role_pks.count(r)) throw Error(Errc::kMissingRolePK, r.str());
  }
  const auto orgs = policy.orgs();
  for (const auto& org : orgs) {
    if (!cloud_pubs.count(org)) throw Error(Errc::kMissingCloudKey, org);
  }
  auto h1 = pp.h1.find(policy.owner_org);
  if (h1 == pp.h1.end()) {
    throw Error(Errc::kInvalidArgument,
                "no public parameter h1 for " + policy.owner_org);
  }

  EncryptionRandomness rnd;
  rnd.k = ctx.random_gt(rng);
  rnd.d_i = ctx.scalar(0);
  rnd.d_j = ctx.scalar(0);
  for (const auto& org : orgs) {
    rnd.d_org[org] = ctx.scalar(0);
    rnd.dp_org[org] = ctx.scalar(0);
  }
  for (const auto& r : policy.roles) {
    Scalar d = ctx.random_scalar(rng);
    Scalar dp = ctx.random_scalar(rng);
    rnd.d_i += d;
    rnd.d_j += dp;
    rnd.d_org[r.org] += d;
    rnd.dp_org[r.org] += dp;
    rnd.d_role.emplace(r, std::move(d));
    rnd.dp_role.emplace(r, std::move(dp));
  }
  rnd.d = rnd.d_i + rnd.d_j;

  const Scalar w = keyword_product(ctx, keywords);
  Ciphertext ct;
  ct.payload = wrap_payload(rnd.k, message, rng);
  ct.c1 = rnd.k * pp.big_y.pow(rnd.d);
  ct.c2 = h1->second.pow(rnd.d_j);
  ct.c3 = cloud_pubs.at(policy.owner_org).pub2.pow(rnd.d_j);
  for (const auto& org : orgs) {
    const auto& pub1 = cloud_pubs.at(org).pub1;
    ct.c4[org] = pub1.pow(rnd.d_org.at(org));
    ct.c4p[org] = pub1.pow(rnd.dp_org.at(org));
  }
  for (const auto& r : policy.roles) {
    const auto& pk = role_pks.at(r);
    ct.cr[r] = pk.pow(rnd.d_role.at(r) * w);
    ct.crp[r] = pk.pow(rnd.dp_role.at(r) * w);
  }
  ct.policy = policy;
  ct.keyword_count = static_cast<std::uint32_t>(keywords.size());
  if (trace != nullptr) *trace = std::move(rnd);
  return ct;
}

Bytes wrap_payload(const GTElement& k, ByteView message, RandomSource& rng) {
  const auto key = payload_key(k);
  Bytes out(crypto_aead_xchacha20poly1305_ietf_NPUBBYTES + message.size() +
            crypto_aead_xchacha20poly1305_ietf_ABYTES);
  std::span<std::uint8_t> nonce(out.data(),
                                crypto_aead_xchacha20poly1305_ietf_NPUBBYTES);
  rng.fill(nonce);
  unsigned long long clen = 0;
  crypto_aead_xchacha20poly1305_ietf_encrypt(
      out.data() + nonce.size(), &clen, message.data(), message.size(), nullptr,
      0, nullptr, nonce.data(), key.data());
  out.resize(nonce.size() + clen);
  return out;
}

Bytes unwrap_payload(const GTElement& k, ByteView blob) {
  constexpr std::size_t npub = crypto_aead_xchacha20poly1305_ietf_NPUBBYTES;
  constexpr std::size_t tag = crypto_aead_xchacha20poly1305_ietf_ABYTES;
  if (blob.size() < npub + tag) {
    throw Error(Errc::kAuthenticationFailure, "payload too short");
  }
  const auto key = payload_key(k);
  Bytes out(blob.size() - npub - tag);
  unsigned long long mlen = 0;
  if (crypto_aead_xchacha20poly1305_ietf_decrypt(
          out.data(), &mlen, nullptr, blob.data() + npub, blob.size() - npub,
          nullptr, 0, blob.data(), key.data()) != 0) {
    throw Error(Errc::kAuthenticationFailure, "payload does not authenticate");
  }
  out.resize(mlen);
  return out;
}

Bytes Ciphertext::serialize() const {
  ByteWriter w;
  w.raw(kArchiveMagic);
  w.u16(kEncodingVersion);
  // policy manifest; never carries keywords
  w.str(policy.owner_org);
  w.u32(static_cast<std::uint32_t>(policy.roles.size()));
  for (const auto& r : policy.roles) {
    w.str(r.org);
    w.str(r.name);
  }
  w.u32(keyword_count);
  // components, maps in key order
  w.raw(c1.serialize());
  w.raw(c2.serialize());
  w.raw(c3.serialize());
  for (const auto& [org, e] : c4) w.raw(e.serialize());
  for (const auto& [org, e] : c4p) w.raw(e.serialize());
  write_roles(w, cr);
  write_roles(w, crp);
  w.blob(payload);
  return std::move(w).take();
}

Ciphertext Ciphertext::deserialize(const BilinearContext& ctx, ByteView bytes) {
  ByteReader r(bytes);
  auto magic = r.raw(kArchiveMagic.size());
  if (!std::equal(magic.begin(), magic.end(), kArchiveMagic.begin())) {
    throw Error(Errc::kInvalidEncoding, "not an archive");
  }
  if (r.u16() != kEncodingVersion) {
    throw Error(Errc::kInvalidEncoding, "unsupported archive version");
  }
  Ciphertext ct;
  ct.policy.owner_org = r.str();
  const auto n = r.u32();
  if (n > r.remaining()) throw Error(Errc::kInvalidEncoding, "role count");
  for (std::uint32_t i = 0; i < n; ++i) {
    RoleId role;
    role.org = r.str();
    role.name = r.str();
    ct.policy.roles.insert(std::move(role));
  }
  if (ct.policy.roles.size() != n) {
    throw Error(Errc::kInvalidEncoding, "duplicate role in manifest");
  }
  ct.keyword_count = r.u32();
  ct.c1 = ctx.decode_gt(r.raw(ctx.gt_size()));
  ct.c2 = ctx.decode_g1(r.raw(ctx.g1_size()));
  ct.c3 = ctx.decode_g1(r.raw(ctx.g1_size()));
  const auto orgs = ct.policy.orgs();
  for (const auto& org : orgs) ct.c4[org] = ctx.decode_g1(r.raw(ctx.g1_size()));
  for (const auto& org : orgs) ct.c4p[org] = ctx.decode_g1(r.raw(ctx.g1_size()));
  for (const auto& role : ct.policy.roles) {
    ct.cr[role] = ctx.decode_g1(r.raw(ctx.g1_size()));
  }
  for (const auto& role : ct.policy.roles) {
    ct.crp[role] = ctx.decode_g1(r.raw(ctx.g1_size()));
  }
  auto payload = r.blob();
  ct.payload.assign(payload.begin(), payload.end());
  r.expect_done();
  try {
    ct.policy.validate();
  } catch (const Error& e) {
    throw Error(Errc::kInvalidEncoding, e.what());
  }
  return ct;
}

}  // namespace rbeks

#pragma once

// Data owner: hybrid encryption of a payload under a fresh GT key, with the
// keyword(s) and the role policy embedded in the RBE components.

#include <map>
#include <set>
#include <string>
#include <vector>

#include "rbeks/authority.hpp"

namespace rbeks {

struct AccessPolicy {
  RoleSet roles;          // Gamma
  std::string owner_org;  // k used for C2 and C3

  // Gamma_Phi
  std::set<std::string> orgs() const;
  // Throws kEmptyPolicy when Gamma is empty, kInvalidArgument when owner_org
  // does not appear in Gamma.
  void validate() const;
};

struct Ciphertext {
  Bytes payload;  // nonce | AEAD(m)
  GTElement c1;
  G1Element c2;
  G1Element c3;
  std::map<std::string, G1Element> c4;
  std::map<std::string, G1Element> c4p;
  std::map<RoleId, G1Element> cr;
  std::map<RoleId, G1Element> crp;
  AccessPolicy policy;
  std::uint32_t keyword_count = 1;

  // Archive: magic "RBEA" | version | policy manifest | components | payload.
  Bytes serialize() const;
  static Ciphertext deserialize(const BilinearContext& ctx, ByteView bytes);
};

// Test hook exposing the randomness used by one encryption.
struct EncryptionRandomness {
  GTElement k;
  std::map<RoleId, Scalar> d_role;
  std::map<RoleId, Scalar> dp_role;
  std::map<std::string, Scalar> d_org;
  std::map<std::string, Scalar> dp_org;
  Scalar d_i;
  Scalar d_j;
  Scalar d;
};

// W = product of H1(w) over the keywords. Throws kEmptyKeywords.
Scalar keyword_product(const BilinearContext& ctx,
                       const std::vector<std::string>& keywords);

// Throws kEmptyPolicy, kMissingRolePK, kMissingCloudKey, kEmptyKeywords.
Ciphertext encrypt(const PublicParams& pp,
                   const std::map<std::string, CloudPublicKeys>& cloud_pubs,
                   ByteView message, const std::vector<std::string>& keywords,
                   const AccessPolicy& policy,
                   const std::map<RoleId, G1Element>& role_pks,
                   RandomSource& rng, EncryptionRandomness* trace = nullptr);

// XChaCha20-Poly1305 under BLAKE2b(encoding of K).
Bytes wrap_payload(const GTElement& k, ByteView message, RandomSource& rng);
// Throws kAuthenticationFailure.
Bytes unwrap_payload(const GTElement& k, ByteView blob);

}  // namespace rbeks

#pragma once

// User side: trapdoors for (conjunctive) keyword search and the final
// decryption step after the cloud has done the pairing work.

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "rbeks/authority.hpp"
#include "rbeks/role_manager.hpp"

namespace rbeks {

struct TrapdoorRoleKeys {
  G1Element tr1;  // rk1^{v/W}
  G1Element tr2;  // rk2^{v/W}
};

struct Trapdoor {
  std::string user_id;
  std::string org;  // authority whose Priv^k was used; must own the data
  Scalar tr1;
  G1Element tr2;
  G1Element tr3;
  G1Element tr4;
  std::map<RoleId, TrapdoorRoleKeys> roles;  // keyed by S
  std::int64_t ts = 0;

  RoleSet role_set() const;

  // magic "RBET" | version | user | org | ts | tr1..tr4 | role manifest + keys
  Bytes serialize() const;
  static Trapdoor deserialize(const BilinearContext& ctx, ByteView bytes);
  // SHA-256 of serialize().
  Bytes digest() const;
};

struct SearchSession {
  Scalar v;
  Bytes trapdoor_digest;
};

struct PartialCiphertext {
  Bytes payload;
  GTElement c1;
  GTElement v10;

  Bytes serialize() const;
  static PartialCiphertext deserialize(const BilinearContext& ctx, ByteView bytes);
};

struct TrapdoorResult {
  Trapdoor trapdoor;
  SearchSession session;
};

// `present` may be any subset of the held roles, across organizations.
// Throws kEmptyRoleSet, kEmptyKeywords, and kInvalidArgument for a role
// without a key in `role_keys` or a non-positive timestamp.
TrapdoorResult trap_gen(const BilinearContext& ctx, const UserKeys& keys,
                        const RoleKeyRing& role_keys, const RoleSet& present,
                        const std::vector<std::string>& keywords,
                        std::int64_t now, RandomSource& rng);

// K = C1 / V10^{1/(Priv v)}; then unwraps the payload.
// Throws kAuthenticationFailure when K is wrong.
Bytes full_dec(const PartialCiphertext& pc, const Scalar& priv_global,
               const SearchSession& session);

// Only the key-recovery half of full_dec.
GTElement recover_payload_key(const PartialCiphertext& pc,
                              const Scalar& priv_global,
                              const SearchSession& session);

}  // namespace rbeks

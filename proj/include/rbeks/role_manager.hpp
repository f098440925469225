#pragma once

// Role managers turn a user's secret US into per-role keys and push updates
// after a role-level revocation.

#include <map>

#include "rbeks/authority.hpp"

namespace rbeks {

struct RoleKeyPair {
  RoleId role;
  G1Element rk1;  // US^{1/RS}
  G1Element rk2;  // US^{1/t}
};

using RoleKeyRing = std::map<RoleId, RoleKeyPair>;

RoleKeyPair user_role_key_gen(const RoleId& role, const G1Element& user_secret,
                              const Scalar& rs, const Scalar& t);

// Convenience over a role state held by the authority.
RoleKeyPair user_role_key_gen(const RoleState& state, const RoleId& role,
                              const G1Element& user_secret);

// rk1 <- rk1^{t/t'} for every held role whose ancestor set contains the
// revoked role; rk2 <- rk2^{t/t'} only for the revoked role itself. Keys of
// other organizations are left alone.
void update_role_keys(RoleKeyRing& keys, const RevocationToken& token,
                      const RoleHierarchy& hierarchy);

}  // namespace rbeks

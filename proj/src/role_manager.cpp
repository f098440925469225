#include "rbeks/role_manager.hpp"

namespace rbeks {

RoleKeyPair user_role_key_gen(const RoleId& role, const G1Element& user_secret,
                              const Scalar& rs, const Scalar& t) {
  return {role, user_secret.pow(rs.inverse()), user_secret.pow(t.inverse())};
}

RoleKeyPair user_role_key_gen(const RoleState& state, const RoleId& role,
                              const G1Element& user_secret) {
  const auto& rec = state.record(role);
  return user_role_key_gen(role, user_secret, rec.rs, rec.t);
}

void update_role_keys(RoleKeyRing& keys, const RevocationToken& token,
                      const RoleHierarchy& hierarchy) {
  for (auto& [role, pair] : keys) {
    if (role.org != hierarchy.org() || !hierarchy.contains(role)) continue;
    if (!hierarchy.ancestor_set(role).count(token.role)) continue;
    pair.rk1 = pair.rk1.pow(token.ratio_backward);
    if (role == token.role) pair.rk2 = pair.rk2.pow(token.ratio_backward);
  }
}

}  // namespace rbeks

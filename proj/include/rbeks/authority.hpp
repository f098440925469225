#pragma once

// System authority (SA): one per organization. Runs the joint setup, derives
// role parameters for its hierarchy, issues cloud and user keys, and drives
// both revocation modes.

#include <map>
#include <string>
#include <utility>
#include <vector>

#include "rbeks/pairing.hpp"
#include "rbeks/random.hpp"
#include "rbeks/role_hierarchy.hpp"

namespace rbeks {

struct PublicParams {
  BilinearContext ctx;
  GTElement big_y;                         // Y = e(g, g)^y
  std::map<std::string, G1Element> h1;     // h^k_1 = g^{eta_k}

  // e(g^y, g) == Y
  bool validate_y(const G1Element& g_y) const {
    return ctx.pair(g_y, ctx.generator()) == big_y;
  }
};

struct MasterSecret {
  std::string org;
  G1Element g_y;
  Scalar eta;
  Scalar mu;
  Scalar x;
};

struct SystemSetupResult {
  PublicParams params;
  std::map<std::string, MasterSecret> masters;
};

// Runs the group key agreement across the organizations (direct sampling of y
// when there is just one) and derives every authority's master secret.
SystemSetupResult system_setup(const std::vector<std::string>& orgs,
                               const BilinearContext& ctx, RandomSource& rng);

// Adds a new authority to an existing deployment by sharing g^y with it.
MasterSecret join_authority(PublicParams& params, const std::string& org,
                            const G1Element& g_y, RandomSource& rng);

struct RoleSecretRecord {
  RoleId role;
  Scalar t;   // t_{r_i}
  Scalar rs;  // RS = product of t over the ancestor set
  G1Element pk;  // g^{RS}
};

// PKey^{held}_{target} = product of t over R_target \ {held}, for every strict
// ancestor `held` of a non-root `target`. Held only by the cloud.
class ProxyKeySet {
 public:
  const Scalar* find(const RoleId& target, const RoleId& held) const;
  void set(const RoleId& target, const RoleId& held, Scalar key);
  const std::map<std::pair<RoleId, RoleId>, Scalar>& entries() const {
    return keys_;
  }
  std::map<std::pair<RoleId, RoleId>, Scalar>& entries() { return keys_; }
  void merge(const ProxyKeySet& other);

 private:
  std::map<std::pair<RoleId, RoleId>, Scalar> keys_;  // (target, held)
};

// Everything an SA keeps about one hierarchy. `t` covers every role including
// the root; `records` covers every role except the root.
struct RoleState {
  RoleHierarchy hierarchy;
  std::map<RoleId, Scalar> t;
  std::map<RoleId, RoleSecretRecord> records;

  const RoleSecretRecord& record(const RoleId& role) const;
};

struct ManagedRoles {
  RoleState state;
  ProxyKeySet proxy;
};

ManagedRoles manage_role(const RoleHierarchy& hierarchy, const BilinearContext& ctx,
                         RandomSource& rng);

struct CloudKeys {
  Scalar priv;     // Priv^k_c, delivered to the cloud only
  G1Element pub1;  // g^{mu_k Priv^k_c}
  G1Element pub2;  // g^{x_k Priv^k_c}
};

struct CloudPublicKeys {
  G1Element pub1;
  G1Element pub2;
};

CloudKeys pub_cloud_key_gen(const BilinearContext& ctx, const MasterSecret& ms,
                            std::string_view cloud_id);

struct UserKeys {
  std::string user_id;
  std::string org;
  Scalar priv_global;     // Priv_{ID_u}, identical across authorities
  G1Element priv_org;     // Priv^k_{ID_u}
  G1Element pub_org;      // Pub^k_{ID_u}, published
  G1Element user_secret;  // US_{ID_u}, shared with the role managers
};

UserKeys user_priv_key_gen(const BilinearContext& ctx, const MasterSecret& ms,
                           std::string_view user_id);

// Public bulletin board: user public keys, role public keys, cloud public keys.
struct BulletinBoard {
  std::map<std::pair<std::string, std::string>, G1Element> user_pubs;  // (org, user)
  std::map<RoleId, G1Element> role_pks;
  std::map<std::string, CloudPublicKeys> cloud_pubs;

  const G1Element* user_pub(const std::string& org, const std::string& user) const;
  void publish_roles(const RoleState& state);
};

// Complete revocation: drop Pub^k_{ID_u}. Throws kUnknownUser.
void revoke_user_complete(BulletinBoard& board, const std::string& org,
                          const std::string& user_id);

struct RevocationToken {
  RoleId role;
  Scalar ratio_forward;   // t'/t
  Scalar ratio_backward;  // t/t'
  Scalar new_t;           // t', authority and role managers only
};

// Role-level revocation: refresh t for `role` and rescale every RS, PK and
// proxy key whose product contains it. Throws kUnknownRole and
// kRootRoleNotRevocable.
RevocationToken revoke_role(const BilinearContext& ctx, RoleState& state,
                            ProxyKeySet& proxy, const RoleId& role,
                            RandomSource& rng);

}  // namespace rbeks

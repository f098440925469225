#include "rbeks/authority.hpp"

#include "rbeks/error.hpp"
#include "rbeks/group_key.hpp"

namespace rbeks {

namespace {

Scalar product_of(const RoleState& state, const RoleSet& roles,
                  const RoleId* excluded, const BilinearContext& ctx) {
  Scalar acc = ctx.scalar(1);
  for (const auto& r : roles) {
    if (excluded != nullptr && r == *excluded) continue;
    acc *= state.t.at(r);
  }
  return acc;
}

}  // namespace

SystemSetupResult system_setup(const std::vector<std::string>& orgs,
                               const BilinearContext& ctx, RandomSource& rng) {
  if (orgs.empty()) {
    throw Error(Errc::kInvalidArgument, "system setup needs at least one org");
  }
  G1Element g_y;
  if (orgs.size() == 1) {
    g_y = ctx.generator().pow(ctx.random_scalar(rng));
  } else {
    std::vector<Scalar> secrets;
    for (std::size_t i = 0; i < orgs.size(); ++i) {
      secrets.push_back(ctx.random_scalar(rng));
    }
    g_y = run_group_key_agreement(ctx, secrets).derived.front().value;
  }

  SystemSetupResult out{PublicParams{ctx, ctx.pair(g_y, ctx.generator()), {}},
                        {}};
  for (const auto& org : orgs) {
    if (out.masters.count(org)) {
      throw Error(Errc::kInvalidArgument, "duplicate org " + org);
    }
    out.masters.emplace(org, join_authority(out.params, org, g_y, rng));
  }
  return out;
}

MasterSecret join_authority(PublicParams& params, const std::string& org,
                            const G1Element& g_y, RandomSource& rng) {
  const auto& ctx = params.ctx;
  MasterSecret ms{org, g_y, ctx.random_scalar(rng), ctx.random_scalar(rng),
                  ctx.random_scalar(rng)};
  params.h1[org] = ctx.generator().pow(ms.eta);
  return ms;
}

const Scalar* ProxyKeySet::find(const RoleId& target, const RoleId& held) const {
  auto it = keys_.find({target, held});
  return it == keys_.end() ? nullptr : &it->second;
}

void ProxyKeySet::set(const RoleId& target, const RoleId& held, Scalar key) {
  keys_[{target, held}] = std::move(key);
}

void ProxyKeySet::merge(const ProxyKeySet& other) {
  for (const auto& [k, v] : other.keys_) keys_[k] = v;
}

const RoleSecretRecord& RoleState::record(const RoleId& role) const {
  auto it = records.find(role);
  if (it == records.end()) {
    throw Error(Errc::kUnknownRole, "no role record for " + role.str());
  }
  return it->second;
}

ManagedRoles manage_role(const RoleHierarchy& hierarchy,
                         const BilinearContext& ctx, RandomSource& rng) {
  ManagedRoles out{RoleState{hierarchy, {}, {}}, {}};
  auto& state = out.state;
  for (const auto& r : hierarchy.roles()) {
    state.t.emplace(r, ctx.random_scalar(rng));
  }
  for (const auto& r : hierarchy.roles()) {
    if (r == hierarchy.root()) continue;
    const auto& anc = hierarchy.ancestor_set(r);
    Scalar rs = product_of(state, anc, nullptr, ctx);
    state.records.emplace(
        r, RoleSecretRecord{r, state.t.at(r), rs, ctx.generator().pow(rs)});
    for (const auto& held : anc) {
      if (held == r) continue;
      out.proxy.set(r, held, product_of(state, anc, &held, ctx));
    }
  }
  return out;
}

CloudKeys pub_cloud_key_gen(const BilinearContext& ctx, const MasterSecret& ms,
                            std::string_view cloud_id) {
  const Scalar exponent = ctx.hash_h1(cloud_id) / ms.x;
  const Scalar priv = ctx.hash_h2(ms.g_y.pow(exponent));
  return {priv, ctx.generator().pow(ms.mu * priv),
          ctx.generator().pow(ms.x * priv)};
}

UserKeys user_priv_key_gen(const BilinearContext& ctx, const MasterSecret& ms,
                           std::string_view user_id) {
  const auto& g = ctx.generator();
  const Scalar priv = ctx.hash_h2(ms.g_y.pow(ctx.hash_h1(user_id)));
  const Scalar eta_inv = ms.eta.inverse();
  G1Element priv_org = ms.g_y.pow(priv * eta_inv) * g.pow(ms.x * eta_inv);
  G1Element pub_org = g.pow(ctx.hash_h2(priv_org) / priv);
  G1Element user_secret = ms.g_y.pow(priv) * g.pow(ms.mu);
  return {std::string(user_id), ms.org, priv, std::move(priv_org),
          std::move(pub_org), std::move(user_secret)};
}

const G1Element* BulletinBoard::user_pub(const std::string& org,
                                         const std::string& user) const {
  auto it = user_pubs.find({org, user});
  return it == user_pubs.end() ? nullptr : &it->second;
}

void BulletinBoard::publish_roles(const RoleState& state) {
  for (const auto& [role, rec] : state.records) role_pks[role] = rec.pk;
}

void revoke_user_complete(BulletinBoard& board, const std::string& org,
                          const std::string& user_id) {
  if (board.user_pubs.erase({org, user_id}) == 0) {
    throw Error(Errc::kUnknownUser,
                user_id + " has no public key at authority " + org);
  }
}

RevocationToken revoke_role(const BilinearContext& ctx, RoleState& state,
                            ProxyKeySet& proxy, const RoleId& role,
                            RandomSource& rng) {
  const auto& h = state.hierarchy;
  if (!h.contains(role)) {
    throw Error(Errc::kUnknownRole, role.str() + " is not in hierarchy " + h.org());
  }
  if (role == h.root()) {
    throw Error(Errc::kRootRoleNotRevocable, role.str());
  }
  Scalar& t = state.t.at(role);
  Scalar new_t = ctx.random_scalar(rng);
  while (new_t == t) new_t = ctx.random_scalar(rng);
  RevocationToken token{role, new_t / t, t / new_t, new_t};
  t = new_t;

  for (const auto& rj : h.descendants(role)) {
    auto& rec = state.records.at(rj);
    rec.rs *= token.ratio_forward;
    rec.pk = ctx.generator().pow(rec.rs);
    if (rj == role) rec.t = new_t;
    for (const auto& held : h.ancestor_set(rj)) {
      if (held == rj || held == role) continue;
      auto& key = proxy.entries().at({rj, held});
      key *= token.ratio_forward;
    }
  }
  return token;
}

}  // namespace rbeks

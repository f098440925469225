#include "rbeks/cloud.hpp"

#include <fstream>
#include <json.hpp>

#include "rbeks/error.hpp"

namespace rbeks {

std::string_view rejection_name(Rejection r) {
  switch (r) {
    case Rejection::kNone: return "none";
    case Rejection::kStaleTimestamp: return "StaleTimestamp";
    case Rejection::kReplayed: return "Replayed";
    case Rejection::kUnknownIdentity: return "UnknownIdentity";
    case Rejection::kAuthenticationFailed: return "AuthenticationFailed";
    case Rejection::kUnqualifiedRoles: return "UnqualifiedRoles";
    case Rejection::kKeywordMismatch: return "KeywordMismatch";
  }
  return "unknown";
}

void ReplayCache::evict(std::int64_t now) {
  for (auto it = entries_.begin(); it != entries_.end();) {
    if (now - it->second > window_) {
      it = entries_.erase(it);
    } else {
      ++it;
    }
  }
}

bool ReplayCache::seen(const Bytes& digest, std::int64_t now) {
  std::lock_guard<std::mutex> lock(mu_);
  evict(now);
  return entries_.count(digest) != 0;
}

bool ReplayCache::insert(const Bytes& digest, std::int64_t ts, std::int64_t now) {
  std::lock_guard<std::mutex> lock(mu_);
  evict(now);
  return entries_.emplace(digest, ts).second;
}

std::size_t ReplayCache::size() const {
  std::lock_guard<std::mutex> lock(mu_);
  return entries_.size();
}

std::map<Bytes, std::int64_t> ReplayCache::snapshot() const {
  std::lock_guard<std::mutex> lock(mu_);
  return entries_;
}

namespace {

const Scalar& cloud_key(const CloudPrivateKeys& privs, const std::string& org) {
  auto it = privs.find(org);
  if (it == privs.end()) {
    throw Error(Errc::kMissingCloudKey, "cloud holds no private key for " + org);
  }
  return it->second;
}

G1Element aggregate(const std::map<std::string, G1Element>& parts,
                    const CloudPrivateKeys& privs) {
  G1Element acc;
  bool first = true;
  for (const auto& [org, c] : parts) {
    G1Element term = c.pow(cloud_key(privs, org).inverse());
    acc = first ? term : acc * term;
    first = false;
  }
  return acc;
}

// Case 1 / Case 2 product over the plan against C or C'.
GTElement role_product(const BilinearContext& ctx, const Trapdoor& trap,
                       const RolePlan& plan, const ProxyKeySet& proxy,
                       const std::map<RoleId, G1Element>& components) {
  GTElement acc = ctx.gt_identity();
  for (const auto& [target, held] : plan.cover) {
    const auto& keys = trap.roles.at(held);
    const auto& c = components.at(target);
    if (held == target) {
      acc = acc * ctx.pair(keys.tr1, c);
      continue;
    }
    const Scalar* pkey = proxy.find(target, held);
    if (pkey == nullptr) {
      throw Error(Errc::kInvalidArgument,
                  "no proxy key for " + held.str() + " -> " + target.str());
    }
    acc = acc * ctx.pair(keys.tr2.pow(pkey->inverse()), c);
  }
  return acc;
}

}  // namespace

G1Element auth_aggregate(const Ciphertext& ct, const CloudPrivateKeys& privs) {
  return aggregate(ct.c4p, privs);
}

Outcome<AuthResult> authenticate(const BilinearContext& ctx,
                                 const CloudPrivateKeys& privs,
                                 const Ciphertext& ct, const Trapdoor& trap,
                                 const G1Element* user_pub, std::int64_t now,
                                 ReplayCache& cache) {
  using Out = Outcome<AuthResult>;
  if (!cache.fresh(trap.ts, now)) return Out::reject(Rejection::kStaleTimestamp);
  if (user_pub == nullptr) return Out::reject(Rejection::kUnknownIdentity);
  Bytes digest = trap.digest();
  if (cache.seen(digest, now)) return Out::reject(Rejection::kReplayed);

  const G1Element u = auth_aggregate(ct, privs);
  const GTElement v11 = ctx.pair(user_pub->pow(trap.tr1), u);
  const GTElement v21 =
      ctx.pair(trap.tr3.pow(ctx.scalar(static_cast<std::uint64_t>(trap.ts))), u);
  GTElement v31 = ctx.pair(trap.tr4, u);
  if (!(v11 == v21 * v31)) return Out::reject(Rejection::kAuthenticationFailed);
  if (!cache.insert(digest, trap.ts, now)) return Out::reject(Rejection::kReplayed);
  return {AuthResult{std::move(v31), trap.user_id, std::move(digest)},
          Rejection::kNone};
}

std::optional<RolePlan> plan_roles(const AccessPolicy& policy,
                                   const RoleSet& presented,
                                   const HierarchyMap& hierarchies) {
  RolePlan plan;
  for (const auto& target : policy.roles) {
    if (presented.count(target)) {
      plan.cover.emplace(target, target);
      continue;
    }
    auto h = hierarchies.find(target.org);
    if (h == hierarchies.end() || !h->second.contains(target)) return std::nullopt;
    const auto& anc = h->second.ancestor_set(target);
    // RoleSet is ordered, so the first hit is the lexicographically smallest.
    const RoleId* pick = nullptr;
    for (const auto& held : presented) {
      if (anc.count(held)) {
        pick = &held;
        break;
      }
    }
    if (pick == nullptr) return std::nullopt;
    plan.cover.emplace(target, *pick);
  }
  return plan;
}

Outcome<SearchMatch> key_search(const BilinearContext& ctx, const Ciphertext& ct,
                                const Trapdoor& trap, const AuthResult& auth,
                                const ProxyKeySet& proxy,
                                const HierarchyMap& hierarchies,
                                const CloudPrivateKeys& privs) {
  using Out = Outcome<SearchMatch>;
  auto plan = plan_roles(ct.policy, trap.role_set(), hierarchies);
  if (!plan) return Out::reject(Rejection::kUnqualifiedRoles);
  const Scalar& owner_priv = cloud_key(privs, ct.policy.owner_org);

  const GTElement v2 = role_product(ctx, trap, *plan, proxy, ct.crp);
  GTElement v3 = v2 / auth.v31;
  const GTElement v4 = ctx.pair(trap.tr2, ct.c2);
  const GTElement v5 = ctx.pair(trap.tr4.pow(owner_priv.inverse()), ct.c3);
  GTElement v6 = v4 / v5;
  if (!(v3 == v6)) return Out::reject(Rejection::kKeywordMismatch);
  return {SearchMatch{std::move(*plan), std::move(v3), std::move(v6)},
          Rejection::kNone};
}

PartialCiphertext partial_dec(const BilinearContext& ctx, const Ciphertext& ct,
                              const Trapdoor& trap, const SearchMatch& match,
                              const ProxyKeySet& proxy,
                              const CloudPrivateKeys& privs) {
  const GTElement v7 = role_product(ctx, trap, match.plan, proxy, ct.cr);
  const GTElement v8 = ctx.pair(trap.tr4, aggregate(ct.c4, privs));
  const GTElement v9 = v7 / v8;
  return {ct.payload, ct.c1, match.v6 * v9};
}

bool reencrypt_role(Ciphertext& ct, const RevocationToken& token,
                    const RoleHierarchy& hierarchy) {
  bool changed = false;
  for (auto& [role, c] : ct.cr) {
    if (role.org != hierarchy.org() || !hierarchy.contains(role)) continue;
    if (!hierarchy.ancestor_set(role).count(token.role)) continue;
    c = c.pow(token.ratio_forward);
    auto& cp = ct.crp.at(role);
    cp = cp.pow(token.ratio_forward);
    changed = true;
  }
  return changed;
}

CiphertextId CiphertextStore::add(Ciphertext ct) {
  const CiphertextId id = next_id_++;
  index_[ct.policy.roles].push_back(id);
  items_.emplace(id, std::move(ct));
  return id;
}

const Ciphertext* CiphertextStore::find(CiphertextId id) const {
  auto it = items_.find(id);
  return it == items_.end() ? nullptr : &it->second;
}

std::vector<CiphertextId> CiphertextStore::ids() const {
  std::vector<CiphertextId> out;
  for (const auto& [id, _] : items_) out.push_back(id);
  return out;
}

std::vector<CiphertextId> CiphertextStore::ids_for_roles(const RoleSet& roles) const {
  auto it = index_.find(roles);
  return it == index_.end() ? std::vector<CiphertextId>{} : it->second;
}

std::vector<CiphertextId> CiphertextStore::reencrypt_role(
    const RevocationToken& token, const RoleHierarchy& hierarchy) {
  std::vector<CiphertextId> touched;
  for (auto& [id, ct] : items_) {
    if (rbeks::reencrypt_role(ct, token, hierarchy)) touched.push_back(id);
  }
  return touched;
}

void CiphertextStore::save(const std::filesystem::path& dir) const {
  std::filesystem::create_directories(dir);
  std::ofstream log(dir / "store.log", std::ios::binary | std::ios::trunc);
  nlohmann::json index = {{"version", kEncodingVersion},
                          {"next_id", next_id_},
                          {"entries", nlohmann::json::array()}};
  std::uint64_t offset = 0;
  for (const auto& [id, ct] : items_) {
    ByteWriter w;
    w.u64(id);
    w.blob(ct.serialize());
    const Bytes& rec = w.bytes();
    log.write(reinterpret_cast<const char*>(rec.data()),
              static_cast<std::streamsize>(rec.size()));
    nlohmann::json roles = nlohmann::json::array();
    for (const auto& r : ct.policy.roles) roles.push_back(r.str());
    index["entries"].push_back({{"id", id},
                                {"offset", offset},
                                {"owner_org", ct.policy.owner_org},
                                {"roles", roles}});
    offset += rec.size();
  }
  if (!log) throw Error(Errc::kIo, "cannot write " + (dir / "store.log").string());
  std::ofstream idx(dir / "store.idx", std::ios::trunc);
  idx << index.dump(2) << "\n";
  if (!idx) throw Error(Errc::kIo, "cannot write " + (dir / "store.idx").string());
}

CiphertextStore CiphertextStore::load(const BilinearContext& ctx,
                                      const std::filesystem::path& dir) {
  CiphertextStore store;
  const auto log_path = dir / "store.log";
  if (!std::filesystem::exists(log_path)) return store;
  std::ifstream in(log_path, std::ios::binary);
  Bytes data((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  ByteReader r(data);
  // Later records for the same id supersede earlier ones.
  while (!r.done()) {
    const CiphertextId id = r.u64();
    Ciphertext ct = Ciphertext::deserialize(ctx, r.blob());
    store.items_.insert_or_assign(id, std::move(ct));
    store.next_id_ = std::max(store.next_id_, id + 1);
  }
  if (std::ifstream idx(dir / "store.idx"); idx) {
    auto index = nlohmann::json::parse(idx, nullptr, false);
    if (!index.is_discarded() && index.contains("next_id")) {
      store.next_id_ = std::max(store.next_id_, index["next_id"].get<CiphertextId>());
    }
  }
  for (const auto& [id, ct] : store.items_) store.index_[ct.policy.roles].push_back(id);
  return store;
}

void CloudService::install_private_key(const std::string& org, Scalar priv) {
  std::unique_lock lock(store_mu_);
  privs_[org] = std::move(priv);
}

void CloudService::install_proxy_keys(const ProxyKeySet& keys) {
  std::unique_lock lock(store_mu_);
  proxy_.merge(keys);
}

void CloudService::install_hierarchy(const RoleHierarchy& h) {
  std::unique_lock lock(store_mu_);
  hierarchies_.insert_or_assign(h.org(), h);
}

CiphertextId CloudService::store(Ciphertext ct) {
  std::unique_lock lock(store_mu_);
  return store_.add(std::move(ct));
}

SearchResponse CloudService::search(const Trapdoor& trap,
                                    const BulletinBoard& board,
                                    std::int64_t now) {
  std::shared_lock lock(store_mu_);
  SearchResponse resp;
  std::vector<CiphertextId> candidates;
  for (const auto id : store_.ids()) {
    if (store_.find(id)->policy.owner_org == trap.org) candidates.push_back(id);
  }
  const G1Element* user_pub = board.user_pub(trap.org, trap.user_id);
  if (candidates.empty()) {
    if (!cache_.fresh(trap.ts, now)) {
      resp.reason = Rejection::kStaleTimestamp;
    } else if (user_pub == nullptr) {
      resp.reason = Rejection::kUnknownIdentity;
    }
    return resp;
  }

  const Ciphertext& first = *store_.find(candidates.front());
  auto auth = authenticate(ctx_, privs_, first, trap, user_pub, now, cache_);
  if (!auth) {
    resp.reason = auth.reason;
    return resp;
  }
  for (const auto id : candidates) {
    const Ciphertext& ct = *store_.find(id);
    if (!plan_roles(ct.policy, trap.role_set(), hierarchies_)) {
      resp.misses.emplace(id, Rejection::kUnqualifiedRoles);
      continue;
    }
    AuthResult per_ct = *auth.value;
    if (id != candidates.front()) {
      per_ct.v31 = ctx_.pair(trap.tr4, auth_aggregate(ct, privs_));
    }
    auto match = key_search(ctx_, ct, trap, per_ct, proxy_, hierarchies_, privs_);
    if (!match) {
      resp.misses.emplace(id, match.reason);
      continue;
    }
    resp.hits.push_back({id, partial_dec(ctx_, ct, trap, *match.value, proxy_, privs_)});
  }
  return resp;
}

std::vector<CiphertextId> CloudService::apply_revocation(
    const RevocationToken& token, const RoleHierarchy& updated,
    const ProxyKeySet& updated_proxy) {
  std::unique_lock lock(store_mu_);
  for (const auto& [key, value] : updated_proxy.entries()) {
    if (key.first.org == updated.org()) proxy_.set(key.first, key.second, value);
  }
  hierarchies_.insert_or_assign(updated.org(), updated);
  return store_.reencrypt_role(token, updated);
}

}  // namespace rbeks

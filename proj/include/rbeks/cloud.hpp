#pragma once

// The honest-but-curious cloud: authentication with replay protection,
// keyword search through proxy keys, partial decryption and role-level
// re-encryption of the stored ciphertexts.

#include <cstdint>
#include <filesystem>
#include <map>
#include <mutex>
#include <optional>
#include <shared_mutex>
#include <string>
#include <string_view>
#include <vector>

#include "rbeks/authority.hpp"
#include "rbeks/owner.hpp"
#include "rbeks/user.hpp"

namespace rbeks {

enum class Rejection {
  kNone,
  kStaleTimestamp,
  kReplayed,
  kUnknownIdentity,
  kAuthenticationFailed,
  kUnqualifiedRoles,
  kKeywordMismatch,
};

std::string_view rejection_name(Rejection r);

inline constexpr std::int64_t kDefaultReplayWindow = 300;

// Digests of accepted trapdoors, kept for the freshness window. Thread safe.
class ReplayCache {
 public:
  explicit ReplayCache(std::int64_t window = kDefaultReplayWindow)
      : window_(window) {}

  std::int64_t window() const { return window_; }
  bool fresh(std::int64_t ts, std::int64_t now) const {
    return ts - now <= window_ && now - ts <= window_;
  }
  bool seen(const Bytes& digest, std::int64_t now);
  // False when the digest is already present.
  bool insert(const Bytes& digest, std::int64_t ts, std::int64_t now);
  std::size_t size() const;
  std::map<Bytes, std::int64_t> snapshot() const;

 private:
  void evict(std::int64_t now);

  std::int64_t window_;
  mutable std::mutex mu_;
  std::map<Bytes, std::int64_t> entries_;  // digest -> ts
};

struct AuthResult {
  GTElement v31;
  std::string user_id;
  Bytes trapdoor_digest;
};

template <typename T>
struct Outcome {
  std::optional<T> value;
  Rejection reason = Rejection::kNone;

  explicit operator bool() const { return value.has_value(); }
  static Outcome reject(Rejection r) { return {std::nullopt, r}; }
};

using CloudPrivateKeys = std::map<std::string, Scalar>;
using HierarchyMap = std::map<std::string, RoleHierarchy>;

// U' = prod (C'_4k)^{1/Priv^k_c}
G1Element auth_aggregate(const Ciphertext& ct, const CloudPrivateKeys& privs);

// Freshness, identity and replay gates first, then the pairing check. The
// digest is cached only on success. A null user_pub means the identity is not
// on the bulletin board.
Outcome<AuthResult> authenticate(const BilinearContext& ctx,
                                 const CloudPrivateKeys& privs,
                                 const Ciphertext& ct, const Trapdoor& trap,
                                 const G1Element* user_pub, std::int64_t now,
                                 ReplayCache& cache);

// Per target role in Gamma, the presented role that covers it: the role
// itself when presented, otherwise the smallest presented ancestor.
struct RolePlan {
  std::map<RoleId, RoleId> cover;  // target -> held
};

// Empty optional when some target is uncovered. No group operations.
std::optional<RolePlan> plan_roles(const AccessPolicy& policy,
                                   const RoleSet& presented,
                                   const HierarchyMap& hierarchies);

struct SearchMatch {
  RolePlan plan;
  GTElement v3;
  GTElement v6;
};

Outcome<SearchMatch> key_search(const BilinearContext& ctx, const Ciphertext& ct,
                                const Trapdoor& trap, const AuthResult& auth,
                                const ProxyKeySet& proxy,
                                const HierarchyMap& hierarchies,
                                const CloudPrivateKeys& privs);

PartialCiphertext partial_dec(const BilinearContext& ctx, const Ciphertext& ct,
                              const Trapdoor& trap, const SearchMatch& match,
                              const ProxyKeySet& proxy,
                              const CloudPrivateKeys& privs);

// Raises C_{r_j}, C'_{r_j} by t'/t for every r_j in Gamma whose ancestor set
// contains the revoked role. Returns true when something changed.
bool reencrypt_role(Ciphertext& ct, const RevocationToken& token,
                    const RoleHierarchy& hierarchy);

using CiphertextId = std::uint64_t;

// id -> ciphertext with an index from role set to ids. Persisted as an
// append-log of archives ("store.log") plus a JSON index ("store.idx").
class CiphertextStore {
 public:
  CiphertextId add(Ciphertext ct);
  const Ciphertext* find(CiphertextId id) const;
  std::vector<CiphertextId> ids() const;
  std::vector<CiphertextId> ids_for_roles(const RoleSet& roles) const;
  std::size_t size() const { return items_.size(); }

  // Applies reencrypt_role everywhere; returns the ids touched.
  std::vector<CiphertextId> reencrypt_role(const RevocationToken& token,
                                           const RoleHierarchy& hierarchy);

  void save(const std::filesystem::path& dir) const;
  static CiphertextStore load(const BilinearContext& ctx,
                              const std::filesystem::path& dir);

 private:
  std::map<CiphertextId, Ciphertext> items_;
  std::map<RoleSet, std::vector<CiphertextId>> index_;
  CiphertextId next_id_ = 1;
};

struct SearchHit {
  CiphertextId id;
  PartialCiphertext partial;
};

struct SearchResponse {
  Rejection reason = Rejection::kNone;  // request-level rejection
  std::vector<SearchHit> hits;
  std::map<CiphertextId, Rejection> misses;
};

// Cloud service state. Searches share the store; re-encryption is exclusive.
class CloudService {
 public:
  CloudService(BilinearContext ctx, std::int64_t replay_window = kDefaultReplayWindow)
      : ctx_(ctx), cache_(replay_window) {}

  void install_private_key(const std::string& org, Scalar priv);
  void install_proxy_keys(const ProxyKeySet& keys);
  void install_hierarchy(const RoleHierarchy& h);

  CiphertextId store(Ciphertext ct);

  // Authenticates once against the first candidate (ciphertexts owned by the
  // trapdoor's org, in id order), then searches every candidate.
  SearchResponse search(const Trapdoor& trap, const BulletinBoard& board,
                        std::int64_t now);

  // Applies the revocation token to the proxy keys and the stored data.
  std::vector<CiphertextId> apply_revocation(const RevocationToken& token,
                                             const RoleHierarchy& updated,
                                             const ProxyKeySet& updated_proxy);

  const BilinearContext& context() const { return ctx_; }
  const CiphertextStore& ciphertexts() const { return store_; }
  CiphertextStore& ciphertexts() { return store_; }
  const CloudPrivateKeys& private_keys() const { return privs_; }
  const ProxyKeySet& proxy_keys() const { return proxy_; }
  const HierarchyMap& hierarchies() const { return hierarchies_; }
  ReplayCache& replay_cache() { return cache_; }

 private:
  BilinearContext ctx_;
  CloudPrivateKeys privs_;
  ProxyKeySet proxy_;
  HierarchyMap hierarchies_;
  CiphertextStore store_;
  ReplayCache cache_;
  mutable std::shared_mutex store_mu_;
};

}  // namespace rbeks

#pragma once

// In-process simulation of every party plus the JSON scenario runner.

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "rbeks/authority.hpp"
#include "rbeks/cloud.hpp"
#include "rbeks/owner.hpp"
#include "rbeks/role_manager.hpp"
#include "rbeks/user.hpp"

namespace rbeks {

struct SimUser {
  std::string id;
  std::map<std::string, UserKeys> keys;  // per org
  RoleKeyRing ring;    // current role keys
  RoleKeyRing stale;   // keys of roles revoked from this user, never updated
  RoleSet assigned;
};

struct QueryResult {
  Trapdoor trapdoor;
  SearchSession session;
  SearchResponse response;
  std::map<CiphertextId, std::optional<Bytes>> plaintexts;  // nullopt: unwrap failed
};

// One deployment: SAs, role managers, a cloud and the users, sharing one
// seeded entropy stream and a simulated clock.
class Deployment {
 public:
  Deployment(BilinearContext ctx, const std::vector<RoleHierarchy>& hierarchies,
             std::uint64_t seed, std::string cloud_id = "cloud",
             std::int64_t start_time = 1'700'000'000);

  const BilinearContext& ctx() const { return ctx_; }
  const PublicParams& params() const { return params_; }
  const MasterSecret& master(const std::string& org) const { return masters_.at(org); }
  const RoleState& roles(const std::string& org) const { return managed_.at(org).state; }
  const ProxyKeySet& proxy(const std::string& org) const { return managed_.at(org).proxy; }
  const CloudKeys& cloud_keys(const std::string& org) const { return cloud_keys_.at(org); }
  const BulletinBoard& board() const { return board_; }
  CloudService& cloud() { return cloud_; }
  SeededRandom& rng() { return rng_; }
  std::vector<std::string> orgs() const;

  std::int64_t now() const { return now_; }
  void advance_clock(std::int64_t seconds) { now_ += seconds; }

  // Issues keys at every authority. Idempotent.
  SimUser& enrol(const std::string& user_id);
  SimUser& user(const std::string& user_id);
  bool has_user(const std::string& user_id) const { return users_.count(user_id) != 0; }
  void assign(const std::string& user_id, const RoleId& role);

  std::map<std::string, CloudPublicKeys> cloud_pubs() const;

  Ciphertext encrypt_only(ByteView message, const std::vector<std::string>& keywords,
                          const AccessPolicy& policy,
                          EncryptionRandomness* trace = nullptr);
  CiphertextId encrypt(ByteView message, const std::vector<std::string>& keywords,
                       const AccessPolicy& policy,
                       EncryptionRandomness* trace = nullptr);

  // Trapdoor for the user's keys at `org`. `present` defaults to every key
  // the user holds, stale ones included.
  TrapdoorResult trapdoor(const std::string& user_id, const std::string& org,
                          const std::vector<std::string>& keywords,
                          std::optional<RoleSet> present = std::nullopt);
  // Cloud search plus the user's final decryption of every hit.
  QueryResult submit(const std::string& user_id, TrapdoorResult td);
  QueryResult query(const std::string& user_id, const std::string& org,
                    const std::vector<std::string>& keywords,
                    std::optional<RoleSet> present = std::nullopt);

  // Role-level revocation of `role` from `revoked_users`: refresh at the SA,
  // re-encrypt at the cloud, push key updates to everyone else.
  RevocationToken revoke_role(const RoleId& role,
                              const std::set<std::string>& revoked_users);
  void revoke_user(const std::string& user_id, const std::string& org);

 private:
  BilinearContext ctx_;
  SeededRandom rng_;
  std::int64_t now_;
  std::string cloud_id_;
  PublicParams params_;
  std::map<std::string, MasterSecret> masters_;
  std::map<std::string, ManagedRoles> managed_;
  std::map<std::string, CloudKeys> cloud_keys_;
  BulletinBoard board_;
  CloudService cloud_;
  std::map<std::string, SimUser> users_;
};

// Scenario file (JSON, schema "rbeks-scenario", version 1).
struct Scenario {
  nlohmann::json doc;

  static Scenario parse(std::string_view text);
  static Scenario load(const std::string& path);
  // Throws kScenarioInvalid on unresolved references.
  void validate() const;
};

struct StepReport {
  std::size_t step = 0;
  std::string op;
  nlohmann::json observed;
  bool ok = true;
  std::string detail;
};

struct ScenarioReport {
  std::string name;
  std::vector<StepReport> steps;
  std::size_t queries = 0;
  bool passed = true;

  nlohmann::json to_json() const;
};

// Runs setup, enrolment, encryption, then the steps in order. With
// `stop_on_divergence` the first mismatch throws kExpectationFailed.
ScenarioReport run_scenario(const Scenario& s, bool stop_on_divergence = true);

}  // namespace rbeks

#include "rbeks/harness.hpp"

#include <sodium.h>

#include <fstream>
#include <sstream>

#include "rbeks/error.hpp"

namespace rbeks {

using nlohmann::json;

namespace {

std::vector<std::string> orgs_of(const std::vector<RoleHierarchy>& hs) {
  std::vector<std::string> out;
  for (const auto& h : hs) out.push_back(h.org());
  return out;
}

std::string sha256_hex(ByteView data) {
  Bytes out(crypto_hash_sha256_BYTES);
  crypto_hash_sha256(out.data(), data.data(), data.size());
  return to_hex(out);
}

}  // namespace

Deployment::Deployment(BilinearContext ctx,
                       const std::vector<RoleHierarchy>& hierarchies,
                       std::uint64_t seed, std::string cloud_id,
                       std::int64_t start_time)
    : ctx_(ctx),
      rng_(seed),
      now_(start_time),
      cloud_id_(std::move(cloud_id)),
      params_{ctx, ctx.gt_identity(), {}},
      cloud_(ctx) {
  auto setup = system_setup(orgs_of(hierarchies), ctx_, rng_);
  params_ = std::move(setup.params);
  masters_ = std::move(setup.masters);
  for (const auto& h : hierarchies) {
    const auto& org = h.org();
    auto managed = manage_role(h, ctx_, rng_);
    board_.publish_roles(managed.state);
    cloud_.install_proxy_keys(managed.proxy);
    cloud_.install_hierarchy(h);
    auto keys = pub_cloud_key_gen(ctx_, masters_.at(org), cloud_id_);
    cloud_.install_private_key(org, keys.priv);
    board_.cloud_pubs[org] = {keys.pub1, keys.pub2};
    cloud_keys_.emplace(org, std::move(keys));
    managed_.emplace(org, std::move(managed));
  }
}

std::vector<std::string> Deployment::orgs() const {
  std::vector<std::string> out;
  for (const auto& [org, _] : masters_) out.push_back(org);
  return out;
}

SimUser& Deployment::enrol(const std::string& user_id) {
  auto [it, fresh] = users_.try_emplace(user_id);
  if (!fresh) return it->second;
  it->second.id = user_id;
  for (const auto& [org, ms] : masters_) {
    auto keys = user_priv_key_gen(ctx_, ms, user_id);
    board_.user_pubs[{org, user_id}] = keys.pub_org;
    it->second.keys.emplace(org, std::move(keys));
  }
  return it->second;
}

SimUser& Deployment::user(const std::string& user_id) {
  auto it = users_.find(user_id);
  if (it == users_.end()) throw Error(Errc::kUnknownUser, user_id);
  return it->second;
}

void Deployment::assign(const std::string& user_id, const RoleId& role) {
  auto& u = user(user_id);
  auto m = managed_.find(role.org);
  if (m == managed_.end()) throw Error(Errc::kUnknownRole, role.str());
  auto pair = user_role_key_gen(m->second.state, role, u.keys.at(role.org).user_secret);
  u.ring.insert_or_assign(role, std::move(pair));
  u.stale.erase(role);
  u.assigned.insert(role);
}

std::map<std::string, CloudPublicKeys> Deployment::cloud_pubs() const {
  return board_.cloud_pubs;
}

Ciphertext Deployment::encrypt_only(ByteView message,
                                    const std::vector<std::string>& keywords,
                                    const AccessPolicy& policy,
                                    EncryptionRandomness* trace) {
  return rbeks::encrypt(params_, board_.cloud_pubs, message, keywords, policy,
                        board_.role_pks, rng_, trace);
}

CiphertextId Deployment::encrypt(ByteView message,
                                 const std::vector<std::string>& keywords,
                                 const AccessPolicy& policy,
                                 EncryptionRandomness* trace) {
  return cloud_.store(encrypt_only(message, keywords, policy, trace));
}

TrapdoorResult Deployment::trapdoor(const std::string& user_id,
                                    const std::string& org,
                                    const std::vector<std::string>& keywords,
                                    std::optional<RoleSet> present) {
  auto& u = user(user_id);
  auto keys = u.keys.find(org);
  if (keys == u.keys.end()) throw Error(Errc::kUnknownUser, user_id + " at " + org);
  RoleKeyRing ring = u.stale;
  for (const auto& [r, k] : u.ring) ring.insert_or_assign(r, k);
  if (!present) {
    present.emplace();
    for (const auto& [r, _] : ring) present->insert(r);
  }
  return trap_gen(ctx_, keys->second, ring, *present, keywords, now_, rng_);
}

QueryResult Deployment::submit(const std::string& user_id, TrapdoorResult td) {
  QueryResult out{std::move(td.trapdoor), std::move(td.session), {}, {}};
  out.response = cloud_.search(out.trapdoor, board_, now_);
  const auto& priv = user(user_id).keys.begin()->second.priv_global;
  for (const auto& hit : out.response.hits) {
    try {
      out.plaintexts[hit.id] = full_dec(hit.partial, priv, out.session);
    } catch (const Error& e) {
      if (e.code() != Errc::kAuthenticationFailure) throw;
      out.plaintexts[hit.id] = std::nullopt;
    }
  }
  return out;
}

QueryResult Deployment::query(const std::string& user_id, const std::string& org,
                              const std::vector<std::string>& keywords,
                              std::optional<RoleSet> present) {
  return submit(user_id, trapdoor(user_id, org, keywords, std::move(present)));
}

RevocationToken Deployment::revoke_role(const RoleId& role,
                                        const std::set<std::string>& revoked_users) {
  auto m = managed_.find(role.org);
  if (m == managed_.end()) throw Error(Errc::kUnknownRole, role.str());
  auto& managed = m->second;
  auto token = rbeks::revoke_role(ctx_, managed.state, managed.proxy, role, rng_);
  board_.publish_roles(managed.state);
  cloud_.apply_revocation(token, managed.state.hierarchy, managed.proxy);
  for (const auto& id : revoked_users) {
    auto& u = user(id);
    auto it = u.ring.find(role);
    if (it != u.ring.end()) {
      u.stale.insert_or_assign(role, it->second);
      u.ring.erase(it);
    }
    u.assigned.erase(role);
  }
  for (auto& [id, u] : users_) {
    update_role_keys(u.ring, token, managed.state.hierarchy);
  }
  return token;
}

void Deployment::revoke_user(const std::string& user_id, const std::string& org) {
  revoke_user_complete(board_, org, user_id);
}

// ---------------------------------------------------------------------------
// Scenarios

Scenario Scenario::parse(std::string_view text) {
  Scenario s;
  try {
    s.doc = json::parse(text);
  } catch (const json::exception& e) {
    throw Error(Errc::kScenarioInvalid, e.what());
  }
  s.validate();
  return s;
}

Scenario Scenario::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(Errc::kIo, "cannot open " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse(ss.str());
}

namespace {

[[noreturn]] void invalid(const std::string& what) {
  throw Error(Errc::kScenarioInvalid, what);
}

const json& field(const json& j, const char* key, const std::string& where) {
  if (!j.is_object() || !j.contains(key)) invalid(where + " is missing '" + key + "'");
  return j.at(key);
}

std::vector<std::string> strings(const json& j, const std::string& where) {
  if (!j.is_array()) invalid(where + " must be an array of strings");
  std::vector<std::string> out;
  for (const auto& e : j) {
    if (!e.is_string()) invalid(where + " must be an array of strings");
    out.push_back(e.get<std::string>());
  }
  return out;
}

RoleHierarchy hierarchy_of(const json& org) {
  const auto id = field(org, "id", "org").get<std::string>();
  std::vector<std::pair<std::string, std::string>> edges;
  for (const auto& e : field(org, "edges", "org " + id)) {
    if (!e.is_array() || e.size() != 2) invalid("edge in org " + id + " must be [parent, child]");
    edges.emplace_back(e[0].get<std::string>(), e[1].get<std::string>());
  }
  return RoleHierarchy::build(id, field(org, "root", "org " + id).get<std::string>(), edges);
}

AccessPolicy policy_of(const json& d, const std::string& where) {
  AccessPolicy p;
  p.owner_org = field(d, "owner_org", where).get<std::string>();
  for (const auto& r : strings(field(d, "policy", where), where + ".policy")) {
    p.roles.insert(RoleId::parse(r));
  }
  return p;
}

struct RunState {
  std::map<std::string, std::string> payloads;  // doc id -> payload
  std::map<std::string, CiphertextId> doc_ids;
  std::map<CiphertextId, std::string> doc_names;
  std::optional<std::pair<std::string, TrapdoorResult>> last;
};

}  // namespace

void Scenario::validate() const {
  if (!doc.is_object()) invalid("scenario must be an object");
  if (doc.value("schema", "") != "rbeks-scenario") invalid("schema must be 'rbeks-scenario'");
  if (doc.value("schema_version", 0) != 1) invalid("unsupported schema_version");
  if (!doc.contains("seed") || !doc["seed"].is_number_unsigned()) invalid("seed must be an unsigned integer");

  std::map<std::string, RoleHierarchy> hs;
  for (const auto& org : field(doc, "orgs", "scenario")) {
    try {
      auto h = hierarchy_of(org);
      auto id = h.org();
      if (!hs.emplace(id, std::move(h)).second) invalid("duplicate org " + id);
    } catch (const Error& e) {
      if (e.code() == Errc::kScenarioInvalid) throw;
      invalid(std::string("bad hierarchy: ") + e.what());
    }
  }
  if (hs.empty()) invalid("scenario needs at least one org");
  auto role_known = [&](const RoleId& r) {
    auto it = hs.find(r.org);
    return it != hs.end() && it->second.contains(r);
  };

  std::set<std::string> users;
  for (const auto& u : doc.value("users", json::array())) {
    const auto id = field(u, "id", "user").get<std::string>();
    if (!users.insert(id).second) invalid("duplicate user " + id);
    for (const auto& r : strings(u.value("roles", json::array()), "user " + id)) {
      if (!role_known(RoleId::parse(r))) invalid("user " + id + " references unknown role " + r);
    }
  }
  std::set<std::string> docs;
  auto check_doc = [&](const json& d) {
    const auto id = field(d, "id", "document").get<std::string>();
    if (!docs.insert(id).second) invalid("duplicate document " + id);
    field(d, "payload", "document " + id);
    if (strings(field(d, "keywords", "document " + id), "document " + id).empty()) {
      invalid("document " + id + " has no keywords");
    }
    auto p = policy_of(d, "document " + id);
    if (p.roles.empty()) invalid("document " + id + " has an empty policy");
    for (const auto& r : p.roles) {
      if (!role_known(r)) invalid("document " + id + " references unknown role " + r.str());
    }
    if (!p.orgs().count(p.owner_org)) invalid("document " + id + " owner_org not in policy");
  };
  for (const auto& d : doc.value("documents", json::array())) check_doc(d);

  bool have_query = false;
  for (const auto& step : doc.value("steps", json::array())) {
    const auto op = field(step, "op", "step").get<std::string>();
    if (op == "query") {
      const auto u = field(step, "user", "query").get<std::string>();
      if (!users.count(u)) invalid("query by unenrolled user " + u);
      if (!hs.count(field(step, "org", "query").get<std::string>())) invalid("query targets unknown org");
      strings(field(step, "keywords", "query"), "query.keywords");
      for (const auto& r : strings(step.value("roles", json::array()), "query.roles")) {
        if (!role_known(RoleId::parse(r))) invalid("query presents unknown role " + r);
      }
      have_query = true;
    } else if (op == "replay") {
      if (!have_query) invalid("replay before any query");
    } else if (op == "revoke_role") {
      auto r = RoleId::parse(field(step, "role", "revoke_role").get<std::string>());
      if (!role_known(r)) invalid("revoke_role of unknown role " + r.str());
      for (const auto& u : strings(step.value("users", json::array()), "revoke_role.users")) {
        if (!users.count(u)) invalid("revoke_role names unknown user " + u);
      }
    } else if (op == "revoke_user") {
      if (!users.count(field(step, "user", "revoke_user").get<std::string>())) invalid("revoke_user of unknown user");
      if (!hs.count(field(step, "org", "revoke_user").get<std::string>())) invalid("revoke_user at unknown org");
    } else if (op == "advance_clock") {
      if (!field(step, "seconds", "advance_clock").is_number_integer()) invalid("seconds must be an integer");
    } else if (op == "encrypt") {
      check_doc(field(step, "document", "encrypt"));
    } else if (op == "assign") {
      if (!users.count(field(step, "user", "assign").get<std::string>())) invalid("assign to unknown user");
      if (!role_known(RoleId::parse(field(step, "role", "assign").get<std::string>()))) invalid("assign of unknown role");
    } else {
      invalid("unknown step op '" + op + "'");
    }
  }
}

json ScenarioReport::to_json() const {
  json steps_json = json::array();
  for (const auto& s : steps) {
    json j = {{"step", s.step}, {"op", s.op}, {"ok", s.ok}};
    if (!s.observed.is_null()) j["observed"] = s.observed;
    if (!s.detail.empty()) j["detail"] = s.detail;
    steps_json.push_back(std::move(j));
  }
  return {{"scenario", name}, {"queries", queries}, {"passed", passed},
          {"steps", steps_json}};
}

namespace {

json observe(const QueryResult& q, const RunState& st) {
  json matches = json::array();
  for (const auto& hit : q.response.hits) {
    const auto& pt = q.plaintexts.at(hit.id);
    json m = {{"doc", st.doc_names.at(hit.id)}};
    if (pt) {
      m["sha256"] = sha256_hex(*pt);
    } else {
      m["decrypt_failed"] = true;
    }
    matches.push_back(std::move(m));
  }
  json misses = json::object();
  for (const auto& [id, why] : q.response.misses) {
    misses[st.doc_names.at(id)] = std::string(rejection_name(why));
  }
  return {{"reason", std::string(rejection_name(q.response.reason))},
          {"matches", matches},
          {"misses", misses}};
}

// Empty string when the observation meets the expectation.
std::string compare(const json& expect, const QueryResult& q, const RunState& st) {
  if (expect.is_null()) return {};
  const std::string reason(rejection_name(q.response.reason));
  if (expect.contains("reject")) {
    const auto want = expect["reject"].get<std::string>();
    if (reason != want) return "expected rejection " + want + ", got " + reason;
    return {};
  }
  if (q.response.reason != Rejection::kNone) return "unexpected rejection " + reason;
  if (expect.contains("match")) {
    std::set<std::string> want;
    for (const auto& d : expect["match"]) want.insert(d.get<std::string>());
    std::set<std::string> got;
    for (const auto& hit : q.response.hits) {
      const auto& name = st.doc_names.at(hit.id);
      got.insert(name);
      const auto& pt = q.plaintexts.at(hit.id);
      if (!pt) return "document " + name + " matched but did not decrypt";
      const auto& payload = st.payloads.at(name);
      if (std::string(pt->begin(), pt->end()) != payload) {
        return "document " + name + " decrypted to the wrong plaintext";
      }
    }
    if (got != want) {
      std::string g, w;
      for (const auto& x : got) g += " " + x;
      for (const auto& x : want) w += " " + x;
      return "matched {" + g + " } expected {" + w + " }";
    }
  }
  if (expect.contains("misses")) {
    for (const auto& [doc, why] : expect["misses"].items()) {
      auto id = st.doc_ids.find(doc);
      if (id == st.doc_ids.end()) return "expectation names unknown document " + doc;
      auto it = q.response.misses.find(id->second);
      const std::string got = it == q.response.misses.end()
                                  ? std::string("none")
                                  : std::string(rejection_name(it->second));
      if (got != why.get<std::string>()) {
        return "document " + doc + " missed with " + got + ", expected " +
               why.get<std::string>();
      }
    }
  }
  if (expect.contains("digests")) {
    for (const auto& [doc, hex] : expect["digests"].items()) {
      auto id = st.doc_ids.find(doc);
      if (id == st.doc_ids.end() || !q.plaintexts.count(id->second) ||
          !q.plaintexts.at(id->second)) {
        return "no plaintext recovered for " + doc;
      }
      if (sha256_hex(*q.plaintexts.at(id->second)) != hex.get<std::string>()) {
        return "plaintext digest mismatch for " + doc;
      }
    }
  }
  return {};
}

void encrypt_doc(Deployment& d, RunState& st, const json& doc) {
  const auto id = doc["id"].get<std::string>();
  const auto payload = doc["payload"].get<std::string>();
  auto keywords = doc["keywords"].get<std::vector<std::string>>();
  auto cid = d.encrypt(as_bytes(payload), keywords, policy_of(doc, id));
  st.payloads[id] = payload;
  st.doc_ids[id] = cid;
  st.doc_names[cid] = id;
}

}  // namespace

ScenarioReport run_scenario(const Scenario& s, bool stop_on_divergence) {
  s.validate();
  const auto& doc = s.doc;
  ScenarioReport report;
  report.name = doc.value("name", "");

  std::vector<RoleHierarchy> hs;
  for (const auto& org : doc["orgs"]) hs.push_back(hierarchy_of(org));
  const auto ctx = BilinearContext::setup(doc.value("security_bits", 160));
  Deployment d(ctx, hs, doc["seed"].get<std::uint64_t>(),
               doc.value("cloud_id", "cloud"),
               doc.value("start_time", std::int64_t{1'700'000'000}));

  RunState st;
  for (const auto& u : doc.value("users", json::array())) {
    const auto id = u["id"].get<std::string>();
    d.enrol(id);
    for (const auto& r : u.value("roles", json::array())) {
      d.assign(id, RoleId::parse(r.get<std::string>()));
    }
  }
  for (const auto& dj : doc.value("documents", json::array())) encrypt_doc(d, st, dj);

  auto finish = [&](StepReport rep) {
    report.steps.push_back(rep);
    if (!rep.ok) {
      report.passed = false;
      if (stop_on_divergence) {
        throw Error(Errc::kExpectationFailed,
                    "step " + std::to_string(rep.step) + " (" + rep.op + "): " + rep.detail);
      }
    }
  };

  std::size_t index = 0;
  for (const auto& step : doc.value("steps", json::array())) {
    StepReport rep;
    rep.step = index++;
    rep.op = step["op"].get<std::string>();
    if (rep.op == "query" || rep.op == "replay") {
      QueryResult q;
      std::string user;
      if (rep.op == "query") {
        user = step["user"].get<std::string>();
        std::optional<RoleSet> present;
        if (step.contains("roles")) {
          present.emplace();
          for (const auto& r : step["roles"]) present->insert(RoleId::parse(r.get<std::string>()));
        }
        auto td = d.trapdoor(user, step["org"].get<std::string>(),
                             step["keywords"].get<std::vector<std::string>>(), present);
        st.last.emplace(user, td);
        q = d.submit(user, std::move(td));
      } else {
        user = st.last->first;
        q = d.submit(user, st.last->second);
      }
      ++report.queries;
      rep.observed = observe(q, st);
      rep.detail = compare(step.value("expect", json()), q, st);
      rep.ok = rep.detail.empty();
    } else if (rep.op == "revoke_role") {
      std::set<std::string> users;
      for (const auto& u : step.value("users", json::array())) users.insert(u.get<std::string>());
      d.revoke_role(RoleId::parse(step["role"].get<std::string>()), users);
    } else if (rep.op == "revoke_user") {
      d.revoke_user(step["user"].get<std::string>(), step["org"].get<std::string>());
    } else if (rep.op == "advance_clock") {
      d.advance_clock(step["seconds"].get<std::int64_t>());
    } else if (rep.op == "encrypt") {
      encrypt_doc(d, st, step["document"]);
    } else if (rep.op == "assign") {
      d.assign(step["user"].get<std::string>(), RoleId::parse(step["role"].get<std::string>()));
    }
    finish(std::move(rep));
  }
  return report;
}

}  // namespace rbeks

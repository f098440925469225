#include "rbeks/keyfile.hpp"

#include <algorithm>
#include <array>
#include <fstream>

#include "rbeks/error.hpp"

namespace rbeks {

using nlohmann::json;

namespace {

constexpr std::array<std::uint8_t, 4> kKeyMagic = {'R', 'B', 'E', 'K'};

KeyFile start(std::string_view kind, const BilinearContext& ctx) {
  KeyFile f;
  f.manifest["kind"] = kind;
  f.manifest["security_bits"] = static_cast<int>(ctx.level());
  return f;
}

std::string str_field(const KeyFile& f, const char* key) {
  if (!f.manifest.contains(key) || !f.manifest[key].is_string()) {
    throw Error(Errc::kInvalidEncoding, std::string("manifest lacks '") + key + "'");
  }
  return f.manifest[key].get<std::string>();
}

const json& array_field(const KeyFile& f, const char* key) {
  if (!f.manifest.contains(key) || !f.manifest[key].is_array()) {
    throw Error(Errc::kInvalidEncoding, std::string("manifest lacks '") + key + "'");
  }
  return f.manifest[key];
}

std::string indexed(const char* prefix, std::size_t i) {
  return std::string(prefix) + "/" + std::to_string(i);
}

}  // namespace

void KeyFile::expect_kind(std::string_view want) const {
  if (kind() != want) {
    throw Error(Errc::kInvalidEncoding,
                "expected a " + std::string(want) + " file, got '" + kind() + "'");
  }
}

const Bytes& KeyFile::get(const std::string& name) const {
  auto it = blobs.find(name);
  if (it == blobs.end()) throw Error(Errc::kInvalidEncoding, "missing blob " + name);
  return it->second;
}

Bytes KeyFile::serialize() const {
  ByteWriter w;
  w.raw(kKeyMagic);
  w.u16(kEncodingVersion);
  w.str(manifest.dump());
  w.u32(static_cast<std::uint32_t>(blobs.size()));
  for (const auto& [name, data] : blobs) {
    w.str(name);
    w.blob(data);
  }
  return std::move(w).take();
}

KeyFile KeyFile::parse(ByteView bytes) {
  ByteReader r(bytes);
  auto magic = r.raw(kKeyMagic.size());
  if (!std::equal(magic.begin(), magic.end(), kKeyMagic.begin())) {
    throw Error(Errc::kInvalidEncoding, "not a key file");
  }
  if (r.u16() != kEncodingVersion) {
    throw Error(Errc::kInvalidEncoding, "unsupported key file version");
  }
  KeyFile f;
  f.manifest = json::parse(r.str(), nullptr, false);
  if (f.manifest.is_discarded() || !f.manifest.is_object()) {
    throw Error(Errc::kInvalidEncoding, "key file manifest is not a JSON object");
  }
  const auto n = r.u32();
  for (std::uint32_t i = 0; i < n; ++i) {
    auto name = r.str();
    auto data = r.blob();
    f.blobs[name] = Bytes(data.begin(), data.end());
  }
  r.expect_done();
  return f;
}

void KeyFile::save(const std::filesystem::path& path) const {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  const Bytes data = serialize();
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  out.write(reinterpret_cast<const char*>(data.data()),
            static_cast<std::streamsize>(data.size()));
  if (!out) throw Error(Errc::kIo, "cannot write " + path.string());
}

KeyFile KeyFile::load(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(Errc::kIo, "cannot read " + path.string());
  Bytes data((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return parse(data);
}

BilinearContext context_of(const KeyFile& f) {
  if (!f.manifest.contains("security_bits")) {
    throw Error(Errc::kInvalidEncoding, "manifest lacks security_bits");
  }
  return BilinearContext::setup(f.manifest["security_bits"].get<int>());
}

KeyFile to_keyfile(const PublicParams& pp) {
  auto f = start("public-params", pp.ctx);
  f.put("Y", pp.big_y.serialize());
  json orgs = json::array();
  for (const auto& [org, h1] : pp.h1) {
    f.put(indexed("h1", orgs.size()), h1.serialize());
    orgs.push_back(org);
  }
  f.manifest["orgs"] = orgs;
  return f;
}

PublicParams public_params_from(const KeyFile& f) {
  f.expect_kind("public-params");
  const auto ctx = context_of(f);
  PublicParams pp{ctx, ctx.decode_gt(f.get("Y")), {}};
  const auto& orgs = array_field(f, "orgs");
  for (std::size_t i = 0; i < orgs.size(); ++i) {
    pp.h1[orgs[i].get<std::string>()] = ctx.decode_g1(f.get(indexed("h1", i)));
  }
  return pp;
}

KeyFile to_keyfile(const MasterSecret& ms, const BilinearContext& ctx) {
  auto f = start("master-secret", ctx);
  f.manifest["org"] = ms.org;
  f.put("g_y", ms.g_y.serialize());
  f.put("eta", ms.eta.serialize());
  f.put("mu", ms.mu.serialize());
  f.put("x", ms.x.serialize());
  return f;
}

MasterSecret master_secret_from(const KeyFile& f) {
  f.expect_kind("master-secret");
  const auto ctx = context_of(f);
  return {str_field(f, "org"), ctx.decode_g1(f.get("g_y")),
          ctx.decode_scalar(f.get("eta")), ctx.decode_scalar(f.get("mu")),
          ctx.decode_scalar(f.get("x"))};
}

KeyFile to_keyfile(const RoleState& state, const BilinearContext& ctx) {
  auto f = start("role-state", ctx);
  f.manifest["org"] = state.hierarchy.org();
  f.manifest["hierarchy"] = state.hierarchy.to_text();
  json roles = json::array();
  for (const auto& [role, t] : state.t) {
    const auto i = roles.size();
    f.put(indexed("t", i), t.serialize());
    auto rec = state.records.find(role);
    if (rec != state.records.end()) {
      f.put(indexed("rs", i), rec->second.rs.serialize());
      f.put(indexed("pk", i), rec->second.pk.serialize());
    }
    roles.push_back(role.name);
  }
  f.manifest["roles"] = roles;
  return f;
}

RoleState role_state_from(const KeyFile& f) {
  f.expect_kind("role-state");
  const auto ctx = context_of(f);
  RoleState state{RoleHierarchy::parse(str_field(f, "hierarchy"), str_field(f, "org")),
                  {}, {}};
  const auto& roles = array_field(f, "roles");
  for (std::size_t i = 0; i < roles.size(); ++i) {
    RoleId role{state.hierarchy.org(), roles[i].get<std::string>()};
    if (!state.hierarchy.contains(role)) {
      throw Error(Errc::kInvalidEncoding, "role state names unknown role " + role.str());
    }
    Scalar t = ctx.decode_scalar(f.get(indexed("t", i)));
    if (role != state.hierarchy.root()) {
      state.records.emplace(role, RoleSecretRecord{role, t,
                                                   ctx.decode_scalar(f.get(indexed("rs", i))),
                                                   ctx.decode_g1(f.get(indexed("pk", i)))});
    }
    state.t.emplace(role, std::move(t));
  }
  return state;
}

KeyFile to_keyfile(const ProxyKeySet& proxy, const std::string& org,
                   const BilinearContext& ctx) {
  auto f = start("proxy-keys", ctx);
  f.manifest["org"] = org;
  json entries = json::array();
  for (const auto& [key, value] : proxy.entries()) {
    if (key.first.org != org) continue;
    f.put(indexed("pkey", entries.size()), value.serialize());
    entries.push_back({key.first.str(), key.second.str()});
  }
  f.manifest["entries"] = entries;
  return f;
}

ProxyKeySet proxy_keys_from(const KeyFile& f) {
  f.expect_kind("proxy-keys");
  const auto ctx = context_of(f);
  ProxyKeySet proxy;
  const auto& entries = array_field(f, "entries");
  for (std::size_t i = 0; i < entries.size(); ++i) {
    proxy.set(RoleId::parse(entries[i][0].get<std::string>()),
              RoleId::parse(entries[i][1].get<std::string>()),
              ctx.decode_scalar(f.get(indexed("pkey", i))));
  }
  return proxy;
}

KeyFile to_keyfile(const CloudKeys& keys, const std::string& org,
                   const std::string& cloud_id, const BilinearContext& ctx) {
  auto f = start("cloud-keys", ctx);
  f.manifest["org"] = org;
  f.manifest["cloud_id"] = cloud_id;
  f.put("priv", keys.priv.serialize());
  f.put("pub1", keys.pub1.serialize());
  f.put("pub2", keys.pub2.serialize());
  return f;
}

CloudKeys cloud_keys_from(const KeyFile& f) {
  f.expect_kind("cloud-keys");
  const auto ctx = context_of(f);
  return {ctx.decode_scalar(f.get("priv")), ctx.decode_g1(f.get("pub1")),
          ctx.decode_g1(f.get("pub2"))};
}

KeyFile to_keyfile(const UserKeys& keys, const BilinearContext& ctx) {
  auto f = start("user-keys", ctx);
  f.manifest["org"] = keys.org;
  f.manifest["user"] = keys.user_id;
  f.put("priv_global", keys.priv_global.serialize());
  f.put("priv_org", keys.priv_org.serialize());
  f.put("pub_org", keys.pub_org.serialize());
  f.put("user_secret", keys.user_secret.serialize());
  return f;
}

UserKeys user_keys_from(const KeyFile& f) {
  f.expect_kind("user-keys");
  const auto ctx = context_of(f);
  return {str_field(f, "user"),
          str_field(f, "org"),
          ctx.decode_scalar(f.get("priv_global")),
          ctx.decode_g1(f.get("priv_org")),
          ctx.decode_g1(f.get("pub_org")),
          ctx.decode_g1(f.get("user_secret"))};
}

KeyFile to_keyfile(const RoleKeyRing& ring, const std::string& user,
                   const BilinearContext& ctx) {
  auto f = start("role-keys", ctx);
  f.manifest["user"] = user;
  json roles = json::array();
  for (const auto& [role, pair] : ring) {
    f.put(indexed("rk1", roles.size()), pair.rk1.serialize());
    f.put(indexed("rk2", roles.size()), pair.rk2.serialize());
    roles.push_back(role.str());
  }
  f.manifest["roles"] = roles;
  return f;
}

RoleKeyRing role_keys_from(const KeyFile& f) {
  f.expect_kind("role-keys");
  const auto ctx = context_of(f);
  RoleKeyRing ring;
  const auto& roles = array_field(f, "roles");
  for (std::size_t i = 0; i < roles.size(); ++i) {
    auto role = RoleId::parse(roles[i].get<std::string>());
    ring.emplace(role, RoleKeyPair{role, ctx.decode_g1(f.get(indexed("rk1", i))),
                                   ctx.decode_g1(f.get(indexed("rk2", i)))});
  }
  return ring;
}

KeyFile to_keyfile(const BulletinBoard& board, const BilinearContext& ctx) {
  auto f = start("bulletin-board", ctx);
  json users = json::array(), roles = json::array(), clouds = json::array();
  for (const auto& [key, pub] : board.user_pubs) {
    f.put(indexed("user", users.size()), pub.serialize());
    users.push_back({key.first, key.second});
  }
  for (const auto& [role, pk] : board.role_pks) {
    f.put(indexed("role", roles.size()), pk.serialize());
    roles.push_back(role.str());
  }
  for (const auto& [org, pubs] : board.cloud_pubs) {
    f.put(indexed("cloud1", clouds.size()), pubs.pub1.serialize());
    f.put(indexed("cloud2", clouds.size()), pubs.pub2.serialize());
    clouds.push_back(org);
  }
  f.manifest["users"] = users;
  f.manifest["roles"] = roles;
  f.manifest["clouds"] = clouds;
  return f;
}

BulletinBoard bulletin_board_from(const KeyFile& f) {
  f.expect_kind("bulletin-board");
  const auto ctx = context_of(f);
  BulletinBoard board;
  const auto& users = array_field(f, "users");
  for (std::size_t i = 0; i < users.size(); ++i) {
    board.user_pubs[{users[i][0].get<std::string>(), users[i][1].get<std::string>()}] =
        ctx.decode_g1(f.get(indexed("user", i)));
  }
  const auto& roles = array_field(f, "roles");
  for (std::size_t i = 0; i < roles.size(); ++i) {
    board.role_pks[RoleId::parse(roles[i].get<std::string>())] =
        ctx.decode_g1(f.get(indexed("role", i)));
  }
  const auto& clouds = array_field(f, "clouds");
  for (std::size_t i = 0; i < clouds.size(); ++i) {
    board.cloud_pubs[clouds[i].get<std::string>()] = {
        ctx.decode_g1(f.get(indexed("cloud1", i))),
        ctx.decode_g1(f.get(indexed("cloud2", i)))};
  }
  return board;
}

KeyFile to_keyfile(const RevocationToken& token,
                   const std::vector<std::string>& revoked_users,
                   const BilinearContext& ctx) {
  auto f = start("revocation-token", ctx);
  f.manifest["role"] = token.role.str();
  f.manifest["revoked_users"] = revoked_users;
  f.put("ratio_forward", token.ratio_forward.serialize());
  f.put("ratio_backward", token.ratio_backward.serialize());
  f.put("new_t", token.new_t.serialize());
  return f;
}

RevocationToken revocation_token_from(const KeyFile& f) {
  f.expect_kind("revocation-token");
  const auto ctx = context_of(f);
  return {RoleId::parse(str_field(f, "role")), ctx.decode_scalar(f.get("ratio_forward")),
          ctx.decode_scalar(f.get("ratio_backward")), ctx.decode_scalar(f.get("new_t"))};
}

KeyFile to_keyfile(const SearchSession& session, const std::string& user,
                   const BilinearContext& ctx) {
  auto f = start("search-session", ctx);
  f.manifest["user"] = user;
  f.manifest["trapdoor_digest"] = to_hex(session.trapdoor_digest);
  f.put("v", session.v.serialize());
  return f;
}

SearchSession search_session_from(const KeyFile& f) {
  f.expect_kind("search-session");
  const auto ctx = context_of(f);
  return {ctx.decode_scalar(f.get("v")), from_hex(str_field(f, "trapdoor_digest"))};
}

}  // namespace rbeks

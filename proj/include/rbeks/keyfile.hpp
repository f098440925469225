#pragma once

// Versioned key containers: magic "RBEK" | version | JSON manifest | named
// blobs holding canonical element encodings.

#include <filesystem>
#include <map>
#include <string>

#include <json.hpp>

#include "rbeks/authority.hpp"
#include "rbeks/role_manager.hpp"
#include "rbeks/user.hpp"

namespace rbeks {

struct KeyFile {
  nlohmann::json manifest = nlohmann::json::object();
  std::map<std::string, Bytes> blobs;

  std::string kind() const { return manifest.value("kind", ""); }
  // Throws kInvalidEncoding when the kind differs.
  void expect_kind(std::string_view kind) const;

  void put(const std::string& name, Bytes data) { blobs[name] = std::move(data); }
  // Throws kInvalidEncoding when missing.
  const Bytes& get(const std::string& name) const;

  Bytes serialize() const;
  static KeyFile parse(ByteView bytes);

  void save(const std::filesystem::path& path) const;
  static KeyFile load(const std::filesystem::path& path);
};

// Security level recorded in every manifest written below.
BilinearContext context_of(const KeyFile& f);

KeyFile to_keyfile(const PublicParams& pp);
PublicParams public_params_from(const KeyFile& f);

KeyFile to_keyfile(const MasterSecret& ms, const BilinearContext& ctx);
MasterSecret master_secret_from(const KeyFile& f);

KeyFile to_keyfile(const RoleState& state, const BilinearContext& ctx);
RoleState role_state_from(const KeyFile& f);

KeyFile to_keyfile(const ProxyKeySet& proxy, const std::string& org,
                   const BilinearContext& ctx);
ProxyKeySet proxy_keys_from(const KeyFile& f);

KeyFile to_keyfile(const CloudKeys& keys, const std::string& org,
                   const std::string& cloud_id, const BilinearContext& ctx);
CloudKeys cloud_keys_from(const KeyFile& f);

KeyFile to_keyfile(const UserKeys& keys, const BilinearContext& ctx);
UserKeys user_keys_from(const KeyFile& f);

KeyFile to_keyfile(const RoleKeyRing& ring, const std::string& user,
                   const BilinearContext& ctx);
RoleKeyRing role_keys_from(const KeyFile& f);

KeyFile to_keyfile(const BulletinBoard& board, const BilinearContext& ctx);
BulletinBoard bulletin_board_from(const KeyFile& f);

KeyFile to_keyfile(const RevocationToken& token,
                   const std::vector<std::string>& revoked_users,
                   const BilinearContext& ctx);
RevocationToken revocation_token_from(const KeyFile& f);

KeyFile to_keyfile(const SearchSession& session, const std::string& user,
                   const BilinearContext& ctx);
SearchSession search_session_from(const KeyFile& f);

}  // namespace rbeks

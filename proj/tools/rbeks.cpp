// rbeks: command-line front end over a workspace directory that holds every
// party's state (authorities, role managers, cloud, users, bulletin board).

#include <CLI11.hpp>
#include <json.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <sstream>

#include "rbeks/bench.hpp"
#include "rbeks/cloud.hpp"
#include "rbeks/error.hpp"
#include "rbeks/harness.hpp"
#include "rbeks/keyfile.hpp"

namespace fs = std::filesystem;
using namespace rbeks;
using nlohmann::json;

namespace {

std::vector<std::string> split(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

Bytes read_file(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) throw Error(Errc::kIo, "cannot read " + p.string());
  return Bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
}

std::string read_text(const fs::path& p) {
  auto b = read_file(p);
  return std::string(b.begin(), b.end());
}

void write_file(const fs::path& p, ByteView data) {
  if (p.has_parent_path()) fs::create_directories(p.parent_path());
  std::ofstream out(p, std::ios::binary | std::ios::trunc);
  out.write(reinterpret_cast<const char*>(data.data()), static_cast<std::streamsize>(data.size()));
  if (!out) throw Error(Errc::kIo, "cannot write " + p.string());
}

std::int64_t wall_clock() {
  return std::chrono::duration_cast<std::chrono::seconds>(
             std::chrono::system_clock::now().time_since_epoch())
      .count();
}

struct Workspace {
  fs::path root;

  fs::path params() const { return root / "params.key"; }
  fs::path board() const { return root / "board.key"; }
  fs::path master(const std::string& org) const { return root / "sa" / org / "master.key"; }
  fs::path roles(const std::string& org) const { return root / "sa" / org / "roles.key"; }
  fs::path cloud_key(const std::string& org) const { return root / "cloud" / "keys" / (org + ".key"); }
  fs::path proxy(const std::string& org) const { return root / "cloud" / "proxy" / (org + ".key"); }
  fs::path cloud_hierarchy(const std::string& org) const {
    return root / "cloud" / "hierarchy" / (org + ".txt");
  }
  fs::path store() const { return root / "cloud" / "store"; }
  fs::path replay() const { return root / "cloud" / "replay.json"; }
  fs::path user_keys(const std::string& user, const std::string& org) const {
    return root / "users" / user / (org + ".key");
  }
  fs::path ring(const std::string& user) const { return root / "users" / user / "roles.key"; }
  fs::path session(const std::string& user, const std::string& digest_hex) const {
    return root / "users" / user / "sessions" / (digest_hex + ".key");
  }
  fs::path tokens() const { return root / "tokens"; }

  PublicParams load_params() const {
    if (!fs::exists(params())) {
      throw Error(Errc::kIo, "no workspace at " + root.string() + "; run 'sa setup' first");
    }
    return public_params_from(KeyFile::load(params()));
  }
  BulletinBoard load_board() const { return bulletin_board_from(KeyFile::load(board())); }
  void save_board(const BulletinBoard& b, const BilinearContext& ctx) const {
    to_keyfile(b, ctx).save(board());
  }
  RoleKeyRing load_ring(const std::string& user) const {
    return fs::exists(ring(user)) ? role_keys_from(KeyFile::load(ring(user))) : RoleKeyRing{};
  }
};

std::unique_ptr<RandomSource> make_rng(const std::optional<std::uint64_t>& seed) {
  if (seed) return std::make_unique<SeededRandom>(*seed);
  return std::make_unique<SystemRandom>();
}

// Rebuilds the cloud from the workspace files it is entitled to.
std::unique_ptr<CloudService> load_cloud(const Workspace& ws, const BilinearContext& ctx) {
  auto cloud = std::make_unique<CloudService>(ctx);
  const auto keys_dir = ws.root / "cloud" / "keys";
  if (fs::exists(keys_dir)) {
    for (const auto& e : fs::directory_iterator(keys_dir)) {
      auto f = KeyFile::load(e.path());
      cloud->install_private_key(f.manifest["org"].get<std::string>(), cloud_keys_from(f).priv);
    }
  }
  const auto proxy_dir = ws.root / "cloud" / "proxy";
  if (fs::exists(proxy_dir)) {
    for (const auto& e : fs::directory_iterator(proxy_dir)) {
      cloud->install_proxy_keys(proxy_keys_from(KeyFile::load(e.path())));
    }
  }
  const auto h_dir = ws.root / "cloud" / "hierarchy";
  if (fs::exists(h_dir)) {
    for (const auto& e : fs::directory_iterator(h_dir)) {
      cloud->install_hierarchy(RoleHierarchy::parse(read_text(e.path()), e.path().stem().string()));
    }
  }
  cloud->ciphertexts() = CiphertextStore::load(ctx, ws.store());
  return cloud;
}

void restore_replay(const Workspace& ws, ReplayCache& cache, std::int64_t now) {
  if (!fs::exists(ws.replay())) return;
  auto j = json::parse(read_text(ws.replay()));
  for (const auto& [hex, ts] : j.items()) cache.insert(from_hex(hex), ts.get<std::int64_t>(), now);
}

void persist_replay(const Workspace& ws, const ReplayCache& cache) {
  json j = json::object();
  for (const auto& [digest, ts] : cache.snapshot()) j[to_hex(digest)] = ts;
  const auto text = j.dump(2) + "\n";
  write_file(ws.replay(), as_bytes(text));
}

std::string org_of_user_token(const RevocationToken& t) { return t.role.org; }

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Role-based encrypted keyword search: authorities, role managers, owners, users and the cloud"};
  app.require_subcommand(1);

  std::string ws_dir = "rbeks-workspace";
  std::optional<std::uint64_t> seed;
  app.add_option("--ws", ws_dir, "Workspace directory")->capture_default_str();
  app.add_option("--seed", seed, "Deterministic entropy seed (default: system entropy)");

  // ----- sa -----
  auto* sa = app.add_subcommand("sa", "System authority operations");
  sa->require_subcommand(1);

  std::string orgs_csv;
  int bits = static_cast<int>(kDefaultSecurityLevel);
  bool force = false;
  auto* sa_setup = sa->add_subcommand("setup", "Joint setup across the listed organizations");
  sa_setup->add_option("--orgs", orgs_csv, "Comma-separated authority ids")->required();
  sa_setup->add_option("--bits", bits, "Group order bits: 160, 224 or 256")->capture_default_str();
  sa_setup->add_flag("--force", force, "Overwrite an existing workspace");

  std::string org, hierarchy_file, user_id, role_name, cloud_id = "cloud", from_csv;
  auto* sa_manage = sa->add_subcommand("manage-roles", "Derive role secrets, public keys and proxy keys");
  sa_manage->add_option("--org", org)->required();
  sa_manage->add_option("--hierarchy", hierarchy_file, "Hierarchy text file")->required()->check(CLI::ExistingFile);

  auto* sa_cloud = sa->add_subcommand("keygen-cloud", "Issue the cloud key pair for an organization");
  sa_cloud->add_option("--org", org)->required();
  sa_cloud->add_option("--cloud-id", cloud_id)->capture_default_str();

  auto* sa_user = sa->add_subcommand("keygen-user", "Issue user keys at an organization");
  sa_user->add_option("--org", org)->required();
  sa_user->add_option("--user", user_id)->required();

  auto* sa_revoke_user = sa->add_subcommand("revoke-user", "Remove a user's public key from the bulletin board");
  sa_revoke_user->add_option("--org", org)->required();
  sa_revoke_user->add_option("--user", user_id)->required();

  auto* sa_revoke_role = sa->add_subcommand("revoke-role", "Refresh a role and emit a revocation token");
  sa_revoke_role->add_option("--org", org)->required();
  sa_revoke_role->add_option("--role", role_name, "Role name within the org")->required();
  sa_revoke_role->add_option("--from", from_csv, "Comma-separated users losing the role");

  // ----- rm -----
  auto* rm = app.add_subcommand("rm", "Role manager operations");
  rm->require_subcommand(1);
  std::string role_id, token_file;
  auto* rm_assign = rm->add_subcommand("assign-role", "Issue role keys to a user");
  rm_assign->add_option("--user", user_id)->required();
  rm_assign->add_option("--role", role_id, "org:name")->required();
  auto* rm_push = rm->add_subcommand("push-updates", "Apply a revocation token to every user's role keys");
  rm_push->add_option("--token", token_file)->required()->check(CLI::ExistingFile);

  // ----- owner -----
  auto* owner = app.add_subcommand("owner", "Data owner operations");
  owner->require_subcommand(1);
  std::string in_file, message, keywords_csv, policy_csv, owner_org, out_file;
  auto* owner_enc = owner->add_subcommand("encrypt", "Encrypt a payload into an archive");
  auto* in_opt = owner_enc->add_option("--in", in_file, "Payload file")->check(CLI::ExistingFile);
  owner_enc->add_option("--message", message, "Inline payload")->excludes(in_opt);
  owner_enc->add_option("--keywords", keywords_csv)->required();
  owner_enc->add_option("--policy", policy_csv, "Comma-separated org:role list")->required();
  owner_enc->add_option("--owner-org", owner_org)->required();
  owner_enc->add_option("--out", out_file)->required();

  // ----- user -----
  auto* user = app.add_subcommand("user", "User operations");
  user->require_subcommand(1);
  std::string roles_csv, trapdoor_file, partial_file;
  std::optional<std::int64_t> now_opt;
  auto* user_search = user->add_subcommand("search", "Generate a trapdoor");
  user_search->add_option("--user", user_id)->required();
  user_search->add_option("--org", org, "Organization owning the data")->required();
  user_search->add_option("--keywords", keywords_csv)->required();
  user_search->add_option("--roles", roles_csv, "Roles to present (default: all held)");
  user_search->add_option("--now", now_opt, "Timestamp in seconds (default: wall clock)");
  user_search->add_option("--out", out_file)->required();
  auto* user_dec = user->add_subcommand("decrypt", "Finish decryption of a partial ciphertext");
  user_dec->add_option("--user", user_id)->required();
  user_dec->add_option("--trapdoor", trapdoor_file)->required()->check(CLI::ExistingFile);
  user_dec->add_option("--partial", partial_file)->required()->check(CLI::ExistingFile);
  user_dec->add_option("--out", out_file, "Plaintext output (default: stdout)");

  // ----- cloud -----
  auto* cloud = app.add_subcommand("cloud", "Cloud operations");
  cloud->require_subcommand(1);
  std::string out_dir;
  auto* cloud_store = cloud->add_subcommand("store", "Append an archive to the store");
  cloud_store->add_option("--in", in_file)->required()->check(CLI::ExistingFile);
  auto* cloud_search = cloud->add_subcommand("search", "Authenticate, search and partially decrypt");
  cloud_search->add_option("--trapdoor", trapdoor_file)->required()->check(CLI::ExistingFile);
  cloud_search->add_option("--now", now_opt, "Timestamp in seconds (default: wall clock)");
  cloud_search->add_option("--out-dir", out_dir, "Where partial ciphertexts go")->required();
  auto* cloud_reenc = cloud->add_subcommand("reencrypt", "Re-encrypt stored data for a revoked role");
  cloud_reenc->add_option("--token", token_file)->required()->check(CLI::ExistingFile);

  // ----- demo -----
  auto* demo = app.add_subcommand("demo", "Scenario runner");
  demo->require_subcommand(1);
  std::string scenario_file, report_file;
  auto* demo_run = demo->add_subcommand("run", "Run a scenario file");
  demo_run->add_option("scenario", scenario_file)->required()->check(CLI::ExistingFile);
  demo_run->add_option("--report", report_file, "Write the JSON report here");

  // ----- bench -----
  auto* bench_cmd = app.add_subcommand("bench", "Per-phase operation counts and timings");
  std::string phase_name;
  std::size_t gamma = 1, presented = 0, orgs_n = 0, trials = 50, nkw = 1;
  bool sweep = false;
  std::string csv_file;
  int bench_bits = 160;
  bench_cmd->add_option("phase", phase_name,
                        "Enc, TrapGen, Authentication, KeySearch, PartialDec, Decryption or all")
      ->required();
  bench_cmd->add_option("--gamma", gamma, "|Gamma|")->capture_default_str();
  bench_cmd->add_option("--roles", presented, "|S| (default: |Gamma|)");
  bench_cmd->add_option("--orgs", orgs_n, "|Gamma_Phi| (default: |Gamma|)");
  bench_cmd->add_option("--keywords", nkw, "Keywords per query")->capture_default_str();
  bench_cmd->add_option("--trials", trials)->capture_default_str();
  bench_cmd->add_option("--bits", bench_bits)->capture_default_str();
  bench_cmd->add_flag("--sweep", sweep, "Run |Gamma| = 1..N with |Gamma_Phi| = |S| = |Gamma|");
  bench_cmd->add_option("--csv", csv_file, "CSV output (default: stdout)");

  CLI11_PARSE(app, argc, argv);

  try {
    Workspace ws{ws_dir};
    auto rng = make_rng(seed);

    if (sa_setup->parsed()) {
      if (fs::exists(ws.params()) && !force) {
        throw Error(Errc::kInvalidArgument, ws.root.string() + " already holds a deployment; pass --force");
      }
      const auto ctx = BilinearContext::setup(bits);
      auto setup = system_setup(split(orgs_csv), ctx, *rng);
      to_keyfile(setup.params).save(ws.params());
      for (const auto& [o, ms] : setup.masters) to_keyfile(ms, ctx).save(ws.master(o));
      ws.save_board(BulletinBoard{}, ctx);
      std::cout << "setup: " << setup.masters.size() << " authorities, " << bits
                << "-bit group order, workspace " << ws.root.string() << "\n";
    } else if (sa_manage->parsed()) {
      const auto pp = ws.load_params();
      master_secret_from(KeyFile::load(ws.master(org)));
      auto h = RoleHierarchy::parse(read_text(hierarchy_file), org);
      auto managed = manage_role(h, pp.ctx, *rng);
      to_keyfile(managed.state, pp.ctx).save(ws.roles(org));
      to_keyfile(managed.proxy, org, pp.ctx).save(ws.proxy(org));
      write_file(ws.cloud_hierarchy(org), as_bytes(h.to_text()));
      auto board = ws.load_board();
      board.publish_roles(managed.state);
      ws.save_board(board, pp.ctx);
      std::cout << "manage-roles: " << managed.state.records.size() << " roles, "
                << managed.proxy.entries().size() << " proxy keys for " << org << "\n";
    } else if (sa_cloud->parsed()) {
      const auto pp = ws.load_params();
      auto ms = master_secret_from(KeyFile::load(ws.master(org)));
      auto keys = pub_cloud_key_gen(pp.ctx, ms, cloud_id);
      to_keyfile(keys, org, cloud_id, pp.ctx).save(ws.cloud_key(org));
      auto board = ws.load_board();
      board.cloud_pubs[org] = {keys.pub1, keys.pub2};
      ws.save_board(board, pp.ctx);
      std::cout << "keygen-cloud: " << cloud_id << " keyed at " << org << "\n";
    } else if (sa_user->parsed()) {
      const auto pp = ws.load_params();
      auto ms = master_secret_from(KeyFile::load(ws.master(org)));
      auto keys = user_priv_key_gen(pp.ctx, ms, user_id);
      to_keyfile(keys, pp.ctx).save(ws.user_keys(user_id, org));
      auto board = ws.load_board();
      board.user_pubs[{org, user_id}] = keys.pub_org;
      ws.save_board(board, pp.ctx);
      std::cout << "keygen-user: " << user_id << " enrolled at " << org << "\n";
    } else if (sa_revoke_user->parsed()) {
      const auto pp = ws.load_params();
      auto board = ws.load_board();
      revoke_user_complete(board, org, user_id);
      ws.save_board(board, pp.ctx);
      std::cout << "revoke-user: " << user_id << " removed from " << org << "\n";
    } else if (sa_revoke_role->parsed()) {
      const auto pp = ws.load_params();
      auto state = role_state_from(KeyFile::load(ws.roles(org)));
      auto proxy = proxy_keys_from(KeyFile::load(ws.proxy(org)));
      const RoleId role{org, role_name};
      auto token = revoke_role(pp.ctx, state, proxy, role, *rng);
      to_keyfile(state, pp.ctx).save(ws.roles(org));
      to_keyfile(proxy, org, pp.ctx).save(ws.proxy(org));
      auto board = ws.load_board();
      board.publish_roles(state);
      ws.save_board(board, pp.ctx);
      std::size_t n = 0;
      if (fs::exists(ws.tokens())) {
        n = static_cast<std::size_t>(std::distance(fs::directory_iterator(ws.tokens()), {}));
      }
      const auto path = ws.tokens() / (org + "-" + role_name + "-" + std::to_string(n + 1) + ".key");
      to_keyfile(token, split(from_csv), pp.ctx).save(path);
      std::cout << path.string() << "\n";
    } else if (rm_assign->parsed()) {
      const auto pp = ws.load_params();
      const auto role = RoleId::parse(role_id);
      auto state = role_state_from(KeyFile::load(ws.roles(role.org)));
      auto keys = user_keys_from(KeyFile::load(ws.user_keys(user_id, role.org)));
      auto ring = ws.load_ring(user_id);
      ring.insert_or_assign(role, user_role_key_gen(state, role, keys.user_secret));
      to_keyfile(ring, user_id, pp.ctx).save(ws.ring(user_id));
      std::cout << "assign-role: " << role.str() << " -> " << user_id << "\n";
    } else if (rm_push->parsed()) {
      const auto pp = ws.load_params();
      auto tf = KeyFile::load(token_file);
      auto token = revocation_token_from(tf);
      auto revoked = tf.manifest.value("revoked_users", std::vector<std::string>{});
      auto state = role_state_from(KeyFile::load(ws.roles(org_of_user_token(token))));
      std::size_t updated = 0;
      if (fs::exists(ws.root / "users")) {
        for (const auto& e : fs::directory_iterator(ws.root / "users")) {
          const auto u = e.path().filename().string();
          if (!fs::exists(ws.ring(u))) continue;
          auto ring = ws.load_ring(u);
          if (std::find(revoked.begin(), revoked.end(), u) != revoked.end()) ring.erase(token.role);
          update_role_keys(ring, token, state.hierarchy);
          to_keyfile(ring, u, pp.ctx).save(ws.ring(u));
          ++updated;
        }
      }
      std::cout << "push-updates: " << updated << " key rings processed\n";
    } else if (owner_enc->parsed()) {
      const auto pp = ws.load_params();
      auto board = ws.load_board();
      AccessPolicy policy;
      policy.owner_org = owner_org;
      for (const auto& r : split(policy_csv)) policy.roles.insert(RoleId::parse(r));
      Bytes payload = in_file.empty() ? Bytes(message.begin(), message.end()) : read_file(in_file);
      auto ct = encrypt(pp, board.cloud_pubs, payload, split(keywords_csv), policy,
                        board.role_pks, *rng);
      write_file(out_file, ct.serialize());
      std::cout << "encrypt: " << out_file << " (" << policy.roles.size() << " roles, "
                << ct.keyword_count << " keywords)\n";
    } else if (cloud_store->parsed()) {
      const auto pp = ws.load_params();
      auto store = CiphertextStore::load(pp.ctx, ws.store());
      auto id = store.add(Ciphertext::deserialize(pp.ctx, read_file(in_file)));
      store.save(ws.store());
      std::cout << id << "\n";
    } else if (user_search->parsed()) {
      const auto pp = ws.load_params();
      auto keys = user_keys_from(KeyFile::load(ws.user_keys(user_id, org)));
      auto ring = ws.load_ring(user_id);
      RoleSet present;
      if (roles_csv.empty()) {
        for (const auto& [r, _] : ring) present.insert(r);
      } else {
        for (const auto& r : split(roles_csv)) present.insert(RoleId::parse(r));
      }
      auto td = trap_gen(pp.ctx, keys, ring, present, split(keywords_csv),
                         now_opt.value_or(wall_clock()), *rng);
      write_file(out_file, td.trapdoor.serialize());
      const auto hex = to_hex(td.session.trapdoor_digest);
      to_keyfile(td.session, user_id, pp.ctx).save(ws.session(user_id, hex));
      std::cout << "search: trapdoor " << out_file << " digest " << hex << "\n";
    } else if (cloud_search->parsed()) {
      const auto pp = ws.load_params();
      auto service = load_cloud(ws, pp.ctx);
      const auto now = now_opt.value_or(wall_clock());
      restore_replay(ws, service->replay_cache(), now);
      auto trap = Trapdoor::deserialize(pp.ctx, read_file(trapdoor_file));
      auto resp = service->search(trap, ws.load_board(), now);
      persist_replay(ws, service->replay_cache());
      json out = {{"reason", std::string(rejection_name(resp.reason))},
                  {"hits", json::array()},
                  {"misses", json::object()}};
      for (const auto& hit : resp.hits) {
        const auto path = fs::path(out_dir) / (std::to_string(hit.id) + ".pc");
        write_file(path, hit.partial.serialize());
        out["hits"].push_back({{"id", hit.id}, {"partial", path.string()}});
      }
      for (const auto& [id, why] : resp.misses) {
        out["misses"][std::to_string(id)] = std::string(rejection_name(why));
      }
      std::cout << out.dump(2) << "\n";
      return resp.reason == Rejection::kNone ? 0 : 3;
    } else if (user_dec->parsed()) {
      const auto pp = ws.load_params();
      auto trap = Trapdoor::deserialize(pp.ctx, read_file(trapdoor_file));
      auto session = search_session_from(KeyFile::load(ws.session(user_id, to_hex(trap.digest()))));
      auto keys = user_keys_from(KeyFile::load(ws.user_keys(user_id, trap.org)));
      auto pc = PartialCiphertext::deserialize(pp.ctx, read_file(partial_file));
      auto plain = full_dec(pc, keys.priv_global, session);
      if (out_file.empty()) {
        std::cout.write(reinterpret_cast<const char*>(plain.data()),
                        static_cast<std::streamsize>(plain.size()));
        std::cout << "\n";
      } else {
        write_file(out_file, plain);
      }
    } else if (cloud_reenc->parsed()) {
      const auto pp = ws.load_params();
      auto token = revocation_token_from(KeyFile::load(token_file));
      auto h = RoleHierarchy::parse(read_text(ws.cloud_hierarchy(token.role.org)), token.role.org);
      auto store = CiphertextStore::load(pp.ctx, ws.store());
      auto touched = store.reencrypt_role(token, h);
      store.save(ws.store());
      std::cout << "reencrypt: " << touched.size() << " ciphertexts updated\n";
    } else if (demo_run->parsed()) {
      auto report = run_scenario(Scenario::load(scenario_file), false);
      const auto text = report.to_json().dump(2) + "\n";
      if (!report_file.empty()) write_file(report_file, as_bytes(text));
      std::cout << text;
      return report.passed ? 0 : 1;
    } else if (bench_cmd->parsed()) {
      std::vector<BenchPhase> phases;
      if (phase_name == "all") {
        phases = all_bench_phases();
      } else {
        phases.push_back(parse_bench_phase(phase_name));
      }
      std::ofstream file;
      std::ostream* out = &std::cout;
      if (!csv_file.empty()) {
        file.open(csv_file, std::ios::trunc);
        if (!file) throw Error(Errc::kIo, "cannot write " + csv_file);
        out = &file;
      }
      write_bench_csv_header(*out);
      std::vector<std::size_t> sizes;
      if (sweep) {
        for (std::size_t g = 1; g <= gamma; ++g) sizes.push_back(g);
      } else {
        sizes.push_back(gamma);
      }
      for (auto phase : phases) {
        std::vector<BenchParams> series;
        for (auto g : sizes) {
          BenchParams p;
          p.gamma = g;
          p.gamma_phi = sweep || orgs_n == 0 ? g : orgs_n;
          p.presented = sweep || presented == 0 ? g : presented;
          p.keywords = nkw;
          p.trials = trials;
          p.seed = seed.value_or(1);
          p.level = security_level_from_bits(bench_bits);
          series.push_back(p);
        }
        for (const auto& r : bench_series(phase, series)) write_bench_csv_row(*out, r);
        out->flush();
      }
    }
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}

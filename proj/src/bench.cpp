#include "rbeks/bench.hpp"

#include <algorithm>
#include <cctype>
#include <chrono>
#include <map>
#include <memory>
#include <optional>
#include <numeric>

#include "rbeks/error.hpp"
#include "rbeks/harness.hpp"

namespace rbeks {

std::string_view bench_phase_name(BenchPhase p) {
  switch (p) {
    case BenchPhase::kEnc: return "Enc";
    case BenchPhase::kTrapGen: return "TrapGen";
    case BenchPhase::kAuthentication: return "Authentication";
    case BenchPhase::kKeySearch: return "KeySearch";
    case BenchPhase::kPartialDec: return "PartialDec";
    case BenchPhase::kDecryption: return "Decryption";
  }
  return "unknown";
}

std::vector<BenchPhase> all_bench_phases() {
  return {BenchPhase::kEnc,       BenchPhase::kTrapGen,    BenchPhase::kAuthentication,
          BenchPhase::kKeySearch, BenchPhase::kPartialDec, BenchPhase::kDecryption};
}

BenchPhase parse_bench_phase(std::string_view name) {
  auto lower = [](std::string_view s) {
    std::string out(s);
    std::transform(out.begin(), out.end(), out.begin(),
                   [](unsigned char c) { return std::tolower(c); });
    return out;
  };
  const auto want = lower(name);
  for (auto p : all_bench_phases()) {
    if (lower(bench_phase_name(p)) == want) return p;
  }
  if (want == "fulldec") return BenchPhase::kDecryption;
  throw Error(Errc::kInvalidArgument, "unknown bench phase '" + std::string(name) + "'");
}

namespace {

// Orgs o1..oPhi, each: root -> admin -> r1..rK. Gamma takes roles round robin
// across orgs. S covers Gamma with exact roles while it can, padding with
// unrelated roles; when |S| < |Gamma| it uses one admin per org instead.
struct Fixture {
  std::vector<RoleHierarchy> hierarchies;
  AccessPolicy policy;
  RoleSet presented;
  RoleSet assigned;
};

Fixture make_fixture(const BenchParams& p) {
  const std::size_t per_org = (p.gamma + p.gamma_phi - 1) / p.gamma_phi;
  const std::size_t spare = p.presented > p.gamma ? p.presented - p.gamma : 0;
  const std::size_t roles_per_org = per_org + (spare + p.gamma_phi - 1) / p.gamma_phi;
  Fixture f;
  std::vector<std::string> orgs;
  for (std::size_t k = 0; k < p.gamma_phi; ++k) {
    orgs.push_back("o" + std::to_string(k + 1));
    std::vector<std::pair<std::string, std::string>> edges{{"root", "admin"}};
    for (std::size_t i = 1; i <= roles_per_org; ++i) {
      edges.emplace_back("admin", "r" + std::to_string(i));
    }
    f.hierarchies.push_back(RoleHierarchy::build(orgs.back(), "root", edges));
  }
  std::vector<std::size_t> used(p.gamma_phi, 0);
  for (std::size_t i = 0; i < p.gamma; ++i) {
    const auto k = i % p.gamma_phi;
    f.policy.roles.insert({orgs[k], "r" + std::to_string(++used[k])});
  }
  f.policy.owner_org = orgs.front();
  if (p.presented >= p.gamma) {
    f.presented = f.policy.roles;
    std::size_t k = 0;
    while (f.presented.size() < p.presented) {
      f.presented.insert({orgs[k % p.gamma_phi], "r" + std::to_string(++used[k % p.gamma_phi])});
      ++k;
    }
  } else {
    for (const auto& org : orgs) f.presented.insert({org, "admin"});
    std::size_t k = 0;
    while (f.presented.size() < p.presented) {
      f.presented.insert({orgs[k % p.gamma_phi], "r" + std::to_string(++used[k % p.gamma_phi])});
      ++k;
    }
  }
  f.assigned = f.presented;
  return f;
}

std::vector<std::string> bench_keywords(std::size_t n) {
  std::vector<std::string> out;
  for (std::size_t i = 0; i < n; ++i) out.push_back("keyword-" + std::to_string(i));
  return out;
}

void check_params(const BenchParams& p) {
  if (p.trials == 0) throw Error(Errc::kInvalidArgument, "trials must be >= 1");
  if (p.gamma_phi == 0 || p.gamma_phi > p.gamma) {
    throw Error(Errc::kInvalidArgument, "need 1 <= |Gamma_Phi| <= |Gamma|");
  }
  if (p.presented < p.gamma_phi) {
    throw Error(Errc::kInvalidArgument, "need |S| >= |Gamma_Phi| to cover the policy");
  }
  if (p.keywords == 0) throw Error(Errc::kInvalidArgument, "need at least one keyword");
}

// One deployment sized by the params; each call to trial() prepares the
// inputs of the phase untimed, then times the phase alone.
class Runner {
 public:
  Runner(BenchPhase phase, const BenchParams& p)
      : phase_(phase),
        params_(p),
        ctx_(BilinearContext::setup(p.level)),
        fx_(make_fixture(p)),
        d_(ctx_, fx_.hierarchies, p.seed),
        keywords_(bench_keywords(p.keywords)),
        message_(256, 0x5a) {
    d_.enrol("bench-user");
    for (const auto& r : fx_.assigned) d_.assign("bench-user", r);
    pubs_ = d_.cloud_pubs();
  }

  BenchReport& report() { return report_; }

  void trial(bool record) {
    auto& d = d_;
    auto& cloud = d.cloud();
    const auto& user = d.user("bench-user");
    const auto& keys = user.keys.at(fx_.policy.owner_org);
    d.advance_clock(1);
    Ciphertext ct;
    TrapdoorResult td;
    std::optional<AuthResult> auth;
    std::optional<SearchMatch> match;
    std::optional<PartialCiphertext> pc;
    if (phase_ != BenchPhase::kEnc) {
      ct = d.encrypt_only(message_, keywords_, fx_.policy);
    }
    if (phase_ != BenchPhase::kEnc && phase_ != BenchPhase::kTrapGen) {
      td = trap_gen(ctx_, keys, user.ring, fx_.presented, keywords_, d.now(), d.rng());
    }
    auto run_auth = [&] {
      auto out = authenticate(ctx_, cloud.private_keys(), ct, td.trapdoor,
                              d.board().user_pub(fx_.policy.owner_org, "bench-user"),
                              d.now(), cloud.replay_cache());
      if (!out) throw Error(Errc::kExpectationFailed, "bench authentication failed");
      return *out.value;
    };
    auto run_search = [&] {
      auto out = key_search(ctx_, ct, td.trapdoor, *auth, cloud.proxy_keys(),
                            cloud.hierarchies(), cloud.private_keys());
      if (!out) throw Error(Errc::kExpectationFailed, "bench keyword search failed");
      return *out.value;
    };
    if (phase_ == BenchPhase::kKeySearch || phase_ == BenchPhase::kPartialDec ||
        phase_ == BenchPhase::kDecryption) {
      auth = run_auth();
    }
    if (phase_ == BenchPhase::kPartialDec || phase_ == BenchPhase::kDecryption) {
      match = run_search();
    }
    if (phase_ == BenchPhase::kDecryption) {
      pc = partial_dec(ctx_, ct, td.trapdoor, *match, cloud.proxy_keys(), cloud.private_keys());
    }

    using clock = std::chrono::steady_clock;
    OpCountScope scope;
    const auto start = clock::now();
    switch (phase_) {
      case BenchPhase::kEnc:
        ct = encrypt(d.params(), pubs_, message_, keywords_, fx_.policy, d.board().role_pks,
                     d.rng());
        break;
      case BenchPhase::kTrapGen:
        td = trap_gen(ctx_, keys, user.ring, fx_.presented, keywords_, d.now(), d.rng());
        break;
      case BenchPhase::kAuthentication:
        auth = run_auth();
        break;
      case BenchPhase::kKeySearch:
        match = run_search();
        break;
      case BenchPhase::kPartialDec:
        pc = partial_dec(ctx_, ct, td.trapdoor, *match, cloud.proxy_keys(), cloud.private_keys());
        break;
      case BenchPhase::kDecryption:
        if (full_dec(*pc, keys.priv_global, td.session) != message_) {
          throw Error(Errc::kExpectationFailed, "bench decryption mismatch");
        }
        break;
    }
    const double ms =
        std::chrono::duration<double, std::milli>(clock::now() - start).count();
    const auto counted = scope.elapsed();
    if (ops_ && !(*ops_ == counted)) {
      throw Error(Errc::kExpectationFailed, "operation counts vary across trials");
    }
    ops_ = counted;
    if (record) report_.samples_ms.push_back(ms);
  }

  void finish() {
    report_.ops = *ops_;
    report_.mean_ms =
        std::accumulate(report_.samples_ms.begin(), report_.samples_ms.end(), 0.0) /
        static_cast<double>(report_.samples_ms.size());
  }

 private:
  BenchPhase phase_;
  BenchParams params_;
  BilinearContext ctx_;
  Fixture fx_;
  Deployment d_;
  std::vector<std::string> keywords_;
  Bytes message_;
  std::map<std::string, CloudPublicKeys> pubs_;
  std::optional<OpCounts> ops_;
  BenchReport report_{phase_, params_, {}, 0, {}};
};

}  // namespace

std::vector<BenchReport> bench_series(BenchPhase phase, const std::vector<BenchParams>& sizes) {
  for (const auto& p : sizes) check_params(p);
  std::vector<std::unique_ptr<Runner>> runners;
  for (const auto& p : sizes) runners.push_back(std::make_unique<Runner>(phase, p));
  // Trial 0 of every size warms caches and is not recorded.
  for (auto& r : runners) r->trial(false);
  std::size_t max_trials = 0;
  for (const auto& p : sizes) max_trials = std::max(max_trials, p.trials);
  for (std::size_t t = 0; t < max_trials; ++t) {
    for (std::size_t i = 0; i < runners.size(); ++i) {
      if (t < sizes[i].trials) runners[i]->trial(true);
    }
  }
  std::vector<BenchReport> out;
  for (auto& r : runners) {
    r->finish();
    out.push_back(std::move(r->report()));
  }
  return out;
}

BenchReport bench(BenchPhase phase, const BenchParams& p) {
  return std::move(bench_series(phase, {p}).front());
}

void write_bench_csv_header(std::ostream& out) {
  out << "phase,|Γ|,|Γ_Φ|,|S|,g1_exp,gt_exp,pairings,hashes,mean_ms\n";
}

void write_bench_csv_row(std::ostream& out, const BenchReport& r) {
  out << bench_phase_name(r.phase) << ',' << r.params.gamma << ','
      << r.params.gamma_phi << ',' << r.params.presented << ',' << r.ops.g1_exp
      << ',' << r.ops.gt_exp << ',' << r.ops.pairings << ',' << r.ops.hashes << ','
      << r.mean_ms << '\n';
}

}  // namespace rbeks

#include <gtest/gtest.h>

#include <functional>

#include "rbeks/error.hpp"
#include "rbeks/harness.hpp"
#include "rbeks/owner.hpp"
#include "test_support.hpp"

using namespace rbeks;
using rbeks::testing::ctx160;

namespace {

std::vector<RoleHierarchy> two_orgs() {
  return {RoleHierarchy::build("h", "dir", {{"dir", "doc"}, {"doc", "nurse"}}),
          RoleHierarchy::build("u", "dean", {{"dean", "prof"}, {"prof", "res"}})};
}

AccessPolicy policy(std::string owner, std::initializer_list<RoleId> roles) {
  return {RoleSet(roles), std::move(owner)};
}

Errc error_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no error";
  return Errc::kIo;
}

}  // namespace

TEST(Owner, PolicyValidation) {
  EXPECT_EQ(error_of([] { AccessPolicy{}.validate(); }), Errc::kEmptyPolicy);
  EXPECT_EQ(error_of([] { policy("u", {{"h", "doc"}}).validate(); }),
            Errc::kInvalidArgument);
  auto p = policy("h", {{"h", "doc"}, {"u", "res"}, {"h", "nurse"}});
  EXPECT_NO_THROW(p.validate());
  EXPECT_EQ(p.orgs(), (std::set<std::string>{"h", "u"}));
}

TEST(Owner, KeywordProduct) {
  const auto& ctx = ctx160();
  EXPECT_EQ(keyword_product(ctx, {"a"}), ctx.hash_h1("a"));
  EXPECT_EQ(keyword_product(ctx, {"a", "b"}), keyword_product(ctx, {"b", "a"}));
  EXPECT_EQ(keyword_product(ctx, {"a", "b", "c"}),
            ctx.hash_h1("a") * ctx.hash_h1("b") * ctx.hash_h1("c"));
  EXPECT_NE(keyword_product(ctx, {"a", "b"}), keyword_product(ctx, {"a"}));
  EXPECT_EQ(error_of([&] { keyword_product(ctx, {}); }), Errc::kEmptyKeywords);
}

TEST(Owner, ComponentsMatchEquations) {
  Deployment d(ctx160(), two_orgs(), 31);
  const auto& ctx = d.ctx();
  const auto p = policy("h", {{"h", "doc"}, {"h", "nurse"}, {"u", "res"}});
  EncryptionRandomness tr;
  auto ct = d.encrypt_only(as_bytes("hello"), {"flu", "ward"}, p, &tr);
  const auto w = keyword_product(ctx, {"flu", "ward"});
  const auto& g = ctx.generator();

  EXPECT_EQ(ct.c1, tr.k * d.params().big_y.pow(tr.d));
  EXPECT_EQ(ct.c2, g.pow(d.master("h").eta * tr.d_j));
  EXPECT_EQ(ct.c3, g.pow(d.master("h").x * d.cloud_keys("h").priv * tr.d_j));
  for (const auto& org : p.orgs()) {
    const auto base = d.master(org).mu * d.cloud_keys(org).priv;
    EXPECT_EQ(ct.c4.at(org), g.pow(base * tr.d_org.at(org)));
    EXPECT_EQ(ct.c4p.at(org), g.pow(base * tr.dp_org.at(org)));
  }
  for (const auto& r : p.roles) {
    const auto& rs = d.roles(r.org).record(r).rs;
    EXPECT_EQ(ct.cr.at(r), g.pow(rs * tr.d_role.at(r) * w));
    EXPECT_EQ(ct.crp.at(r), g.pow(rs * tr.dp_role.at(r) * w));
  }
  EXPECT_EQ(ct.keyword_count, 2u);
  EXPECT_EQ(unwrap_payload(tr.k, ct.payload), Bytes({'h', 'e', 'l', 'l', 'o'}));
}

TEST(Owner, PartitionIdentities) {
  Deployment d(ctx160(), two_orgs(), 32);
  const auto& ctx = d.ctx();
  const auto p = policy("u", {{"h", "doc"}, {"h", "nurse"}, {"u", "res"}, {"u", "prof"}});
  for (int i = 0; i < 10; ++i) {
    EncryptionRandomness tr;
    auto ct = d.encrypt_only(as_bytes("m"), {"k"}, p, &tr);
    Scalar sum_d = ctx.scalar(0), sum_dp = ctx.scalar(0);
    Scalar sum_k = ctx.scalar(0), sum_kp = ctx.scalar(0);
    for (const auto& [r, v] : tr.d_role) sum_d += v;
    for (const auto& [r, v] : tr.dp_role) sum_dp += v;
    for (const auto& [o, v] : tr.d_org) sum_k += v;
    for (const auto& [o, v] : tr.dp_org) sum_kp += v;
    EXPECT_EQ(sum_k, sum_d);
    EXPECT_EQ(sum_kp, sum_dp);
    EXPECT_EQ(tr.d_i, sum_d);
    EXPECT_EQ(tr.d_j, sum_dp);
    EXPECT_EQ(tr.d, tr.d_i + tr.d_j);
    EXPECT_EQ(ct.c4.size(), 2u);
    EXPECT_EQ(ct.c4p.size(), 2u);
    EXPECT_EQ(ct.cr.size(), 4u);
    EXPECT_EQ(ct.crp.size(), 4u);
    for (const auto& [r, _] : ct.cr) EXPECT_TRUE(p.roles.count(r));
  }
}

TEST(Owner, KeywordOrderCommutesUnderFixedRandomness) {
  Deployment d(ctx160(), two_orgs(), 33);
  const auto p = policy("h", {{"h", "doc"}, {"u", "res"}});
  SeededRandom r1(5), r2(5);
  auto a = encrypt(d.params(), d.cloud_pubs(), as_bytes("x"), {"a", "b"}, p,
                   d.board().role_pks, r1);
  auto b = encrypt(d.params(), d.cloud_pubs(), as_bytes("x"), {"b", "a"}, p,
                   d.board().role_pks, r2);
  EXPECT_EQ(a.cr, b.cr);
  EXPECT_EQ(a.crp, b.crp);
  EXPECT_EQ(a.serialize(), b.serialize());
}

TEST(Owner, EncryptErrors) {
  Deployment d(ctx160(), two_orgs(), 34);
  const auto p = policy("h", {{"h", "doc"}});
  auto pubs = d.cloud_pubs();
  auto pks = d.board().role_pks;
  auto& rng = d.rng();
  const auto& pp = d.params();
  auto msg = as_bytes("m");
  EXPECT_EQ(error_of([&] { encrypt(pp, pubs, msg, {"w"}, AccessPolicy{{}, "h"}, pks, rng); }),
            Errc::kEmptyPolicy);
  EXPECT_EQ(error_of([&] { encrypt(pp, pubs, msg, {}, p, pks, rng); }),
            Errc::kEmptyKeywords);
  EXPECT_EQ(error_of([&] {
              encrypt(pp, pubs, msg, {"w"}, policy("h", {{"h", "ghost"}}), pks, rng);
            }),
            Errc::kMissingRolePK);
  EXPECT_EQ(error_of([&] {
              // The root carries no public key.
              encrypt(pp, pubs, msg, {"w"}, policy("h", {{"h", "dir"}}), pks, rng);
            }),
            Errc::kMissingRolePK);
  auto only_h = pubs;
  only_h.erase("u");
  EXPECT_EQ(error_of([&] {
              encrypt(pp, only_h, msg, {"w"}, policy("h", {{"h", "doc"}, {"u", "res"}}),
                      pks, rng);
            }),
            Errc::kMissingCloudKey);
  EXPECT_EQ(error_of([&] { encrypt(pp, pubs, msg, {"w"}, policy("x", {{"h", "doc"}}), pks, rng); }),
            Errc::kInvalidArgument);
}

TEST(Owner, WrapUnwrap) {
  const auto& ctx = ctx160();
  SeededRandom rng(35);
  auto k = ctx.random_gt(rng);
  for (std::size_t n : {0u, 1u, 31u, 4096u, 1u << 20}) {
    Bytes m(n);
    rng.fill(m);
    auto blob = wrap_payload(k, m, rng);
    EXPECT_EQ(blob.size(), n + 24 + 16);
    EXPECT_EQ(unwrap_payload(k, blob), m) << n;
  }
  auto blob = wrap_payload(k, as_bytes("secret"), rng);
  EXPECT_NE(blob, wrap_payload(k, as_bytes("secret"), rng));
  EXPECT_EQ(error_of([&] { unwrap_payload(ctx.random_gt(rng), blob); }),
            Errc::kAuthenticationFailure);
  for (std::size_t i : {0ul, 24ul, blob.size() - 1}) {
    auto bad = blob;
    bad[i] ^= 0x01;
    EXPECT_EQ(error_of([&] { unwrap_payload(k, bad); }), Errc::kAuthenticationFailure);
  }
  EXPECT_EQ(error_of([&] { unwrap_payload(k, Bytes(10)); }), Errc::kAuthenticationFailure);
}

TEST(Owner, ArchiveRoundTrip) {
  Deployment d(ctx160(), two_orgs(), 36);
  const auto p = policy("u", {{"h", "doc"}, {"u", "res"}, {"u", "prof"}});
  auto ct = d.encrypt_only(as_bytes("archive me"), {"cardiology", "oncology", "triage"}, p);
  auto bytes = ct.serialize();
  EXPECT_EQ(std::string(bytes.begin(), bytes.begin() + 4), "RBEA");
  auto back = Ciphertext::deserialize(d.ctx(), bytes);
  EXPECT_EQ(back.serialize(), bytes);
  EXPECT_EQ(back.policy.roles, p.roles);
  EXPECT_EQ(back.policy.owner_org, "u");
  EXPECT_EQ(back.keyword_count, 3u);
  EXPECT_EQ(back.c1, ct.c1);
  EXPECT_EQ(back.cr, ct.cr);
  EXPECT_EQ(back.payload, ct.payload);
  // Neither keywords nor plaintext appear in the archive.
  const std::string text(bytes.begin(), bytes.end());
  EXPECT_EQ(text.find("cardiology"), std::string::npos);
  EXPECT_EQ(text.find("archive me"), std::string::npos);
}

TEST(Owner, ArchiveRejectsCorruption) {
  Deployment d(ctx160(), two_orgs(), 37);
  auto bytes = d.encrypt_only(as_bytes("x"), {"a"}, policy("h", {{"h", "doc"}})).serialize();
  auto expect_bad = [&](Bytes b) {
    EXPECT_EQ(error_of([&] { Ciphertext::deserialize(d.ctx(), b); }),
              Errc::kInvalidEncoding);
  };
  auto b = bytes;
  b[0] = 'X';
  expect_bad(b);
  b = bytes;
  b[5] = 9;
  expect_bad(b);
  b = bytes;
  b.push_back(0);
  expect_bad(b);
  b = bytes;
  b.resize(b.size() / 2);
  expect_bad(b);
  expect_bad({});
}

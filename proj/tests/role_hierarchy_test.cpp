#include <gtest/gtest.h>

#include <functional>

#include "rbeks/error.hpp"
#include "rbeks/random.hpp"
#include "rbeks/role_hierarchy.hpp"
#include "test_support.hpp"

using namespace rbeks;
using rbeks::testing::sample_dag;
using rbeks::testing::sample_dag_edges;
using rbeks::testing::roles_of;

namespace {

Errc build_error(const std::string& root,
                 const std::vector<std::pair<std::string, std::string>>& edges) {
  try {
    RoleHierarchy::build("k", root, edges);
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "build accepted";
  return Errc::kIo;
}

// Every role lying on some root-to-target path, by explicit enumeration.
RoleSet path_oracle(const std::string& root,
                    const std::vector<std::pair<std::string, std::string>>& edges,
                    const std::string& target) {
  RoleSet out;
  std::vector<std::string> path{root};
  std::function<void()> walk = [&] {
    if (path.back() == target) {
      for (const auto& n : path) out.insert({"k", n});
      return;
    }
    for (const auto& [p, c] : edges) {
      if (p == path.back()) {
        path.push_back(c);
        walk();
        path.pop_back();
      }
    }
  };
  walk();
  return out;
}

// Random single-root DAG: node i > 0 gets a parent among earlier nodes and,
// sometimes, extra parents.
std::vector<std::pair<std::string, std::string>> random_dag(RandomSource& rng,
                                                            int n) {
  std::vector<std::pair<std::string, std::string>> edges;
  for (int i = 1; i < n; ++i) {
    std::set<int> parents{static_cast<int>(rng.uniform(i))};
    while (rng.uniform(3) == 0) parents.insert(static_cast<int>(rng.uniform(i)));
    for (int p : parents) edges.emplace_back("n" + std::to_string(p), "n" + std::to_string(i));
  }
  return edges;
}

}  // namespace

TEST(RoleHierarchy, SampleDagRoleSet) {
  auto h = sample_dag();
  EXPECT_EQ(h.roles(), roles_of("k", {"r", "1", "2", "3", "4", "5", "6", "7", "8"}));
  EXPECT_EQ(h.root(), (RoleId{"k", "r"}));
  EXPECT_EQ(h.org(), "k");
  EXPECT_EQ(h.edges().size(), 9u);
}

TEST(RoleHierarchy, SampleDagAncestorSets) {
  auto h = sample_dag();
  EXPECT_EQ(h.ancestor_set({"k", "5"}), roles_of("k", {"r", "1", "2", "5"}));
  EXPECT_EQ(h.ancestor_set({"k", "8"}),
            roles_of("k", {"r", "1", "2", "4", "5", "6", "7", "8"}));
  EXPECT_EQ(h.ancestor_set({"k", "6"}), roles_of("k", {"r", "1", "2", "4", "6"}));
  EXPECT_EQ(h.ancestor_set({"k", "3"}), roles_of("k", {"r", "1", "3"}));
  EXPECT_EQ(h.ancestor_set({"k", "r"}), roles_of("k", {"r"}));
}

TEST(RoleHierarchy, SampleDagQualification) {
  auto h = sample_dag();
  EXPECT_TRUE(h.is_qualified({"k", "2"}, {"k", "5"}));
  EXPECT_TRUE(h.is_qualified({"k", "5"}, {"k", "5"}));
  EXPECT_FALSE(h.is_qualified({"k", "3"}, {"k", "8"}));
  EXPECT_FALSE(h.is_qualified({"k", "5"}, {"k", "2"}));
  EXPECT_TRUE(h.is_qualified({"k", "r"}, {"k", "8"}));
  EXPECT_EQ(path_oracle("r", sample_dag_edges(), "8"), h.ancestor_set({"k", "8"}));
}

TEST(RoleHierarchy, Descendants) {
  auto h = sample_dag();
  EXPECT_EQ(h.descendants({"k", "6"}), roles_of("k", {"6", "7", "8"}));
  EXPECT_EQ(h.descendants({"k", "3"}), roles_of("k", {"3"}));
  EXPECT_EQ(h.descendants({"k", "r"}), h.roles());
}

TEST(RoleHierarchy, RootOnly) {
  auto h = RoleHierarchy::build("k", "r", {});
  EXPECT_EQ(h.roles(), roles_of("k", {"r"}));
  EXPECT_EQ(h.ancestor_set({"k", "r"}), roles_of("k", {"r"}));
}

TEST(RoleHierarchy, StructuralErrors) {
  EXPECT_EQ(build_error("r", {{"r", "1"}, {"1", "1"}}), Errc::kCycleDetected);
  EXPECT_EQ(build_error("r", {{"r", "1"}, {"1", "2"}, {"2", "1"}}),
            Errc::kCycleDetected);
  EXPECT_EQ(build_error("r", {{"r", "1"}, {"x", "2"}}), Errc::kMultipleRoots);
  EXPECT_EQ(build_error("r", {{"a", "b"}}), Errc::kMultipleRoots);
  EXPECT_EQ(build_error("r", {{"r", "1"}, {"1", "r"}}), Errc::kCycleDetected);
  // A cycle hanging off nothing is unreachable from the root.
  EXPECT_EQ(build_error("r", {{"r", "1"}, {"a", "b"}, {"b", "a"}}),
            Errc::kCycleDetected);
  EXPECT_EQ(build_error("", {}), Errc::kInvalidArgument);
}

TEST(RoleHierarchy, UnknownRole) {
  auto h = sample_dag();
  for (auto f : std::vector<std::function<void()>>{
           [&] { h.ancestor_set({"k", "9"}); },
           [&] { h.ancestor_set({"other", "1"}); },
           [&] { h.is_qualified({"k", "9"}, {"k", "1"}); },
           [&] { h.is_qualified({"k", "1"}, {"k", "9"}); },
           [&] { h.descendants({"k", "9"}); }}) {
    try {
      f();
      ADD_FAILURE();
    } catch (const Error& e) {
      EXPECT_EQ(e.code(), Errc::kUnknownRole);
    }
  }
}

TEST(RoleHierarchy, TextRoundTrip) {
  auto h = sample_dag("hospital");
  auto text = h.to_text();
  auto back = RoleHierarchy::parse(text);
  EXPECT_EQ(back.org(), "hospital");
  EXPECT_EQ(back.roles(), h.roles());
  EXPECT_EQ(back.edges(), h.edges());
  EXPECT_EQ(back.to_text(), text);
}

TEST(RoleHierarchy, ParseFormat) {
  auto h = RoleHierarchy::parse(
      "# sample\n\nroot: director   # top\n director -> doctor\ndoctor->nurse\n",
      "hospital");
  EXPECT_EQ(h.root(), (RoleId{"hospital", "director"}));
  EXPECT_TRUE(h.is_qualified({"hospital", "director"}, {"hospital", "nurse"}));
  for (const char* bad : {"director -> doctor\n", "root: a\na ->\n",
                          "root: a\nwhat\n", "root: a\ncolour: red\n"}) {
    try {
      RoleHierarchy::parse(bad, "hospital");
      ADD_FAILURE() << bad;
    } catch (const Error& e) {
      EXPECT_EQ(e.code(), Errc::kInvalidArgument) << bad;
    }
  }
  try {
    RoleHierarchy::parse("org: a\nroot: x\n", "b");
    ADD_FAILURE();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::kInvalidArgument);
  }
}

TEST(RoleHierarchy, RoleIdParse) {
  EXPECT_EQ(RoleId::parse("hospital:doctor"), (RoleId{"hospital", "doctor"}));
  EXPECT_EQ(RoleId::parse("a:b:c").name, "b:c");
  EXPECT_EQ((RoleId{"o", "n"}).str(), "o:n");
  for (const char* bad : {"nocolon", ":x", "x:"}) {
    EXPECT_THROW(RoleId::parse(bad), Error) << bad;
  }
  EXPECT_LT((RoleId{"a", "z"}), (RoleId{"b", "a"}));
}

TEST(RoleHierarchy, RandomDagsAgreeWithPathOracle) {
  SeededRandom rng(2024);
  for (int trial = 0; trial < 100; ++trial) {
    const int n = 2 + static_cast<int>(rng.uniform(19));
    auto edges = random_dag(rng, n);
    auto h = RoleHierarchy::build("k", "n0", edges);
    ASSERT_EQ(h.roles().size(), static_cast<std::size_t>(n));
    for (const auto& r : h.roles()) {
      ASSERT_EQ(h.ancestor_set(r), path_oracle("n0", edges, r.name))
          << "trial " << trial << " role " << r.str();
    }
  }
}

TEST(RoleHierarchy, InvariantsExhaustive) {
  SeededRandom rng(77);
  for (int trial = 0; trial < 20; ++trial) {
    auto h = RoleHierarchy::build("k", "n0", random_dag(rng, 20));
    for (const auto& r : h.roles()) {
      const auto& ar = h.ancestor_set(r);
      EXPECT_TRUE(ar.count(r));
      EXPECT_TRUE(ar.count(h.root()));
      for (const auto& a : ar) {
        for (const auto& p : h.parents(a)) EXPECT_TRUE(ar.count(p));
      }
    }
    // Monotonicity: a in R_b and b in R_c implies a in R_c.
    for (const auto& a : h.roles()) {
      for (const auto& b : h.roles()) {
        if (!h.is_qualified(a, b)) continue;
        for (const auto& c : h.roles()) {
          if (h.is_qualified(b, c)) EXPECT_TRUE(h.is_qualified(a, c));
        }
      }
    }
  }
}

#pragma once

#include <compare>
#include <map>
#include <set>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace rbeks {

// A role r^k_i: the authority (organization) that manages it and its label.
struct RoleId {
  std::string org;
  std::string name;

  auto operator<=>(const RoleId&) const = default;
  bool operator==(const RoleId&) const = default;

  // "org:name"
  std::string str() const { return org + ":" + name; }
  // Inverse of str(). Throws kInvalidArgument when there is no ':'.
  static RoleId parse(std::string_view text);
};

using RoleSet = std::set<RoleId>;

// Single-root DAG of roles for one organization. Ancestors inherit the access
// rights of their descendants; a role may have several parents. Immutable.
class RoleHierarchy {
 public:
  // Throws kCycleDetected, kMultipleRoots or kUnreachableRole.
  static RoleHierarchy build(
      std::string org, std::string root,
      const std::vector<std::pair<std::string, std::string>>& edges);

  // Line format:
  //   # comment
  //   org: <authority id>      (optional when org is passed in)
  //   root: <role>
  //   <parent> -> <child>
  static RoleHierarchy parse(std::string_view text, std::string org = {});
  std::string to_text() const;

  const std::string& org() const { return org_; }
  const RoleId& root() const { return root_; }
  // All roles, including the root.
  const RoleSet& roles() const { return roles_; }
  bool contains(const RoleId& role) const { return roles_.count(role) != 0; }

  const RoleSet& parents(const RoleId& role) const;
  const RoleSet& children(const RoleId& role) const;

  // Every role on a path from the root to `role`, plus `role` itself.
  // Throws kUnknownRole.
  const RoleSet& ancestor_set(const RoleId& role) const;
  // Roles whose ancestor set contains `role` (including itself).
  RoleSet descendants(const RoleId& role) const;

  // True iff holding `held` grants access to data encrypted for `target`.
  bool is_qualified(const RoleId& held, const RoleId& target) const;

  // Edges sorted lexicographically by (parent, child).
  std::vector<std::pair<RoleId, RoleId>> edges() const;

 private:
  RoleHierarchy() = default;

  std::string org_;
  RoleId root_;
  RoleSet roles_;
  std::map<RoleId, RoleSet> parents_;
  std::map<RoleId, RoleSet> children_;
  std::map<RoleId, RoleSet> ancestors_;
};

}  // namespace rbeks

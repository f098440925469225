#pragma once

#include <string>
#include <utility>
#include <vector>

#include "rbeks/pairing.hpp"
#include "rbeks/role_hierarchy.hpp"

namespace rbeks::testing {

inline const BilinearContext& ctx160() {
  static const BilinearContext ctx = BilinearContext::setup(160);
  return ctx;
}

// root r with 1..8: r->1, 1->2, 1->3, 2->4, 2->5, 4->6, 6->7, 5->8, 7->8
inline std::vector<std::pair<std::string, std::string>> sample_dag_edges() {
  return {{"r", "1"}, {"1", "2"}, {"1", "3"}, {"2", "4"}, {"2", "5"},
          {"4", "6"}, {"6", "7"}, {"5", "8"}, {"7", "8"}};
}

inline RoleHierarchy sample_dag(const std::string& org = "k") {
  return RoleHierarchy::build(org, "r", sample_dag_edges());
}

inline RoleSet roles_of(const std::string& org,
                        const std::vector<std::string>& names) {
  RoleSet out;
  for (const auto& n : names) out.insert({org, n});
  return out;
}

}  // namespace rbeks::testing

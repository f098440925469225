#include "rbeks/role_hierarchy.hpp"

#include <sstream>

#include "rbeks/error.hpp"

namespace rbeks {

namespace {

std::string_view trim(std::string_view s) {
  const auto* ws = " \t\r\n";
  const auto b = s.find_first_not_of(ws);
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(ws);
  return s.substr(b, e - b + 1);
}

const RoleSet kEmpty;

}  // namespace

RoleId RoleId::parse(std::string_view text) {
  const auto colon = text.find(':');
  if (colon == std::string_view::npos || colon == 0 ||
      colon + 1 == text.size()) {
    throw Error(Errc::kInvalidArgument,
                "role id must look like org:name, got '" + std::string(text) +
                    "'");
  }
  return {std::string(trim(text.substr(0, colon))),
          std::string(trim(text.substr(colon + 1)))};
}

RoleHierarchy RoleHierarchy::build(
    std::string org, std::string root,
    const std::vector<std::pair<std::string, std::string>>& edges) {
  if (org.empty() || root.empty()) {
    throw Error(Errc::kInvalidArgument, "hierarchy needs an org and a root");
  }
  RoleHierarchy h;
  h.org_ = org;
  h.root_ = {org, root};
  h.roles_.insert(h.root_);
  for (const auto& [parent, child] : edges) {
    RoleId p{org, parent};
    RoleId c{org, child};
    if (p == c) {
      throw Error(Errc::kCycleDetected, "self edge on " + p.str());
    }
    h.roles_.insert(p);
    h.roles_.insert(c);
    h.children_[p].insert(c);
    h.parents_[c].insert(p);
  }

  // Kahn's algorithm: anything left over sits on a cycle.
  std::map<RoleId, std::size_t> indegree;
  for (const auto& r : h.roles_) indegree[r] = h.parents(r).size();
  std::vector<RoleId> order;
  std::vector<RoleId> ready;
  for (const auto& [r, d] : indegree) {
    if (d == 0) ready.push_back(r);
  }
  while (!ready.empty()) {
    RoleId r = ready.back();
    ready.pop_back();
    order.push_back(r);
    for (const auto& c : h.children(r)) {
      if (--indegree[c] == 0) ready.push_back(c);
    }
  }
  if (order.size() != h.roles_.size()) {
    for (const auto& [r, d] : indegree) {
      if (d != 0) throw Error(Errc::kCycleDetected, "cycle through " + r.str());
    }
  }

  for (const auto& r : h.roles_) {
    if (r != h.root_ && h.parents(r).empty()) {
      throw Error(Errc::kMultipleRoots,
                  r.str() + " has no parent but is not the root " +
                      h.root_.str());
    }
  }
  if (!h.parents(h.root_).empty()) {
    throw Error(Errc::kMultipleRoots, "declared root " + h.root_.str() +
                                          " has a parent");
  }

  // Topological order guarantees parents are finished first.
  for (const auto& r : order) {
    RoleSet anc{r};
    for (const auto& p : h.parents(r)) {
      const auto& pa = h.ancestors_.at(p);
      anc.insert(pa.begin(), pa.end());
    }
    if (anc.count(h.root_) == 0) {
      throw Error(Errc::kUnreachableRole,
                  r.str() + " is not reachable from " + h.root_.str());
    }
    h.ancestors_.emplace(r, std::move(anc));
  }
  return h;
}

RoleHierarchy RoleHierarchy::parse(std::string_view text, std::string org) {
  std::string root;
  std::vector<std::pair<std::string, std::string>> edges;
  std::size_t line_no = 0;
  while (!text.empty()) {
    const auto nl = text.find('\n');
    std::string_view line = text.substr(0, nl);
    text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) {
      line = line.substr(0, hash);
    }
    line = trim(line);
    if (line.empty()) continue;
    if (const auto arrow = line.find("->"); arrow != std::string_view::npos) {
      auto parent = trim(line.substr(0, arrow));
      auto child = trim(line.substr(arrow + 2));
      if (parent.empty() || child.empty()) {
        throw Error(Errc::kInvalidArgument,
                    "line " + std::to_string(line_no) + ": incomplete edge");
      }
      edges.emplace_back(parent, child);
      continue;
    }
    const auto colon = line.find(':');
    if (colon == std::string_view::npos) {
      throw Error(Errc::kInvalidArgument,
                  "line " + std::to_string(line_no) + ": expected 'key: value' or 'a -> b'");
    }
    auto key = trim(line.substr(0, colon));
    auto value = std::string(trim(line.substr(colon + 1)));
    if (key == "root") {
      root = value;
    } else if (key == "org") {
      if (!org.empty() && org != value) {
        throw Error(Errc::kInvalidArgument,
                    "hierarchy file is for org '" + value + "', expected '" +
                        org + "'");
      }
      org = value;
    } else {
      throw Error(Errc::kInvalidArgument,
                  "line " + std::to_string(line_no) + ": unknown header '" +
                      std::string(key) + "'");
    }
  }
  if (root.empty()) throw Error(Errc::kInvalidArgument, "missing 'root:' header");
  return build(std::move(org), std::move(root), edges);
}

std::string RoleHierarchy::to_text() const {
  std::ostringstream out;
  out << "org: " << org_ << "\n";
  out << "root: " << root_.name << "\n";
  for (const auto& [p, c] : edges()) out << p.name << " -> " << c.name << "\n";
  return out.str();
}

const RoleSet& RoleHierarchy::parents(const RoleId& role) const {
  auto it = parents_.find(role);
  return it == parents_.end() ? kEmpty : it->second;
}

const RoleSet& RoleHierarchy::children(const RoleId& role) const {
  auto it = children_.find(role);
  return it == children_.end() ? kEmpty : it->second;
}

const RoleSet& RoleHierarchy::ancestor_set(const RoleId& role) const {
  auto it = ancestors_.find(role);
  if (it == ancestors_.end()) {
    throw Error(Errc::kUnknownRole, role.str() + " is not in hierarchy " + org_);
  }
  return it->second;
}

RoleSet RoleHierarchy::descendants(const RoleId& role) const {
  if (!contains(role)) {
    throw Error(Errc::kUnknownRole, role.str() + " is not in hierarchy " + org_);
  }
  RoleSet out;
  for (const auto& [r, anc] : ancestors_) {
    if (anc.count(role)) out.insert(r);
  }
  return out;
}

bool RoleHierarchy::is_qualified(const RoleId& held,
                                 const RoleId& target) const {
  if (!contains(held)) {
    throw Error(Errc::kUnknownRole, held.str() + " is not in hierarchy " + org_);
  }
  return ancestor_set(target).count(held) != 0;
}

std::vector<std::pair<RoleId, RoleId>> RoleHierarchy::edges() const {
  std::vector<std::pair<RoleId, RoleId>> out;
  for (const auto& [p, cs] : children_) {
    for (const auto& c : cs) out.emplace_back(p, c);
  }
  return out;
}

}  // namespace rbeks

#pragma once

// The plagiarism-hiding rewrites. Each one enumerates its valid sites on a
// resolved program and rewrites a single site in place.

#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "bsim/frontend/printer.hpp"
#include "bsim/frontend/resolver.hpp"
#include "bsim/mutator/ast_edit.hpp"

namespace bsim::mutator {

struct TransformationSpec {
  int level = 1;
  std::string name;
  bool valueInjecting = false;
};

// Table order; levels are non-decreasing along it.
const std::vector<TransformationSpec>& transformations();
int find_transformation(std::string_view name);  // -1 when unknown

constexpr int kMinLevel = 1;
constexpr int kMaxLevel = 5;

struct Site {
  NodeUid uid = 0;              // anchor: class, member, declarator, statement or expression
  int aux = -1;                 // transformation-specific slot
  std::string key;              // transformation-specific tag
  std::vector<NodeUid> extra;   // transformation-specific companions
  std::string location;         // "path:line:col"
  std::string detail;
};

struct ApplyContext {
  Rng& rng;
  NameGen& names;
  std::optional<std::string> entry;
  std::vector<frontend::PrintStyle> styles;  // per unit
  std::vector<bool> restyled;
  std::map<std::string, std::string> constants;  // literal constant per class
  std::unordered_map<NodeUid, std::pair<Expr*, Where>> exprIndex;  // lazily built, cleared on re-resolve
};

// Deterministic order. Every returned site admits the rewrite.
std::vector<Site> list_sites(const frontend::ResolvedProgram& p, int t,
                             const std::optional<std::string>& entry = std::nullopt);

// Returns false when the site no longer admits the rewrite (an earlier
// application took it over).
bool apply_site(frontend::ResolvedProgram& p, int t, const Site& s, ApplyContext& ctx);

// Rewrites whose sites interact need fresh bindings before every application.
bool reresolve_each(int t);

}  // namespace bsim::mutator

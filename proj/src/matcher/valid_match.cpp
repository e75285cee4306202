#include "bsim/matcher/valid_match.hpp"

#include <string_view>

namespace bsim::matcher {

using pidg::Edge;
using pidg::Node;
using pidg::NodeType;

namespace {

std::uint64_t fnv(std::uint64_t h, std::string_view s) {
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  h ^= 0xff;
  h *= 1099511628211ULL;
  return h;
}

constexpr std::uint64_t kBasis = 14695981039346656037ULL;

std::uint64_t node_key(const Node& n) {
  std::uint64_t h = kBasis;
  h = fnv(h, std::string_view(pidg::to_string(n.type)));
  h = fnv(h, n.literal);
  h = fnv(h, n.hasString ? "s" : "-");
  h = fnv(h, n.string);
  h = fnv(h, n.op);
  if (n.type != NodeType::EntryPoint) h = fnv(h, n.signature);
  h ^= n.flags;
  h *= 1099511628211ULL;
  return h;
}

bool is_index(const std::string& label) { return !label.empty() && label.front() == '['; }

}  // namespace

bool valid_match(const Node& a, const Node& b) {
  if (a.type != b.type || a.flags != b.flags) return false;
  if (a.literal != b.literal || a.hasString != b.hasString || a.string != b.string || a.op != b.op) return false;
  if (a.type != NodeType::EntryPoint && a.signature != b.signature) return false;
  if (!a.sourceDefined && !b.sourceDefined && a.runtimeType != b.runtimeType) return false;
  return true;
}

bool valid_match(const Node& a, const Node& b, std::optional<pidg::EdgeType> viaA, std::optional<pidg::EdgeType> viaB) {
  if (viaA != viaB) return false;
  return valid_match(a, b);
}

bool labels_agree(const pidg::Pidg& x, const Edge& a, const pidg::Pidg& y, const Edge& b) {
  if (a.label == b.label) return true;
  bool ia = is_index(a.label), ib = is_index(b.label);
  if (ia != ib) return false;
  if (ia) return a.label == "[?]" || b.label == "[?]";
  // field names: renameable when the owner's type is declared
  return x.node(a.from).sourceDefined || y.node(b.from).sourceDefined;
}

MatchView::MatchView(const pidg::Pidg& gr) : graph(&gr) {
  const auto& ns = gr.nodes();
  key.reserve(ns.size());
  rtype.reserve(ns.size());
  declared.reserve(ns.size());
  for (const Node& n : ns) {
    key.push_back(node_key(n));
    rtype.push_back(fnv(kBasis, n.runtimeType));
    declared.push_back(n.sourceDefined);
    if (n.type == NodeType::Operator || n.type == NodeType::MethodCall) refs.push_back(n.id);
  }
}

}  // namespace bsim::matcher

#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "bsim/pidg/pidg.hpp"

namespace bsim::matcher {

// Same node type, same attributes and same flags. The runtime type is
// ignored when either side's type is declared in the submission, and the
// entry point signature never takes part.
bool valid_match(const pidg::Node& a, const pidg::Node& b);

// Expansion form: additionally both nodes were reached over the same kind
// of edge from the last mapped node.
bool valid_match(const pidg::Node& a, const pidg::Node& b, std::optional<pidg::EdgeType> viaA,
                 std::optional<pidg::EdgeType> viaB);

// Labels of two edges agree. Field names are skipped on declared owner types;
// array indices only compare when both are concrete.
bool labels_agree(const pidg::Pidg& x, const pidg::Edge& a, const pidg::Pidg& y, const pidg::Edge& b);

// Per-graph precomputation so valid_match reduces to integer compares.
struct MatchView {
  const pidg::Pidg* graph = nullptr;
  std::vector<std::uint64_t> key;  // everything but the runtime type
  std::vector<std::uint64_t> rtype;
  std::vector<bool> declared;
  std::vector<int> refs;  // Operator and MethodCall nodes, ascending id

  explicit MatchView(const pidg::Pidg& g);
  const pidg::Pidg& g() const { return *graph; }
};

inline bool valid_match(const MatchView& x, int a, const MatchView& y, int b) {
  return x.key[a] == y.key[b] && (x.declared[a] || y.declared[b] || x.rtype[a] == y.rtype[b]);
}

}  // namespace bsim::matcher

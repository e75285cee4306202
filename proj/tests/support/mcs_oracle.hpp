#pragma once

// Exhaustive maximum common substructure for small graphs, under the same
// node validity and edge agreement rules the heuristic matcher uses. Any
// mapping the heuristic can produce is one of the candidates here, so the
// oracle score is an upper bound for it.

#include "bsim/matcher/graph_matcher.hpp"
#include "bsim/pidg/pidg.hpp"

namespace bsim::testsupport {

// Intended for graphs of up to ~12 nodes.
matcher::GraphScore mcs_score(const pidg::Pidg& x, const pidg::Pidg& y, const matcher::MatchOptions& opt = {});

}  // namespace bsim::testsupport

#pragma once

#include <cstddef>
#include <utility>
#include <vector>

#include "bsim/matcher/valid_match.hpp"
#include "bsim/pidg/pidg.hpp"
#include "json.hpp"

namespace bsim::matcher {

struct MatchOptions {
  bool countEdges = true;        // |X∩Y| and sizes count nodes and edges; nodes only when false
  bool exactAssignment = false;  // Hungarian assignment instead of greedy
};

struct ScoredPair {
  int x = -1;
  int y = -1;
  double score = 0;
};

struct NodeMapping {
  std::vector<int> xToY;  // -1 when unmapped
  std::vector<int> yToX;
  std::vector<ScoredPair> seeds;
  std::vector<std::vector<ScoredPair>> frontiers;  // pairs mapped in each expansion round
  std::vector<std::pair<int, int>> edges;          // mapped edge index pairs

  std::size_t mapped_nodes() const;
};

struct GraphScore {
  double value = 0;
  std::size_t mapped = 0;  // |X∩Y|
  std::size_t sizeX = 0;
  std::size_t sizeY = 0;
};

// Fraction of the incident edges of x-node a and y-node b that can be paired
// with agreeing edge type, direction and label and a valid far end that is
// either unmapped on both sides or mapped to each other.
double neighbour_score(const MatchView& x, int a, const MatchView& y, int b, const NodeMapping& m);

NodeMapping seed_mapping(const MatchView& x, const MatchView& y, const MatchOptions& opt = {});
// Rounds from the last mapped pairs over edges agreeing in type, direction
// and label. When those stall, neighbours of any mapped pair reached over the
// same edge type in either direction get one round, and strict rounds resume
// from whatever that maps. Nodes off every mapped pair are never reached.
void expand_mapping(const MatchView& x, const MatchView& y, NodeMapping& m, const MatchOptions& opt = {});
// After expansion: reference nodes still unmapped on both sides are seeded
// again against the current mapping and expanded. Valid pairs with no
// agreeing neighbourhood are mapped on their own.
void residual_seeds(const MatchView& x, const MatchView& y, NodeMapping& m, const MatchOptions& opt = {});

// Pairs up edges between mapped nodes and fills m.edges.
void map_edges(const MatchView& x, const MatchView& y, NodeMapping& m);
GraphScore score_mapping(const pidg::Pidg& x, const pidg::Pidg& y, const NodeMapping& m, const MatchOptions& opt = {});

GraphScore sim_graph(const MatchView& x, const MatchView& y, const MatchOptions& opt = {}, NodeMapping* out = nullptr);
GraphScore sim_graph(const pidg::Pidg& x, const pidg::Pidg& y, const MatchOptions& opt = {}, NodeMapping* out = nullptr);

nlohmann::ordered_json mapping_to_json(const NodeMapping& m, const GraphScore& s);

// Maximum-weight assignment on a dense rows x cols matrix; entries <= 0 are
// never assigned. Returns the chosen column per row (-1 for none).
std::vector<int> hungarian(const std::vector<std::vector<double>>& w);

}  // namespace bsim::matcher

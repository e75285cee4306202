#pragma once

// Seeded generators for property tests: small PIDG-shaped graphs and
// syntactically valid multi-class programs of a requested length.

#include <cstdint>
#include <random>
#include <string>

#include "bsim/pidg/pidg.hpp"

namespace bsim::testsupport {

// Between 3 and maxNodes nodes; every data node hangs off an Operator or
// MethodCall node, as in graphs built from traces.
pidg::Pidg random_pidg(std::mt19937_64& rng, int maxNodes);

struct GraphPair {
  pidg::Pidg x;
  pidg::Pidg y;
  bool perturbed = false;  // y derives from x
};

// Half the pairs are independent draws; the other half perturb x a little
// (drop or add nodes and edges, edit a literal) and renumber the nodes.
// Nodes cut off from every reference by a drop go too.
GraphPair random_graph_pair(std::mt19937_64& rng, int maxNodes);

// A program with a static main(String[] args) spread over several classes,
// roughly targetLines lines long. Only args.length is symbolic and it
// reaches two branches in main, so every program has four paths.
std::string random_program(std::uint64_t seed, int targetLines);

}  // namespace bsim::testsupport

#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "bsim/matcher/graph_matcher.hpp"
#include "bsim/pidg/pidg.hpp"

namespace bsim::matcher {

struct ProgramScore {
  double value = 0;
  // Best partner per graph in each direction (index into the other list).
  std::vector<int> aToB;
  std::vector<double> aBest;
  std::vector<int> bToA;
  std::vector<double> bBest;
  std::string diagnostic;  // "EmptySide" when either list is empty
};

std::uint64_t structure_hash(const pidg::Pidg& g);

// A program's graph set with structurally identical graphs folded together.
class PreparedProgram {
 public:
  PreparedProgram() = default;
  explicit PreparedProgram(std::vector<pidg::Pidg> graphs);

  std::size_t size() const { return index_.size(); }  // graphs before folding
  std::size_t unique() const { return views_.size(); }
  const MatchView& view(std::size_t u) const { return views_[u]; }
  std::uint64_t hash(std::size_t u) const { return hashes_[u]; }
  std::size_t multiplicity(std::size_t u) const { return mult_[u]; }
  std::size_t unique_of(std::size_t i) const { return index_[i]; }
  std::size_t first_of(std::size_t u) const { return first_[u]; }
  const pidg::Pidg& graph(std::size_t u) const { return (*graphs_)[u]; }

 private:
  std::shared_ptr<const std::vector<pidg::Pidg>> graphs_;
  std::vector<MatchView> views_;
  std::vector<std::uint64_t> hashes_;
  std::vector<std::size_t> mult_, index_, first_;
};

// Graph comparison in a fixed orientation (by structure hash) so that the
// result does not depend on argument order.
GraphScore sim_graph_symmetric(const MatchView& x, std::uint64_t hx, const MatchView& y, std::uint64_t hy,
                               const MatchOptions& opt = {});

// Each graph takes its best-scoring partner on the other side (not
// exclusive); the value is the mean of the two directional means.
ProgramScore sim_program(const PreparedProgram& a, const PreparedProgram& b, const MatchOptions& opt = {});
ProgramScore sim_program(const std::vector<pidg::Pidg>& a, const std::vector<pidg::Pidg>& b,
                         const MatchOptions& opt = {});

}  // namespace bsim::matcher

#include <gtest/gtest.h>

#include <algorithm>
#include <numeric>
#include <random>

#include "bsim/matcher/graph_matcher.hpp"
#include "bsim/matcher/program_score.hpp"
#include "bsim/matcher/valid_match.hpp"
#include "bsim/pidg/builder.hpp"
#include "mcs_oracle.hpp"
#include "program_gen.hpp"
#include "test_util.hpp"

using namespace bsim::matcher;
using bsim::pidg::EdgeType;
using bsim::pidg::Node;
using bsim::pidg::NodeType;
using bsim::pidg::Pidg;
using bsim::testsupport::corpus_programs;
using bsim::testsupport::graphs_of;
using bsim::testsupport::mcs_score;
using bsim::testsupport::random_graph_pair;
using bsim::testsupport::random_pidg;

namespace {

std::vector<std::vector<Pidg>> corpus_graphs() {
  std::vector<std::vector<Pidg>> out;
  for (const auto& s : corpus_programs())
    out.push_back(bsim::pidg::build_pidg_set(
        bsim::executor::execute_program(bsim::frontend::resolve_program(s.units))));
  return out;
}

Node data(NodeType t, const std::string& type, std::uint8_t flags = bsim::pidg::kSymbolic) {
  Node n;
  n.type = t;
  n.runtimeType = type;
  n.flags = flags;
  return n;
}

double brute_assignment(const std::vector<std::vector<double>>& w) {
  std::size_t r = w.size(), c = w.empty() ? 0 : w[0].size();
  std::vector<int> cols(std::max(r, c));
  std::iota(cols.begin(), cols.end(), 0);
  double best = 0;
  do {
    double s = 0;
    for (std::size_t i = 0; i < r; ++i)
      if (cols[i] < static_cast<int>(c) && w[i][cols[i]] > 0) s += w[i][cols[i]];
    best = std::max(best, s);
  } while (std::next_permutation(cols.begin(), cols.end()));
  return best;
}

}  // namespace

TEST(ValidMatch, RequiresSameTypeAndFlags) {
  Node a = data(NodeType::Value, "int");
  Node b = data(NodeType::Value, "int");
  EXPECT_TRUE(valid_match(a, b));
  b.flags = bsim::pidg::kConcrete;
  EXPECT_FALSE(valid_match(a, b));
  Node c = data(NodeType::Object, "int");
  EXPECT_FALSE(valid_match(a, c));
  Node d = data(NodeType::Value, "long");
  EXPECT_FALSE(valid_match(a, d));
}

TEST(ValidMatch, DeclaredTypesAreInterchangeable) {
  Node a = data(NodeType::Object, "Account");
  a.sourceDefined = true;
  Node b = data(NodeType::Object, "Ledger");
  b.sourceDefined = true;
  EXPECT_TRUE(valid_match(a, b));
  Node c = data(NodeType::Object, "StringBuilder");
  EXPECT_TRUE(valid_match(a, c));
  Node d = data(NodeType::Object, "ArrayList");
  EXPECT_FALSE(valid_match(c, d));
}

TEST(ValidMatch, EntrySignatureIgnored) {
  Node a;
  a.type = NodeType::EntryPoint;
  a.signature = "A.main(String[])";
  Node b = a;
  b.signature = "B.run(String[])";
  EXPECT_TRUE(valid_match(a, b));
}

TEST(ValidMatch, ViewAgreesWithNodeForm) {
  std::mt19937_64 rng(5);
  for (int k = 0; k < 100; ++k) {
    auto pr = random_graph_pair(rng, 10);
    MatchView vx(pr.x), vy(pr.y);
    for (const auto& a : pr.x.nodes())
      for (const auto& b : pr.y.nodes())
        ASSERT_EQ(valid_match(vx, a.id, vy, b.id), valid_match(a, b));
  }
}

TEST(GraphMatcher, SelfSimilarityIsOne) {
  std::mt19937_64 rng(11);
  for (int k = 0; k < 200; ++k) {
    Pidg g = random_pidg(rng, 12);
    EXPECT_DOUBLE_EQ(sim_graph(g, g).value, 1.0);
  }
}

TEST(GraphMatcher, NeverBeatsExhaustiveSearch) {
  std::mt19937_64 rng(99);
  for (int k = 0; k < 200; ++k) {
    auto pr = random_graph_pair(rng, 9);
    double h = sim_graph(pr.x, pr.y).value;
    double o = mcs_score(pr.x, pr.y).value;
    EXPECT_LE(h, o + 1e-12) << "pair " << k;
  }
}

TEST(GraphMatcher, ScoreIsBounded) {
  std::mt19937_64 rng(3);
  for (int k = 0; k < 200; ++k) {
    auto pr = random_graph_pair(rng, 10);
    for (bool edges : {true, false}) {
      MatchOptions opt;
      opt.countEdges = edges;
      GraphScore s = sim_graph(pr.x, pr.y, opt);
      EXPECT_GE(s.value, 0.0);
      EXPECT_LE(s.value, 1.0);
      EXPECT_EQ(s.sizeX, edges ? pr.x.size() : pr.x.nodes().size());
    }
  }
}

TEST(GraphMatcher, MappingIsInjectiveAndValid) {
  std::mt19937_64 rng(8);
  for (int k = 0; k < 200; ++k) {
    auto pr = random_graph_pair(rng, 10);
    MatchView vx(pr.x), vy(pr.y);
    NodeMapping m;
    GraphScore s = sim_graph(vx, vy, {}, &m);
    std::size_t pairs = 0;
    for (std::size_t a = 0; a < m.xToY.size(); ++a) {
      int b = m.xToY[a];
      if (b < 0) continue;
      ++pairs;
      ASSERT_EQ(m.yToX[b], static_cast<int>(a));
      ASSERT_TRUE(valid_match(vx, static_cast<int>(a), vy, b));
    }
    EXPECT_EQ(s.mapped, pairs + m.edges.size());
    for (auto [ex, ey] : m.edges) {
      const auto& e = pr.x.edges()[ex];
      const auto& f = pr.y.edges()[ey];
      EXPECT_EQ(e.type, f.type);
      EXPECT_EQ(m.xToY[e.from], f.from);
      EXPECT_EQ(m.xToY[e.to], f.to);
    }
  }
}

TEST(GraphMatcher, SymmetricFormIgnoresOrder) {
  std::mt19937_64 rng(21);
  for (int k = 0; k < 200; ++k) {
    auto pr = random_graph_pair(rng, 10);
    MatchView vx(pr.x), vy(pr.y);
    auto hx = structure_hash(pr.x), hy = structure_hash(pr.y);
    EXPECT_DOUBLE_EQ(sim_graph_symmetric(vx, hx, vy, hy).value, sim_graph_symmetric(vy, hy, vx, hx).value);
  }
}

TEST(GraphMatcher, NoReferencesNoScore) {
  Pidg a, b;
  a.add_node(data(NodeType::Value, "int"));
  b.add_node(data(NodeType::Value, "int"));
  EXPECT_EQ(sim_graph(a, b).mapped, 0u);
}

TEST(Hungarian, MatchesBruteForce) {
  std::mt19937_64 rng(17);
  std::uniform_int_distribution<int> dim(1, 6), val(-3, 9);
  for (int k = 0; k < 300; ++k) {
    int r = dim(rng), c = dim(rng);
    std::vector<std::vector<double>> w(r, std::vector<double>(c));
    for (auto& row : w)
      for (auto& x : row) x = val(rng);
    auto pick = hungarian(w);
    ASSERT_EQ(pick.size(), static_cast<std::size_t>(r));
    double got = 0;
    std::vector<bool> used(c, false);
    for (int i = 0; i < r; ++i) {
      if (pick[i] < 0) continue;
      ASSERT_FALSE(used[pick[i]]);
      used[pick[i]] = true;
      ASSERT_GT(w[i][pick[i]], 0);
      got += w[i][pick[i]];
    }
    EXPECT_DOUBLE_EQ(got, brute_assignment(w));
  }
}

TEST(Hungarian, ExactAssignmentNotBelowGreedyOnSelf) {
  MatchOptions exact;
  exact.exactAssignment = true;
  std::mt19937_64 rng(2);
  for (int k = 0; k < 100; ++k) {
    Pidg g = random_pidg(rng, 10);
    EXPECT_DOUBLE_EQ(sim_graph(g, g, exact).value, 1.0);
  }
}

TEST(ProgramScore, SelfAndSymmetry) {
  auto all = corpus_graphs();
  for (std::size_t i = 0; i < all.size(); ++i) {
    EXPECT_NEAR(sim_program(all[i], all[i]).value, 1.0, 1e-12) << i;
    std::size_t j = (i + 7) % all.size();
    EXPECT_DOUBLE_EQ(sim_program(all[i], all[j]).value, sim_program(all[j], all[i]).value);
  }
}

TEST(ProgramScore, EmptySide) {
  auto all = corpus_graphs();
  ProgramScore s = sim_program(all[0], {});
  EXPECT_EQ(s.value, 0.0);
  EXPECT_EQ(s.diagnostic, "EmptySide");
}

TEST(ProgramScore, FoldingKeepsMultiplicity) {
  auto all = corpus_graphs();
  std::vector<Pidg> doubled = all[0];
  doubled.insert(doubled.end(), all[0].begin(), all[0].end());
  PreparedProgram p(doubled);
  EXPECT_EQ(p.size(), doubled.size());
  EXPECT_LE(p.unique(), all[0].size());
  std::size_t total = 0;
  for (std::size_t u = 0; u < p.unique(); ++u) total += p.multiplicity(u);
  EXPECT_EQ(total, doubled.size());
  EXPECT_NEAR(sim_program(doubled, all[0]).value, 1.0, 1e-12);
}

TEST(ProgramScore, RenamedSourceScoresOne) {
  std::string a = R"(
class Shop {
    private int total;
    void add(int x) { total = total + x; }
    public static void main(String[] args) {
        Shop s = new Shop();
        s.add(args.length);
        System.out.println("total " + s.total);
    }
}
)";
  std::string b = R"(
class Till {
    private int sum;
    void put(int v) { sum = sum + v; }
    public static void main(String[] args) {
        Till t = new Till();
        t.put(args.length);
        System.out.println("total " + t.sum);
    }
}
)";
  EXPECT_NEAR(sim_program(graphs_of(a), graphs_of(b)).value, 1.0, 1e-12);
}

namespace {

Node op(const std::string& o) {
  Node n;
  n.type = NodeType::Operator;
  n.op = o;
  n.runtimeType = "int";
  return n;
}

}  // namespace

TEST(GraphMatcher, OnlyValidSeedPairs) {
  // X has one +, Y has + and -: a single seed, the - stays unmapped
  Pidg x, y;
  x.add_node(op("+"));
  x.add_node(data(NodeType::Value, "int"));
  x.add_edge(1, 0, EdgeType::Transformation);
  y.add_node(op("-"));
  y.add_node(op("+"));
  y.add_node(data(NodeType::Value, "int"));
  y.add_edge(2, 1, EdgeType::Transformation);
  NodeMapping m;
  sim_graph(x, y, {}, &m);
  ASSERT_EQ(m.seeds.size(), 1u);
  EXPECT_EQ(m.xToY[0], 1);
  EXPECT_EQ(m.yToX[0], -1);
}

TEST(GraphMatcher, MissingLeafLeavesOnlyItsPartner) {
  Pidg x;
  x.add_node(op("+"));
  x.add_node(data(NodeType::Value, "int"));
  x.add_node(data(NodeType::Value, "int", bsim::pidg::kConcrete));
  x.add_node(data(NodeType::Value, "int"));
  x.add_edge(1, 0, EdgeType::Transformation);
  x.add_edge(2, 0, EdgeType::Transformation);
  x.add_edge(0, 3, EdgeType::Transformation);
  Pidg y;
  y.add_node(op("+"));
  y.add_node(data(NodeType::Value, "int"));
  y.add_node(data(NodeType::Value, "int"));
  y.add_edge(1, 0, EdgeType::Transformation);
  y.add_edge(0, 2, EdgeType::Transformation);
  NodeMapping m;
  GraphScore s = sim_graph(x, y, {}, &m);
  EXPECT_EQ(m.xToY[2], -1);
  EXPECT_EQ(m.mapped_nodes(), 3u);
  EXPECT_EQ(s.mapped, 5u);
  EXPECT_DOUBLE_EQ(s.value, mcs_score(x, y).value);
}

TEST(GraphMatcher, SharedCoreMatchesOracle) {
  // common part: the +, one symbolic operand and one symbolic result with
  // their two edges; every other neighbour differs
  Pidg x;
  x.add_node(op("+"));
  x.add_node(data(NodeType::Value, "int"));
  x.add_node(data(NodeType::Value, "int"));
  x.add_node(data(NodeType::Value, "String"));
  x.add_node(data(NodeType::Object, "StringBuilder", bsim::pidg::kSynthetic));
  x.add_node(data(NodeType::Value, "int", bsim::pidg::kConcrete));
  x.add_edge(1, 0, EdgeType::Transformation);
  x.add_edge(3, 0, EdgeType::Transformation);
  x.add_edge(0, 2, EdgeType::Transformation);
  x.add_edge(4, 0, EdgeType::Transformation);
  x.add_edge(5, 0, EdgeType::Transformation);
  Pidg y;
  y.add_node(data(NodeType::Value, "int"));
  y.add_node(op("+"));
  y.add_node(data(NodeType::Array, "int[]", bsim::pidg::kConcrete));
  y.add_node(data(NodeType::Value, "int"));
  y.add_node(data(NodeType::Object, "Scanner", bsim::pidg::kSynthetic));
  y.add_node(data(NodeType::Value, "boolean"));
  y.add_edge(0, 1, EdgeType::Transformation);
  y.add_edge(1, 3, EdgeType::Transformation);
  y.add_edge(2, 1, EdgeType::Transformation);
  y.add_edge(4, 1, EdgeType::Transformation);
  y.add_edge(1, 5, EdgeType::Transformation);
  GraphScore h = sim_graph(x, y);
  EXPECT_EQ(h.mapped, 5u);
  EXPECT_DOUBLE_EQ(h.value, mcs_score(x, y).value);
}

TEST(GraphMatcher, DegreeZeroNodesOnlyRenormalise) {
  std::mt19937_64 rng(4);
  for (int k = 0; k < 50; ++k) {
    Pidg g = random_pidg(rng, 10);
    Pidg padded = g;
    for (int i = 0; i < 3; ++i) padded.add_node(data(NodeType::Value, "int", bsim::pidg::kStatic | bsim::pidg::kConcrete));
    GraphScore base = sim_graph(g, g), s = sim_graph(g, padded);
    EXPECT_EQ(s.mapped, base.mapped);
    EXPECT_DOUBLE_EQ(s.value, 2.0 * base.mapped / (base.sizeX + base.sizeY + 3));
  }
}

TEST(GraphMatcher, DisconnectedDataIsNeverMapped) {
  Pidg x;
  x.add_node(op("+"));
  x.add_node(data(NodeType::Value, "int"));
  x.add_edge(1, 0, EdgeType::Transformation);
  x.add_node(data(NodeType::Value, "String"));
  Pidg y = x;
  NodeMapping m;
  GraphScore s = sim_graph(x, y, {}, &m);
  EXPECT_EQ(m.xToY[2], -1);
  EXPECT_LT(s.value, 1.0);
}

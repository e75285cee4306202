#include <gtest/gtest.h>

#include "bsim/pidg/builder.hpp"
#include "bsim/pidg/pidg_json.hpp"
#include "test_util.hpp"

using namespace bsim::pidg;
using bsim::testsupport::components_touch_refs;
using bsim::testsupport::corpus_programs;
using bsim::testsupport::edge_count;
using bsim::testsupport::graphs_of;
using bsim::testsupport::node_count;
using bsim::testsupport::run_text;
using bsim::testsupport::slurp;
using bsim::testsupport::source_dir;

namespace {

Pidg hashpass_graph() {
  auto gs = graphs_of(slurp(source_dir() / "corpus/samples/hashpass/Main.src"), "hashPassword");
  EXPECT_EQ(gs.size(), 1u);
  return gs.at(0);
}

}  // namespace

TEST(Pidg, HashPasswordShape) {
  Pidg g = hashpass_graph();
  EXPECT_EQ(g.nodes().size(), 9u);
  EXPECT_EQ(node_count(g, NodeType::EntryPoint), 1);
  EXPECT_EQ(node_count(g, NodeType::Operator), 1);
  EXPECT_EQ(node_count(g, NodeType::MethodCall), 1);
  EXPECT_EQ(edge_count(g, EdgeType::Aggregation), 2);
  EXPECT_EQ(edge_count(g, EdgeType::Transformation), 3);
  EXPECT_EQ(edge_count(g, EdgeType::Scope), 1);
  EXPECT_EQ(edge_count(g, EdgeType::Supplied), 1);
  // one argument to hash plus the two entry parameters
  EXPECT_EQ(edge_count(g, EdgeType::Parameter), 3);
  EXPECT_EQ(g.edges().size(), 10u);

  // the operator sits between the two field reads and the hashed input
  int op = -1;
  for (const auto& n : g.nodes())
    if (n.type == NodeType::Operator) op = n.id;
  int in = 0, out = 0;
  for (int ei : g.incident(op)) {
    const Edge& e = g.edges()[ei];
    EXPECT_EQ(e.type, EdgeType::Transformation);
    (e.to == op ? in : out)++;
  }
  EXPECT_EQ(in, 2);
  EXPECT_EQ(out, 1);
}

TEST(Pidg, EntryParametersFlagged) {
  Pidg g = hashpass_graph();
  int flagged = 0;
  for (const auto& n : g.nodes()) flagged += (n.flags & kEntryPointParameter) != 0;
  EXPECT_EQ(flagged, 2);
  for (const auto& e : g.edges())
    if (e.to == g.entry()) EXPECT_EQ(e.type, EdgeType::Parameter);
}

TEST(Pidg, EdgesHaveSetSemantics) {
  Pidg g;
  Node a;
  a.type = NodeType::Value;
  Node b;
  b.type = NodeType::Operator;
  g.add_node(a);
  g.add_node(b);
  EXPECT_TRUE(g.add_edge(0, 1, EdgeType::Transformation));
  EXPECT_FALSE(g.add_edge(0, 1, EdgeType::Transformation));
  EXPECT_TRUE(g.add_edge(0, 1, EdgeType::Parameter));
  EXPECT_EQ(g.edges().size(), 2u);
  EXPECT_EQ(g.degree(0), 2u);
}

TEST(Pidg, OneGraphPerTrace) {
  for (const auto& s : corpus_programs()) {
    auto ts = bsim::executor::execute_program(bsim::frontend::resolve_program(s.units));
    EXPECT_EQ(build_pidg_set(ts).size(), ts.size()) << s.id;
  }
}

TEST(Pidg, StaticWriteIsFlaggedAndIsolated) {
  std::string src = R"(
class T {
    private static final int UNUSED = 17;
    public static void main(String[] args) {
        System.out.println(args.length + 1);
    }
}
)";
  auto gs = graphs_of(src);
  ASSERT_EQ(gs.size(), 1u);
  int isolated = 0;
  for (const auto& n : gs[0].nodes())
    if ((n.flags & kStatic) && gs[0].degree(n.id) == 0) ++isolated;
  EXPECT_EQ(isolated, 1);
  EXPECT_FALSE(components_touch_refs(gs[0]));
}

TEST(Pidg, CorpusComponentsTouchReferences) {
  for (const auto& s : corpus_programs()) {
    auto ts = bsim::executor::execute_program(bsim::frontend::resolve_program(s.units));
    for (const auto& g : build_pidg_set(ts)) EXPECT_TRUE(components_touch_refs(g)) << s.id;
  }
}

TEST(Pidg, ConcatStringifiesNonStringOperand) {
  std::string src = R"(
class T {
    public static void main(String[] args) {
        String s = "n=" + args.length;
        System.out.println(s);
    }
}
)";
  auto ts = run_text(src);
  int n = 0;
  for (const auto& e : ts[0].events) n += e.kind == bsim::executor::EventKind::Stringify;
  EXPECT_EQ(n, 1);
  Pidg g = build_pidg(ts[0]);
  EXPECT_GE(edge_count(g, EdgeType::Transformation), 2);
}

TEST(Pidg, MalformedTraceRejected) {
  bsim::executor::ExecutionTrace t;
  t.entry = "T.main(String[])";
  bsim::executor::TraceEvent e;
  e.kind = bsim::executor::EventKind::StringConcat;
  e.operands = {3, 4};
  e.result = 5;
  t.events.push_back(e);
  EXPECT_THROW(build_pidg(t), MalformedTrace);
}

TEST(PidgJson, RoundTripIsByteStable) {
  for (const auto& s : corpus_programs()) {
    auto gs = build_pidg_set(bsim::executor::execute_program(bsim::frontend::resolve_program(s.units)));
    std::string text = pidgs_to_json(gs).dump();
    auto back = pidgs_from_json(nlohmann::ordered_json::parse(text));
    ASSERT_EQ(back.size(), gs.size());
    for (std::size_t i = 0; i < gs.size(); ++i) EXPECT_TRUE(back[i] == gs[i]) << s.id;
    EXPECT_EQ(pidgs_to_json(back).dump(), text);
  }
}

TEST(PidgJson, RejectsBadDocuments) {
  EXPECT_THROW(pidg_from_json(nlohmann::ordered_json{{"schema", "bsim-pidg/9"}}), SchemaError);
  auto doc = pidg_to_json(hashpass_graph());
  doc["edges"][0]["to"] = 99;
  EXPECT_ANY_THROW(pidg_from_json(doc));
}

TEST(PidgDot, MentionsEveryNode) {
  std::string dot = pidg_to_dot(hashpass_graph());
  EXPECT_NE(dot.find("digraph"), std::string::npos);
  EXPECT_NE(dot.find("n8"), std::string::npos);
}

#include <gtest/gtest.h>

#include <algorithm>

#include "bsim/executor/executor.hpp"
#include "bsim/executor/trace_json.hpp"
#include "test_util.hpp"

using namespace bsim::executor;
using bsim::testsupport::corpus_programs;
using bsim::testsupport::run_text;
using bsim::testsupport::slurp;
using bsim::testsupport::source_dir;

namespace {

int count_ops(const ExecutionTrace& t, const std::string& op) {
  return static_cast<int>(std::count_if(t.events.begin(), t.events.end(), [&](const TraceEvent& e) {
    return e.kind == EventKind::PrimaryOperation && e.name == op;
  }));
}

const char* kLoop = R"(
class T {
    public static void main(String[] args) {
        int sum = 0;
        for (int i = 0; i < 10; i++) {
            sum = sum + i;
        }
        System.out.println(sum);
    }
}
)";

const char* kBranch = R"(
class T {
    public static void main(String[] args) {
        if (args.length > 0) {
            System.out.println("some");
        } else {
            System.out.println("none");
        }
    }
}
)";

}  // namespace

TEST(Executor, HashPasswordEvents) {
  auto ts = run_text(slurp(source_dir() / "corpus/samples/hashpass/Main.src"), "hashPassword");
  ASSERT_EQ(ts.size(), 1u);
  const auto& t = ts[0];
  EXPECT_EQ(t.entry, "Main.hashPassword(User,HashFunction)");
  ASSERT_EQ(t.params.size(), 2u);
  ASSERT_EQ(t.events.size(), 4u);
  EXPECT_EQ(t.events[0].kind, EventKind::FieldAccess);
  EXPECT_EQ(t.events[0].name, "password");
  EXPECT_EQ(t.events[0].scope, t.params[0]);
  EXPECT_EQ(t.events[1].name, "salt");
  EXPECT_EQ(t.events[2].kind, EventKind::StringConcat);
  EXPECT_EQ(t.events[3].kind, EventKind::ApiCall);
  EXPECT_EQ(t.events[3].signature, "HashFunction.hash/1");
  EXPECT_EQ(t.events[3].scope, t.params[1]);
  EXPECT_EQ(t.events[3].operands, std::vector<DatumId>{t.events[2].result});
  EXPECT_EQ(t.termination, Termination::Normal);
}

TEST(Executor, LoopBoundCapsIterations) {
  for (int bound : {1, 3, 5}) {
    ExecutorLimits l;
    l.loopBound = bound;
    auto ts = run_text(kLoop, {}, l);
    ASSERT_EQ(ts.size(), 1u);
    // per iteration: the test, the body's addition and the update
    EXPECT_EQ(count_ops(ts[0], "<"), bound);
    EXPECT_EQ(count_ops(ts[0], "+"), 2 * bound);
  }
}

TEST(Executor, ConcreteLoopBelowBoundRunsFully) {
  std::string src = R"(
class T {
    public static void main(String[] args) {
        int s = 0;
        for (int i = 0; i < 2; i++) { s = s + i; }
        System.out.println(s + args.length);
    }
}
)";
  auto ts = run_text(src);
  ASSERT_EQ(ts.size(), 1u);
  EXPECT_EQ(count_ops(ts[0], "<"), 3);  // the failing third test is evaluated
}

TEST(Executor, SymbolicBranchForksTrueFirst) {
  auto ts = run_text(kBranch);
  ASSERT_EQ(ts.size(), 2u);
  auto truth = [](const ExecutionTrace& t) {
    for (const auto& e : t.events)
      if (e.kind == EventKind::Assertion) return e.truth;
    ADD_FAILURE() << "no assertion";
    return false;
  };
  EXPECT_TRUE(truth(ts[0]));
  EXPECT_FALSE(truth(ts[1]));
}

TEST(Executor, BudgetStopsForking) {
  ExecutorLimits l;
  l.contextBudget = 1;
  auto ts = run_text(kBranch, {}, l);
  ASSERT_EQ(ts.size(), 1u);
  EXPECT_EQ(ts[0].termination, Termination::Budget);
}

TEST(Executor, RecursionBoundSkipsDeepCalls) {
  std::string src = R"(
class T {
    static int down(int n) {
        return down(n - 1) + 1;
    }
    public static void main(String[] args) {
        System.out.println(down(5));
    }
}
)";
  for (int bound : {1, 2, 4}) {
    ExecutorLimits l;
    l.recursionBound = bound;
    auto ts = run_text(src, {}, l);
    ASSERT_EQ(ts.size(), 1u);
    EXPECT_EQ(ts[0].termination, Termination::Normal);
    EXPECT_EQ(count_ops(ts[0], "-"), bound);
  }
}

TEST(Executor, InstructionLimit) {
  ExecutorLimits l;
  l.instructionLimit = 10;
  auto ts = run_text(kLoop, {}, l);
  ASSERT_EQ(ts.size(), 1u);
  EXPECT_EQ(ts[0].termination, Termination::Limit);
}

TEST(Executor, NullDereferenceFaults) {
  std::string src = R"(
class U {
    int v;
}
class T {
    public static void main(String[] args) {
        U u = null;
        System.out.println(u.v + args.length);
    }
}
)";
  auto ts = run_text(src);
  ASSERT_EQ(ts.size(), 1u);
  EXPECT_EQ(ts[0].termination, Termination::Fault);
}

TEST(Executor, StaticInitialisersRecordWrites) {
  std::string src = R"(
class T {
    static int count = 4;
    public static void main(String[] args) {
        System.out.println(count + args.length);
    }
}
)";
  auto ts = run_text(src);
  ASSERT_FALSE(ts[0].events.empty());
  const auto& e = ts[0].events[0];
  EXPECT_EQ(e.kind, EventKind::FieldAccess);
  EXPECT_TRUE(e.write);
  EXPECT_EQ(e.name, "count");
  EXPECT_EQ(ts[0].find(e.datum)->literal, "4");
}

TEST(Executor, ApiReturnsAreSynthetic) {
  std::string src = R"(
class T {
    public static void main(String[] args) {
        String s = "abc";
        int n = s.length();
        System.out.println(n);
    }
}
)";
  auto ts = run_text(src);
  auto it = std::find_if(ts[0].events.begin(), ts[0].events.end(),
                         [](const TraceEvent& e) { return e.kind == EventKind::ApiCall; });
  ASSERT_NE(it, ts[0].events.end());
  EXPECT_EQ(it->signature, "String.length/0");
  const DatumInfo* r = ts[0].find(it->result);
  ASSERT_NE(r, nullptr);
  EXPECT_EQ(r->mode, Mode::Symbolic);
}

TEST(Executor, RejectsNonPositiveLimits) {
  ExecutorLimits l;
  l.loopBound = 0;
  EXPECT_THROW(run_text(kLoop, {}, l), ExecutionError);
}

TEST(Executor, Deterministic) {
  for (const auto& s : corpus_programs()) {
    auto p = bsim::frontend::resolve_program(s.units);
    auto a = execute_program(p);
    auto b = execute_program(p);
    ASSERT_EQ(a.size(), b.size()) << s.id;
    for (std::size_t i = 0; i < a.size(); ++i) {
      EXPECT_EQ(a[i].events, b[i].events) << s.id;
      EXPECT_EQ(a[i].data, b[i].data) << s.id;
    }
  }
}

TEST(TraceJson, RoundTrip) {
  for (const auto& s : corpus_programs()) {
    auto ts = execute_program(bsim::frontend::resolve_program(s.units));
    auto doc = traces_to_json(ts);
    auto back = traces_from_json(nlohmann::ordered_json::parse(doc.dump()));
    ASSERT_EQ(back.size(), ts.size());
    for (std::size_t i = 0; i < ts.size(); ++i) {
      EXPECT_EQ(back[i].entry, ts[i].entry);
      EXPECT_EQ(back[i].params, ts[i].params);
      EXPECT_EQ(back[i].events, ts[i].events);
      EXPECT_EQ(back[i].data, ts[i].data);
      EXPECT_EQ(back[i].termination, ts[i].termination);
    }
    EXPECT_EQ(traces_to_json(back).dump(), doc.dump());
  }
}

TEST(TraceJson, RejectsWrongSchema) {
  nlohmann::ordered_json doc = {{"schema", "other/1"}, {"traces", nlohmann::ordered_json::array()}};
  EXPECT_THROW(traces_from_json(doc), TraceSchemaError);
}

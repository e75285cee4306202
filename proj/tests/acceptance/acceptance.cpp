// Runs the ten acceptance checks and prints one PASS/FAIL line for each.
// Exit status is the number of failures.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "bsim/harness/error_count.hpp"
#include "bsim/harness/experiments.hpp"
#include "bsim/harness/pipeline.hpp"
#include "bsim/matcher/program_score.hpp"
#include "mcs_oracle.hpp"
#include "program_gen.hpp"
#include "test_util.hpp"

using namespace bsim;
using namespace bsim::harness;
using bsim::pidg::EdgeType;
using bsim::pidg::NodeType;
namespace ts = bsim::testsupport;

namespace {

using Clock = std::chrono::steady_clock;

struct Outcome {
  bool ok = false;
  std::string detail;
};

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

const RobustnessRow* row(const RobustnessTable& t, const std::string& mode, int level) {
  for (const auto& r : t.rows)
    if (r.mode == mode && r.level == level) return &r;
  return nullptr;
}

// Shared by 3, 4, 5 and 9.
ExperimentParams robustness_params(int jobs) {
  ExperimentParams p;
  p.levels = {1, 2, 3, 4, 5};
  p.chances = {60};
  for (int l : p.levels) p.countsPerLevel[l] = 3;  // 20 bases -> 60 variants per level
  p.seed = 2024;
  p.excludeModes = {false, true};
  p.jobs = jobs;
  return p;
}

ExperimentParams accuracy_params(int jobs) {
  ExperimentParams p;
  p.levels = {1, 2};
  p.chances = {20, 60, 100};
  p.countsPerLevel = {{1, 3}, {2, 3}};
  p.seed = 2024;
  p.excludeModes = {false};
  p.jobs = jobs;
  return p;
}

std::vector<Submission> programs() { return ts::corpus_programs(); }

RobustnessTable& robustness() {
  static RobustnessTable t = run_robustness(programs(), robustness_params(default_jobs()));
  return t;
}

AccuracyTable& accuracy() {
  static AccuracyTable t = run_accuracy(programs(), programs(), {}, accuracy_params(default_jobs()));
  return t;
}

Outcome c1_worked_example() {
  auto gs = ts::graphs_of(ts::slurp(ts::source_dir() / "corpus/samples/hashpass/Main.src"), "hashPassword");
  if (gs.size() != 1) return {false, std::to_string(gs.size()) + " graphs"};
  const auto& g = gs[0];
  int entryParams = 0, opTransform = 0;
  for (const auto& e : g.edges()) {
    if (e.to == g.entry() && e.type == EdgeType::Parameter) ++entryParams;
    bool touchesOp = g.node(e.from).type == NodeType::Operator || g.node(e.to).type == NodeType::Operator;
    if (touchesOp && e.type == EdgeType::Transformation) ++opTransform;
  }
  bool ok = g.nodes().size() == 9 && ts::node_count(g, NodeType::Operator) == 1 &&
            ts::edge_count(g, EdgeType::Aggregation) == 2 && ts::edge_count(g, EdgeType::Transformation) == 3 &&
            opTransform == 3 && ts::edge_count(g, EdgeType::Scope) == 1 &&
            ts::edge_count(g, EdgeType::Supplied) == 1 && entryParams == 2 &&
            ts::edge_count(g, EdgeType::Parameter) == 1 + entryParams;
  std::ostringstream os;
  os << g.nodes().size() << " nodes, aggregation " << ts::edge_count(g, EdgeType::Aggregation) << ", transformation "
     << opTransform << " at the operator, parameter " << ts::edge_count(g, EdgeType::Parameter) - entryParams
     << " + " << entryParams << " entry, scope " << ts::edge_count(g, EdgeType::Scope) << ", supplied "
     << ts::edge_count(g, EdgeType::Supplied);
  return {ok, os.str()};
}

Outcome c2_self() {
  auto subs = programs();
  int bad = 0, untouched = 0;
  double worst = 0;
  for (const auto& s : subs) {
    Analysis a = analyze(s);
    for (const auto& g : a.graphs) untouched += !ts::components_touch_refs(g);
    double v = matcher::sim_program(a.prepared, a.prepared).value;
    worst = std::max(worst, std::abs(v - 1.0));
    bad += std::abs(v - 1.0) > 1e-9;
  }
  return {subs.size() == 20 && bad == 0 && untouched == 0,
          std::to_string(subs.size()) + " programs, max |sim-1| " + fmt("%.2e", worst) + ", graphs with a component off the references " +
              std::to_string(untouched)};
}

Outcome c3_lexical() {
  auto& t = robustness();
  bool ok = !t.partial;
  std::string d;
  for (int l : {1, 2}) {
    const auto* r = row(t, "all", l);
    if (!r) return {false, "missing row"};
    ok = ok && r->variants >= 50 && r->meanDrop <= 2.0;
    d += "L" + std::to_string(l) + " " + fmt("%.2f", r->meanDrop) + " over " + std::to_string(r->variants) + "  ";
  }
  return {ok, d};
}

Outcome c4_structural() {
  auto& t = robustness();
  bool ok = !t.partial;
  std::string d;
  double prev = -1e9;
  for (int l : {3, 4, 5}) {
    const auto* r = row(t, "excluded", l);
    if (!r) return {false, "missing row"};
    ok = ok && r->variants >= 50 && r->meanDrop <= 6.0 && r->meanDrop >= prev - 1.0;
    prev = r->meanDrop;
    d += "L" + std::to_string(l) + " " + fmt("%.2f", r->meanDrop) + "  ";
  }
  return {ok, d};
}

Outcome c5_injection() {
  auto& t = robustness();
  const auto* all = row(t, "all", 3);
  const auto* ex = row(t, "excluded", 3);
  if (!all || !ex) return {false, "missing row"};
  double gap = all->meanDrop - ex->meanDrop;
  return {gap >= 5.0, "L3 " + fmt("%.2f", all->meanDrop) + " vs excluded " + fmt("%.2f", ex->meanDrop) + ", gap " +
                          fmt("%.2f", gap)};
}

Outcome c6_accuracy() {
  auto& t = accuracy();
  int errors = 0;
  for (const auto& r : t.rows) errors += r.count.errors;
  return {!t.partial && t.innocentIds.size() >= 20 && t.rows.size() == 6 && errors == 0,
          std::to_string(t.innocentIds.size()) + " innocent, " + std::to_string(t.innocentPairs) + " pairs, max " +
              fmt("%.4f", t.maxInnocent) + ", " + std::to_string(errors) + " errors over " +
              std::to_string(t.rows.size()) + " cells"};
}

Outcome c7_oracle() {
  std::mt19937_64 rng(7);
  int below = 0, equal = 0;
  const int n = 500;
  for (int k = 0; k < n; ++k) {
    auto pr = ts::random_graph_pair(rng, 10);
    double h = matcher::sim_graph(pr.x, pr.y).value;
    double o = ts::mcs_score(pr.x, pr.y).value;
    below += h <= o + 1e-12;
    equal += std::abs(h - o) <= 1e-12;
  }
  return {below == n && equal * 10 >= n * 6,
          "heuristic <= exhaustive " + std::to_string(below) + "/" + std::to_string(n) + ", equal " +
              std::to_string(equal) + "/" + std::to_string(n)};
}

Outcome c8_error_count() {
  std::mt19937_64 rng(8);
  std::uniform_int_distribution<int> len(2, 40), grid(0, 20), coin(0, 1);
  int same = 0;
  const int n = 1000;
  for (int k = 0; k < n; ++k) {
    std::vector<LabelledScore> v;
    int m = len(rng);
    for (int i = 0; i < m; ++i) v.push_back({grid(rng) / 20.0, coin(rng) ? Label::Plagiarised : Label::Innocent});
    v[0].label = Label::Innocent;
    v[1].label = Label::Plagiarised;
    ErrorCount a = count_errors(v), b = count_errors_brute_force(v);
    same += a.errors == b.errors && a.threshold == b.threshold;
  }
  return {same == n, std::to_string(same) + "/" + std::to_string(n) + " identical"};
}

Outcome c9_determinism() {
  // second run uses one worker so scheduling differences would show up
  std::string r1 = robustness_to_json(robustness(), robustness_params(default_jobs())).dump(2);
  std::string r2 = robustness_to_json(run_robustness(programs(), robustness_params(1)), robustness_params(1)).dump(2);
  std::string a1 = accuracy_to_json(accuracy(), accuracy_params(default_jobs())).dump(2);
  std::string a2 = accuracy_to_json(run_accuracy(programs(), programs(), {}, accuracy_params(1)), accuracy_params(1)).dump(2);
  CompareOptions o1, o2;
  o1.jobs = default_jobs();
  o2.jobs = 1;
  std::string m1 = matrix_to_csv(compare_submissions(programs(), o1));
  std::string m2 = matrix_to_csv(compare_submissions(programs(), o2));
  bool ok = r1 == r2 && a1 == a2 && m1 == m2;
  return {ok, "robustness " + std::to_string(r1.size()) + " B, accuracy " + std::to_string(a1.size()) + " B, matrix " +
                  std::to_string(m1.size()) + " B"};
}

Outcome c10_throughput() {
  std::vector<Submission> subs;
  int seed = 1;
  for (int lines : {300, 550, 800, 1000}) {
    std::string text = ts::random_program(seed++, lines);
    subs.push_back({"gen" + std::to_string(lines), {{"Main.src", text}}, std::nullopt});
  }
  std::string sizes;
  for (const auto& s : subs) {
    int n = 0;
    for (char c : s.units[0].text) n += c == '\n';
    sizes += std::to_string(n) + " ";
  }
  auto rows = time_pairs(subs);
  double sum = 0, worst = 0;
  for (const auto& r : rows) {
    sum += r.total;
    worst = std::max(worst, r.total);
  }
  double mean = rows.empty() ? 0 : sum / rows.size();
  return {!rows.empty() && mean <= 10.0, "lines " + sizes + "| " + std::to_string(rows.size()) + " pairs, mean " +
                                             fmt("%.2f", mean) + " s, max " + fmt("%.2f", worst) + " s"};
}

}  // namespace

int main() {
  std::vector<std::pair<std::string, std::function<Outcome()>>> checks = {
      {"worked example graph", c1_worked_example},
      {"self-similarity on 20 programs", c2_self},
      {"L1/L2 drop at 60%", c3_lexical},
      {"L3-L5 drop without value injection", c4_structural},
      {"value injection sensitivity", c5_injection},
      {"L1/L2 accuracy floor", c6_accuracy},
      {"matcher vs exhaustive search", c7_oracle},
      {"error count vs brute force", c8_error_count},
      {"report determinism", c9_determinism},
      {"per-pair time on 300-1000 line programs", c10_throughput},
  };
  int failed = 0;
  for (std::size_t i = 0; i < checks.size(); ++i) {
    auto t0 = Clock::now();
    Outcome o;
    try {
      o = checks[i].second();
    } catch (const std::exception& e) {
      o = {false, std::string("threw: ") + e.what()};
    }
    double secs = std::chrono::duration<double>(Clock::now() - t0).count();
    failed += !o.ok;
    std::printf("%s %2zu  %-42s %s (%.1fs)\n", o.ok ? "PASS" : "FAIL", i + 1, checks[i].first.c_str(),
                o.detail.c_str(), secs);
    std::fflush(stdout);
  }
  std::printf("%d/%zu passed\n", static_cast<int>(checks.size()) - failed, checks.size());
  return failed;
}

#pragma once

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "bsim/executor/executor.hpp"
#include "bsim/frontend/parser.hpp"
#include "bsim/frontend/resolver.hpp"
#include "bsim/harness/submission.hpp"
#include "bsim/pidg/builder.hpp"

namespace bsim::testsupport {

inline std::filesystem::path source_dir() { return BSIM_SOURCE_DIR; }

inline std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline std::vector<frontend::SourceUnit> one_unit(const std::string& text, const std::string& path = "Main.src") {
  return {{path, text}};
}

inline std::vector<executor::ExecutionTrace> run_text(const std::string& text, const std::string& entry = {},
                                                      const executor::ExecutorLimits& limits = {}) {
  std::optional<std::string> e;
  if (!entry.empty()) e = entry;
  auto p = frontend::resolve_program(one_unit(text), e);
  return executor::execute_program(p, limits);
}

inline std::vector<pidg::Pidg> graphs_of(const std::string& text, const std::string& entry = {}) {
  return pidg::build_pidg_set(run_text(text, entry));
}

inline int edge_count(const pidg::Pidg& g, pidg::EdgeType t) {
  int n = 0;
  for (const auto& e : g.edges()) n += e.type == t;
  return n;
}

inline int node_count(const pidg::Pidg& g, pidg::NodeType t) {
  int n = 0;
  for (const auto& v : g.nodes()) n += v.type == t;
  return n;
}

// Every weakly connected component holds an Operator or MethodCall node.
inline bool components_touch_refs(const pidg::Pidg& g) {
  std::size_t n = g.nodes().size();
  std::vector<int> comp(n, -1);
  int c = 0;
  for (std::size_t s = 0; s < n; ++s) {
    if (comp[s] >= 0) continue;
    std::vector<int> stack{static_cast<int>(s)};
    comp[s] = c;
    bool ref = false;
    while (!stack.empty()) {
      int v = stack.back();
      stack.pop_back();
      auto t = g.node(v).type;
      ref = ref || t == pidg::NodeType::Operator || t == pidg::NodeType::MethodCall;
      for (int ei : g.incident(v)) {
        const auto& e = g.edges()[ei];
        int w = e.from == v ? e.to : e.from;
        if (comp[w] < 0) {
          comp[w] = c;
          stack.push_back(w);
        }
      }
    }
    if (!ref) return false;
    ++c;
  }
  return true;
}

// corpus/programs, sorted by id.
inline std::vector<harness::Submission> corpus_programs() {
  return harness::load_corpus(source_dir() / "corpus" / "programs").submissions;
}

}  // namespace bsim::testsupport

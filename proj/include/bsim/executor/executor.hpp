#pragma once

#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "bsim/executor/compiler.hpp"
#include "bsim/executor/datum.hpp"
#include "bsim/executor/trace.hpp"
#include "bsim/frontend/resolver.hpp"

namespace bsim::executor {

class ExecutionError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Frame {
  int method = -1;
  int pc = 0;
  int flags = 0;  // InvokeFlag of the call that created the frame
  std::vector<DatumId> stack;
  std::vector<DatumId> locals;
  std::vector<int> loops;
};

// All state of one execution path. Plain values throughout, so a copy is a
// fully independent fork.
struct ExecutionContext {
  std::vector<Frame> frames;
  std::vector<Datum> heap;  // indexed by DatumId
  std::vector<std::pair<std::string, DatumId>> statics;
  std::vector<TraceEvent> events;
  long steps = 0;
  bool budgetHit = false;

  Datum& at(DatumId id) { return heap.at(id); }
  const Datum& at(DatumId id) const { return heap.at(id); }
  DatumId static_slot(const std::string& key) const {
    for (const auto& [k, v] : statics)
      if (k == key) return v;
    return kNoDatum;
  }
  void set_static(const std::string& key, DatumId v) {
    for (auto& [k, old] : statics)
      if (k == key) {
        old = v;
        return;
      }
    statics.emplace_back(key, v);
  }
};

// Splits `ctx` at a branch on the symbolic boolean `cond`: the first result
// asserts it true, the second false.
std::pair<ExecutionContext, ExecutionContext> fork_context(const ExecutionContext& ctx, DatumId cond);

// One trace per explored path per entry point, entries in declaration order,
// paths depth-first with the true branch first.
std::vector<ExecutionTrace> execute_program(const frontend::ResolvedProgram& program,
                                            const ExecutorLimits& limits = {});

std::vector<ExecutionTrace> execute_entry(const frontend::ResolvedProgram& program, const CompiledProgram& compiled,
                                          frontend::MethodRef entry, const ExecutorLimits& limits = {});

}  // namespace bsim::executor

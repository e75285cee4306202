#pragma once

#include <string>
#include <vector>

#include "bsim/executor/datum.hpp"

namespace bsim::executor {

enum class EventKind {
  ApiCall,
  FieldAccess,
  ArrayAccess,
  PrimaryOperation,
  StringConcat,
  Stringify,
  Assertion,
};

const char* to_string(EventKind k);

// One recorded event. Which members are meaningful depends on `kind`:
//   ApiCall           signature, scope?, operands (params), result?
//   FieldAccess       write, staticType?, scope?, name, datum
//   ArrayAccess       write, scope, index, datum
//   PrimaryOperation  name (operator), operands (lhs[, rhs]), result
//   StringConcat      operands, result
//   Stringify         operands[0], result
//   Assertion         operands[0] (condition), truth
struct TraceEvent {
  EventKind kind = EventKind::Assertion;
  std::string signature;
  std::string name;
  std::string staticType;
  bool write = false;
  bool truth = false;
  DatumId scope = kNoDatum;
  DatumId index = kNoDatum;
  DatumId datum = kNoDatum;
  DatumId result = kNoDatum;
  std::vector<DatumId> operands;

  friend bool operator==(const TraceEvent&, const TraceEvent&) = default;
};

enum class Termination { Normal, Budget, Limit, Fault };

const char* to_string(Termination t);

// Snapshot of a datum as referenced by a trace.
struct DatumInfo {
  DatumId id = kNoDatum;
  DatumKind kind = DatumKind::Unknown;
  Mode mode = Mode::Symbolic;
  std::string type;
  std::string literal;  // concrete Values
  std::string text;     // concrete Strings
  bool hasText = false;
  bool sourceDefined = false;
  bool isNull = false;
  std::uint8_t flags = 0;

  friend bool operator==(const DatumInfo&, const DatumInfo&) = default;
};

struct ExecutionTrace {
  std::string entry;  // "Class.method(T1,T2)"
  std::vector<DatumId> params;
  std::vector<TraceEvent> events;
  std::vector<DatumInfo> data;  // every datum of the path, indexed by id
  Termination termination = Termination::Normal;
  std::string diagnostic;

  const DatumInfo* find(DatumId id) const {
    if (id < 0 || static_cast<std::size_t>(id) >= data.size()) return nullptr;
    return &data[id];
  }
};

struct ExecutorLimits {
  int loopBound = 3;
  int recursionBound = 2;
  int contextBudget = 4096;
  long instructionLimit = 2'000'000;
};

}  // namespace bsim::executor
